use super::base::BaseManifold;
use crate::config::ModelConfig;
use crate::error::{GeoError, Result};
use crate::geodesics::{foliation_geodesic, integrate_geodesic};

/// `(vol_{m+1}(Mₙ), vol_m(∂Mₙ)) = (2n vol(M), 2 vol(M))` for the strip
/// `Mₙ = M × c([−n, n])` along a unit-speed leaf geodesic `c`.
pub fn isoperimetric_ratio(n: u32, base: &BaseManifold) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(GeoError::InvalidArgument("strip half-length must be at least 1".into()));
    }
    base.check()?;
    let vol = base.volume();
    Ok((2.0 * n as f64 * vol, 2.0 * vol))
}

/// Length of the integrated foliation geodesic over `[−n, n]`.
pub fn strip_core_length(n: u32, cfg: &ModelConfig) -> Result<f64> {
    let start = foliation_geodesic(-(n as f64), 0.0, 0.0, cfg);
    Ok(integrate_geodesic(start, 2.0 * n as f64, cfg)?.length())
}
