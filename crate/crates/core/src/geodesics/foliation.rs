use std::f64::consts::{FRAC_PI_4, TAU};

use super::integrate::GeodesicState;
use crate::config::ModelConfig;
use crate::metric::ChartPoint;

/// The unit-speed leaf `t ↦ F(1, π/4, φ₀ + t/a, θ₀ + αt/a)` with
/// `a = sqrt((1 + α²)/2)`, i.e. the flow of `Ȳ = Y / |Y|` on the Clifford torus.
pub fn foliation_geodesic(t: f64, phi0: f64, theta0: f64, cfg: &ModelConfig) -> GeodesicState {
    let a = cfg.leaf_speed();
    GeodesicState::Chart {
        position: ChartPoint::new(1.0, FRAC_PI_4, phi0 + t / a, theta0 + cfg.alpha * t / a),
        velocity: [0.0, 0.0, 1.0 / a, cfg.alpha / a],
    }
}

/// Smallest `(φ, θ)` distance, modulo `2π`, between two points of the leaf
/// whose parameters differ by at most `t_max`. In the covering plane this is
/// the distance from the segment `s ↦ (s, αs)/a`, `0 < s ≤ t_max`, to the
/// nonzero points of `2πℤ²`.
pub fn leaf_return_gap(t_max: f64, cfg: &ModelConfig) -> f64 {
    let a = cfg.leaf_speed();
    let alpha = cfg.alpha;
    let dir = [1.0 / a, alpha / a];
    let norm = dir[0].hypot(dir[1]);
    let q_max = (t_max * dir[0] / TAU).ceil() as i64 + 1;
    let p_max = (t_max * dir[1] / TAU).ceil() as i64 + 1;
    let mut best = f64::INFINITY;
    for q in 0..=q_max {
        let centre = (q as f64 * alpha).round() as i64;
        let lo = if q == 0 { -p_max } else { centre - 1 };
        let hi = if q == 0 { p_max } else { centre + 1 };
        for p in lo..=hi {
            if q == 0 && p == 0 {
                continue;
            }
            let z = [TAU * q as f64, TAU * p as f64];
            let s = ((z[0] * dir[0] + z[1] * dir[1]) / (norm * norm)).clamp(1e-300, t_max);
            best = best.min((z[0] - s * dir[0]).hypot(z[1] - s * dir[1]));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::chart_to_ambient;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn starts_on_torus_with_unit_speed() {
        let cfg = ModelConfig::default();
        let s = foliation_geodesic(0.0, 0.4, 1.3, &cfg);
        let (p, _) = s.chart().unwrap();
        assert_eq!(p, ChartPoint::on_torus(0.4, 1.3));
        assert!((s.energy(&cfg) - 1.0).abs() < 1e-12);
        let x = chart_to_ambient(&p);
        assert!((x.x[0].hypot(x.x[1]) - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn energy_is_constant_along_the_leaf() {
        let cfg = ModelConfig::default();
        for i in 0..1000 {
            let s = foliation_geodesic(i as f64 * 0.731, 0.0, 0.0, &cfg);
            assert!((s.energy(&cfg) - 1.0).abs() < 1e-12);
        }
    }

    /// Brute scan over the covering plane: the leaf never comes back to its
    /// start in `(φ, θ)` for `0 < t ≤ 10⁴`. Near-returns are at times `2π q a`
    /// where `q` winds in `φ`; the `θ` mismatch is `2π dist(qα, ℤ)`.
    #[test]
    fn irrational_leaf_never_closes_on_finite_horizon() {
        let cfg = ModelConfig::default();
        let a = cfg.leaf_speed();
        let q_max = (1e4 / (TAU * a)).floor() as u64;
        let mut closest = f64::INFINITY;
        for q in 1..=q_max {
            let x = q as f64 * cfg.alpha;
            closest = closest.min((x - x.round()).abs());
        }
        assert!(closest * TAU > 1e-3, "{closest}");
        let gap = leaf_return_gap(1e4, &cfg);
        assert!(gap > 1e-3 && gap <= closest * TAU, "{gap}");
    }

    #[test]
    fn rational_leaf_returns() {
        let cfg = ModelConfig::rational_control(1.0);
        assert!(leaf_return_gap(10.0, &cfg) < 1e-12);
        assert!(leaf_return_gap(6.0, &cfg) > 0.1);
    }
}
