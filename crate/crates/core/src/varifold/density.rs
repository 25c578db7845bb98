use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::v0::VarifoldV0;
use crate::error::{GeoError, Result};

/// Nodes needed inside the smallest ball for a trustworthy count.
const MIN_BALL_NODES: u64 = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityScaling {
    pub base_dim: usize,
    pub radii: Vec<f64>,
    pub nodes: Vec<u64>,
    pub masses: Vec<f64>,
    /// `μ(B_r) / r^{m+1}`.
    pub ratios: Vec<f64>,
    /// Least-squares slope of `log μ(B_r)` against `log r`.
    pub exponent: f64,
    /// The ratios decrease strictly as the radius shrinks.
    pub ratios_decrease: bool,
}

/// Squared periodic distances from `c` to the `n` grid points of a circle of
/// length `len`, scaled by `w`, sorted.
fn offsets(n: usize, len: f64, c: f64, w: f64) -> Vec<f64> {
    let mut d: Vec<f64> = (0..n)
        .map(|j| {
            let x = (len * j as f64 / n as f64 - c).rem_euclid(len);
            let x = x.min(len - x);
            w * x * x
        })
        .collect();
    d.sort_by(f64::total_cmp);
    d
}

fn count_within(lists: &[Vec<f64>], budget: f64) -> u64 {
    match lists.split_first() {
        None => 1,
        Some((last, [])) => last.partition_point(|&x| x <= budget) as u64,
        Some((head, rest)) => {
            let mut total = 0;
            for &x in head {
                if x > budget {
                    break;
                }
                total += count_within(rest, budget - x);
            }
            total
        }
    }
}

/// Node count and `μ_{V₀}` of the closed ball of radius `r` about node
/// `center`, for the flat product distance on `M × T²`. The Clifford torus
/// carries `½(dφ² + dθ²)`.
pub fn ball_mass(v0: &VarifoldV0, center: usize, r: f64) -> (u64, f64) {
    let c = v0.node(center);
    let n = v0.torus_resolution;
    let mut lists: Vec<Vec<f64>> = v0
        .base
        .sides()
        .iter()
        .enumerate()
        .map(|(d, &len)| offsets(v0.base.resolution, len, c.base[d], 1.0))
        .collect();
    lists.push(offsets(n, TAU, c.phi, 0.5));
    lists.push(offsets(n, TAU, c.theta, 0.5));
    let nodes = count_within(&lists, r * r);
    (nodes, nodes as f64 * v0.weight())
}

/// Measure `μ(B_r(center))` over `radii` and fit the growth exponent.
/// Fails when the smallest ball holds fewer than 100 nodes.
pub fn density_scaling(v0: &VarifoldV0, center: usize, radii: &[f64]) -> Result<DensityScaling> {
    if radii.len() < 2 || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(GeoError::InvalidArgument("need at least two positive radii".into()));
    }
    let mut radii = radii.to_vec();
    radii.sort_by(f64::total_cmp);
    let (nodes, masses): (Vec<u64>, Vec<f64>) = radii.iter().map(|&r| ball_mass(v0, center, r)).unzip();
    if nodes[0] < MIN_BALL_NODES {
        return Err(GeoError::InsufficientResolution {
            nodes: nodes[0],
            required: MIN_BALL_NODES,
        });
    }
    let m = v0.base.dim() as i32;
    let ratios: Vec<f64> = radii.iter().zip(&masses).map(|(r, mu)| mu / r.powi(m + 1)).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = radii.iter().zip(&masses).map(|(r, mu)| (r.ln(), mu.ln())).unzip();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(DensityScaling {
        base_dim: v0.base.dim(),
        ratios_decrease: ratios.windows(2).all(|w| w[0] < w[1]),
        radii,
        nodes,
        masses,
        ratios,
        exponent: sxy / sxx,
    })
}
