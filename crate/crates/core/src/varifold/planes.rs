use std::f64::consts::FRAC_PI_4;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::ModelConfig;
use crate::convexity::hessian_d2_unit;

/// `trace_S ∇²f` for `f = d² ∘ π₂`, with `S` given by orthonormal rows in
/// coordinates `(M coordinates, ∂ρ, ∂ψ/ρ, Y/√R, Z/√l)` at ball point `(ρ, ψ)`.
/// The base factor contributes nothing.
pub fn trace_hessian_on_plane(plane: &DMatrix<f64>, rho: f64, psi: f64, cfg: &ModelConfig) -> f64 {
    let m = plane.ncols() - 4;
    let h = hessian_d2_unit(rho, psi, cfg);
    plane
        .row_iter()
        .map(|r| (0..4).map(|k| h[k] * r[m + k] * r[m + k]).sum::<f64>())
        .sum()
}

/// Orthonormalise the rows of `a` (full row rank assumed).
pub fn orthonormal_rows(a: &DMatrix<f64>) -> DMatrix<f64> {
    let q = a.transpose().qr().q();
    q.transpose()
}

/// Geodesic distance on the Grassmannian, `(Σ θᵢ²)^{1/2}` over principal
/// angles, for planes of equal dimension given by orthonormal rows.
pub fn grassmann_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let s = (a * b.transpose()).singular_values();
    s.iter().map(|c| c.clamp(-1.0, 1.0).acos().powi(2)).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneScan {
    pub base_dim: usize,
    pub sampled: usize,
    pub rejected: usize,
    pub min_distance: f64,
    /// Smallest trace over accepted planes.
    pub min_trace: f64,
    /// Grassmann distance of the plane attaining `min_trace`.
    pub min_trace_distance: f64,
    pub seed: u64,
}

/// Sample `count` planes of dimension `m + 1` in `T(M × B⁴)` at torus points
/// with Grassmann distance at least `min_distance` from the support plane,
/// and record the smallest Hessian trace. Half of the samples are uniform,
/// half are perturbations of the support plane at random scales.
pub fn random_plane_scan(base_dim: usize, count: usize, min_distance: f64, seed: u64, cfg: &ModelConfig) -> PlaneScan {
    let (k, n) = (base_dim + 1, base_dim + 4);
    let mut support = DMatrix::zeros(k, n);
    for i in 0..base_dim {
        support[(i, i)] = 1.0;
    }
    support[(base_dim, base_dim + 2)] = 1.0;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scan = PlaneScan {
        base_dim,
        sampled: 0,
        rejected: 0,
        min_distance,
        min_trace: f64::INFINITY,
        min_trace_distance: f64::NAN,
        seed,
    };
    while scan.sampled < count {
        let noise = DMatrix::from_fn(k, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let raw = if scan.sampled % 2 == 0 {
            noise
        } else {
            let scale = rng.random_range(0.02..0.6);
            &support + noise * scale
        };
        let plane = orthonormal_rows(&raw);
        let dist = grassmann_distance(&plane, &support);
        if dist < min_distance {
            scan.rejected += 1;
            continue;
        }
        scan.sampled += 1;
        let tr = trace_hessian_on_plane(&plane, 1.0, FRAC_PI_4, cfg);
        if tr < scan.min_trace {
            scan.min_trace = tr;
            scan.min_trace_distance = dist;
        }
    }
    scan
}
