//! Hessians of the distance function `d = |x|` and of `d²`, and the second
//! fundamental forms they control: spheres `S³(ρ)` with respect to `grad d`
//! and the Clifford torus inside `S³` with respect to `∂ψ`.
//!
//! Bilinear forms are reported on the unnormalised frame `(∂ρ, ∂ψ, Y, Z)`.
//! The frame is `g`-orthogonal, so every form here is diagonal in it.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::config::ModelConfig;
use crate::geodesics::christoffel;
use crate::metric::{anisotropy, anisotropy_d, r_eval, r_mixed_partial, ChartPoint, CHART_MARGIN};

/// Diagonal of a bilinear form on `(∂ρ, ∂ψ, Y, Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianDiag {
    pub rho: f64,
    pub psi: f64,
    pub y: f64,
    pub z: f64,
}

impl HessianDiag {
    pub fn as_array(&self) -> [f64; 4] {
        [self.rho, self.psi, self.y, self.z]
    }

    /// Value on the vector with frame components `a`.
    pub fn quadratic(&self, a: &[f64; 4]) -> f64 {
        self.as_array().iter().zip(a).map(|(h, c)| h * c * c).sum()
    }
}

/// `∇²d = diag(0, ρ, ½∂ρR, ρ(cos²ψ + α² sin²ψ))`.
pub fn hessian_d_frame(rho: f64, psi: f64, cfg: &ModelConfig) -> HessianDiag {
    HessianDiag {
        rho: 0.0,
        psi: rho,
        y: 0.5 * r_eval(rho, psi, cfg).d_rho,
        z: rho * anisotropy(psi, cfg.alpha),
    }
}

/// `∇²(d²) = 2d ∇²d + 2 dd ⊗ dd = diag(2, 2ρ², ρ∂ρR, 2ρ²(cos²ψ + α² sin²ψ))`.
pub fn hessian_d2_frame(rho: f64, psi: f64, cfg: &ModelConfig) -> HessianDiag {
    HessianDiag {
        rho: 2.0,
        psi: 2.0 * rho * rho,
        y: rho * r_eval(rho, psi, cfg).d_rho,
        z: 2.0 * rho * rho * anisotropy(psi, cfg.alpha),
    }
}

/// `∇²(d²)` on the `g`-unit frame `(∂ρ, ∂ψ/ρ, Y/√R, Z/√l)`.
pub fn hessian_d2_unit(rho: f64, psi: f64, cfg: &ModelConfig) -> [f64; 4] {
    let r = r_eval(rho, psi, cfg);
    [2.0, 2.0, rho * r.d_rho / r.value, 2.0]
}

/// `∇²d` and `∇²(d²)` in the chart basis from the connection:
/// `∇²f_ij = ∂i∂j f − Γ^k_ij ∂k f` with `d = ρ`.
pub fn hessians_from_connection(p: &ChartPoint, cfg: &ModelConfig) -> (Matrix4<f64>, Matrix4<f64>) {
    let gamma = christoffel(p, cfg);
    let mut hd = Matrix4::zeros();
    let mut hd2 = Matrix4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            hd[(i, j)] = -gamma[0][i][j];
            hd2[(i, j)] = -2.0 * p.rho * gamma[0][i][j];
        }
    }
    hd2[(0, 0)] += 2.0;
    (hd, hd2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefiniteWithNullspace,
    NegativeDefinite,
    NegativeSemidefiniteWithNullspace,
    Indefinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameDirection {
    Rho,
    Psi,
    Y,
    Z,
}

/// A grid point and frame direction where the form vanishes or has the
/// wrong sign.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub rho: f64,
    pub psi: f64,
    pub direction: FrameDirection,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefinitenessVerdict {
    pub rho: f64,
    pub grid: usize,
    pub verdict: Definiteness,
    /// Smallest nonzero `|h(E, E)|` on the unnormalised frame over the grid.
    pub margin: f64,
    /// Same on the `g`-unit frame.
    pub normalized_margin: f64,
    /// Worst-case variation of the entries between grid points.
    pub lipschitz_slack: f64,
    /// Definite verdict and `margin > lipschitz_slack`.
    pub certified: bool,
    /// First grid point where the form vanishes or has the wrong sign.
    pub witness: Option<Witness>,
    pub witnesses: Vec<Witness>,
}

fn sphere_entries(rho: f64, psi: f64, cfg: &ModelConfig) -> ([f64; 3], [f64; 3]) {
    let h = hessian_d_frame(rho, psi, cfg);
    let r = r_eval(rho, psi, cfg).value;
    let an = anisotropy(psi, cfg.alpha);
    let raw = [-h.psi, -h.y, -h.z];
    let norms = [rho * rho, r, rho * rho * an];
    (raw, [raw[0] / norms[0], raw[1] / norms[1], raw[2] / norms[2]])
}

fn sphere_entries_dpsi(rho: f64, psi: f64, cfg: &ModelConfig) -> [f64; 3] {
    [
        0.0,
        -0.5 * r_mixed_partial(rho, psi, cfg),
        -rho * anisotropy_d(psi, cfg.alpha),
    ]
}

/// The `ψ` grid used by the sphere certificate: `n` equispaced points in
/// `[m, π/2 − m]`, with the point closest to `π/4` moved onto it.
pub fn psi_grid(n: usize) -> Vec<f64> {
    let n = n.max(3);
    let (a, b) = (CHART_MARGIN, FRAC_PI_2 - CHART_MARGIN);
    let mut grid: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
    let nearest = grid
        .iter()
        .enumerate()
        .min_by(|x, y| (x.1 - FRAC_PI_4).abs().total_cmp(&(y.1 - FRAC_PI_4).abs()))
        .map(|(i, _)| i)
        .unwrap();
    grid[nearest] = FRAC_PI_4;
    grid
}

/// Definiteness of `h^{S³(ρ)} = −∇²d` restricted to `(∂ψ, Y, Z)` over a
/// `ψ`-grid of `grid` points.
pub fn sphere_sff(rho: f64, grid: usize, cfg: &ModelConfig) -> DefinitenessVerdict {
    let tol = cfg.tolerances.zero;
    let psis = psi_grid(grid);
    let dirs = [FrameDirection::Psi, FrameDirection::Y, FrameDirection::Z];
    let mut margin = f64::INFINITY;
    let mut normalized_margin = f64::INFINITY;
    let mut witnesses = Vec::new();
    let (mut any_pos, mut any_neg, mut any_zero) = (false, false, false);
    for &psi in &psis {
        let (raw, unit) = sphere_entries(rho, psi, cfg);
        for k in 0..3 {
            let v = raw[k];
            if v.abs() <= tol {
                any_zero = true;
                witnesses.push(Witness {
                    rho,
                    psi,
                    direction: dirs[k],
                    value: v,
                });
                continue;
            }
            any_pos |= v > 0.0;
            any_neg |= v < 0.0;
            margin = margin.min(v.abs());
            normalized_margin = normalized_margin.min(unit[k].abs());
        }
    }
    let verdict = match (any_pos, any_neg, any_zero) {
        (true, true, _) => Definiteness::Indefinite,
        (false, true, false) => Definiteness::NegativeDefinite,
        (false, _, true) if !any_pos => Definiteness::NegativeSemidefiniteWithNullspace,
        (true, false, false) => Definiteness::PositiveDefinite,
        _ => Definiteness::PositiveSemidefiniteWithNullspace,
    };
    if verdict == Definiteness::Indefinite {
        for &psi in &psis {
            let (raw, _) = sphere_entries(rho, psi, cfg);
            for k in 0..3 {
                if raw[k] > tol && witnesses.len() < 16 {
                    witnesses.push(Witness {
                        rho,
                        psi,
                        direction: dirs[k],
                        value: raw[k],
                    });
                }
            }
        }
    }

    // Lipschitz slack from the analytic ψ-derivatives on a 4x refined grid,
    // inflated by 25%.
    let fine = 4 * (psis.len() - 1) + 1;
    let (a, b) = (CHART_MARGIN, FRAC_PI_2 - CHART_MARGIN);
    let mut lip: f64 = 0.0;
    for i in 0..fine {
        let psi = a + (b - a) * i as f64 / (fine - 1) as f64;
        for d in sphere_entries_dpsi(rho, psi, cfg) {
            lip = lip.max(d.abs());
        }
    }
    let spacing = (b - a) / (psis.len() - 1) as f64;
    let lipschitz_slack = 1.25 * lip * spacing;
    let certified = matches!(
        verdict,
        Definiteness::NegativeDefinite | Definiteness::PositiveDefinite
    ) && margin > lipschitz_slack;

    DefinitenessVerdict {
        rho,
        grid: psis.len(),
        verdict,
        margin,
        normalized_margin,
        lipschitz_slack,
        certified,
        witness: witnesses.first().copied(),
        witnesses,
    }
}

/// `h^{T²}(Y, Y) = −½ ∂ψR(1, π/4)`: second fundamental form of the Clifford
/// torus in `S³` along the leaf direction, with respect to `∂ψ`.
pub fn torus_sff_y(cfg: &ModelConfig) -> f64 {
    -0.5 * r_eval(1.0, FRAC_PI_4, cfg).d_psi
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignSweep {
    pub grid: usize,
    /// Minimum of `ρ ∂ρR` over all cells except the one holding `(1, π/4)`.
    pub min_value: f64,
    pub min_at: (f64, f64),
    pub non_positive_cells: usize,
}

/// Cell-centred sweep of the `Y`-entry `ρ∂ρR` of `∇²(d²)` over `]0,2] × ]0,π/2[`.
pub fn hessian_d2_sign_sweep(grid: usize, cfg: &ModelConfig) -> SignSweep {
    let dr = 2.0 / grid as f64;
    let dp = FRAC_PI_2 / grid as f64;
    let torus_cell = ((1.0 / dr).floor() as usize, (FRAC_PI_4 / dp).floor() as usize);
    let mut out = SignSweep {
        grid,
        min_value: f64::INFINITY,
        min_at: (f64::NAN, f64::NAN),
        non_positive_cells: 0,
    };
    for i in 0..grid {
        let rho = (i as f64 + 0.5) * dr;
        for j in 0..grid {
            if (i, j) == torus_cell {
                continue;
            }
            let psi = (j as f64 + 0.5) * dp;
            let v = hessian_d2_frame(rho, psi, cfg).y;
            if v <= 0.0 {
                out.non_positive_cells += 1;
            }
            if v < out.min_value {
                out.min_value = v;
                out.min_at = (rho, psi);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Profile;
    use crate::metric::{frame, l_eval};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn hessian_at_torus() {
        let cfg = ModelConfig::default();
        let h = hessian_d_frame(1.0, FRAC_PI_4, &cfg);
        assert_eq!((h.rho, h.psi, h.y), (0.0, 1.0, 0.0));
        assert_abs_diff_eq!(h.z, 1.5, epsilon = 1e-15);
        let h2 = hessian_d2_frame(1.0, FRAC_PI_4, &cfg);
        assert_eq!((h2.rho, h2.psi, h2.y), (2.0, 2.0, 0.0));
        assert_abs_diff_eq!(h2.z, 3.0, epsilon = 1e-14);
    }

    #[test]
    fn hessian_outside_box_uses_l() {
        let cfg = ModelConfig::default();
        let (rho, psi) = (1.8, FRAC_PI_3);
        let h = hessian_d_frame(rho, psi, &cfg);
        let l = l_eval(rho, psi, cfg.alpha);
        assert_eq!(h.y, 0.5 * l.d_rho);
        let (s, c) = psi.sin_cos();
        assert_abs_diff_eq!(h.z, rho * (c * c + 2.0 * s * s), epsilon = 1e-14);
    }

    #[test]
    fn nullspace_is_the_leaf_direction() {
        let cfg = ModelConfig::default();
        let h = hessian_d2_frame(1.0, FRAC_PI_4, &cfg);
        let growth = 1.0 + cfg.alpha * cfg.alpha;
        for eps in [1e-4, 1e-2, 0.3, 1.0] {
            assert!(h.quadratic(&[0.0, 0.0, 1.0, eps]) >= growth * eps * eps - 1e-10);
            assert!(h.quadratic(&[eps, 0.0, 1.0, 0.0]) >= 2.0 * eps * eps - 1e-10);
        }
        assert_eq!(h.quadratic(&[0.0, 0.0, 1.0, 0.0]), 0.0);
    }

    #[test]
    fn composition_rule_matches_connection_hessians() {
        let cfg = ModelConfig::default();
        for &(rho, psi) in &[(1.0, FRAC_PI_4), (0.8, 0.7), (1.2, 0.9), (1.7, 0.3), (0.4, 1.2)] {
            let p = ChartPoint::new(rho, psi, 0.1, 0.2);
            let (hd, hd2) = hessians_from_connection(&p, &cfg);
            let f = frame(psi, cfg.alpha).vectors();
            let a = hessian_d_frame(rho, psi, &cfg).as_array();
            let b = hessian_d2_frame(rho, psi, &cfg).as_array();
            for k in 0..4 {
                let v = nalgebra::Vector4::from_column_slice(&f[k]);
                let qd = (v.transpose() * hd * v)[0];
                let qd2 = (v.transpose() * hd2 * v)[0];
                assert_abs_diff_eq!(qd, a[k], epsilon = 1e-12);
                assert_abs_diff_eq!(qd2, b[k], epsilon = 1e-12);
                // ∇²(d²) = 2d∇²d + 2dd⊗dd
                let dd = f[k][0];
                assert_abs_diff_eq!(qd2, 2.0 * rho * qd + 2.0 * dd * dd, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn boundary_sphere_is_strictly_convex() {
        let cfg = ModelConfig::default();
        let v = sphere_sff(2.0, 200, &cfg);
        assert_eq!(v.verdict, Definiteness::NegativeDefinite);
        assert!(v.certified, "{v:?}");
        assert_abs_diff_eq!(v.margin, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.normalized_margin, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn unit_sphere_degenerates_only_along_leaf() {
        let cfg = ModelConfig::default();
        let v = sphere_sff(1.0, 200, &cfg);
        assert_eq!(v.verdict, Definiteness::NegativeSemidefiniteWithNullspace);
        assert_eq!(v.witnesses.len(), 1);
        let w = v.witness.unwrap();
        assert_eq!((w.psi, w.direction), (FRAC_PI_4, FrameDirection::Y));
        assert!(!v.certified);
    }

    #[test]
    fn small_sphere_matches_round_metric() {
        let cfg = ModelConfig::default();
        let rho = 0.3;
        for &psi in &[0.2, 0.7, 1.3] {
            let (raw, unit) = sphere_entries(rho, psi, &cfg);
            let an = anisotropy(psi, cfg.alpha);
            assert_abs_diff_eq!(raw[0], -rho, epsilon = 1e-15);
            assert_abs_diff_eq!(raw[1], -0.5 * 2.0 * rho * an, epsilon = 1e-15);
            assert_abs_diff_eq!(raw[2], -rho * an, epsilon = 1e-15);
            for u in unit {
                assert_abs_diff_eq!(u, -1.0 / rho, epsilon = 1e-14);
            }
        }
        assert_eq!(sphere_sff(rho, 50, &cfg).verdict, Definiteness::NegativeDefinite);
    }

    #[test]
    fn torus_flatness_along_leaf_and_tilt_detector() {
        let cfg = ModelConfig::default();
        assert!(torus_sff_y(&cfg).abs() < 1e-15);
        let tilted = ModelConfig {
            profile: Profile::Tilted { epsilon: 1e-3 },
            ..cfg
        };
        assert_abs_diff_eq!(torus_sff_y(&tilted), -5e-4, epsilon = 1e-15);
    }

    #[test]
    fn sweep_is_positive_off_torus_cell() {
        let cfg = ModelConfig::default();
        let s = hessian_d2_sign_sweep(200, &cfg);
        assert_eq!(s.non_positive_cells, 0);
        assert!(s.min_value > 0.0);
        let flat = ModelConfig {
            profile: Profile::Flat,
            ..cfg
        };
        assert!(hessian_d2_sign_sweep(50, &flat).min_value > 0.0);
    }

    #[test]
    fn psi_grid_contains_torus_angle() {
        let g = psi_grid(200);
        assert_eq!(g.len(), 200);
        assert!(g.contains(&FRAC_PI_4));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
