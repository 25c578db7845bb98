use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use super::chart::{AmbientPoint, ChartPoint};
use super::profile::{l_eval, profile_excess, r_eval};
use super::{anisotropy, anisotropy_d};
use crate::config::{ModelConfig, Profile};

/// Diagonal values of `g` on the frame `(∂ρ, ∂ψ, Y, Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameMetric {
    pub rho_rho: f64,
    pub psi_psi: f64,
    pub yy: f64,
    pub zz: f64,
}

impl FrameMetric {
    pub fn as_array(&self) -> [f64; 4] {
        [self.rho_rho, self.psi_psi, self.yy, self.zz]
    }
}

/// Frame vectors as coefficient vectors in the chart basis `(∂ρ, ∂ψ, ∂φ, ∂θ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub d_rho: [f64; 4],
    pub d_psi: [f64; 4],
    pub y: [f64; 4],
    pub z: [f64; 4],
}

impl Frame {
    pub fn vectors(&self) -> [[f64; 4]; 4] {
        [self.d_rho, self.d_psi, self.y, self.z]
    }
}

/// `Y = ∂φ + α ∂θ` and `Z = α tanψ ∂φ − cotψ ∂θ` together with the coordinate fields.
pub fn frame(psi: f64, alpha: f64) -> Frame {
    let t = psi.tan();
    Frame {
        d_rho: [1.0, 0.0, 0.0, 0.0],
        d_psi: [0.0, 1.0, 0.0, 0.0],
        y: [0.0, 0.0, 1.0, alpha],
        z: [0.0, 0.0, alpha * t, -1.0 / t],
    }
}

/// The 1-form `η` dual to `Y` in the frame (`η(Y) = 1`, `η(Z) = 0`), returned as
/// `(η_φ, η_θ, ∂ψη_φ, ∂ψη_θ)`. The metric is `g = g₀ + (R − l) η ⊗ η`.
pub fn leaf_coframe(psi: f64, alpha: f64) -> (f64, f64, f64, f64) {
    let (s, c) = psi.sin_cos();
    let an = anisotropy(psi, alpha);
    let dan = anisotropy_d(psi, alpha);
    let s2 = (2.0 * psi).sin();
    let eta_phi = c * c / an;
    let eta_theta = alpha * s * s / an;
    let d_phi = (-s2 * an - c * c * dan) / (an * an);
    let d_theta = alpha * (s2 * an - s * s * dan) / (an * an);
    (eta_phi, eta_theta, d_phi, d_theta)
}

/// Frame components `(a_ρ, a_ψ, a_Y, a_Z)` of a chart-basis vector `v`.
pub fn frame_components(psi: f64, v: &[f64; 4], alpha: f64) -> [f64; 4] {
    let (eta_phi, eta_theta, _, _) = leaf_coframe(psi, alpha);
    let (s, c) = psi.sin_cos();
    let zeta = s * c * (alpha * v[2] - v[3]) / anisotropy(psi, alpha);
    [v[0], v[1], eta_phi * v[2] + eta_theta * v[3], zeta]
}

/// True where `g` coincides with `g₀`.
pub fn is_flat_region(rho: f64, psi: f64, cfg: &ModelConfig) -> bool {
    cfg.profile == Profile::Flat || !cfg.bump.contains(rho, psi)
}

pub fn metric_frame(p: &ChartPoint, cfg: &ModelConfig) -> FrameMetric {
    let rho = p.rho;
    FrameMetric {
        rho_rho: 1.0,
        psi_psi: rho * rho,
        yy: r_eval(rho, p.psi, cfg).value,
        zz: l_eval(rho, p.psi, cfg.alpha).value,
    }
}

/// `g` in the chart basis `(∂ρ, ∂ψ, ∂φ, ∂θ)`.
pub fn metric_chart(p: &ChartPoint, cfg: &ModelConfig) -> Matrix4<f64> {
    metric_chart_partials(p, cfg).0
}

/// `g` in the chart basis together with `∂ρ g` and `∂ψ g` (the metric does not
/// depend on `φ`, `θ`).
pub fn metric_chart_partials(
    p: &ChartPoint,
    cfg: &ModelConfig,
) -> (Matrix4<f64>, Matrix4<f64>, Matrix4<f64>) {
    let (rho, psi) = (p.rho, p.psi);
    let (s, c) = psi.sin_cos();
    let s2 = (2.0 * psi).sin();
    let ex = profile_excess(rho, psi, cfg);
    let (ef, et, def, det) = leaf_coframe(psi, cfg.alpha);
    let r2 = rho * rho;

    let mut g = Matrix4::zeros();
    g[(0, 0)] = 1.0;
    g[(1, 1)] = r2;
    g[(2, 2)] = r2 * c * c + ex.value * ef * ef;
    g[(3, 3)] = r2 * s * s + ex.value * et * et;
    g[(2, 3)] = ex.value * ef * et;
    g[(3, 2)] = g[(2, 3)];

    let mut dr = Matrix4::zeros();
    dr[(1, 1)] = 2.0 * rho;
    dr[(2, 2)] = 2.0 * rho * c * c + ex.d_rho * ef * ef;
    dr[(3, 3)] = 2.0 * rho * s * s + ex.d_rho * et * et;
    dr[(2, 3)] = ex.d_rho * ef * et;
    dr[(3, 2)] = dr[(2, 3)];

    let mut dp = Matrix4::zeros();
    dp[(2, 2)] = -r2 * s2 + ex.d_psi * ef * ef + 2.0 * ex.value * ef * def;
    dp[(3, 3)] = r2 * s2 + ex.d_psi * et * et + 2.0 * ex.value * et * det;
    dp[(2, 3)] = ex.d_psi * ef * et + ex.value * (def * et + ef * det);
    dp[(3, 2)] = dp[(2, 3)];

    (g, dr, dp)
}

/// `g` in Cartesian coordinates; the identity wherever `g = g₀`, including the
/// coordinate planes excluded from the chart.
pub fn metric_ambient(x: &AmbientPoint, cfg: &ModelConfig) -> Matrix4<f64> {
    let [x1, x2, x3, x4] = x.x;
    let q12 = x1 * x1 + x2 * x2;
    let q34 = x3 * x3 + x4 * x4;
    if q12 == 0.0 || q34 == 0.0 {
        return Matrix4::identity();
    }
    let rho = (q12 + q34).sqrt();
    let psi = q34.sqrt().atan2(q12.sqrt());
    let ex = profile_excess(rho, psi, cfg).value;
    if ex == 0.0 {
        return Matrix4::identity();
    }
    let (ef, et, _, _) = leaf_coframe(psi, cfg.alpha);
    let omega = [
        ef * x2 / q12,
        -ef * x1 / q12,
        et * x4 / q34,
        -et * x3 / q34,
    ];
    let mut g = Matrix4::identity();
    for i in 0..4 {
        for j in i..4 {
            let v = ex * omega[i] * omega[j];
            g[(i, j)] += v;
            if i != j {
                g[(j, i)] += v;
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{chart_jacobian, chart_to_ambient};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, TAU};

    fn quad(g: &Matrix4<f64>, a: &[f64; 4], b: &[f64; 4]) -> f64 {
        let mut s = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                s += a[i] * g[(i, j)] * b[j];
            }
        }
        s
    }

    fn random_point(rng: &mut ChaCha8Rng) -> ChartPoint {
        ChartPoint::new(
            rng.random_range(0.05..2.0),
            rng.random_range(0.05..1.52),
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..TAU),
        )
    }

    #[test]
    fn frame_values_at_torus() {
        let cfg = ModelConfig::default();
        let fm = metric_frame(&ChartPoint::on_torus(0.3, 1.1), &cfg);
        let expected = [1.0, 1.0, 1.5, 1.5];
        for (v, e) in fm.as_array().iter().zip(expected) {
            assert_abs_diff_eq!(*v, e, epsilon = 1e-15);
        }
    }

    #[test]
    fn frame_values_outside_box_match_flat_metric() {
        let cfg = ModelConfig::default();
        let flat = ModelConfig {
            profile: Profile::Flat,
            ..cfg
        };
        let p = ChartPoint::new(1.9, FRAC_PI_3, 0.2, 0.9);
        assert_eq!(metric_frame(&p, &cfg), metric_frame(&p, &flat));
        let g = metric_chart(&p, &cfg);
        let (s, c) = FRAC_PI_3.sin_cos();
        let expected = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 3.61, 3.61 * c * c, 3.61 * s * s));
        assert_abs_diff_eq!(g, expected, epsilon = 1e-15);
    }

    #[test]
    fn torus_block_is_flat() {
        let cfg = ModelConfig::default();
        for &(phi, theta) in &[(0.0, 0.0), (1.0, 2.0), (4.0, 5.5)] {
            let g = metric_chart(&ChartPoint::on_torus(phi, theta), &cfg);
            assert_abs_diff_eq!(g[(2, 2)], 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(g[(3, 3)], 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(g[(2, 3)], 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn coframe_is_dual_to_leaf_direction() {
        for &(psi, alpha) in &[(0.3, 1.4), (FRAC_PI_4, 2.0f64.sqrt()), (1.2, 0.7)] {
            let f = frame(psi, alpha);
            let a_y = frame_components(psi, &f.y, alpha);
            let a_z = frame_components(psi, &f.z, alpha);
            assert_abs_diff_eq!(a_y[2], 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(a_y[3], 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(a_z[2], 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(a_z[3], 1.0, epsilon = 1e-14);
            let (_, _, d_phi, d_theta) = leaf_coframe(psi, alpha);
            let h = 1e-6;
            let (ap, bp, _, _) = leaf_coframe(psi + h, alpha);
            let (am, bm, _, _) = leaf_coframe(psi - h, alpha);
            assert_abs_diff_eq!(d_phi, (ap - am) / (2.0 * h), epsilon = 1e-8);
            assert_abs_diff_eq!(d_theta, (bp - bm) / (2.0 * h), epsilon = 1e-8);
        }
    }

    #[test]
    fn frame_is_orthogonal_and_reproduces_frame_metric() {
        let cfg = ModelConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let p = random_point(&mut rng);
            let g = metric_chart(&p, &cfg);
            let f = frame(p.psi, cfg.alpha).vectors();
            let fm = metric_frame(&p, &cfg).as_array();
            for i in 0..4 {
                let norm = quad(&g, &f[i], &f[i]);
                assert!((norm - fm[i]).abs() <= 1e-12 * fm[i].max(1.0), "{p:?} {i}");
                for j in (i + 1)..4 {
                    let scale = (quad(&g, &f[i], &f[i]) * quad(&g, &f[j], &f[j])).sqrt();
                    assert!(quad(&g, &f[i], &f[j]).abs() <= 1e-12 * scale.max(1.0), "{p:?} {i} {j}");
                }
            }
        }
    }

    #[test]
    fn chart_metric_is_positive_definite() {
        let cfg = ModelConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let p = random_point(&mut rng);
            let fm = metric_frame(&p, &cfg);
            assert!(fm.yy > 0.0 && fm.zz > 0.0);
            let eig = metric_chart(&p, &cfg).symmetric_eigenvalues();
            assert!(eig.iter().all(|&e| e > 0.0), "{p:?} {eig:?}");
        }
    }

    #[test]
    fn chart_partials_match_finite_differences() {
        let cfg = ModelConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = 1e-6;
        for _ in 0..200 {
            let p = ChartPoint::new(
                rng.random_range(0.65..1.35),
                rng.random_range(0.55..1.0),
                rng.random_range(0.0..TAU),
                rng.random_range(0.0..TAU),
            );
            let (_, dr, dp) = metric_chart_partials(&p, &cfg);
            let shifted = |dr_: f64, dp_: f64| {
                metric_chart(&ChartPoint::new(p.rho + dr_, p.psi + dp_, p.phi, p.theta), &cfg)
            };
            let fd_r = (shifted(h, 0.0) - shifted(-h, 0.0)) / (2.0 * h);
            let fd_p = (shifted(0.0, h) - shifted(0.0, -h)) / (2.0 * h);
            assert_abs_diff_eq!(dr, fd_r, epsilon = 1e-7);
            assert_abs_diff_eq!(dp, fd_p, epsilon = 1e-7);
        }
    }

    #[test]
    fn ambient_metric_is_identity_outside_box() {
        let cfg = ModelConfig::default();
        assert_eq!(metric_ambient(&AmbientPoint::new([0.1, 0.0, 0.0, 0.0]), &cfg), Matrix4::identity());
        for eps in [1e-1, 1e-3, 1e-8, 0.0] {
            let x = AmbientPoint::new([0.6, 0.5, eps, 0.0]);
            assert_eq!(metric_ambient(&x, &cfg), Matrix4::identity());
        }
    }

    #[test]
    fn ambient_metric_is_chart_metric_pulled_back() {
        let cfg = ModelConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut points = vec![ChartPoint::new(1.0, FRAC_PI_4, 0.3, 1.1)];
        for _ in 0..500 {
            points.push(ChartPoint::new(
                rng.random_range(0.6..1.4),
                rng.random_range(0.5..1.05),
                rng.random_range(0.0..TAU),
                rng.random_range(0.0..TAU),
            ));
        }
        for p in points {
            let j_inv = chart_jacobian(&p).try_inverse().unwrap();
            let expected = j_inv.transpose() * metric_chart(&p, &cfg) * j_inv;
            let g = metric_ambient(&chart_to_ambient(&p), &cfg);
            assert_abs_diff_eq!(g, expected, epsilon = 1e-10);
            assert_eq!(g, g.transpose());
        }
    }
}
