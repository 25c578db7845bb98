//! Independent cross-checks. Nothing here calls the closed-form Hessian or
//! the analytic partials of `R`; the routes are geodesic integration and
//! finite differences of metric values.

use std::f64::consts::FRAC_PI_4;

use crate::config::ModelConfig;
use nalgebra::Matrix4;

use crate::geodesics::{rk4_chart_step, Christoffel};
use crate::metric::{metric_chart, ChartPoint};

/// Integrate the chart geodesic from `(p, v)` for parameter time `t` in
/// `substeps` RK4 steps (negative `t` runs backwards).
pub fn chart_flow(p: &ChartPoint, v: &[f64; 4], t: f64, substeps: usize, cfg: &ModelConfig) -> (ChartPoint, [f64; 4]) {
    let h = t / substeps as f64;
    let (mut q, mut w) = (*p, *v);
    for _ in 0..substeps {
        (q, w) = rk4_chart_step(&q, &w, h, cfg);
    }
    (q, w)
}

/// `(f∘γ)''(0)` for the geodesic `γ` with `γ(0) = p`, `γ'(0) = v`, by a central
/// second difference with parameter step `h`. This equals `∇²f(v, v)`.
pub fn geodesic_second_derivative<F>(p: &ChartPoint, v: &[f64; 4], h: f64, f: F, cfg: &ModelConfig) -> f64
where
    F: Fn(&ChartPoint) -> f64,
{
    let (fwd, _) = chart_flow(p, v, h, 8, cfg);
    let (bwd, _) = chart_flow(p, v, -h, 8, cfg);
    (f(&fwd) - 2.0 * f(p) + f(&bwd)) / (h * h)
}

/// `−½ ∂ψ g(Y, Y)` at `(1, π/4)` from central differences of chart-metric
/// values: the variational formula for the second fundamental form of the
/// Clifford torus in `S³` with respect to `∂ψ`.
pub fn torus_sff_y_variational(cfg: &ModelConfig, h: f64) -> f64 {
    let yy = |psi: f64| {
        let g = metric_chart(&ChartPoint::new(1.0, psi, 0.0, 0.0), cfg);
        let a = cfg.alpha;
        g[(2, 2)] + 2.0 * a * g[(2, 3)] + a * a * g[(3, 3)]
    };
    -0.5 * (yy(FRAC_PI_4 + h) - yy(FRAC_PI_4 - h)) / (2.0 * h)
}

/// Christoffels from central differences of the metric values alone.
pub fn christoffel_fd(p: &ChartPoint, h: f64, cfg: &ModelConfig) -> Christoffel {
    let g = metric_chart(p, cfg);
    let inv = g.try_inverse().unwrap();
    let mut dg = [Matrix4::zeros(); 4];
    for (m, d) in dg.iter_mut().enumerate() {
        let mut a = p.coords();
        let mut b = p.coords();
        a[m] += h;
        b[m] -= h;
        *d = (metric_chart(&ChartPoint::from_coords(a), cfg)
            - metric_chart(&ChartPoint::from_coords(b), cfg))
            / (2.0 * h);
    }
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                gamma[i][j][k] = (0..4)
                    .map(|l| 0.5 * inv[(i, l)] * (dg[j][(l, k)] + dg[k][(l, j)] - dg[l][(j, k)]))
                    .sum();
            }
        }
    }
    gamma
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Profile;

    #[test]
    fn straight_line_second_derivative_of_d2() {
        let cfg = ModelConfig {
            profile: Profile::Flat,
            ..ModelConfig::default()
        };
        let p = ChartPoint::new(1.1, 0.6, 0.3, 0.4);
        let v = [0.3, 0.2, 0.5, -0.1];
        let d2 = geodesic_second_derivative(&p, &v, 1e-3, |q| q.rho * q.rho, &cfg);
        let g = metric_chart(&p, &cfg);
        let mut e = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                e += v[i] * g[(i, j)] * v[j];
            }
        }
        assert!((d2 - 2.0 * e).abs() < 1e-6, "{d2} vs {}", 2.0 * e);
    }

    #[test]
    fn variational_torus_form_vanishes_and_detects_tilt() {
        let cfg = ModelConfig::default();
        assert!(torus_sff_y_variational(&cfg, 1e-5).abs() < 1e-6);
        let tilted = ModelConfig {
            profile: Profile::Tilted { epsilon: 1e-3 },
            ..cfg
        };
        assert!((torus_sff_y_variational(&tilted, 1e-5) + 5e-4).abs() < 1e-8);
    }
}
