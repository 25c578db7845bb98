use nalgebra::Matrix4;

use crate::config::ModelConfig;
use crate::metric::{metric_chart_partials, ChartPoint};

/// `Γ[i][j][k] = Γ^i_{jk}` in the chart basis `(ρ, ψ, φ, θ)`.
pub type Christoffel = [[[f64; 4]; 4]; 4];

fn inverse_block(g: &Matrix4<f64>) -> Matrix4<f64> {
    let mut inv = Matrix4::zeros();
    inv[(0, 0)] = 1.0 / g[(0, 0)];
    inv[(1, 1)] = 1.0 / g[(1, 1)];
    let (a, b, d) = (g[(2, 2)], g[(2, 3)], g[(3, 3)]);
    let det = a * d - b * b;
    inv[(2, 2)] = d / det;
    inv[(3, 3)] = a / det;
    inv[(2, 3)] = -b / det;
    inv[(3, 2)] = -b / det;
    inv
}

/// Levi-Civita connection of `g` from the analytic metric partials.
pub fn christoffel(p: &ChartPoint, cfg: &ModelConfig) -> Christoffel {
    let (g, dr, dp) = metric_chart_partials(p, cfg);
    let inv = inverse_block(&g);
    let zero = Matrix4::zeros();
    let partial = [&dr, &dp, &zero, &zero];
    // first kind: [l; j k] = ½ (∂_j g_lk + ∂_k g_lj − ∂_l g_jk)
    let mut first = [[[0.0; 4]; 4]; 4];
    for (l, row) in first.iter_mut().enumerate() {
        for j in 0..4 {
            for k in j..4 {
                let v = 0.5 * (partial[j][(l, k)] + partial[k][(l, j)] - partial[l][(j, k)]);
                row[j][k] = v;
                row[k][j] = v;
            }
        }
    }
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for (i, out) in gamma.iter_mut().enumerate() {
        for j in 0..4 {
            for k in j..4 {
                let v: f64 = (0..4).map(|l| inv[(i, l)] * first[l][j][k]).sum();
                out[j][k] = v;
                out[k][j] = v;
            }
        }
    }
    gamma
}

/// `−Γ^i_{jk} v^j v^k`.
pub fn geodesic_acceleration(p: &ChartPoint, v: &[f64; 4], cfg: &ModelConfig) -> [f64; 4] {
    let gamma = christoffel(p, cfg);
    let mut a = [0.0; 4];
    for (i, ai) in a.iter_mut().enumerate() {
        let mut s = 0.0;
        for j in 0..4 {
            for k in 0..4 {
                s += gamma[i][j][k] * v[j] * v[k];
            }
        }
        *ai = -s;
    }
    a
}
