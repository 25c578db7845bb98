use std::f64::consts::{FRAC_PI_4, TAU};

use serde::{Deserialize, Serialize};

use super::base::{BaseFunction, BaseManifold};
use super::trig::{TrigPoly, TrigTerm};
use crate::config::ModelConfig;
use crate::geodesics::christoffel;
use crate::metric::{frame, metric_chart, r_eval, smooth_plateau, ChartPoint};

/// Torus dependence of a field coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TorusProfile {
    Trig { poly: TrigPoly },
    /// `b(φ) · poly(φ, θ)` with `b` a smooth plateau on `knots ⊂ (0, 2π)`.
    PlateauPhi { knots: [f64; 4], poly: TrigPoly },
}

impl TorusProfile {
    pub fn trig(poly: TrigPoly) -> Self {
        Self::Trig { poly }
    }

    pub fn eval(&self, phi: f64, theta: f64) -> (f64, f64, f64) {
        match self {
            Self::Trig { poly } => poly.eval(phi, theta),
            Self::PlateauPhi { knots, poly } => {
                let [a, b, c, d] = *knots;
                let (w, dw) = smooth_plateau(phi.rem_euclid(TAU), a, b, c, d);
                let (p, pp, pt) = poly.eval(phi, theta);
                (w * p, dw * p + w * pp, w * pt)
            }
        }
    }

    pub fn is_trig(&self) -> bool {
        matches!(self, Self::Trig { .. })
    }
}

/// Frame direction of a ball term: `∂ρ`, `∂ψ`, the unit leaf field
/// `Ȳ = Y/√R`, or `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BallDirection {
    Radial,
    Polar,
    Leaf,
    Transverse,
}

impl BallDirection {
    fn chart_vector(self, rho: f64, psi: f64, cfg: &ModelConfig) -> [f64; 4] {
        let f = frame(psi, cfg.alpha);
        match self {
            Self::Radial => f.d_rho,
            Self::Polar => f.d_psi,
            Self::Leaf => f.y.map(|c| c / r_eval(rho, psi, cfg).value.sqrt()),
            Self::Transverse => f.z,
        }
    }
}

/// Product of plateaus in `ρ` and `ψ`, equal to 1 near the Clifford torus
/// and supported well inside the chart.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialCutoff {
    pub rho: [f64; 4],
    pub psi: [f64; 4],
}

impl Default for RadialCutoff {
    fn default() -> Self {
        Self {
            rho: [0.6, 0.8, 1.2, 1.4],
            psi: [FRAC_PI_4 - 0.5, FRAC_PI_4 - 0.3, FRAC_PI_4 + 0.3, FRAC_PI_4 + 0.5],
        }
    }
}

impl RadialCutoff {
    pub fn value(&self, rho: f64, psi: f64) -> f64 {
        let [a, b, c, d] = self.rho;
        let [e, f, g, h] = self.psi;
        smooth_plateau(rho, a, b, c, d).0 * smooth_plateau(psi, e, f, g, h).0
    }
}

/// `X¹ = T(q) grad_M h(p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseTerm {
    pub potential: BaseFunction,
    pub torus: TorusProfile,
}

/// `X² = w(p) ρ^power χ(ρ, ψ) P(φ, θ) E` with `E` a frame direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallTerm {
    pub direction: BallDirection,
    pub base_weight: BaseFunction,
    pub rho_power: i32,
    pub torus: TorusProfile,
    pub cutoff: RadialCutoff,
}

impl BallTerm {
    pub fn new(direction: BallDirection, base_weight: BaseFunction, torus: TorusProfile) -> Self {
        Self {
            direction,
            base_weight,
            rho_power: 0,
            torus,
            cutoff: RadialCutoff::default(),
        }
    }
}

/// Vector field on `M × B⁴` given by coefficient tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestVectorField {
    pub name: String,
    pub base_terms: Vec<BaseTerm>,
    pub ball_terms: Vec<BallTerm>,
}

impl TestVectorField {
    pub fn new(name: &str, base_terms: Vec<BaseTerm>, ball_terms: Vec<BallTerm>) -> Self {
        Self {
            name: name.to_string(),
            base_terms,
            ball_terms,
        }
    }

    /// All torus dependence is trigonometric, so grid quadrature is exact.
    pub fn exactly_integrable(&self) -> bool {
        self.base_terms.iter().all(|t| t.torus.is_trig()) && self.ball_terms.iter().all(|t| t.torus.is_trig())
    }

    /// Largest torus harmonic appearing in the field.
    pub fn torus_degree(&self) -> u32 {
        let poly = |p: &TorusProfile| match p {
            TorusProfile::Trig { poly } | TorusProfile::PlateauPhi { poly, .. } => poly.degree(),
        };
        self.base_terms
            .iter()
            .map(|t| poly(&t.torus))
            .chain(self.ball_terms.iter().map(|t| poly(&t.torus)))
            .max()
            .unwrap_or(0)
    }

    /// Base component `X¹` at `(p, q)`.
    pub fn base_component(&self, base: &BaseManifold, s: [f64; 2], q: &ChartPoint) -> [f64; 2] {
        let mut out = [0.0; 2];
        for t in &self.base_terms {
            let (_, g, _) = t.potential.eval(base, s);
            let w = t.torus.eval(q.phi, q.theta).0;
            out[0] += w * g[0];
            out[1] += w * g[1];
        }
        out
    }

    /// Chart components of the ball component `X²` at `(p, q)`.
    pub fn ball_component(&self, base: &BaseManifold, s: [f64; 2], q: &ChartPoint, cfg: &ModelConfig) -> [f64; 4] {
        let mut out = [0.0; 4];
        for t in &self.ball_terms {
            let c = t.base_weight.eval(base, s).0
                * q.rho.powi(t.rho_power)
                * t.cutoff.value(q.rho, q.psi)
                * t.torus.eval(q.phi, q.theta).0;
            let e = t.direction.chart_vector(q.rho, q.psi, cfg);
            for i in 0..4 {
                out[i] += c * e[i];
            }
        }
        out
    }

    /// Divergence along `T_pM × span(Ȳ_q)` at a torus point:
    /// `div_M X¹ + Ȳ(g(X², Ȳ))`. Only `Ȳ`-aligned terms reach the second
    /// summand and their coefficient is differentiated analytically.
    pub fn divergence_on_plane(&self, base: &BaseManifold, s: [f64; 2], phi: f64, theta: f64, cfg: &ModelConfig) -> f64 {
        let a = cfg.leaf_speed();
        let mut div = 0.0;
        for t in &self.base_terms {
            let (_, _, lap) = t.potential.eval(base, s);
            div += t.torus.eval(phi, theta).0 * lap;
        }
        for t in self.ball_terms.iter().filter(|t| t.direction == BallDirection::Leaf) {
            let w = t.base_weight.eval(base, s).0 * t.cutoff.value(1.0, FRAC_PI_4);
            let (_, dp, dt) = t.torus.eval(phi, theta);
            div += w * (dp + cfg.alpha * dt) / a;
        }
        div
    }

    /// Same divergence from the Levi-Civita connection:
    /// `Ȳ^i (∂_i X^j + Γ^j_ik X^k) g_jl Ȳ^l` for the ball part.
    pub fn divergence_covariant(&self, base: &BaseManifold, s: [f64; 2], phi: f64, theta: f64, cfg: &ModelConfig) -> f64 {
        let q = ChartPoint::on_torus(phi, theta);
        let a = cfg.leaf_speed();
        let ybar = [0.0, 0.0, 1.0 / a, cfg.alpha / a];
        let gamma = christoffel(&q, cfg);
        let g = metric_chart(&q, cfg);
        let x = self.ball_component(base, s, &q, cfg);

        // ∂_Ȳ X: only the torus coefficient varies along Ȳ.
        let mut dx = [0.0; 4];
        for t in &self.ball_terms {
            let c = t.base_weight.eval(base, s).0 * t.cutoff.value(1.0, FRAC_PI_4);
            let (_, dp, dt) = t.torus.eval(phi, theta);
            let e = t.direction.chart_vector(1.0, FRAC_PI_4, cfg);
            for i in 0..4 {
                dx[i] += c * (ybar[2] * dp + ybar[3] * dt) * e[i];
            }
        }
        let mut nabla = dx;
        for j in 0..4 {
            for i in 0..4 {
                for k in 0..4 {
                    nabla[j] += gamma[j][i][k] * ybar[i] * x[k];
                }
            }
        }
        let mut ball = 0.0;
        for j in 0..4 {
            for l in 0..4 {
                ball += nabla[j] * g[(j, l)] * ybar[l];
            }
        }
        let mut div = ball;
        for t in &self.base_terms {
            let (_, _, lap) = t.potential.eval(base, s);
            div += t.torus.eval(phi, theta).0 * lap;
        }
        div
    }
}

fn trig(terms: &[(i32, i32, f64, f64)]) -> TorusProfile {
    TorusProfile::trig(TrigPoly::new(
        terms.iter().map(|&(k, l, c, s)| TrigTerm { k, l, cos: c, sin: s }).collect(),
    ))
}

fn bf(modes: &[([i32; 2], f64, f64)]) -> BaseFunction {
    modes
        .iter()
        .fold(BaseFunction::default(), |acc, &(k, c, s)| acc.plus(BaseFunction::mode(k, c, s)))
}

/// The stationarity library: 20 fields with trigonometric torus dependence
/// followed by fields carrying a non-polynomial plateau in `φ`.
pub fn field_library() -> Vec<TestVectorField> {
    use BallDirection::*;
    let one = || BaseFunction::constant(1.0);
    let plateau = |knots: [f64; 4], poly: TorusProfile| match poly {
        TorusProfile::Trig { poly } => TorusProfile::PlateauPhi { knots, poly },
        p => p,
    };
    let grad_d2 = BallTerm {
        rho_power: 1,
        ..BallTerm::new(Radial, BaseFunction::constant(2.0), trig(&[(0, 0, 1.0, 0.0)]))
    };
    vec![
        TestVectorField::new("grad-d2-cutoff", vec![], vec![grad_d2.clone()]),
        TestVectorField::new("leaf-cos-phi-sin-theta", vec![], vec![BallTerm::new(
            Leaf,
            one(),
            trig(&[(1, 1, 0.0, 0.5), (1, -1, 0.0, -0.5)]),
        )]),
        TestVectorField::new("base-grad-cos", vec![BaseTerm {
            potential: bf(&[([1, 0], 1.0, 0.0)]),
            torus: trig(&[(0, 0, 1.0, 0.0)]),
        }], vec![]),
        TestVectorField::new("base-grad-sin2-twisted", vec![BaseTerm {
            potential: bf(&[([2, 0], 0.0, 1.0)]),
            torus: trig(&[(1, -1, 1.0, 0.0)]),
        }], vec![]),
        TestVectorField::new("base-grad-mixed-modes", vec![BaseTerm {
            potential: bf(&[([1, 0], 1.0, 0.0), ([3, 0], 0.0, 0.5)]),
            torus: trig(&[(1, 0, 0.0, 1.0), (0, 2, 1.0, 0.0)]),
        }], vec![]),
        TestVectorField::new("leaf-cos-2phi-theta", vec![], vec![BallTerm::new(Leaf, one(), trig(&[(2, 1, 1.0, 0.0)]))]),
        TestVectorField::new("leaf-offset-harmonic", vec![], vec![BallTerm::new(
            Leaf,
            one(),
            trig(&[(3, -2, 0.0, 1.0), (0, 0, 0.3, 0.0)]),
        )]),
        TestVectorField::new("leaf-base-weighted", vec![], vec![BallTerm::new(
            Leaf,
            bf(&[([1, 0], 1.0, 0.0), ([0, 0], 0.5, 0.0)]),
            trig(&[(1, 1, 0.0, 0.5), (1, -1, 0.0, 0.5)]),
        )]),
        TestVectorField::new("radial-cos-theta", vec![], vec![BallTerm::new(Radial, one(), trig(&[(0, 1, 1.0, 0.0)]))]),
        TestVectorField::new("radial-base-weighted", vec![], vec![BallTerm::new(
            Radial,
            bf(&[([1, 0], 0.0, 1.0)]),
            trig(&[(1, 1, 0.0, 1.0)]),
        )]),
        TestVectorField::new("polar-constant", vec![], vec![BallTerm::new(Polar, one(), trig(&[(0, 0, 1.0, 0.0)]))]),
        TestVectorField::new("polar-cos-2phi", vec![], vec![BallTerm::new(Polar, one(), trig(&[(2, 0, 1.0, 0.0)]))]),
        TestVectorField::new("transverse-sin-theta", vec![], vec![BallTerm::new(Transverse, one(), trig(&[(0, 1, 0.0, 1.0)]))]),
        TestVectorField::new("transverse-base-weighted", vec![], vec![BallTerm::new(
            Transverse,
            bf(&[([2, 0], 1.0, 0.0), ([0, 0], 1.0, 0.0)]),
            trig(&[(1, -2, 1.0, 0.0)]),
        )]),
        TestVectorField::new(
            "mixed-base-and-leaf",
            vec![BaseTerm {
                potential: bf(&[([1, 0], 0.0, 1.0)]),
                torus: trig(&[(1, 0, 1.0, 0.0)]),
            }],
            vec![BallTerm::new(Leaf, one(), trig(&[(0, 1, 1.0, 0.0)]))],
        ),
        TestVectorField::new("mixed-all-ball-directions", vec![], vec![
            BallTerm::new(Radial, one(), trig(&[(1, 0, 0.4, 0.0)])),
            BallTerm::new(Polar, one(), trig(&[(0, 1, 0.0, 0.7)])),
            BallTerm::new(Leaf, one(), trig(&[(2, -1, 0.3, 0.2)])),
            BallTerm::new(Transverse, one(), trig(&[(1, 2, 0.1, 0.9)])),
        ]),
        TestVectorField::new("leaf-degree-five", vec![], vec![BallTerm::new(
            Leaf,
            one(),
            trig(&[(5, 0, 1.0, 0.0), (0, 5, 0.0, 1.0), (4, -5, 0.5, 0.5), (-3, 5, 0.2, -0.1), (1, 1, 1.0, 1.0)]),
        )]),
        TestVectorField::new(
            "mixed-base-and-transverse",
            vec![BaseTerm {
                potential: bf(&[([2, 0], 1.0, 0.5)]),
                torus: trig(&[(0, 0, 1.0, 0.0), (1, 1, 0.5, 0.0)]),
            }],
            vec![BallTerm::new(Transverse, bf(&[([1, 0], 1.0, 0.0)]), trig(&[(1, 0, 0.0, 1.0)]))],
        ),
        TestVectorField::new("leaf-constant-base-weighted", vec![], vec![BallTerm::new(
            Leaf,
            bf(&[([1, 0], 1.0, 0.0)]),
            trig(&[(0, 0, 1.0, 0.0)]),
        )]),
        TestVectorField::new(
            "mixed-everything",
            vec![BaseTerm {
                potential: bf(&[([1, 0], 0.3, 0.2), ([2, 0], 0.0, 0.4)]),
                torus: trig(&[(2, 1, 1.0, 0.0)]),
            }],
            vec![
                grad_d2,
                BallTerm::new(Leaf, bf(&[([0, 0], 1.0, 0.0), ([3, 0], 0.0, 0.2)]), trig(&[(1, -3, 0.6, 0.0)])),
                BallTerm::new(Polar, bf(&[([1, 0], 0.0, 1.0)]), trig(&[(0, 0, 1.0, 0.0)])),
            ],
        ),
        TestVectorField::new("leaf-plateau", vec![], vec![BallTerm::new(
            Leaf,
            one(),
            plateau([1.0, 2.0, 3.0, 4.0], trig(&[(0, 0, 2.0, 0.0), (0, 1, 0.0, 1.0)])),
        )]),
        TestVectorField::new("leaf-plateau-base-weighted", vec![], vec![BallTerm::new(
            Leaf,
            bf(&[([0, 0], 1.0, 0.0), ([1, 0], 0.5, 0.0)]),
            plateau([0.5, 1.7, 2.4, 4.6], trig(&[(0, 0, 1.0, 0.0), (0, 2, 1.0, 0.0)])),
        )]),
        TestVectorField::new(
            "mixed-plateau",
            vec![BaseTerm {
                potential: bf(&[([1, 0], 1.0, 0.0)]),
                torus: plateau([1.0, 2.0, 3.0, 4.0], trig(&[(0, 0, 1.0, 0.0)])),
            }],
            vec![
                BallTerm::new(Leaf, one(), plateau([1.5, 2.5, 3.5, 5.0], trig(&[(0, 0, 1.0, 0.0)]))),
                BallTerm::new(Radial, one(), plateau([1.0, 2.0, 3.0, 4.0], trig(&[(0, 1, 1.0, 0.0)]))),
            ],
        ),
    ]
}
