use serde::{Deserialize, Serialize};

/// `a cos(kφ + lθ) + b sin(kφ + lθ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub k: i32,
    pub l: i32,
    pub cos: f64,
    pub sin: f64,
}

/// Finite trigonometric polynomial on `T² = [0, 2π)²`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub terms: Vec<TrigTerm>,
}

impl TrigPoly {
    pub fn new(terms: Vec<TrigTerm>) -> Self {
        Self { terms }
    }

    pub fn constant(c: f64) -> Self {
        Self::cos_term(0, 0, c)
    }

    pub fn cos_term(k: i32, l: i32, a: f64) -> Self {
        Self::new(vec![TrigTerm { k, l, cos: a, sin: 0.0 }])
    }

    pub fn sin_term(k: i32, l: i32, b: f64) -> Self {
        Self::new(vec![TrigTerm { k, l, cos: 0.0, sin: b }])
    }

    pub fn plus(mut self, other: TrigPoly) -> Self {
        self.terms.extend(other.terms);
        self
    }

    /// Value and the two partials `(f, ∂φf, ∂θf)`.
    pub fn eval(&self, phi: f64, theta: f64) -> (f64, f64, f64) {
        let (mut v, mut dp, mut dt) = (0.0, 0.0, 0.0);
        for t in &self.terms {
            let (s, c) = (t.k as f64 * phi + t.l as f64 * theta).sin_cos();
            let d = -t.cos * s + t.sin * c;
            v += t.cos * c + t.sin * s;
            dp += t.k as f64 * d;
            dt += t.l as f64 * d;
        }
        (v, dp, dt)
    }

    pub fn value(&self, phi: f64, theta: f64) -> f64 {
        self.eval(phi, theta).0
    }

    /// Largest `max(|k|, |l|)`.
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.k.unsigned_abs().max(t.l.unsigned_abs()))
            .max()
            .unwrap_or(0)
    }

    /// Exact mean over `T²`.
    pub fn mean(&self) -> f64 {
        self.terms.iter().filter(|t| t.k == 0 && t.l == 0).map(|t| t.cos).sum()
    }
}
