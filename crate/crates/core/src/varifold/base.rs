use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BaseKind {
    Point,
    Circle { length: f64 },
    FlatTorus { sides: [f64; 2] },
}

/// Closed flat base manifold `M` with a uniform quadrature grid of
/// `resolution` nodes per dimension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseManifold {
    #[serde(flatten)]
    pub kind: BaseKind,
    pub resolution: usize,
}

impl BaseManifold {
    pub fn point() -> Self {
        Self {
            kind: BaseKind::Point,
            resolution: 1,
        }
    }

    pub fn circle(length: f64, resolution: usize) -> Self {
        Self {
            kind: BaseKind::Circle { length },
            resolution,
        }
    }

    pub fn unit_circle(resolution: usize) -> Self {
        Self::circle(TAU, resolution)
    }

    pub fn flat_torus(sides: [f64; 2], resolution: usize) -> Self {
        Self {
            kind: BaseKind::FlatTorus { sides },
            resolution,
        }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            BaseKind::Point => 0,
            BaseKind::Circle { .. } => 1,
            BaseKind::FlatTorus { .. } => 2,
        }
    }

    pub fn sides(&self) -> Vec<f64> {
        match self.kind {
            BaseKind::Point => vec![],
            BaseKind::Circle { length } => vec![length],
            BaseKind::FlatTorus { sides } => sides.to_vec(),
        }
    }

    /// `vol_m(M)`; a point has counting measure 1.
    pub fn volume(&self) -> f64 {
        self.sides().iter().product()
    }

    pub fn check(&self) -> Result<()> {
        if self.sides().iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(GeoError::InvalidArgument("base side lengths must be positive".into()));
        }
        if self.dim() > 0 && self.resolution == 0 {
            return Err(GeoError::InvalidArgument("base resolution must be positive".into()));
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.resolution.pow(self.dim() as u32).max(1)
    }

    /// Coordinates of node `i`; unused slots are zero.
    pub fn node(&self, i: usize) -> [f64; 2] {
        let n = self.resolution;
        match self.kind {
            BaseKind::Point => [0.0, 0.0],
            BaseKind::Circle { length } => [length * i as f64 / n as f64, 0.0],
            BaseKind::FlatTorus { sides } => [
                sides[0] * (i / n) as f64 / n as f64,
                sides[1] * (i % n) as f64 / n as f64,
            ],
        }
    }

    fn wave_vector(&self, k: [i32; 2]) -> [f64; 2] {
        let sides = self.sides();
        let mut w = [0.0; 2];
        for (d, &len) in sides.iter().enumerate() {
            w[d] = TAU * k[d] as f64 / len;
        }
        w
    }
}

/// `a cos(κ·s) + b sin(κ·s)` with `κ_i = 2π k_i / L_i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseMode {
    pub k: [i32; 2],
    pub cos: f64,
    pub sin: f64,
}

/// Trigonometric polynomial on the base. Wave numbers in dimensions the base
/// does not have are ignored.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BaseFunction {
    pub modes: Vec<BaseMode>,
}

impl BaseFunction {
    pub fn constant(c: f64) -> Self {
        Self {
            modes: vec![BaseMode {
                k: [0, 0],
                cos: c,
                sin: 0.0,
            }],
        }
    }

    pub fn mode(k: [i32; 2], cos: f64, sin: f64) -> Self {
        Self {
            modes: vec![BaseMode { k, cos, sin }],
        }
    }

    pub fn plus(mut self, other: BaseFunction) -> Self {
        self.modes.extend(other.modes);
        self
    }

    /// Value, gradient and Laplacian at `s`.
    pub fn eval(&self, base: &BaseManifold, s: [f64; 2]) -> (f64, [f64; 2], f64) {
        let (mut v, mut grad, mut lap) = (0.0, [0.0; 2], 0.0);
        for m in &self.modes {
            let w = base.wave_vector(m.k);
            let (sn, cs) = (w[0] * s[0] + w[1] * s[1]).sin_cos();
            let f = m.cos * cs + m.sin * sn;
            let d = -m.cos * sn + m.sin * cs;
            v += f;
            grad[0] += w[0] * d;
            grad[1] += w[1] * d;
            lap -= (w[0] * w[0] + w[1] * w[1]) * f;
        }
        (v, grad, lap)
    }
}
