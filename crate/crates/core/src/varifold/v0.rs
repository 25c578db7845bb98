use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::base::BaseManifold;
use super::field::TestVectorField;
use crate::config::ModelConfig;
use crate::error::{GeoError, Result};
use crate::quadrature::pairwise_sum;

/// A node of `M × T²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct V0Node {
    pub base: [f64; 2],
    pub phi: f64,
    pub theta: f64,
}

/// Discretised `V₀`: equal weights on the product grid of the base nodes and
/// an `n × n` grid on `T²`, with the plane `T_pM × span(Ȳ_q)` at every node.
#[derive(Clone, Debug)]
pub struct VarifoldV0 {
    pub base: BaseManifold,
    pub torus_resolution: usize,
    pub cfg: ModelConfig,
}

/// Build `V₀` over `base` with `torus_resolution ≥ 8` nodes per torus angle.
pub fn build_v0(base: BaseManifold, torus_resolution: usize, cfg: &ModelConfig) -> Result<VarifoldV0> {
    base.check()?;
    if torus_resolution < 8 || (base.dim() > 0 && base.resolution < 8) {
        return Err(GeoError::InvalidArgument("varifold grids need at least 8 nodes per dimension".into()));
    }
    Ok(VarifoldV0 {
        base,
        torus_resolution,
        cfg: cfg.clone(),
    })
}

impl VarifoldV0 {
    pub fn dim(&self) -> usize {
        self.base.dim() + 1
    }

    pub fn node_count(&self) -> usize {
        self.base.node_count() * self.torus_resolution * self.torus_resolution
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.node_count() as f64
    }

    /// Node `i`: base index `i / n²`, then `φ` index, then `θ` index.
    pub fn node(&self, i: usize) -> V0Node {
        let n = self.torus_resolution;
        let (b, t) = (i / (n * n), i % (n * n));
        V0Node {
            base: self.base.node(b),
            phi: TAU * (t / n) as f64 / n as f64,
            theta: TAU * (t % n) as f64 / n as f64,
        }
    }

    pub fn total_mass(&self) -> f64 {
        pairwise_sum(&vec![self.weight(); self.node_count()])
    }

    /// Mass of `M × [φ0, φ1) × [θ0, θ1)` for `0 ≤ φ0 < φ1 ≤ 2π` etc.
    pub fn mass_of_rectangle(&self, phi: (f64, f64), theta: (f64, f64)) -> f64 {
        let n = self.torus_resolution;
        let count = |(a, b): (f64, f64)| (0..n).filter(|&i| (a..b).contains(&(TAU * i as f64 / n as f64))).count();
        let cells = count(phi) * count(theta) * self.base.node_count();
        pairwise_sum(&vec![self.weight(); cells])
    }

    /// Orthonormal basis (rows) of the plane at a node, in coordinates
    /// `(M coordinates, ∂ρ, ∂ψ/ρ, Y/√R, Z/√l)`. It does not depend on the node.
    pub fn plane_basis(&self) -> DMatrix<f64> {
        let m = self.base.dim();
        let mut e = DMatrix::zeros(m + 1, m + 4);
        for i in 0..m {
            e[(i, i)] = 1.0;
        }
        e[(m, m + 2)] = 1.0;
        e
    }

    fn node_values<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(&V0Node) -> f64 + Sync,
    {
        (0..self.node_count()).into_par_iter().map(|i| f(&self.node(i))).collect()
    }

    /// `δV₀(X) = ∫ div_{T_pM × T_qF} X dμ` by the product-grid rule.
    pub fn first_variation(&self, x: &TestVectorField) -> f64 {
        let b = &self.base;
        let values = self.node_values(|n| x.divergence_on_plane(b, n.base, n.phi, n.theta, &self.cfg));
        pairwise_sum(&values) * self.weight()
    }

    /// First variation through the covariant divergence.
    pub fn first_variation_covariant(&self, x: &TestVectorField) -> f64 {
        let b = &self.base;
        let values = self.node_values(|n| x.divergence_covariant(b, n.base, n.phi, n.theta, &self.cfg));
        pairwise_sum(&values) * self.weight()
    }
}

/// `first_variation` as a free function.
pub fn first_variation(v0: &VarifoldV0, x: &TestVectorField) -> f64 {
    v0.first_variation(x)
}
