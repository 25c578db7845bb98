//! The unit-mass varifold `V₀` on `M̃ = M × B⁴`: pushforward of the
//! normalised volume of `M × T²` onto the plane field `T_pM × span(Ȳ_q)`.
//!
//! Everything lives on uniform product grids. Torus observables and test
//! fields are finite trigonometric polynomials (optionally multiplied by a
//! smooth plateau), so integrals over `T²` are exact up to roundoff once the
//! grid resolves the highest harmonic.

mod base;
mod density;
mod ergodic;
mod field;
mod isoperimetric;
mod planes;
mod trig;
mod v0;

pub use base::{BaseFunction, BaseKind, BaseManifold, BaseMode};
pub use density::{ball_mass, density_scaling, DensityScaling};
pub use ergodic::{ergodic_average, ergodic_average_exact, ergodic_bound, flow_invariance_check, space_average};
pub use field::{
    field_library, BallDirection, BallTerm, BaseTerm, RadialCutoff, TestVectorField, TorusProfile,
};
pub use isoperimetric::{isoperimetric_ratio, strip_core_length};
pub use planes::{grassmann_distance, orthonormal_rows, random_plane_scan, trace_hessian_on_plane, PlaneScan};
pub use trig::{TrigPoly, TrigTerm};
pub use v0::{build_v0, first_variation, V0Node, VarifoldV0};
