//! Construction and numerical certification of a Riemannian metric on the
//! closed 4-ball of radius 2 whose boundary is strictly convex, which carries
//! a complete geodesic dense in the Clifford torus, and which has no closed
//! geodesic. The same metric yields a stationary but non-rectifiable varifold
//! on products `M × B⁴`.
//!
//! Module map:
//! - [`metric`]: chart, frame, the profile function `R` and the metric itself.
//! - [`geodesics`]: Christoffel symbols, fixed-step geodesic integration, the
//!   explicit foliation geodesic and the closed-geodesic shooting search.
//! - [`convexity`]: Hessians of the distance function and second fundamental
//!   forms of spheres and of the Clifford torus.
//! - [`varifold`]: the varifold `V₀`, its first variation, ergodic averages,
//!   density scaling and the isoperimetric strips.
//! - [`report`] and [`suites`]: check reports and the verification suites
//!   driven by the `geoverify` binary.

pub mod config;
pub mod convexity;
pub mod error;
pub mod geodesics;
pub mod metric;
pub mod oracles;
pub mod report;
pub mod suites;
pub mod varifold;

mod quadrature;

pub use config::{BumpParams, IntegratorSettings, ModelConfig, Profile, Tolerances};
pub use error::{GeoError, Result};
pub use metric::{AmbientPoint, ChartPoint, FrameMetric};
