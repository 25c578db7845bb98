//! Geodesics of `g`: Christoffel symbols, fixed-step RK4 integration with a
//! straight-line fast path where `g = g₀`, the foliation geodesic on the
//! Clifford torus, and a shooting search for closed geodesics.

mod christoffel;
mod foliation;
mod integrate;
mod search;

pub use christoffel::{christoffel, geodesic_acceleration, Christoffel};
pub use foliation::{foliation_geodesic, leaf_return_gap};
pub use integrate::{
    convexity_certificate, integrate_geodesic, rk4_chart_step, write_trajectory_csv, GeodesicFlow,
    GeodesicState, Sample, Termination, Trajectory, TRAJECTORY_CSV_HEADER,
};
pub use search::{
    closed_geodesic_search, closure_residual, search_from_states, seed_state,
    ClosedGeodesicCandidate, SeedRegion,
};
