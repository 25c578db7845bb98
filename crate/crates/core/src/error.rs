use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeoError>;

#[derive(Debug, Error)]
pub enum GeoError {
    #[error("point {0:?} lies outside the chart image (on a coordinate plane or at the origin)")]
    OutsideChart([f64; 4]),

    #[error("profile R is non-positive ({value:e}) at rho={rho}, psi={psi}")]
    NonPositiveR { rho: f64, psi: f64, value: f64 },

    #[error("relative energy drift {drift:e} exceeds bound {bound:e}; retry with a smaller step")]
    StepTooLarge { drift: f64, bound: f64 },

    #[error("smallest ball holds {nodes} nodes, at least {required} required")]
    InsufficientResolution { nodes: u64, required: u64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
