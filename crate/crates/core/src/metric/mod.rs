//! The chart `F`, the frame `(∂ρ, ∂ψ, Y, Z)`, the profile function `R` and the
//! metric `g` in frame, chart and Cartesian form.

mod chart;
mod profile;
mod tensor;

pub use chart::{
    ambient_to_chart, ambient_velocity_to_chart, chart_jacobian, chart_to_ambient,
    chart_velocity_to_ambient, AmbientPoint, ChartPoint, CHART_MARGIN,
};
pub use profile::{
    bump_eval, k_eval, l_eval, profile_excess, r_eval, r_mixed_partial, smooth_plateau, smooth_step,
    validate_bump_box, validated, BoxCheck, Jet, ValidationReport,
};
pub use tensor::{
    frame, frame_components, is_flat_region, leaf_coframe, metric_ambient, metric_chart,
    metric_chart_partials, metric_frame, Frame, FrameMetric,
};

/// `cos²ψ + α² sin²ψ`, the ψ-factor shared by `l`, `g(Z, Z)` and the Hessian.
#[inline]
pub fn anisotropy(psi: f64, alpha: f64) -> f64 {
    let (s, c) = psi.sin_cos();
    c * c + alpha * alpha * s * s
}

/// Derivative of [`anisotropy`] in `ψ`: `(α² − 1) sin 2ψ`.
#[inline]
pub fn anisotropy_d(psi: f64, alpha: f64) -> f64 {
    (alpha * alpha - 1.0) * (2.0 * psi).sin()
}
