use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};

/// Chart operations need `ρ ≥ CHART_MARGIN` and `ψ ∈ [CHART_MARGIN, π/2 − CHART_MARGIN]`.
pub const CHART_MARGIN: f64 = 1e-6;

/// A point in the coordinates `(ρ, ψ, φ, θ)` of `F`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub rho: f64,
    pub psi: f64,
    pub phi: f64,
    pub theta: f64,
}

impl ChartPoint {
    pub const fn new(rho: f64, psi: f64, phi: f64, theta: f64) -> Self {
        ChartPoint {
            rho,
            psi,
            phi,
            theta,
        }
    }

    /// The Clifford torus point `F(1, π/4, φ, θ)`.
    pub fn on_torus(phi: f64, theta: f64) -> Self {
        Self::new(1.0, std::f64::consts::FRAC_PI_4, phi, theta)
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.rho, self.psi, self.phi, self.theta]
    }

    pub fn from_coords(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn in_domain(&self) -> bool {
        self.rho > 0.0 && self.rho <= 2.0 && self.psi > 0.0 && self.psi < FRAC_PI_2
    }

    pub fn within_margins(&self) -> bool {
        self.rho >= CHART_MARGIN
            && self.rho <= 2.0
            && self.psi >= CHART_MARGIN
            && self.psi <= FRAC_PI_2 - CHART_MARGIN
    }

    /// Same point with both angles reduced to `[0, 2π)`.
    pub fn wrapped(&self) -> Self {
        Self::new(self.rho, self.psi, self.phi.rem_euclid(TAU), self.theta.rem_euclid(TAU))
    }
}

/// A point of `B⁴ ⊂ ℝ⁴` in Cartesian coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmbientPoint {
    pub x: [f64; 4],
}

impl AmbientPoint {
    pub const fn new(x: [f64; 4]) -> Self {
        AmbientPoint { x }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum()
    }
}

pub fn chart_to_ambient(p: &ChartPoint) -> AmbientPoint {
    let (sp, cp) = p.psi.sin_cos();
    let (sf, cf) = p.phi.sin_cos();
    let (st, ct) = p.theta.sin_cos();
    AmbientPoint::new([
        p.rho * cp * sf,
        p.rho * cp * cf,
        p.rho * sp * st,
        p.rho * sp * ct,
    ])
}

/// Inverse of [`chart_to_ambient`]; angles are returned in `[0, 2π)`.
pub fn ambient_to_chart(x: &AmbientPoint) -> Result<ChartPoint> {
    let [x1, x2, x3, x4] = x.x;
    let r12 = x1.hypot(x2);
    let r34 = x3.hypot(x4);
    if r12 == 0.0 || r34 == 0.0 {
        return Err(GeoError::OutsideChart(x.x));
    }
    Ok(ChartPoint::new(
        r12.hypot(r34),
        r34.atan2(r12),
        x1.atan2(x2).rem_euclid(TAU),
        x3.atan2(x4).rem_euclid(TAU),
    ))
}

/// `DF` at `p`; column `j` is the `j`-th coordinate vector in Cartesian form.
pub fn chart_jacobian(p: &ChartPoint) -> Matrix4<f64> {
    let (sp, cp) = p.psi.sin_cos();
    let (sf, cf) = p.phi.sin_cos();
    let (st, ct) = p.theta.sin_cos();
    let r = p.rho;
    Matrix4::new(
        cp * sf, -r * sp * sf, r * cp * cf, 0.0, //
        cp * cf, -r * sp * cf, -r * cp * sf, 0.0, //
        sp * st, r * cp * st, 0.0, r * sp * ct, //
        sp * ct, r * cp * ct, 0.0, -r * sp * st,
    )
}

pub fn chart_velocity_to_ambient(p: &ChartPoint, v: &[f64; 4]) -> [f64; 4] {
    let w = chart_jacobian(p) * nalgebra::Vector4::from_column_slice(v);
    [w[0], w[1], w[2], w[3]]
}

/// Chart components of a Cartesian velocity `v` at `x`.
pub fn ambient_velocity_to_chart(x: &AmbientPoint, v: &[f64; 4]) -> Result<[f64; 4]> {
    let [x1, x2, x3, x4] = x.x;
    let q12 = x1 * x1 + x2 * x2;
    let q34 = x3 * x3 + x4 * x4;
    if q12 == 0.0 || q34 == 0.0 {
        return Err(GeoError::OutsideChart(x.x));
    }
    let r12 = q12.sqrt();
    let r34 = q34.sqrt();
    let rho_sq = q12 + q34;
    let dr12 = (x1 * v[0] + x2 * v[1]) / r12;
    let dr34 = (x3 * v[2] + x4 * v[3]) / r34;
    Ok([
        (x1 * v[0] + x2 * v[1] + x3 * v[2] + x4 * v[3]) / rho_sq.sqrt(),
        (r12 * dr34 - r34 * dr12) / rho_sq,
        (x2 * v[0] - x1 * v[1]) / q12,
        (x4 * v[2] - x3 * v[3]) / q34,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};

    fn angle_gap(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(TAU);
        d.min(TAU - d)
    }

    #[test]
    fn torus_point_maps_to_clifford_torus() {
        let x = chart_to_ambient(&ChartPoint::new(1.0, FRAC_PI_4, 0.0, 0.0));
        let expected = [0.0, FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2];
        for i in 0..4 {
            assert_abs_diff_eq!(x.x[i], expected[i], epsilon = 1e-15);
        }
        let back = ambient_to_chart(&x).unwrap();
        assert_abs_diff_eq!(back.rho, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(back.psi, FRAC_PI_4, epsilon = 1e-15);
        assert_abs_diff_eq!(back.phi, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(back.theta, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn quarter_turn_values() {
        let x = chart_to_ambient(&ChartPoint::new(2.0, FRAC_PI_4, FRAC_PI_2, FRAC_PI_2));
        let expected = [SQRT_2, 0.0, SQRT_2, 0.0];
        for i in 0..4 {
            assert_abs_diff_eq!(x.x[i], expected[i], epsilon = 1e-15);
        }
    }

    #[test]
    fn coordinate_planes_are_outside_chart() {
        for x in [[0.0, 0.0, 0.0, 1.0], [1.0, 0.0, 0.0, 0.0], [0.0; 4]] {
            assert!(matches!(
                ambient_to_chart(&AmbientPoint::new(x)),
                Err(GeoError::OutsideChart(_))
            ));
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = ChartPoint::new(1.3, 0.7, 2.1, -0.4);
        let j = chart_jacobian(&p);
        let h = 1e-6;
        for k in 0..4 {
            let mut a = p.coords();
            let mut b = p.coords();
            a[k] += h;
            b[k] -= h;
            let xa = chart_to_ambient(&ChartPoint::from_coords(a)).x;
            let xb = chart_to_ambient(&ChartPoint::from_coords(b)).x;
            for i in 0..4 {
                assert_abs_diff_eq!(j[(i, k)], (xa[i] - xb[i]) / (2.0 * h), epsilon = 1e-8);
            }
        }
    }

    proptest! {
        #[test]
        fn chart_round_trip(
            rho in 1e-3f64..2.0,
            psi in 1e-3f64..(FRAC_PI_2 - 1e-3),
            phi in -20.0f64..20.0,
            theta in -20.0f64..20.0,
        ) {
            let p = ChartPoint::new(rho, psi, phi, theta);
            let q = ambient_to_chart(&chart_to_ambient(&p)).unwrap();
            prop_assert!((q.rho - rho).abs() < 1e-12);
            prop_assert!((q.psi - psi).abs() < 1e-12);
            prop_assert!(angle_gap(q.phi, phi) < 1e-12);
            prop_assert!(angle_gap(q.theta, theta) < 1e-12);
        }

        #[test]
        fn velocity_round_trip(
            rho in 0.1f64..2.0,
            psi in 0.05f64..1.5,
            phi in 0.0f64..TAU,
            theta in 0.0f64..TAU,
            v in proptest::array::uniform4(-1.0f64..1.0),
        ) {
            let p = ChartPoint::new(rho, psi, phi, theta);
            let x = chart_to_ambient(&p);
            let w = chart_velocity_to_ambient(&p, &v);
            let back = ambient_velocity_to_chart(&x, &w).unwrap();
            for i in 0..4 {
                prop_assert!((back[i] - v[i]).abs() < 1e-9 * (1.0 + v[i].abs()) / psi.sin().min(psi.cos()));
            }
        }
    }
}
