//! Model configuration: everything the construction leaves free.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, SQRT_2};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{GeoError, Result};

/// Radial and angular knots of the bump function `β`.
///
/// `β` rises on `[ρ1, ρ2]`, equals 1 on `[ρ2, ρ3]` and falls on `[ρ3, ρ4]`; in
/// `ψ` it rises on the first quarter of `[ψ1, ψ2]`, has a plateau on the middle
/// half and falls on the last quarter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpParams {
    pub rho: [f64; 4],
    pub psi: [f64; 2],
}

impl Default for BumpParams {
    fn default() -> Self {
        BumpParams {
            rho: [0.7, 0.85, 1.15, 1.3],
            psi: [FRAC_PI_4 - 0.2, FRAC_PI_4 + 0.2],
        }
    }
}

impl BumpParams {
    /// Inner edges of the `ψ` plateau.
    pub fn psi_plateau(&self) -> (f64, f64) {
        let q = 0.25 * (self.psi[1] - self.psi[0]);
        (self.psi[0] + q, self.psi[1] - q)
    }

    pub fn contains(&self, rho: f64, psi: f64) -> bool {
        rho >= self.rho[0] && rho <= self.rho[3] && psi >= self.psi[0] && psi <= self.psi[1]
    }

    fn check(&self) -> Result<()> {
        let [r1, r2, r3, r4] = self.rho;
        let [p1, p2] = self.psi;
        if !self.rho.iter().chain(self.psi.iter()).all(|v| v.is_finite()) {
            return Err(GeoError::InvalidConfig("bump knots must be finite".into()));
        }
        if !(r1 < r2 && r2 < 1.0 && 1.0 < r3 && r3 < r4) {
            return Err(GeoError::InvalidConfig(format!(
                "radial knots must satisfy rho1 < rho2 < 1 < rho3 < rho4, got {:?}",
                self.rho
            )));
        }
        if !(p1 < FRAC_PI_4 && FRAC_PI_4 < p2) {
            return Err(GeoError::InvalidConfig(format!(
                "angular knots must satisfy psi1 < pi/4 < psi2, got {:?}",
                self.psi
            )));
        }
        if !(r1 > 0.5 && r4 < 1.5 && p1 > FRAC_PI_8 && p2 < 3.0 * FRAC_PI_8) {
            return Err(GeoError::InvalidConfig(format!(
                "(R1) box containment violated: need 1/2 < rho1, rho4 < 3/2, pi/8 < psi1, psi2 < 3pi/8; \
                 got rho {:?}, psi {:?}",
                self.rho, self.psi
            )));
        }
        let (q1, q2) = self.psi_plateau();
        if !(q1 < FRAC_PI_4 && FRAC_PI_4 < q2) {
            return Err(GeoError::InvalidConfig(
                "psi plateau does not contain pi/4".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Smallest eigenvalue accepted as positive.
    pub pd: f64,
    /// Values below this magnitude count as zero.
    pub zero: f64,
    /// Joint position + velocity residual for a closed-geodesic candidate.
    pub closure: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            pd: 1e-12,
            zero: 1e-10,
            closure: 1e-4,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    Rk4,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorSettings {
    pub step: f64,
    pub scheme: Scheme,
    /// Relative energy drift that aborts an integration.
    pub max_energy_drift: f64,
    /// Width of the band around the chart box used to avoid mode chattering.
    pub hysteresis: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        IntegratorSettings {
            step: 1e-3,
            scheme: Scheme::Rk4,
            max_energy_drift: 1e-6,
            hysteresis: 0.01,
        }
    }
}

/// Which member of the `R`-family defines `g(Y, Y)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Profile {
    /// `R = l + β (k − l)`.
    #[default]
    Constructed,
    /// `R = l`: the Euclidean metric.
    Flat,
    /// `R = l + β (k − l) + ε (ψ − π/4) β`, which breaks `DR(1, π/4) = 0`.
    Tilted { epsilon: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub alpha: f64,
    /// Marks `alpha` as a rational control value (closed leaves expected).
    #[serde(default)]
    pub alpha_rational: bool,
    #[serde(default)]
    pub bump: BumpParams,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub integrator: IntegratorSettings,
    #[serde(default)]
    pub profile: Profile,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            alpha: SQRT_2,
            alpha_rational: false,
            bump: BumpParams::default(),
            tolerances: Tolerances::default(),
            integrator: IntegratorSettings::default(),
            profile: Profile::default(),
        }
    }
}

impl ModelConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        ModelConfig {
            alpha,
            ..Self::default()
        }
    }

    /// Rational control: same construction, with closed torus leaves.
    pub fn rational_control(alpha: f64) -> Self {
        ModelConfig {
            alpha,
            alpha_rational: true,
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ModelConfig = serde_json::from_str(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Structural checks only; the grid scan lives in
    /// [`crate::metric::validate_bump_box`].
    pub fn check(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(GeoError::InvalidConfig(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        self.bump.check()?;
        let it = &self.integrator;
        if !(it.step > 0.0 && it.step.is_finite()) {
            return Err(GeoError::InvalidConfig("integrator step must be positive".into()));
        }
        if !(it.max_energy_drift > 0.0) {
            return Err(GeoError::InvalidConfig("max_energy_drift must be positive".into()));
        }
        if !(it.hysteresis >= 0.0 && it.hysteresis < 0.1) {
            return Err(GeoError::InvalidConfig("hysteresis must lie in [0, 0.1)".into()));
        }
        let t = &self.tolerances;
        if !(t.pd > 0.0 && t.zero > 0.0 && t.closure > 0.0) {
            return Err(GeoError::InvalidConfig("tolerances must be positive".into()));
        }
        Ok(())
    }

    /// Hex SHA-256 of the compact JSON form.
    pub fn fingerprint(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// Norm of `Y` on the Clifford torus, `sqrt((1 + α²) / 2)`.
    pub fn leaf_speed(&self) -> f64 {
        (0.5 * (1.0 + self.alpha * self.alpha)).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_passes_structural_checks() {
        ModelConfig::default().check().unwrap();
    }

    #[test]
    fn json_round_trip_and_partial_documents() {
        let cfg = ModelConfig::default();
        let back = ModelConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, back);

        let partial = r#"{"alpha": 1.5, "bump": {"rho": [0.7, 0.85, 1.15, 1.3], "psi": [0.6, 0.95]}}"#;
        let cfg = ModelConfig::from_json(partial).unwrap();
        assert_eq!(cfg.alpha, 1.5);
        assert_eq!(cfg.integrator, IntegratorSettings::default());
    }

    #[test]
    fn rejects_box_outside_r1_region() {
        let mut cfg = ModelConfig::default();
        cfg.bump.rho[0] = 0.3;
        let err = cfg.check().unwrap_err().to_string();
        assert!(err.contains("(R1)"), "{err}");
    }

    #[test]
    fn rejects_bad_alpha_and_ordering() {
        assert!(ModelConfig::with_alpha(-1.0).check().is_err());
        let mut cfg = ModelConfig::default();
        cfg.bump.rho = [0.8, 0.7, 1.1, 1.2];
        assert!(cfg.check().is_err());
    }

    #[test]
    fn fingerprint_tracks_content() {
        let a = ModelConfig::default();
        let b = ModelConfig::with_alpha(1.7);
        assert_eq!(a.fingerprint(), ModelConfig::default().fingerprint());
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint().len(), 64);
    }

    #[test]
    fn leaf_speed_matches_closed_form() {
        let cfg = ModelConfig::default();
        assert!((cfg.leaf_speed() - (1.5f64).sqrt()).abs() < 1e-15);
        assert!((ModelConfig::with_alpha(1.0).leaf_speed() - 1.0).abs() < 1e-15);
    }
}
