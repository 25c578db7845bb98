//! The profile function `R = l + β (k − l)` that replaces `g₀(Y, Y)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use super::{anisotropy, anisotropy_d};
use crate::config::{BumpParams, ModelConfig, Profile};
use crate::error::{GeoError, Result};

/// Value and first partials of a function of `(ρ, ψ)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d_rho: f64,
    pub d_psi: f64,
}

/// `l(ρ, ψ) = ρ² (cos²ψ + α² sin²ψ)`, equal to `g₀(Y, Y) = g₀(Z, Z)`.
pub fn l_eval(rho: f64, psi: f64, alpha: f64) -> Jet {
    let c = anisotropy(psi, alpha);
    Jet {
        value: rho * rho * c,
        d_rho: 2.0 * rho * c,
        d_psi: rho * rho * anisotropy_d(psi, alpha),
    }
}

/// Explicit auxiliary profile
/// `k(ρ, ψ) = (ψ − π/4)² ρ + (ρ − 1)³ + cos²(π/4) + α² sin²(π/4)`.
pub fn k_eval(rho: f64, psi: f64, alpha: f64) -> Jet {
    let dp = psi - FRAC_PI_4;
    let dr = rho - 1.0;
    Jet {
        value: dp * dp * rho + dr * dr * dr + 0.5 * (1.0 + alpha * alpha),
        d_rho: dp * dp + 3.0 * dr * dr,
        d_psi: 2.0 * dp * rho,
    }
}

fn mollifier(t: f64) -> (f64, f64) {
    if t > 0.0 {
        let e = (-1.0 / t).exp();
        (e, e / (t * t))
    } else {
        (0.0, 0.0)
    }
}

/// Smooth step `s(t) = σ(t) / (σ(t) + σ(1 − t))` with `σ(t) = exp(−1/t)`,
/// and its derivative. Exactly 0 for `t ≤ 0` and exactly 1 for `t ≥ 1`.
pub fn smooth_step(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0);
    }
    let (a, da) = mollifier(t);
    let (b, db) = mollifier(1.0 - t);
    let sum = a + b;
    (a / sum, (da * b + a * db) / (sum * sum))
}

/// Plateau rising on `[a, b]`, equal to 1 on `[b, c]`, falling on `[c, d]`.
/// Returns value and derivative.
pub fn smooth_plateau(x: f64, a: f64, b: f64, c: f64, d: f64) -> (f64, f64) {
    let (up, dup) = smooth_step((x - a) / (b - a));
    let (down, ddown) = smooth_step((d - x) / (d - c));
    (up * down, dup / (b - a) * down - up * ddown / (d - c))
}

fn bump_factors(rho: f64, psi: f64, bump: &BumpParams) -> ((f64, f64), (f64, f64)) {
    let [r1, r2, r3, r4] = bump.rho;
    let (q1, q2) = bump.psi_plateau();
    (
        smooth_plateau(rho, r1, r2, r3, r4),
        smooth_plateau(psi, bump.psi[0], q1, q2, bump.psi[1]),
    )
}

/// Tensor-product bump `β(ρ, ψ) = b_ρ(ρ) b_ψ(ψ)`.
pub fn bump_eval(rho: f64, psi: f64, bump: &BumpParams) -> Jet {
    let ((br, dbr), (bp, dbp)) = bump_factors(rho, psi, bump);
    Jet {
        value: br * bp,
        d_rho: dbr * bp,
        d_psi: br * dbp,
    }
}

/// `R − l = β (k − l)` (plus the tilt term), exactly zero off the bump support.
pub fn profile_excess(rho: f64, psi: f64, cfg: &ModelConfig) -> Jet {
    if cfg.profile == Profile::Flat {
        return Jet::default();
    }
    let beta = bump_eval(rho, psi, &cfg.bump);
    if beta.value == 0.0 && beta.d_rho == 0.0 && beta.d_psi == 0.0 {
        return Jet::default();
    }
    let l = l_eval(rho, psi, cfg.alpha);
    let k = k_eval(rho, psi, cfg.alpha);
    let gap = k.value - l.value;
    let mut ex = Jet {
        value: beta.value * gap,
        d_rho: beta.d_rho * gap + beta.value * (k.d_rho - l.d_rho),
        d_psi: beta.d_psi * gap + beta.value * (k.d_psi - l.d_psi),
    };
    if let Profile::Tilted { epsilon } = cfg.profile {
        let dp = psi - FRAC_PI_4;
        ex.value += epsilon * dp * beta.value;
        ex.d_rho += epsilon * dp * beta.d_rho;
        ex.d_psi += epsilon * (beta.value + dp * beta.d_psi);
    }
    ex
}

/// `R(ρ, ψ)` with analytic first partials, for the configured profile.
pub fn r_eval(rho: f64, psi: f64, cfg: &ModelConfig) -> Jet {
    let l = l_eval(rho, psi, cfg.alpha);
    let ex = profile_excess(rho, psi, cfg);
    Jet {
        value: l.value + ex.value,
        d_rho: l.d_rho + ex.d_rho,
        d_psi: l.d_psi + ex.d_psi,
    }
}

/// `∂²R / ∂ρ∂ψ`, used for Lipschitz slack in grid certificates.
pub fn r_mixed_partial(rho: f64, psi: f64, cfg: &ModelConfig) -> f64 {
    let alpha = cfg.alpha;
    let l_mixed = 2.0 * rho * anisotropy_d(psi, alpha);
    if cfg.profile == Profile::Flat {
        return l_mixed;
    }
    let ((br, dbr), (bp, dbp)) = bump_factors(rho, psi, &cfg.bump);
    let beta = br * bp;
    let (b_r, b_p, b_rp) = (dbr * bp, br * dbp, dbr * dbp);
    let l = l_eval(rho, psi, alpha);
    let k = k_eval(rho, psi, alpha);
    let k_mixed = 2.0 * (psi - FRAC_PI_4);
    let gap = k.value - l.value;
    let mut out = l_mixed
        + b_rp * gap
        + b_r * (k.d_psi - l.d_psi)
        + b_p * (k.d_rho - l.d_rho)
        + beta * (k_mixed - l_mixed);
    if let Profile::Tilted { epsilon } = cfg.profile {
        let dp = psi - FRAC_PI_4;
        out += epsilon * (b_r + dp * b_rp);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxCheck {
    pub name: String,
    pub passed: bool,
    /// Signed margin; positive means the condition holds with room to spare.
    pub worst_margin: f64,
    /// Up to ten offending grid points `(ρ, ψ)`.
    pub failing: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub grid: usize,
    pub checks: Vec<BoxCheck>,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&BoxCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Scan {
    name: &'static str,
    worst: f64,
    failing: Vec<(f64, f64)>,
}

impl Scan {
    fn new(name: &'static str) -> Self {
        Scan {
            name,
            worst: f64::INFINITY,
            failing: Vec::new(),
        }
    }

    fn push(&mut self, margin: f64, at: (f64, f64)) {
        self.worst = self.worst.min(margin);
        if margin <= 0.0 && self.failing.len() < 10 {
            self.failing.push(at);
        }
    }

    fn finish(self) -> BoxCheck {
        BoxCheck {
            name: self.name.to_string(),
            passed: self.worst > 0.0,
            worst_margin: self.worst,
            failing: self.failing,
        }
    }
}

fn lin(a: f64, b: f64, i: usize, n: usize) -> f64 {
    a + (b - a) * i as f64 / (n - 1) as f64
}

/// Grid scan of the sign conditions on the knot boxes, positivity of `R`
/// and `∂ρR > 0` on the chart domain.
///
/// Failures are reported, not raised.
pub fn validate_bump_box(cfg: &ModelConfig, grid: usize) -> ValidationReport {
    let grid = grid.max(4);
    let mut structural = Scan::new("structure");
    match cfg.check() {
        Ok(()) => structural.push(1.0, (1.0, FRAC_PI_4)),
        Err(_) => structural.push(-1.0, (cfg.bump.rho[0], cfg.bump.psi[0])),
    }
    let structural = structural.finish();
    if !structural.passed {
        return ValidationReport {
            passed: false,
            grid,
            checks: vec![structural],
        };
    }

    let b = &cfg.bump;
    let alpha = cfg.alpha;
    let gap = |rho: f64, psi: f64| k_eval(rho, psi, alpha).value - l_eval(rho, psi, alpha).value;

    let mut inner = Scan::new("excess_positive_inside");
    let mut outer = Scan::new("excess_negative_outside");
    for i in 0..grid {
        let psi = lin(b.psi[0], b.psi[1], i, grid);
        for j in 0..grid {
            let r_in = lin(b.rho[0], b.rho[1], j, grid);
            inner.push(gap(r_in, psi), (r_in, psi));
            let r_out = lin(b.rho[2], b.rho[3], j, grid);
            outer.push(-gap(r_out, psi), (r_out, psi));
        }
    }

    let mut positive = Scan::new("r_positive");
    let mut monotone = Scan::new("r2_monotone");
    let mut monotone_away = Scan::new("r2_monotone_away_from_torus");
    for i in 0..grid {
        let rho = 2.0 * (i as f64 + 0.5) / grid as f64;
        for j in 0..grid {
            let psi = FRAC_PI_2 * (j as f64 + 0.5) / grid as f64;
            let r = r_eval(rho, psi, cfg);
            positive.push(r.value, (rho, psi));
            if rho == 1.0 && psi == FRAC_PI_4 {
                continue;
            }
            monotone.push(r.d_rho, (rho, psi));
            if (rho - 1.0).hypot(psi - FRAC_PI_4) > 0.05 {
                monotone_away.push(r.d_rho, (rho, psi));
            }
        }
    }

    let checks = vec![
        structural,
        inner.finish(),
        outer.finish(),
        positive.finish(),
        monotone.finish(),
        monotone_away.finish(),
    ];
    ValidationReport {
        passed: checks.iter().all(|c| c.passed),
        grid,
        checks,
    }
}

/// Structural checks plus the grid scan, as a hard error.
pub fn validated(cfg: &ModelConfig) -> Result<ValidationReport> {
    cfg.check()?;
    let report = validate_bump_box(cfg, 200);
    if let Some(c) = report.check("r_positive") {
        if !c.passed {
            let (rho, psi) = c.failing.first().copied().unwrap_or((f64::NAN, f64::NAN));
            return Err(GeoError::NonPositiveR {
                rho,
                psi,
                value: c.worst_margin,
            });
        }
    }
    if !report.passed {
        let failed: Vec<_> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} (worst margin {:e})", c.name, c.worst_margin))
            .collect();
        return Err(GeoError::InvalidConfig(format!(
            "bump box validation failed: {}",
            failed.join(", ")
        )));
    }
    Ok(report)
}
