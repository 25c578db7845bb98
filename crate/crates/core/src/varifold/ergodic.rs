use std::f64::consts::TAU;

use super::trig::TrigPoly;
use crate::config::ModelConfig;
use crate::error::{GeoError, Result};
use crate::quadrature::{gauss_legendre, pairwise_sum};

fn frequency(k: i32, l: i32, cfg: &ModelConfig) -> f64 {
    (k as f64 + cfg.alpha * l as f64) / cfg.leaf_speed()
}

fn angular_frequencies(f: &TrigPoly, cfg: &ModelConfig) -> f64 {
    f.terms.iter().map(|t| frequency(t.k, t.l, cfg).abs()).fold(0.0, f64::max)
}

/// Time average `(1/T) ∫₀ᵀ f(φ0 + t/a, θ0 + αt/a) dt` along the unit-speed
/// leaf flow, by composite Gauss–Legendre quadrature.
pub fn ergodic_average(f: &TrigPoly, start: (f64, f64), t_end: f64, cfg: &ModelConfig) -> Result<f64> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(GeoError::InvalidArgument(format!("averaging time must be positive, got {t_end}")));
    }
    let a = cfg.leaf_speed();
    let panels = (t_end * (1.0 + angular_frequencies(f, cfg))).ceil() as usize;
    let integral = gauss_legendre(
        |t| f.value(start.0 + t / a, start.1 + cfg.alpha * t / a),
        0.0,
        t_end,
        panels.max(1),
    );
    Ok(integral / t_end)
}

/// Closed-form time average from the antiderivative of each harmonic.
pub fn ergodic_average_exact(f: &TrigPoly, start: (f64, f64), t_end: f64, cfg: &ModelConfig) -> f64 {
    f.terms
        .iter()
        .map(|t| {
            let w = frequency(t.k, t.l, cfg);
            let p0 = t.k as f64 * start.0 + t.l as f64 * start.1;
            if w == 0.0 {
                t.cos * p0.cos() + t.sin * p0.sin()
            } else {
                let p1 = p0 + w * t_end;
                (t.cos * (p1.sin() - p0.sin()) - t.sin * (p1.cos() - p0.cos())) / (w * t_end)
            }
        })
        .sum()
}

/// `Σ 2|cᵢ| / (|ωᵢ| T)` over the non-constant harmonics: the closed-form
/// bound on `|time average − space average|`. Infinite on a resonant harmonic.
pub fn ergodic_bound(f: &TrigPoly, t_end: f64, cfg: &ModelConfig) -> f64 {
    f.terms
        .iter()
        .filter(|t| (t.k, t.l) != (0, 0))
        .map(|t| 2.0 * t.cos.hypot(t.sin) / (frequency(t.k, t.l, cfg).abs() * t_end))
        .sum()
}

/// Mean over `T²` by the uniform `n × n` rule (exact for degree `< n`).
pub fn space_average(f: &TrigPoly, n: usize) -> f64 {
    let vals: Vec<f64> = (0..n * n)
        .map(|i| f.value(TAU * (i / n) as f64 / n as f64, TAU * (i % n) as f64 / n as f64))
        .collect();
    pairwise_sum(&vals) / (n * n) as f64
}

/// `max |∫ f∘φ_t − ∫ f|` over observables and times, integrals taken by a
/// uniform grid that is exact for every observable.
pub fn flow_invariance_check(observables: &[TrigPoly], times: &[f64], cfg: &ModelConfig) -> f64 {
    let a = cfg.leaf_speed();
    let mut worst: f64 = 0.0;
    for f in observables {
        let n = 2 * f.degree() as usize + 2;
        let base = space_average(f, n);
        for &t in times {
            let (dp, dt) = (t / a, cfg.alpha * t / a);
            let vals: Vec<f64> = (0..n * n)
                .map(|i| f.value(TAU * (i / n) as f64 / n as f64 + dp, TAU * (i % n) as f64 / n as f64 + dt))
                .collect();
            worst = worst.max((pairwise_sum(&vals) / (n * n) as f64 - base).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::varifold::TrigTerm;

    #[test]
    fn constant_averages_to_one() {
        let cfg = ModelConfig::default();
        let one = TrigPoly::constant(1.0);
        assert!((ergodic_average(&one, (0.3, 0.1), 123.0, &cfg).unwrap() - 1.0).abs() < 1e-14);
        assert!(ergodic_average(&one, (0.0, 0.0), 0.0, &cfg).is_err());
    }

    #[test]
    fn cos_phi_average_within_antiderivative_bound() {
        let cfg = ModelConfig::default();
        let f = TrigPoly::cos_term(1, 0, 1.0);
        let t = 1e4;
        let avg = ergodic_average(&f, (0.0, 0.0), t, &cfg).unwrap();
        assert!(avg.abs() <= 2.0 * cfg.leaf_speed() / t);
        assert!((avg - ergodic_average_exact(&f, (0.0, 0.0), t, &cfg)).abs() < 1e-12);
    }

    #[test]
    fn non_resonant_harmonic_decays_like_one_over_t() {
        let cfg = ModelConfig::default();
        let f = TrigPoly::cos_term(3, -2, 1.0);
        for t in [1e2, 1e3, 1e4] {
            let avg = ergodic_average(&f, (0.2, 0.5), t, &cfg).unwrap();
            assert!(avg.abs() <= ergodic_bound(&f, t, &cfg));
        }
    }

    #[test]
    fn rational_slope_resonates() {
        let cfg = ModelConfig::rational_control(1.0);
        let f = TrigPoly::cos_term(1, -1, 1.0);
        assert!(ergodic_bound(&f, 1e4, &cfg).is_infinite());
        let avg = ergodic_average(&f, (0.0, 0.0), 1e3, &cfg).unwrap();
        assert!((avg - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invariance_of_normalised_area() {
        let cfg = ModelConfig::default();
        let fs = vec![
            TrigPoly::constant(1.0),
            TrigPoly::cos_term(2, 3, 1.0),
            TrigPoly::new(vec![
                TrigTerm { k: 0, l: 0, cos: 0.7, sin: 0.0 },
                TrigTerm { k: 5, l: -4, cos: 0.3, sin: 0.1 },
            ]),
        ];
        assert!(flow_invariance_check(&fs, &[0.1, 1.0, 10.0], &cfg) < 1e-12);
    }
}
