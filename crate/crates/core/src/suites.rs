//! Verification suites: every module's invariants as a list of [`Check`]s.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ModelConfig, Profile};
use crate::convexity::{
    hessian_d2_frame, hessian_d2_sign_sweep, hessian_d_frame, hessians_from_connection, sphere_sff, torus_sff_y,
    Definiteness, FrameDirection,
};
use crate::error::{GeoError, Result};
use crate::geodesics::{
    christoffel, convexity_certificate, foliation_geodesic, integrate_geodesic, leaf_return_gap, search_from_states,
    seed_state, closed_geodesic_search, GeodesicState, Trajectory,
};
use crate::metric::{
    ambient_to_chart, chart_jacobian, chart_to_ambient, frame, frame_components, l_eval, metric_ambient, metric_chart,
    r_eval, validate_bump_box, AmbientPoint, ChartPoint,
};
use crate::oracles::{christoffel_fd, geodesic_second_derivative, torus_sff_y_variational};
use crate::report::{Check, Comparison, SuiteReport};
use crate::varifold::{
    build_v0, density_scaling, ergodic_average, ergodic_bound, field_library, flow_invariance_check,
    isoperimetric_ratio, random_plane_scan, strip_core_length, trace_hessian_on_plane, BaseManifold, TrigPoly,
    TrigTerm, VarifoldV0,
};

use Comparison::*;

/// Default RNG seed for every random scan.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Metric,
    Convexity,
    Geodesics,
    Varifold,
    All,
}

impl Suite {
    pub const MODULES: [Suite; 4] = [Suite::Metric, Suite::Convexity, Suite::Geodesics, Suite::Varifold];

    pub fn name(self) -> &'static str {
        match self {
            Self::Metric => "metric",
            Self::Convexity => "convexity",
            Self::Geodesics => "geodesics",
            Self::Varifold => "varifold",
            Self::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "metric" => Ok(Self::Metric),
            "convexity" => Ok(Self::Convexity),
            "geodesics" => Ok(Self::Geodesics),
            "varifold" => Ok(Self::Varifold),
            "all" => Ok(Self::All),
            _ => Err(GeoError::InvalidArgument(format!(
                "unknown suite `{s}` (expected metric, convexity, geodesics, varifold or all)"
            ))),
        }
    }
}

/// Slope `p/q` in lowest terms for the rational control metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RationalSlope {
    pub p: u64,
    pub q: u64,
}

impl RationalSlope {
    pub fn value(self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// Unit-speed period `2π q a` of every leaf.
    pub fn leaf_period(self) -> f64 {
        let a = ((1.0 + self.value().powi(2)) / 2.0).sqrt();
        TAU * self.q as f64 * a
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

impl FromStr for RationalSlope {
    type Err = GeoError;

    /// Accepts `p/q` or a decimal that is a fraction with denominator ≤ 1000.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || GeoError::InvalidArgument(format!("`{s}` is not a positive rational slope"));
        let (p, q) = if let Some((a, b)) = s.split_once('/') {
            (a.trim().parse::<u64>().map_err(|_| bad())?, b.trim().parse::<u64>().map_err(|_| bad())?)
        } else {
            let x: f64 = s.trim().parse().map_err(|_| bad())?;
            if !(x > 0.0 && x.is_finite()) {
                return Err(bad());
            }
            let q = (1..=1000u64).find(|q| ((x * *q as f64).round() - x * *q as f64).abs() < 1e-9 * *q as f64).ok_or_else(bad)?;
            ((x * q as f64).round() as u64, q)
        };
        if p == 0 || q == 0 {
            return Err(bad());
        }
        let g = gcd(p, q);
        Ok(Self { p: p / g, q: q / g })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub control: RationalSlope,
    /// Seeds for the closed-geodesic search.
    pub search_seeds: usize,
    pub search_period: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            control: RationalSlope { p: 1, q: 1 },
            search_seeds: 10_000,
            search_period: 200.0,
        }
    }
}

/// Validate the configuration and run the named suite.
pub fn run_suite(suite: Suite, cfg: &ModelConfig, opts: &SuiteOptions) -> Result<SuiteReport> {
    cfg.check()?;
    crate::metric::validated(cfg)?;
    let fp = cfg.fingerprint();
    let checks = match suite {
        Suite::Metric => metric_checks(cfg, opts.seed),
        Suite::Convexity => convexity_checks(cfg, opts.seed),
        Suite::Geodesics => geodesic_checks(cfg, opts)?,
        Suite::Varifold => varifold_checks(cfg, opts.seed),
        Suite::All => {
            let parts = Suite::MODULES
                .iter()
                .map(|s| run_suite(*s, cfg, opts))
                .collect::<Result<Vec<_>>>()?;
            return Ok(SuiteReport::merge("all", parts, fp, opts.seed));
        }
    };
    Ok(SuiteReport::new(suite.name(), checks, fp, opts.seed))
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn random_chart_point(rng: &mut ChaCha8Rng, rho: (f64, f64), psi: (f64, f64)) -> ChartPoint {
    ChartPoint::new(
        rng.random_range(rho.0..rho.1),
        rng.random_range(psi.0..psi.1),
        rng.random_range(0.0..TAU),
        rng.random_range(0.0..TAU),
    )
}

fn quad(g: &Matrix4<f64>, a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (Vector4::from_column_slice(a).transpose() * g * Vector4::from_column_slice(b))[0]
}

fn max_abs<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

// ---------------------------------------------------------------- metric

pub fn metric_checks(cfg: &ModelConfig, seed: u64) -> Vec<Check> {
    let mut rng = rng_for(seed, 1);
    let alpha = cfg.alpha;
    let r0 = r_eval(1.0, FRAC_PI_4, cfg);
    let mut out = vec![
        Check::new("metric.r_value_at_torus", (r0.value - 0.5 * (1.0 + alpha * alpha)).abs(), AtMost, 1e-14, "(R1)"),
        Check::new("metric.r_gradient_at_torus", r0.d_rho.hypot(r0.d_psi), Below, 1e-12, "(R3)"),
    ];

    let mut off_box = 0.0f64;
    let mut tested = 0;
    while tested < 10_000 {
        let p = random_chart_point(&mut rng, (1e-3, 2.0), (1e-3, FRAC_PI_2 - 1e-3));
        if cfg.bump.contains(p.rho, p.psi) {
            continue;
        }
        tested += 1;
        let (r, l) = (r_eval(p.rho, p.psi, cfg), l_eval(p.rho, p.psi, alpha));
        if r.value != l.value || r.d_rho != l.d_rho || r.d_psi != l.d_psi {
            off_box = off_box.max((r.value - l.value).abs()).max(f64::MIN_POSITIVE);
        }
    }
    out.push(Check::new("metric.r_equals_l_off_box", off_box, AtMost, 0.0, "(R1)").with_detail("bit-exact over 10^4 points"));

    let n = 100;
    let (dr, dp) = (2.0 / n as f64, FRAC_PI_2 / n as f64);
    let torus_cell = ((1.0 / dr) as usize, (FRAC_PI_4 / dp) as usize);
    let mut min_drho = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            if (i, j) != torus_cell {
                min_drho = min_drho.min(r_eval((i as f64 + 0.5) * dr, (j as f64 + 0.5) * dp, cfg).d_rho);
            }
        }
    }
    out.push(Check::new("metric.r_radially_increasing", min_drho, Above, 0.0, "(R2)").with_detail("100x100 grid minus the torus cell"));

    let v = validate_bump_box(cfg, 200);
    let worst = v.checks.iter().map(|c| c.worst_margin).fold(f64::INFINITY, f64::min);
    out.push(
        Check::flag("metric.bump_box_valid", v.passed, "(R1)-(R3) feasibility")
            .with_detail(format!("worst margin {worst:.3e}")),
    );

    let mut block = 0.0f64;
    for _ in 0..100 {
        let g = metric_chart(&ChartPoint::on_torus(rng.random_range(0.0..TAU), rng.random_range(0.0..TAU)), cfg);
        block = block.max(max_abs([g[(2, 2)] - 0.5, g[(3, 3)] - 0.5, g[(2, 3)], g[(3, 2)]]));
    }
    out.push(Check::new("metric.torus_metric_flat", block, AtMost, 1e-14, "(G1)"));

    let mut ortho = 0.0f64;
    let mut min_eig = f64::INFINITY;
    for i in 0..10_000 {
        let p = random_chart_point(&mut rng, (0.05, 2.0), (0.02, FRAC_PI_2 - 0.02));
        let g = metric_chart(&p, cfg);
        if i < 2000 {
            let f = frame(p.psi, alpha).vectors();
            for a in 0..4 {
                for b in a + 1..4 {
                    let scale = (quad(&g, &f[a], &f[a]) * quad(&g, &f[b], &f[b])).sqrt();
                    ortho = ortho.max(quad(&g, &f[a], &f[b]).abs() / scale);
                }
            }
        }
        min_eig = min_eig.min(g.symmetric_eigenvalues().min());
    }
    out.push(Check::new("metric.frame_orthogonal", ortho, AtMost, 1e-12, "frame orthogonality"));
    out.push(Check::new("metric.positive_definite", min_eig, Above, cfg.tolerances.pd, "positive definiteness"));

    let mut ident = 0.0f64;
    let mut count = 0;
    while count < 2000 {
        let x: [f64; 4] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        let x = AmbientPoint { x };
        if x.norm() > 2.0 {
            continue;
        }
        if let Ok(p) = ambient_to_chart(&x) {
            if cfg.bump.contains(p.rho, p.psi) {
                continue;
            }
        }
        count += 1;
        ident = ident.max(max_abs((metric_ambient(&x, cfg) - Matrix4::identity()).iter().copied()));
    }
    out.push(Check::new("metric.ambient_euclidean_off_box", ident, AtMost, 0.0, "(R1)"));

    let mut round = 0.0f64;
    for _ in 0..1000 {
        let p = random_chart_point(&mut rng, (0.01, 2.0), (0.01, FRAC_PI_2 - 0.01));
        match ambient_to_chart(&chart_to_ambient(&p)) {
            Ok(q) => {
                let dphi = (q.phi - p.phi).rem_euclid(TAU);
                let dtheta = (q.theta - p.theta).rem_euclid(TAU);
                round = round.max(max_abs([
                    q.rho - p.rho,
                    q.psi - p.psi,
                    dphi.min(TAU - dphi),
                    dtheta.min(TAU - dtheta),
                ]));
            }
            Err(_) => round = f64::NAN,
        }
    }
    out.push(Check::new("metric.chart_round_trip", round, AtMost, 1e-12, "chart"));

    let mut pull = 0.0f64;
    let b = &cfg.bump;
    for _ in 0..100 {
        let p = random_chart_point(&mut rng, (b.rho[0], b.rho[3]), (b.psi[0], b.psi[1]));
        let j = chart_jacobian(&p);
        let jinv = j.try_inverse().expect("chart is a local diffeomorphism");
        let expected = jinv.transpose() * metric_chart(&p, cfg) * jinv;
        let got = metric_ambient(&chart_to_ambient(&p), cfg);
        pull = pull.max(max_abs((got - expected).iter().copied()));
    }
    out.push(Check::new("metric.ambient_matches_chart", pull, AtMost, 1e-10, "chart"));
    out
}

// ------------------------------------------------------------- convexity

/// Largest gap between `hessian_d_frame` and the geodesic second
/// difference of `d` along frame vectors, over `points` random points.
pub fn hessian_oracle_gap(cfg: &ModelConfig, points: usize, seed: u64) -> f64 {
    let mut rng = rng_for(seed, 2);
    let samples: Vec<(ChartPoint, usize)> = (0..points)
        .map(|_| (random_chart_point(&mut rng, (0.3, 1.9), (0.2, 1.37)), rng.random_range(0..4usize)))
        .collect();
    let gaps: Vec<f64> = samples
        .par_iter()
        .map(|(p, k)| {
            let v = frame(p.psi, cfg.alpha).vectors()[*k];
            let fd = geodesic_second_derivative(p, &v, 1e-4, |q| q.rho, cfg);
            (fd - hessian_d_frame(p.rho, p.psi, cfg).as_array()[*k]).abs()
        })
        .collect();
    max_abs(gaps)
}

pub fn convexity_checks(cfg: &ModelConfig, seed: u64) -> Vec<Check> {
    let mut rng = rng_for(seed, 3);
    let alpha = cfg.alpha;
    let mut out = vec![Check::new(
        "convexity.hessian_matches_geodesic_oracle",
        hessian_oracle_gap(cfg, 1000, seed),
        AtMost,
        1e-5,
        "Hessian of the distance",
    )];

    let mut d2_gap = 0.0f64;
    for _ in 0..100 {
        let p = random_chart_point(&mut rng, (0.3, 1.9), (0.2, 1.37));
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let fd = geodesic_second_derivative(&p, &v, 1e-4, |q| q.rho * q.rho, cfg);
        let a = frame_components(p.psi, &v, alpha);
        d2_gap = d2_gap.max((fd - hessian_d2_frame(p.rho, p.psi, cfg).quadratic(&a)).abs());
    }
    out.push(Check::new("convexity.hessian_d2_matches_geodesic_oracle", d2_gap, AtMost, 1e-5, "(G2)"));

    let mut comp = 0.0f64;
    for _ in 0..1000 {
        let p = random_chart_point(&mut rng, (0.3, 1.9), (0.2, 1.37));
        let (hd, hd2) = hessians_from_connection(&p, cfg);
        let f = frame(p.psi, alpha).vectors();
        let a = hessian_d_frame(p.rho, p.psi, cfg).as_array();
        let b = hessian_d2_frame(p.rho, p.psi, cfg).as_array();
        for k in 0..4 {
            let qd = quad(&hd, &f[k], &f[k]);
            let qd2 = quad(&hd2, &f[k], &f[k]);
            comp = comp.max(max_abs([qd - a[k], qd2 - b[k], qd2 - 2.0 * p.rho * qd - 2.0 * f[k][0] * f[k][0]]));
        }
    }
    out.push(Check::new("convexity.composition_rule", comp, AtMost, 1e-12, "Hessian of the squared distance"));

    let h = hessian_d2_frame(1.0, FRAC_PI_4, cfg);
    out.push(Check::new("convexity.leaf_in_nullspace", h.quadratic(&[0.0, 0.0, 1.0, 0.0]).abs(), AtMost, 1e-15, "(G3)"));
    let growth = [1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.0]
        .iter()
        .map(|&e| {
            let off = [[0.0, 0.0, 1.0, e], [e, 0.0, 1.0, 0.0], [0.0, e, 1.0, 0.0]];
            let lows = [(1.0 + alpha * alpha) * e * e, 2.0 * e * e, 2.0 * e * e];
            off.iter().zip(lows).map(|(v, lo)| h.quadratic(v) - lo).fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min);
    out.push(Check::new("convexity.quadratic_growth_off_leaf", growth, AtLeast, -1e-10, "(G3)"));

    let sweep = hessian_d2_sign_sweep(200, cfg);
    out.push(
        Check::new("convexity.sign_sweep", sweep.non_positive_cells as f64, AtMost, 0.0, "(R2)+(G3)")
            .with_detail(format!("min {:.3e} at ({:.4}, {:.4})", sweep.min_value, sweep.min_at.0, sweep.min_at.1)),
    );

    let outer = sphere_sff(2.0, 200, cfg);
    let certified = outer.verdict == Definiteness::NegativeDefinite && outer.certified;
    out.push(
        Check::new(
            "convexity.boundary_sphere_strictly_convex",
            if certified { outer.margin - outer.lipschitz_slack } else { f64::NAN },
            Above,
            0.0,
            "strict boundary convexity",
        )
        .with_detail(format!("margin {:.6} slack {:.3e}", outer.margin, outer.lipschitz_slack)),
    );

    let unit = sphere_sff(1.0, 200, cfg);
    let leaf_only = unit.verdict == Definiteness::NegativeSemidefiniteWithNullspace
        && unit.witnesses.len() == 1
        && unit.witnesses[0].psi == FRAC_PI_4
        && unit.witnesses[0].direction == FrameDirection::Y;
    out.push(Check::flag("convexity.unit_sphere_degenerates_along_leaf", leaf_only, "(G3')"));

    let others = [0.3, 0.5, 0.8, 0.95, 1.05, 1.2, 1.5, 1.8];
    let margin = others
        .iter()
        .map(|&r| {
            let v = sphere_sff(r, 200, cfg);
            if v.verdict == Definiteness::NegativeDefinite { v.margin } else { f64::NAN }
        })
        .fold(f64::INFINITY, |m, v| if v.is_nan() { f64::NAN } else { m.min(v) });
    out.push(Check::new("convexity.other_spheres_convex", margin, Above, 0.0, "(G3')"));

    out.push(Check::new("convexity.torus_form_analytic", torus_sff_y(cfg).abs(), Below, 1e-10, "(G4)"));
    out.push(Check::new("convexity.torus_form_variational", torus_sff_y_variational(cfg, 1e-5).abs(), Below, 1e-6, "(G4)"));
    let eps = 1e-3;
    let tilted = ModelConfig {
        profile: Profile::Tilted { epsilon: eps },
        ..cfg.clone()
    };
    out.push(Check::new("convexity.tilt_detected", (torus_sff_y(&tilted) + eps / 2.0).abs(), AtMost, 1e-8, "(G4)"));
    out
}

// ------------------------------------------------------------- geodesics

/// Leaf integration over `[0, t]`: deviation from the torus, energy drift
/// and endpoint error against the closed form.
pub fn leaf_integration(t: f64, cfg: &ModelConfig) -> Result<(Trajectory, f64, f64, f64)> {
    let tr = integrate_geodesic(foliation_geodesic(0.0, 0.0, 0.0, cfg), t, cfg)?;
    let mut dev = 0.0f64;
    for s in &tr.samples {
        dev = match s.state.chart() {
            Some((p, _)) => dev.max((p.rho - 1.0).abs()).max((p.psi - FRAC_PI_4).abs()),
            None => f64::NAN,
        };
    }
    let last = tr.last();
    let (x, _) = last.state.ambient();
    let (y, _) = foliation_geodesic(last.t, 0.0, 0.0, cfg).ambient();
    let end = (0..4).map(|i| (x.x[i] - y.x[i]).powi(2)).sum::<f64>().sqrt();
    let drift = tr.max_energy_drift();
    Ok((tr, dev, drift, end))
}

pub fn geodesic_checks(cfg: &ModelConfig, opts: &SuiteOptions) -> Result<Vec<Check>> {
    let mut rng = rng_for(opts.seed, 4);
    let mut out = Vec::new();

    let mut cgap = 0.0f64;
    for n in 0..100 {
        let p = if n % 2 == 0 {
            random_chart_point(&mut rng, (0.65, 1.35), (0.55, 1.02))
        } else {
            random_chart_point(&mut rng, (0.2, 2.0), (0.2, 1.37))
        };
        let (a, b) = (christoffel(&p, cfg), christoffel_fd(&p, 1e-5, cfg));
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    cgap = cgap.max((a[i][j][k] - b[i][j][k]).abs());
                }
            }
        }
    }
    out.push(Check::new("geodesics.christoffel_matches_differences", cgap, AtMost, 1e-6, "Levi-Civita connection"));

    let mut certificates = Vec::new();
    match leaf_integration(100.0, cfg) {
        Ok((tr, dev, drift, end)) => {
            out.push(Check::new("geodesics.leaf_stays_on_torus", dev, Below, 1e-6, "complete leaf geodesic"));
            out.push(Check::new("geodesics.leaf_energy_drift", drift, Below, 1e-8, "complete leaf geodesic"));
            out.push(Check::new("geodesics.leaf_endpoint", end, Below, 1e-5, "complete leaf geodesic"));
            let cert = convexity_certificate(&tr);
            out.push(Check::new("geodesics.leaf_certificate_vanishes", cert.abs(), AtMost, 1e-6, "(G3)"));
            certificates.push(cert);
        }
        Err(e) => out.push(Check::error("geodesics.leaf_stays_on_torus", "complete leaf geodesic", e.to_string())),
    }

    let starts: Vec<GeodesicState> = (0..100).map(|i| seed_state(i + 1, opts.seed ^ 0x5eed, cfg)).collect();
    let runs: Vec<Result<Trajectory>> = starts.par_iter().map(|s| integrate_geodesic(*s, 100.0, cfg)).collect();
    let mut drift = 0.0f64;
    let mut failure = None;
    for r in runs {
        match r {
            Ok(tr) => {
                drift = drift.max(tr.max_energy_drift());
                certificates.push(convexity_certificate(&tr));
            }
            Err(e) => failure = Some(e.to_string()),
        }
    }
    out.push(match failure {
        None => Check::new("geodesics.random_energy_drift", drift, Below, 1e-8, "energy conservation"),
        Some(e) => Check::error("geodesics.random_energy_drift", "energy conservation", e),
    });

    let line = GeodesicState::Ambient {
        position: AmbientPoint { x: [0.1, 0.0, 0.0, 0.0] },
        velocity: [1.0, 0.0, 0.0, 0.0],
    };
    match integrate_geodesic(line, 5.0, cfg) {
        Ok(tr) => {
            let exit = tr.last().t;
            out.push(
                Check::new("geodesics.straight_line_exit", (exit - 1.9).abs(), AtMost, 2.0 * cfg.integrator.step, "Euclidean region")
                    .with_detail(format!("exit at t = {exit}")),
            );
            out.push(Check::new(
                "geodesics.straight_line_certificate",
                (convexity_certificate(&tr) - 2.0).abs(),
                AtMost,
                1e-6,
                "Euclidean region",
            ));
        }
        Err(e) => out.push(Check::error("geodesics.straight_line_exit", "Euclidean region", e.to_string())),
    }

    let min_cert = certificates.iter().copied().fold(f64::INFINITY, f64::min);
    out.push(Check::new("geodesics.convexity_certificate", min_cert, AtLeast, -1e-6, "(G2)"));

    out.push(Check::new("geodesics.leaf_return_gap", leaf_return_gap(1e4, cfg), Above, 0.0, "dense leaf").with_detail("t <= 1e4"));

    match closed_geodesic_search(opts.search_seeds, opts.search_period, opts.seed, cfg) {
        Ok(found) => out.push(
            Check::new("geodesics.no_closed_geodesic", found.len() as f64, AtMost, 0.0, "no closed geodesic")
                .with_detail(format!("{} seeds, period <= {}", opts.search_seeds, opts.search_period)),
        ),
        Err(e) => out.push(Check::error("geodesics.no_closed_geodesic", "no closed geodesic", e.to_string())),
    }

    out.extend(control_checks(cfg, opts.control)?);
    Ok(out)
}

/// The rational control: every leaf of slope `p/q` closes after `2π q a`.
pub fn control_checks(cfg: &ModelConfig, slope: RationalSlope) -> Result<Vec<Check>> {
    let control = ModelConfig {
        alpha: slope.value(),
        alpha_rational: true,
        ..cfg.clone()
    };
    control.check()?;
    crate::metric::validated(&control)?;
    let period = slope.leaf_period();
    let starts: Vec<GeodesicState> = [(0.0, 0.0), (1.0, 2.5), (4.0, 0.7)]
        .iter()
        .map(|&(p, t)| foliation_geodesic(0.0, p, t, &control))
        .collect();
    let anchor = "rational control";
    Ok(match search_from_states(&starts, 1.05 * period + 1.0, &control) {
        Ok(found) if found.len() == starts.len() => {
            let residual = found.iter().map(|c| c.residual).fold(0.0, f64::max);
            let perr = found.iter().map(|c| (c.period - period).abs()).fold(0.0, f64::max);
            vec![
                Check::new("geodesics.control_closes", residual, Below, 1e-6, anchor)
                    .with_detail(format!("alpha = {}/{}", slope.p, slope.q)),
                Check::new("geodesics.control_period", perr, Below, 1e-6, anchor)
                    .with_detail(format!("expected {period:.12}")),
            ]
        }
        Ok(found) => vec![Check::new("geodesics.control_closes", f64::NAN, Below, 1e-6, anchor)
            .with_detail(format!("{} of {} leaves closed", found.len(), starts.len()))],
        Err(e) => vec![Check::error("geodesics.control_closes", anchor, e.to_string())],
    })
}

// -------------------------------------------------------------- varifold

/// The ten mean-zero harmonics of the ergodic check.
pub fn ergodic_harmonics() -> Vec<TrigPoly> {
    [(1, 0), (0, 1), (1, 1), (1, -1), (3, -2), (2, 1), (5, -3), (2, -3), (4, 1), (1, -2)]
        .iter()
        .map(|&(k, l)| TrigPoly::cos_term(k, l, 1.0))
        .collect()
}

/// Random trigonometric polynomial of degree `≤ degree`.
pub fn random_trig_poly(rng: &mut impl Rng, degree: i32) -> TrigPoly {
    let mut terms = Vec::new();
    for k in -degree..=degree {
        for l in -degree..=degree {
            terms.push(TrigTerm {
                k,
                l,
                cos: rng.random_range(-1.0..1.0),
                sin: rng.random_range(-1.0..1.0),
            });
        }
    }
    TrigPoly::new(terms)
}

/// Worst first variation over the exactly integrable library.
pub fn stationarity_defect(v0: &VarifoldV0) -> f64 {
    max_abs(field_library().iter().filter(|x| x.exactly_integrable()).map(|x| v0.first_variation(x)))
}

/// Smallest defect reduction factor per torus-resolution doubling
/// `16 → 32 → 64 → 128` over the plateau fields.
pub fn plateau_reduction(cfg: &ModelConfig) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for x in field_library().iter().filter(|x| !x.exactly_integrable()) {
        let d = [16, 32, 64, 128]
            .iter()
            .map(|&n| Ok(build_v0(BaseManifold::unit_circle(16), n, cfg)?.first_variation(x).abs()))
            .collect::<Result<Vec<f64>>>()?;
        for w in d.windows(2) {
            worst = worst.min(w[0] / w[1]);
        }
    }
    Ok(worst)
}

/// Density-scaling fits for the point and circle bases at radii `0.05, …, 0.4`.
pub fn density_fits(cfg: &ModelConfig) -> Result<[crate::varifold::DensityScaling; 2]> {
    let radii: Vec<f64> = (1..=8).map(|i| 0.05 * i as f64).collect();
    let point = build_v0(BaseManifold::point(), 2048, cfg)?;
    let circle = build_v0(BaseManifold::unit_circle(512), 512, cfg)?;
    Ok([density_scaling(&point, 0, &radii)?, density_scaling(&circle, 0, &radii)?])
}

pub fn varifold_checks(cfg: &ModelConfig, seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    let bases = [
        BaseManifold::point(),
        BaseManifold::unit_circle(16),
        BaseManifold::flat_torus([TAU, 3.0], 8),
    ];
    let built: Result<Vec<VarifoldV0>> = bases.iter().map(|b| build_v0(*b, 64, cfg)).collect();
    let v0s = match built {
        Ok(v) => v,
        Err(e) => return vec![Check::error("varifold.unit_mass", "unit mass", e.to_string())],
    };
    out.push(Check::new(
        "varifold.unit_mass",
        max_abs(v0s.iter().map(|v| v.total_mass() - 1.0)),
        AtMost,
        1e-14,
        "unit mass",
    ));
    out.push(
        Check::new("varifold.stationary_circle_base", stationarity_defect(&v0s[1]), AtMost, 1e-10, "stationarity")
            .with_detail("exactly integrable library, 64x64 torus grid"),
    );
    out.push(Check::new("varifold.stationary_point_base", stationarity_defect(&v0s[0]), AtMost, 1e-10, "stationarity"));
    out.push(Check::new(
        "varifold.covariant_divergence_agrees",
        max_abs(field_library().iter().map(|x| v0s[1].first_variation(x) - v0s[1].first_variation_covariant(x))),
        AtMost,
        1e-12,
        "stationarity",
    ));
    out.push(match plateau_reduction(cfg) {
        Ok(r) => Check::new("varifold.plateau_defect_rate", r, AtLeast, 4.0, "stationarity").with_detail("torus grids 16..128"),
        Err(e) => Check::error("varifold.plateau_defect_rate", "stationarity", e.to_string()),
    });

    let support = max_abs(v0s.iter().map(|v| trace_hessian_on_plane(&v.plane_basis(), 1.0, FRAC_PI_4, cfg)));
    out.push(Check::new("varifold.trace_vanishes_on_support", support, AtMost, 1e-12, "trace positivity off the support"));
    let mut radial = v0s[1].plane_basis();
    radial[(1, 3)] = 0.0;
    radial[(1, 1)] = 1.0;
    out.push(Check::new(
        "varifold.trace_on_radial_plane",
        (trace_hessian_on_plane(&radial, 1.0, FRAC_PI_4, cfg) - 2.0).abs(),
        AtMost,
        1e-15,
        "trace positivity off the support",
    ));
    let scan = random_plane_scan(1, 10_000, 0.1, seed, cfg);
    out.push(
        Check::new("varifold.trace_positive_off_support", scan.min_trace, Above, 0.0, "trace positivity off the support")
            .with_detail(format!("10^4 planes at distance >= 0.1, min at distance {:.4}", scan.min_trace_distance)),
    );

    match density_fits(cfg) {
        Ok([p, c]) => {
            let anchor = "(m+1)-density vanishes";
            out.push(Check::new("varifold.density_exponent_point_base", (p.exponent - 2.0).abs(), AtMost, 0.1, anchor)
                .with_detail(format!("exponent {:.4}", p.exponent)));
            out.push(Check::new("varifold.density_exponent_circle_base", (c.exponent - 3.0).abs(), AtMost, 0.1, anchor)
                .with_detail(format!("exponent {:.4}", c.exponent)));
            out.push(Check::flag("varifold.density_ratio_decreasing", p.ratios_decrease && c.ratios_decrease, anchor));
        }
        Err(e) => out.push(Check::error("varifold.density_exponent_point_base", "(m+1)-density vanishes", e.to_string())),
    }

    let circle = BaseManifold::unit_circle(16);
    let mut iso = 0.0f64;
    let mut lengths = 0.0f64;
    let mut failure = None;
    for n in 1..=10u32 {
        match (isoperimetric_ratio(n, &circle), strip_core_length(n, cfg)) {
            (Ok((v, b)), Ok(len)) => {
                iso = iso.max(max_abs([v - 2.0 * n as f64 * TAU, b - 2.0 * TAU, v / b - n as f64]));
                lengths = lengths.max((len * circle.volume() - v).abs() / circle.volume());
            }
            (Err(e), _) | (_, Err(e)) => failure = Some(e.to_string()),
        }
    }
    let anchor = "isoperimetric failure";
    match failure {
        None => {
            out.push(Check::new("varifold.isoperimetric_strips", iso, AtMost, 1e-12, anchor));
            out.push(Check::new("varifold.strip_length_from_geodesic", lengths, AtMost, 1e-6, anchor));
        }
        Some(e) => out.push(Check::error("varifold.isoperimetric_strips", anchor, e)),
    }

    let t = 1e4;
    let mut rng = rng_for(seed, 5);
    let mut worst_ratio = 0.0f64;
    for f in ergodic_harmonics() {
        let start = (rng.random_range(0.0..TAU), rng.random_range(0.0..TAU));
        worst_ratio = match ergodic_average(&f, start, t, cfg) {
            Ok(avg) => worst_ratio.max(avg.abs() / ergodic_bound(&f, t, cfg)),
            Err(_) => f64::NAN,
        };
    }
    out.push(Check::new("varifold.ergodic_averages_within_bound", worst_ratio, AtMost, 1.0, "unique ergodicity")
        .with_detail("|time average| / closed-form bound, 10 harmonics, T = 1e4"));
    let observables: Vec<TrigPoly> = (0..10).map(|_| random_trig_poly(&mut rng, 5)).collect();
    out.push(Check::new(
        "varifold.flow_invariance",
        flow_invariance_check(&observables, &[0.1, 1.0, 10.0], cfg),
        Below,
        1e-12,
        "unique ergodicity",
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_slopes() {
        assert_eq!("1".parse::<RationalSlope>().unwrap(), RationalSlope { p: 1, q: 1 });
        assert_eq!("4/6".parse::<RationalSlope>().unwrap(), RationalSlope { p: 2, q: 3 });
        assert_eq!("1.5".parse::<RationalSlope>().unwrap(), RationalSlope { p: 3, q: 2 });
        assert!("0".parse::<RationalSlope>().is_err());
        assert!("abc".parse::<RationalSlope>().is_err());
        assert!((RationalSlope { p: 1, q: 1 }.leaf_period() - TAU).abs() < 1e-15);
    }

    #[test]
    fn metric_suite_passes_by_default() {
        let r = run_suite(Suite::Metric, &ModelConfig::default(), &SuiteOptions::default()).unwrap();
        assert!(r.pass, "{}", r.to_table());
    }

    #[test]
    fn convexity_suite_passes_by_default() {
        let r = run_suite(Suite::Convexity, &ModelConfig::default(), &SuiteOptions::default()).unwrap();
        assert!(r.pass, "{}", r.to_table());
    }

    #[test]
    fn varifold_suite_passes_by_default() {
        let r = run_suite(Suite::Varifold, &ModelConfig::default(), &SuiteOptions::default()).unwrap();
        assert!(r.pass, "{}", r.to_table());
    }

    #[test]
    fn geodesic_suite_with_small_search() {
        let opts = SuiteOptions {
            search_seeds: 200,
            ..SuiteOptions::default()
        };
        let r = run_suite(Suite::Geodesics, &ModelConfig::default(), &opts).unwrap();
        assert!(r.pass, "{}", r.to_table());
    }

    #[test]
    fn invalid_config_is_rejected_before_running() {
        let mut cfg = ModelConfig::default();
        cfg.bump.rho[0] = 0.3;
        assert!(run_suite(Suite::Metric, &cfg, &SuiteOptions::default()).is_err());
    }
}
