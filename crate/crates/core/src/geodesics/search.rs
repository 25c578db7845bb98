use std::f64::consts::{FRAC_PI_4, TAU};

use nalgebra::{Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::foliation::foliation_geodesic;
use super::integrate::{GeodesicFlow, GeodesicState};
use crate::config::ModelConfig;
use crate::error::{GeoError, Result};
use crate::metric::{metric_ambient, metric_chart, AmbientPoint, ChartPoint};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedGeodesicCandidate {
    pub initial: GeodesicState,
    pub period: f64,
    /// `|Δx|_g + |Δv|_g` at the refined return time.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeedRegion {
    /// Inside the support of the bump, random position and direction.
    BumpBox,
    /// On the Clifford torus, moving along `±Ȳ`.
    TorusLeaf,
    /// On the Clifford torus, random direction.
    TorusTangent,
    /// Where `g = g₀`.
    Flat,
}

impl SeedRegion {
    fn for_index(index: usize) -> Self {
        match index % 100 {
            0 => SeedRegion::TorusLeaf,
            1..=4 => SeedRegion::TorusTangent,
            5..=9 => SeedRegion::Flat,
            _ => SeedRegion::BumpBox,
        }
    }
}

fn unit_chart_velocity(p: &ChartPoint, dir: [f64; 4], cfg: &ModelConfig) -> [f64; 4] {
    let g = metric_chart(p, cfg);
    let v = Vector4::from_column_slice(&dir);
    let n = (v.transpose() * g * v)[0].sqrt();
    [dir[0] / n, dir[1] / n, dir[2] / n, dir[3] / n]
}

/// Deterministic seed state number `index` for RNG seed `rng_seed`.
pub fn seed_state(index: usize, rng_seed: u64, cfg: &ModelConfig) -> GeodesicState {
    seed_in_region(SeedRegion::for_index(index), index, rng_seed, cfg)
}

fn seed_in_region(
    region: SeedRegion,
    index: usize,
    rng_seed: u64,
    cfg: &ModelConfig,
) -> GeodesicState {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut gauss = || -> f64 { rng.sample(StandardNormal) };
    let dir = [gauss(), gauss(), gauss(), gauss()];
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed.wrapping_add(index as u64));
    let phi = rng.random_range(0.0..TAU);
    let theta = rng.random_range(0.0..TAU);
    let b = &cfg.bump;
    match region {
        SeedRegion::BumpBox => {
            let p = ChartPoint::new(
                rng.random_range(b.rho[0]..b.rho[3]),
                rng.random_range(b.psi[0]..b.psi[1]),
                phi,
                theta,
            );
            GeodesicState::Chart {
                position: p,
                velocity: unit_chart_velocity(&p, dir, cfg),
            }
        }
        SeedRegion::TorusLeaf => {
            let s = foliation_geodesic(0.0, phi, theta, cfg);
            if rng.random_bool(0.5) {
                s
            } else {
                let GeodesicState::Chart { position, velocity } = s else { unreachable!() };
                GeodesicState::Chart {
                    position,
                    velocity: velocity.map(|v| -v),
                }
            }
        }
        SeedRegion::TorusTangent => {
            let p = ChartPoint::new(1.0, FRAC_PI_4, phi, theta);
            let w = rng.random_range(0.0..TAU);
            GeodesicState::Chart {
                position: p,
                velocity: unit_chart_velocity(&p, [0.0, 0.0, w.cos(), w.sin()], cfg),
            }
        }
        SeedRegion::Flat => {
            let x = loop {
                let x = [gauss(), gauss(), gauss(), gauss()].map(|c| 0.45 * c);
                let p = AmbientPoint::new(x);
                if p.norm() < 0.49 {
                    break p;
                }
            };
            let n = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
            GeodesicState::Ambient {
                position: x,
                velocity: dir.map(|d| d / n),
            }
        }
    }
}

fn g_norm(g: &Matrix4<f64>, d: [f64; 4]) -> f64 {
    let v = Vector4::from_column_slice(&d);
    (v.transpose() * g * v)[0].max(0.0).sqrt()
}

/// `|x − x₀|_g + |v − v₀|_g`, both measured with `g` at the initial point in
/// Cartesian coordinates.
pub fn closure_residual(initial: &GeodesicState, current: &GeodesicState, cfg: &ModelConfig) -> f64 {
    let (x0, v0) = initial.ambient();
    let (x, v) = current.ambient();
    let g = metric_ambient(&x0, cfg);
    let dx = [0, 1, 2, 3].map(|i| x.x[i] - x0.x[i]);
    let dv = [0, 1, 2, 3].map(|i| v[i] - v0[i]);
    g_norm(&g, dx) + g_norm(&g, dv)
}

const DEPARTURE: f64 = 0.5;
const COARSE: f64 = 1e-2;

/// Golden-section minimisation of the residual over `[0, 2h]` after `from`.
fn refine(
    initial: &GeodesicState,
    from: &GeodesicState,
    t_from: f64,
    h: f64,
    cfg: &ModelConfig,
) -> (f64, f64) {
    let eval = |tau: f64| -> f64 {
        match GeodesicFlow::propagate(from, tau, cfg) {
            Some(s) => closure_residual(initial, &s, cfg),
            None => f64::INFINITY,
        }
    };
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0, 2.0 * h);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (eval(c), eval(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = eval(d);
        }
    }
    let tau = 0.5 * (a + b);
    (t_from + tau, eval(tau))
}

fn search_one(
    initial: GeodesicState,
    period_max: f64,
    cfg: &ModelConfig,
) -> Result<Option<ClosedGeodesicCandidate>> {
    let h = cfg.integrator.step;
    let n = (period_max / h).ceil() as usize;
    let e0 = initial.energy(cfg);
    let bound = cfg.integrator.max_energy_drift;
    let mut flow = GeodesicFlow::new(initial, cfg);
    let mut departed = false;
    // (state, time, residual) of the two previous samples
    let mut prev2: Option<(GeodesicState, f64, f64)> = None;
    let mut prev1 = (*flow.state(), 0.0, 0.0);
    for _ in 0..n {
        if !flow.advance() {
            return Ok(None);
        }
        let state = *flow.state();
        let drift = (state.energy(cfg) - e0).abs() / e0;
        if drift > bound {
            return Err(GeoError::StepTooLarge { drift, bound });
        }
        let r = closure_residual(&initial, &state, cfg);
        departed |= r > DEPARTURE;
        if departed {
            if let Some((s2, t2, r2)) = prev2 {
                let (_, _, r1) = prev1;
                if r1 <= r2 && r1 <= r && r1 < COARSE {
                    let (t, residual) = refine(&initial, &s2, t2, h, cfg);
                    if residual < cfg.tolerances.closure {
                        return Ok(Some(ClosedGeodesicCandidate {
                            initial,
                            period: t,
                            residual,
                        }));
                    }
                }
            }
        }
        prev2 = Some(prev1);
        prev1 = (state, flow.time(), r);
    }
    Ok(None)
}

/// Shooting search from the given initial states, one integration per state
/// up to `period_max`. Results keep the input order.
pub fn search_from_states(
    states: &[GeodesicState],
    period_max: f64,
    cfg: &ModelConfig,
) -> Result<Vec<ClosedGeodesicCandidate>> {
    let found: Vec<Result<Option<ClosedGeodesicCandidate>>> = states
        .par_iter()
        .map(|s| search_one(*s, period_max, cfg))
        .collect();
    let mut out = Vec::new();
    for f in found {
        if let Some(c) = f? {
            out.push(c);
        }
    }
    Ok(out)
}

/// Search over `seeds` deterministic random initial states (see [`seed_state`]).
pub fn closed_geodesic_search(
    seeds: usize,
    period_max: f64,
    rng_seed: u64,
    cfg: &ModelConfig,
) -> Result<Vec<ClosedGeodesicCandidate>> {
    if seeds == 0 {
        return Err(GeoError::InvalidArgument("at least one seed required".into()));
    }
    let states: Vec<GeodesicState> = (0..seeds).map(|i| seed_state(i, rng_seed, cfg)).collect();
    search_from_states(&states, period_max, cfg)
}
