use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::christoffel::geodesic_acceleration;
use crate::config::ModelConfig;
use crate::error::{GeoError, Result};
use crate::metric::{
    ambient_to_chart, ambient_velocity_to_chart, chart_to_ambient, chart_velocity_to_ambient,
    metric_chart, AmbientPoint, ChartPoint,
};

/// Position and velocity, in chart coordinates inside the tubular box around
/// the Clifford torus and in Cartesian coordinates elsewhere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "basis", rename_all = "lowercase")]
pub enum GeodesicState {
    Chart {
        position: ChartPoint,
        velocity: [f64; 4],
    },
    Ambient {
        position: AmbientPoint,
        velocity: [f64; 4],
    },
}

impl GeodesicState {
    pub fn ambient(&self) -> (AmbientPoint, [f64; 4]) {
        match self {
            GeodesicState::Chart { position, velocity } => (
                chart_to_ambient(position),
                chart_velocity_to_ambient(position, velocity),
            ),
            GeodesicState::Ambient { position, velocity } => (*position, *velocity),
        }
    }

    pub fn chart(&self) -> Option<(ChartPoint, [f64; 4])> {
        match self {
            GeodesicState::Chart { position, velocity } => Some((*position, *velocity)),
            GeodesicState::Ambient { position, velocity } => {
                let p = ambient_to_chart(position).ok()?;
                let v = ambient_velocity_to_chart(position, velocity).ok()?;
                Some((p, v))
            }
        }
    }

    /// `g(v, v)`.
    pub fn energy(&self, cfg: &ModelConfig) -> f64 {
        match self {
            GeodesicState::Chart { position, velocity } => {
                let g = metric_chart(position, cfg);
                let mut e = 0.0;
                for i in 0..4 {
                    for j in 0..4 {
                        e += velocity[i] * g[(i, j)] * velocity[j];
                    }
                }
                e
            }
            GeodesicState::Ambient { velocity, .. } => velocity.iter().map(|v| v * v).sum(),
        }
    }

    /// Squared Euclidean distance to the origin.
    pub fn d2(&self) -> f64 {
        match self {
            GeodesicState::Chart { position, .. } => position.rho * position.rho,
            GeodesicState::Ambient { position, .. } => position.norm_sq(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: GeodesicState,
    pub energy: f64,
    pub d2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    TimeExhausted,
    HitBoundary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub step: f64,
    pub samples: Vec<Sample>,
    pub termination: Termination,
    /// Number of chart/Cartesian hand-overs along the way.
    pub mode_switches: usize,
}

impl Trajectory {
    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.samples[0].energy;
        self.samples
            .iter()
            .map(|s| (s.energy - e0).abs() / e0)
            .fold(0.0, f64::max)
    }

    /// Arc length by the trapezoid rule on `sqrt(g(v, v))`.
    pub fn length(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| 0.5 * (w[1].t - w[0].t) * (w[0].energy.sqrt() + w[1].energy.sqrt()))
            .sum()
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least one sample")
    }
}

type Phase = [f64; 8];

fn chart_rhs(y: &Phase, cfg: &ModelConfig) -> Phase {
    let p = ChartPoint::new(y[0], y[1], y[2], y[3]);
    let v = [y[4], y[5], y[6], y[7]];
    let a = geodesic_acceleration(&p, &v, cfg);
    [v[0], v[1], v[2], v[3], a[0], a[1], a[2], a[3]]
}

fn axpy(y: &Phase, k: &Phase, h: f64) -> Phase {
    let mut out = *y;
    for i in 0..8 {
        out[i] += h * k[i];
    }
    out
}

/// One classical RK4 step of the chart geodesic equation.
pub fn rk4_chart_step(
    p: &ChartPoint,
    v: &[f64; 4],
    h: f64,
    cfg: &ModelConfig,
) -> (ChartPoint, [f64; 4]) {
    let y = [p.rho, p.psi, p.phi, p.theta, v[0], v[1], v[2], v[3]];
    let k1 = chart_rhs(&y, cfg);
    let k2 = chart_rhs(&axpy(&y, &k1, 0.5 * h), cfg);
    let k3 = chart_rhs(&axpy(&y, &k2, 0.5 * h), cfg);
    let k4 = chart_rhs(&axpy(&y, &k3, h), cfg);
    let mut out = y;
    for i in 0..8 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    (
        ChartPoint::new(out[0], out[1], out[2], out[3]),
        [out[4], out[5], out[6], out[7]],
    )
}

/// The `(ρ, ψ)` box outside of which `g = g₀` for every admissible profile.
const BOX_RHO: (f64, f64) = (0.5, 1.5);
const BOX_PSI: (f64, f64) = (FRAC_PI_8, 3.0 * FRAC_PI_8);

fn in_box(rho: f64, psi: f64, pad: f64) -> bool {
    rho >= BOX_RHO.0 - pad
        && rho <= BOX_RHO.1 + pad
        && psi >= BOX_PSI.0 - pad
        && psi <= BOX_PSI.1 + pad
}

fn to_chart_if_inside(state: GeodesicState) -> (GeodesicState, bool) {
    if let GeodesicState::Ambient { position, velocity } = state {
        if let Ok(p) = ambient_to_chart(&position) {
            if in_box(p.rho, p.psi, 0.0) {
                if let Ok(v) = ambient_velocity_to_chart(&position, &velocity) {
                    return (
                        GeodesicState::Chart {
                            position: p,
                            velocity: v,
                        },
                        true,
                    );
                }
            }
        }
    }
    (state, false)
}

fn to_ambient_if_outside(state: GeodesicState, pad: f64) -> (GeodesicState, bool) {
    if let GeodesicState::Chart { position, .. } = state {
        let usable = position.psi > 0.0 && position.psi < FRAC_PI_2 && position.rho > 0.0;
        if !usable || !in_box(position.rho, position.psi, pad) {
            let (x, v) = state.ambient();
            return (
                GeodesicState::Ambient {
                    position: x,
                    velocity: v,
                },
                true,
            );
        }
    }
    (state, false)
}

/// Fixed-step geodesic flow. Chart RK4 inside the box, exact straight lines
/// outside it, with a hysteresis band around the box boundary.
#[derive(Clone, Debug)]
pub struct GeodesicFlow<'a> {
    cfg: &'a ModelConfig,
    state: GeodesicState,
    steps: usize,
    switches: usize,
}

impl<'a> GeodesicFlow<'a> {
    pub fn new(initial: GeodesicState, cfg: &'a ModelConfig) -> Self {
        let (state, _) = to_ambient_if_outside(initial, cfg.integrator.hysteresis);
        let (state, _) = to_chart_if_inside(state);
        GeodesicFlow {
            cfg,
            state,
            steps: 0,
            switches: 0,
        }
    }

    pub fn state(&self) -> &GeodesicState {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.steps as f64 * self.cfg.integrator.step
    }

    pub fn switches(&self) -> usize {
        self.switches
    }

    /// Advance `state` by `h` without touching the flow. `None` if the step
    /// would leave the ball.
    pub fn propagate(state: &GeodesicState, h: f64, cfg: &ModelConfig) -> Option<GeodesicState> {
        match state {
            GeodesicState::Chart { position, velocity } => {
                let (p, v) = rk4_chart_step(position, velocity, h, cfg);
                Some(GeodesicState::Chart {
                    position: p,
                    velocity: v,
                })
            }
            GeodesicState::Ambient { position, velocity } => {
                let mut x = position.x;
                for i in 0..4 {
                    x[i] += h * velocity[i];
                }
                let next = AmbientPoint::new(x);
                (next.norm_sq() <= 4.0).then_some(GeodesicState::Ambient {
                    position: next,
                    velocity: *velocity,
                })
            }
        }
    }

    /// One fixed step; `false` when the boundary `d = 2` would be crossed.
    pub fn advance(&mut self) -> bool {
        let Some(next) = Self::propagate(&self.state, self.cfg.integrator.step, self.cfg) else {
            return false;
        };
        let (next, out) = to_ambient_if_outside(next, self.cfg.integrator.hysteresis);
        let (next, inside) = to_chart_if_inside(next);
        self.switches += usize::from(out) + usize::from(inside);
        self.state = next;
        self.steps += 1;
        true
    }
}

/// Integrate the geodesic starting at `s0` for duration `duration` at the
/// configured step. Stops early at the boundary sphere.
pub fn integrate_geodesic(
    s0: GeodesicState,
    duration: f64,
    cfg: &ModelConfig,
) -> Result<Trajectory> {
    if !(duration > 0.0) {
        return Err(GeoError::InvalidArgument(format!(
            "duration must be positive, got {duration}"
        )));
    }
    let h = cfg.integrator.step;
    let n = (duration / h - 1e-9).ceil() as usize;
    let mut flow = GeodesicFlow::new(s0, cfg);
    let e0 = flow.state().energy(cfg);
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(Sample {
        t: 0.0,
        state: *flow.state(),
        energy: e0,
        d2: flow.state().d2(),
    });
    let mut termination = Termination::TimeExhausted;
    let bound = cfg.integrator.max_energy_drift;
    for i in 1..=n {
        if !flow.advance() {
            termination = Termination::HitBoundary;
            break;
        }
        let state = *flow.state();
        let energy = state.energy(cfg);
        let drift = (energy - e0).abs() / e0;
        if drift > bound {
            return Err(GeoError::StepTooLarge { drift, bound });
        }
        samples.push(Sample {
            t: i as f64 * h,
            state,
            energy,
            d2: state.d2(),
        });
    }
    Ok(Trajectory {
        step: h,
        samples,
        termination,
        mode_switches: flow.switches(),
    })
}

/// Minimum over interior samples of the centred second difference of
/// `t ↦ d²(c(t))`, divided by `step²`. `+∞` for fewer than three samples.
pub fn convexity_certificate(tr: &Trajectory) -> f64 {
    let h2 = tr.step * tr.step;
    tr.samples
        .windows(3)
        .map(|w| (w[2].d2 - 2.0 * w[1].d2 + w[0].d2) / h2)
        .fold(f64::INFINITY, f64::min)
}

pub const TRAJECTORY_CSV_HEADER: &str = "t,rho,psi,phi,theta,x1,x2,x3,x4,energy,d2";

/// One row per sample; chart columns are NaN where the chart does not apply.
pub fn write_trajectory_csv<W: Write>(tr: &Trajectory, mut out: W) -> Result<()> {
    writeln!(out, "{TRAJECTORY_CSV_HEADER}")?;
    for s in &tr.samples {
        let (x, _) = s.state.ambient();
        let chart = match s.state {
            GeodesicState::Chart { position, .. } => Some(position.wrapped()),
            GeodesicState::Ambient { position, .. } => ambient_to_chart(&position).ok(),
        };
        let c = chart.map_or([f64::NAN; 4], |p| p.coords());
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            s.t, c[0], c[1], c[2], c[3], x.x[0], x.x[1], x.x[2], x.x[3], s.energy, s.d2
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::foliation_geodesic;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn straight_line_exits_at_boundary() {
        let cfg = ModelConfig::default();
        let s0 = GeodesicState::Ambient {
            position: AmbientPoint::new([0.1, 0.0, 0.0, 0.0]),
            velocity: [1.0, 0.0, 0.0, 0.0],
        };
        let tr = integrate_geodesic(s0, 10.0, &cfg).unwrap();
        assert_eq!(tr.termination, Termination::HitBoundary);
        assert!((tr.last().t - 1.9).abs() < 1.5e-3);
        assert!((tr.length() - 1.9).abs() < 1.5e-3);
        assert_eq!(tr.mode_switches, 0);
        assert!((convexity_certificate(&tr) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn foliation_leaf_is_preserved() {
        let cfg = ModelConfig::default();
        let tr = integrate_geodesic(foliation_geodesic(0.0, 0.2, 0.7, &cfg), 20.0, &cfg).unwrap();
        assert_eq!(tr.samples.len(), 20_001);
        for s in &tr.samples {
            let (p, _) = s.state.chart().unwrap();
            assert!((p.rho - 1.0).abs() < 1e-9 && (p.psi - FRAC_PI_4).abs() < 1e-9);
        }
        assert!(tr.max_energy_drift() < 1e-10);
    }

    #[test]
    fn crossing_geodesic_switches_modes_and_keeps_energy() {
        let cfg = ModelConfig::default();
        let s0 = GeodesicState::Ambient {
            position: AmbientPoint::new([-1.2, 0.3, 0.2, 0.1]),
            velocity: [0.8, 0.2, 0.5, 0.26],
        };
        let tr = integrate_geodesic(s0, 10.0, &cfg).unwrap();
        assert!(tr.mode_switches >= 2, "{}", tr.mode_switches);
        assert_eq!(tr.termination, Termination::HitBoundary);
        assert!(tr.max_energy_drift() < 1e-9);
        assert!(convexity_certificate(&tr) > -1e-6);
    }

    #[test]
    fn rejects_non_positive_duration() {
        let cfg = ModelConfig::default();
        let s0 = foliation_geodesic(0.0, 0.0, 0.0, &cfg);
        assert!(integrate_geodesic(s0, 0.0, &cfg).is_err());
    }

    #[test]
    fn oversized_step_is_reported() {
        let mut cfg = ModelConfig::default();
        cfg.integrator.step = 0.2;
        cfg.integrator.max_energy_drift = 1e-12;
        let s0 = GeodesicState::Chart {
            position: ChartPoint::new(0.9, 0.7, 0.0, 0.0),
            velocity: [0.3, 0.4, 1.5, -1.0],
        };
        assert!(matches!(
            integrate_geodesic(s0, 5.0, &cfg),
            Err(GeoError::StepTooLarge { .. })
        ));
    }

    #[test]
    fn csv_has_header_and_nan_chart_columns_off_chart() {
        let cfg = ModelConfig::default();
        let s0 = GeodesicState::Ambient {
            position: AmbientPoint::new([0.1, 0.0, 0.0, 0.0]),
            velocity: [1.0, 0.0, 0.0, 0.0],
        };
        let tr = integrate_geodesic(s0, 0.01, &cfg).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&tr, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(TRAJECTORY_CSV_HEADER));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 11);
        assert_eq!(row[1], "NaN");
        assert_eq!(text.lines().count(), 12);
    }
}
