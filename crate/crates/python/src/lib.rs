//! Python bindings for `geoverify`.

use std::f64::consts::TAU;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use geoverify::convexity;
use geoverify::geodesics::{self, GeodesicState};
use geoverify::metric;
use geoverify::suites::{self, Suite, SuiteOptions};
use geoverify::varifold::{self, BaseManifold, TrigPoly, TrigTerm};
use geoverify::{AmbientPoint, ChartPoint, GeoError};

fn err(e: GeoError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Model parameters: slope, bump box, tolerances and integrator settings.
#[pyclass(name = "ModelConfig", module = "geoverify_py", skip_from_py_object)]
#[derive(Clone)]
pub struct PyModelConfig {
    inner: geoverify::ModelConfig,
}

#[pymethods]
impl PyModelConfig {
    #[new]
    #[pyo3(signature = (alpha=None))]
    fn new(alpha: Option<f64>) -> PyResult<Self> {
        let mut inner = geoverify::ModelConfig::default();
        if let Some(a) = alpha {
            inner.alpha = a;
        }
        inner.check().map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: geoverify::ModelConfig::from_json(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn leaf_speed(&self) -> f64 {
        self.inner.leaf_speed()
    }

    fn fingerprint(&self) -> String {
        self.inner.fingerprint()
    }

    /// Raise `ValueError` unless the bump box passes validation.
    fn validate(&self) -> PyResult<()> {
        metric::validated(&self.inner).map(|_| ()).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("ModelConfig(alpha={})", self.inner.alpha)
    }
}

/// `(R, ∂ρR, ∂ψR)`.
#[pyfunction]
fn r_eval(rho: f64, psi: f64, cfg: PyRef<'_, PyModelConfig>) -> (f64, f64, f64) {
    let j = metric::r_eval(rho, psi, &cfg.inner);
    (j.value, j.d_rho, j.d_psi)
}

/// Diagonal of `g` on `(∂ρ, ∂ψ, Y, Z)`.
#[pyfunction]
fn metric_frame(rho: f64, psi: f64, cfg: PyRef<'_, PyModelConfig>) -> [f64; 4] {
    metric::metric_frame(&ChartPoint::new(rho, psi, 0.0, 0.0), &cfg.inner).as_array()
}

#[pyfunction]
fn metric_chart(point: [f64; 4], cfg: PyRef<'_, PyModelConfig>) -> Vec<Vec<f64>> {
    let g = metric::metric_chart(&ChartPoint::from_coords(point), &cfg.inner);
    (0..4).map(|i| (0..4).map(|j| g[(i, j)]).collect()).collect()
}

#[pyfunction]
fn chart_to_ambient(point: [f64; 4]) -> [f64; 4] {
    metric::chart_to_ambient(&ChartPoint::from_coords(point)).x
}

#[pyfunction]
fn ambient_to_chart(x: [f64; 4]) -> PyResult<[f64; 4]> {
    Ok(metric::ambient_to_chart(&AmbientPoint { x }).map_err(err)?.coords())
}

#[pyfunction]
fn hessian_d_frame(rho: f64, psi: f64, cfg: PyRef<'_, PyModelConfig>) -> [f64; 4] {
    convexity::hessian_d_frame(rho, psi, &cfg.inner).as_array()
}

#[pyfunction]
fn hessian_d2_frame(rho: f64, psi: f64, cfg: PyRef<'_, PyModelConfig>) -> [f64; 4] {
    convexity::hessian_d2_frame(rho, psi, &cfg.inner).as_array()
}

/// Verdict JSON for the sphere of radius `rho`.
#[pyfunction]
#[pyo3(signature = (rho, cfg, grid=200))]
fn sphere_sff(rho: f64, cfg: PyRef<'_, PyModelConfig>, grid: usize) -> String {
    serde_json::to_string(&convexity::sphere_sff(rho, grid, &cfg.inner)).expect("verdict serialises")
}

#[pyfunction]
fn torus_sff_y(cfg: PyRef<'_, PyModelConfig>) -> f64 {
    convexity::torus_sff_y(&cfg.inner)
}

/// Sampled geodesic.
#[pyclass(name = "Trajectory", module = "geoverify_py")]
pub struct PyTrajectory {
    inner: geodesics::Trajectory,
}

#[pymethods]
impl PyTrajectory {
    fn __len__(&self) -> usize {
        self.inner.samples.len()
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.t).collect()
    }

    #[getter]
    fn d2(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.d2).collect()
    }

    #[getter]
    fn energy(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.energy).collect()
    }

    /// Cartesian positions.
    #[getter]
    fn positions(&self) -> Vec<[f64; 4]> {
        self.inner.samples.iter().map(|s| s.state.ambient().0.x).collect()
    }

    #[getter]
    fn hit_boundary(&self) -> bool {
        self.inner.termination == geodesics::Termination::HitBoundary
    }

    fn length(&self) -> f64 {
        self.inner.length()
    }

    fn max_energy_drift(&self) -> f64 {
        self.inner.max_energy_drift()
    }

    fn convexity_certificate(&self) -> f64 {
        geodesics::convexity_certificate(&self.inner)
    }

    fn to_csv(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        geodesics::write_trajectory_csv(&self.inner, &mut buf).map_err(err)?;
        Ok(String::from_utf8_lossy(&buf).into_owned())
    }
}

/// Chart position and velocity of the unit-speed leaf at time `t`.
#[pyfunction]
#[pyo3(signature = (t, cfg, phi0=0.0, theta0=0.0))]
fn foliation_geodesic(t: f64, cfg: PyRef<'_, PyModelConfig>, phi0: f64, theta0: f64) -> ([f64; 4], [f64; 4]) {
    let (p, v) = geodesics::foliation_geodesic(t, phi0, theta0, &cfg.inner).chart().expect("leaf lies in the chart");
    (p.coords(), v)
}

/// Integrate from `(position, velocity)`, given in chart coordinates when
/// `chart` is true and in Cartesian coordinates otherwise.
#[pyfunction]
#[pyo3(signature = (position, velocity, duration, cfg, chart=true))]
fn integrate_geodesic(
    position: [f64; 4],
    velocity: [f64; 4],
    duration: f64,
    cfg: PyRef<'_, PyModelConfig>,
    chart: bool,
) -> PyResult<PyTrajectory> {
    let s = if chart {
        GeodesicState::Chart {
            position: ChartPoint::from_coords(position),
            velocity,
        }
    } else {
        GeodesicState::Ambient {
            position: AmbientPoint { x: position },
            velocity,
        }
    };
    Ok(PyTrajectory {
        inner: geodesics::integrate_geodesic(s, duration, &cfg.inner).map_err(err)?,
    })
}

/// `(period, residual)` of every closed candidate found.
#[pyfunction]
#[pyo3(signature = (seeds, period_max, cfg, rng_seed=suites::DEFAULT_SEED))]
fn closed_geodesic_search(seeds: usize, period_max: f64, cfg: PyRef<'_, PyModelConfig>, rng_seed: u64) -> PyResult<Vec<(f64, f64)>> {
    let found = geodesics::closed_geodesic_search(seeds, period_max, rng_seed, &cfg.inner).map_err(err)?;
    Ok(found.iter().map(|c| (c.period, c.residual)).collect())
}

fn base_manifold(kind: &str, resolution: usize, sides: Option<Vec<f64>>) -> PyResult<BaseManifold> {
    let sides = sides.unwrap_or_default();
    match kind {
        "point" => Ok(BaseManifold::point()),
        "circle" => Ok(BaseManifold::circle(sides.first().copied().unwrap_or(TAU), resolution)),
        "flat-torus" => Ok(BaseManifold::flat_torus(
            [sides.first().copied().unwrap_or(TAU), sides.get(1).copied().unwrap_or(TAU)],
            resolution,
        )),
        _ => Err(PyValueError::new_err(format!("unknown base `{kind}` (point, circle or flat-torus)"))),
    }
}

/// The varifold `V₀` on `M × B⁴`.
#[pyclass(name = "VarifoldV0", module = "geoverify_py")]
pub struct PyVarifold {
    inner: varifold::VarifoldV0,
}

#[pymethods]
impl PyVarifold {
    #[new]
    #[pyo3(signature = (base, cfg, torus_resolution=64, base_resolution=16, sides=None))]
    fn new(
        base: &str,
        cfg: PyRef<'_, PyModelConfig>,
        torus_resolution: usize,
        base_resolution: usize,
        sides: Option<Vec<f64>>,
    ) -> PyResult<Self> {
        let b = base_manifold(base, base_resolution, sides)?;
        Ok(Self {
            inner: varifold::build_v0(b, torus_resolution, &cfg.inner).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn total_mass(&self) -> f64 {
        self.inner.total_mass()
    }

    /// `(name, δV₀(X))` over the built-in test-field library.
    fn library_first_variations(&self) -> Vec<(String, f64)> {
        varifold::field_library()
            .iter()
            .map(|x| (x.name.clone(), self.inner.first_variation(x)))
            .collect()
    }

    /// `(exponent, ratios decrease)` of `μ(B_r)` about node 0.
    fn density_scaling(&self, radii: Vec<f64>) -> PyResult<(f64, bool)> {
        let d = varifold::density_scaling(&self.inner, 0, &radii).map_err(err)?;
        Ok((d.exponent, d.ratios_decrease))
    }
}

/// `(vol(Mₙ), vol(∂Mₙ))`.
#[pyfunction]
#[pyo3(signature = (n, base="circle", sides=None))]
fn isoperimetric_ratio(n: u32, base: &str, sides: Option<Vec<f64>>) -> PyResult<(f64, f64)> {
    varifold::isoperimetric_ratio(n, &base_manifold(base, 8, sides)?).map_err(err)
}

/// Time average of `Σ a cos(kφ+lθ) + b sin(kφ+lθ)` along the leaf flow;
/// `terms` holds `(k, l, a, b)`.
#[pyfunction]
#[pyo3(signature = (terms, t_end, cfg, start=(0.0, 0.0)))]
fn ergodic_average(terms: Vec<(i32, i32, f64, f64)>, t_end: f64, cfg: PyRef<'_, PyModelConfig>, start: (f64, f64)) -> PyResult<f64> {
    let f = TrigPoly::new(terms.into_iter().map(|(k, l, c, s)| TrigTerm { k, l, cos: c, sin: s }).collect());
    varifold::ergodic_average(&f, start, t_end, &cfg.inner).map_err(err)
}

/// SuiteReport JSON for `suite`.
#[pyfunction]
#[pyo3(signature = (suite, cfg, seed=suites::DEFAULT_SEED, search_seeds=10_000))]
fn run_suite(suite: &str, cfg: PyRef<'_, PyModelConfig>, seed: u64, search_seeds: usize) -> PyResult<String> {
    let s: Suite = suite.parse().map_err(err)?;
    let opts = SuiteOptions {
        seed,
        search_seeds,
        ..SuiteOptions::default()
    };
    Ok(suites::run_suite(s, &cfg.inner, &opts).map_err(err)?.to_json())
}

#[pymodule]
fn geoverify_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelConfig>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_class::<PyVarifold>()?;
    m.add_function(wrap_pyfunction!(r_eval, m)?)?;
    m.add_function(wrap_pyfunction!(metric_frame, m)?)?;
    m.add_function(wrap_pyfunction!(metric_chart, m)?)?;
    m.add_function(wrap_pyfunction!(chart_to_ambient, m)?)?;
    m.add_function(wrap_pyfunction!(ambient_to_chart, m)?)?;
    m.add_function(wrap_pyfunction!(hessian_d_frame, m)?)?;
    m.add_function(wrap_pyfunction!(hessian_d2_frame, m)?)?;
    m.add_function(wrap_pyfunction!(sphere_sff, m)?)?;
    m.add_function(wrap_pyfunction!(torus_sff_y, m)?)?;
    m.add_function(wrap_pyfunction!(foliation_geodesic, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_geodesic, m)?)?;
    m.add_function(wrap_pyfunction!(closed_geodesic_search, m)?)?;
    m.add_function(wrap_pyfunction!(isoperimetric_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(ergodic_average, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
