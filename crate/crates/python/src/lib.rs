//! Python bindings for `berryline`.
//!
//! Build with `cargo build -p berryline-python --release --features extension-module`
//! and copy `libberryline_py.so` next to your script as `berryline.so`.

use berryline as core;
use berryline::numerics::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: core::Error) -> PyErr {
    let msg = format!("{}: {e}", e.name());
    if e.is_numerical() {
        PyRuntimeError::new_err(msg)
    } else {
        PyValueError::new_err(msg)
    }
}

fn branch(s: &str) -> PyResult<core::Branch> {
    s.parse().map_err(err)
}

#[pyclass(
    frozen,
    skip_from_py_object,
    name = "TwoLevelModel",
    module = "berryline"
)]
#[derive(Clone, Copy)]
struct TwoLevelModel(core::TwoLevelModel);

#[pymethods]
impl TwoLevelModel {
    #[new]
    fn new(rc: f64, r: f64) -> PyResult<Self> {
        core::TwoLevelModel::new(rc, r).map(Self).map_err(err)
    }

    #[getter]
    fn rc(&self) -> f64 {
        self.0.rc()
    }

    #[getter]
    fn r(&self) -> f64 {
        self.0.r()
    }

    /// `√(Rc² + r²)`
    fn half_gap(&self) -> f64 {
        self.0.half_gap()
    }

    /// Hamiltonian at azimuth `phi` as a nested list of complex numbers.
    fn hamiltonian(&self, phi: f64) -> Vec<Vec<Complex64>> {
        matrix_rows(&core::two_level_hamiltonian(&self.0, phi))
    }

    /// Closed-form phase for one winding on `branch` (`"plus"` or `"minus"`).
    fn analytic_phase(&self, branch: &str) -> PyResult<f64> {
        core::analytic_two_level_phase(&self.0, self::branch(branch)?).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("TwoLevelModel(rc={}, r={})", self.0.rc(), self.0.r())
    }
}

#[pyclass(
    frozen,
    skip_from_py_object,
    name = "ThreeLevelModel",
    module = "berryline"
)]
#[derive(Clone, Copy)]
struct ThreeLevelModel(core::ThreeLevelModel);

#[pymethods]
impl ThreeLevelModel {
    #[new]
    #[pyo3(signature = (theta, phi, chi1 = 0.0, chi2 = 0.0))]
    fn new(theta: f64, phi: f64, chi1: f64, chi2: f64) -> PyResult<Self> {
        core::ThreeLevelModel::new(theta, phi, chi1, chi2)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.0.theta
    }

    #[getter]
    fn phi(&self) -> f64 {
        self.0.phi
    }

    #[getter]
    fn chi1(&self) -> f64 {
        self.0.chi1
    }

    #[getter]
    fn chi2(&self) -> f64 {
        self.0.chi2
    }

    /// Tracked top state `ψ₁`.
    fn state(&self) -> Vec<Complex64> {
        core::three_level_state(&self.0).to_vec()
    }

    /// `(μ₁, μ₂, μ₃)`
    fn spectrum(&self) -> (f64, f64, f64) {
        let [a, b, c] = core::three_level_spectrum(&self.0);
        (a, b, c)
    }

    fn hamiltonian(&self) -> PyResult<Vec<Vec<Complex64>>> {
        core::three_level_hamiltonian(&self.0)
            .map(|h| matrix_rows(&h))
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        let m = self.0;
        format!(
            "ThreeLevelModel(theta={}, phi={}, chi1={}, chi2={})",
            m.theta, m.phi, m.chi1, m.chi2
        )
    }
}

#[pyclass(
    frozen,
    skip_from_py_object,
    name = "CollectiveModel",
    module = "berryline"
)]
#[derive(Clone, Copy)]
struct CollectiveModel(core::CollectiveModel);

#[pymethods]
impl CollectiveModel {
    /// `H0(P) = ωP`
    #[staticmethod]
    #[pyo3(signature = (omega, hbar = 1.0))]
    fn linear(omega: f64, hbar: f64) -> PyResult<Self> {
        core::CollectiveModel::linear(omega, hbar)
            .map(Self)
            .map_err(err)
    }

    /// `H0(P) = P²/2I`
    #[staticmethod]
    #[pyo3(signature = (inertia, hbar = 1.0))]
    fn quadratic(inertia: f64, hbar: f64) -> PyResult<Self> {
        core::CollectiveModel::quadratic(inertia, hbar)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.0.kind() {
            core::CollectiveKind::Linear => "linear",
            core::CollectiveKind::Quadratic => "quadratic",
        }
    }

    #[getter]
    fn parameter(&self) -> f64 {
        self.0.parameter()
    }

    #[getter]
    fn hbar(&self) -> f64 {
        self.0.hbar()
    }

    fn energy(&self, p: f64) -> f64 {
        core::collective_energy(&self.0, p)
    }

    fn derivative(&self, p: f64) -> f64 {
        core::collective_derivative(&self.0, p)
    }

    fn __repr__(&self) -> String {
        format!(
            "CollectiveModel.{}({}, hbar={})",
            self.kind(),
            self.0.parameter(),
            self.0.hbar()
        )
    }
}

#[pyclass(
    frozen,
    skip_from_py_object,
    name = "ParameterLoop",
    module = "berryline"
)]
#[derive(Clone)]
struct ParameterLoop(core::ParameterLoop);

#[pymethods]
impl ParameterLoop {
    /// Loop winding the two-level azimuth `winding` times.
    #[staticmethod]
    #[pyo3(signature = (model, winding = 1, points = 4096))]
    fn two_level(model: &TwoLevelModel, winding: i32, points: usize) -> PyResult<Self> {
        core::ParameterLoop::two_level(model.0, winding, points)
            .map(Self)
            .map_err(err)
    }

    /// Loop winding `χ₁` and `χ₂` by `n1` and `n2`, with optional sinusoidal
    /// wobbles of `θ` and `φ`.
    #[staticmethod]
    #[pyo3(signature = (model, n1, n2, points = 4096, theta_wobble = 0.0, phi_wobble = 0.0))]
    fn su3(
        model: &ThreeLevelModel,
        n1: i32,
        n2: i32,
        points: usize,
        theta_wobble: f64,
        phi_wobble: f64,
    ) -> PyResult<Self> {
        core::ParameterLoop::su3(model.0, n1, n2, points)
            .and_then(|lp| lp.with_wobble(theta_wobble, phi_wobble))
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn points(&self) -> usize {
        self.0.points()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn reversed(&self) -> Self {
        Self(self.0.reversed())
    }

    fn with_points(&self, points: usize) -> PyResult<Self> {
        self.0.with_points(points).map(Self).map_err(err)
    }

    fn hamiltonian_at(&self, t: f64) -> PyResult<Vec<Vec<Complex64>>> {
        self.0
            .hamiltonian_at(t)
            .map(|h| matrix_rows(&h))
            .map_err(err)
    }
}

#[pyclass(frozen, get_all, name = "BerryPhaseResult", module = "berryline")]
struct BerryPhaseResult {
    level: usize,
    analytic: Option<f64>,
    numerical: f64,
    unwrapped: f64,
    discrepancy: Option<f64>,
    points: usize,
    refined: f64,
}

#[pymethods]
impl BerryPhaseResult {
    fn __repr__(&self) -> String {
        format!(
            "BerryPhaseResult(level={}, numerical={}, analytic={:?}, points={})",
            self.level, self.numerical, self.analytic, self.points
        )
    }
}

impl From<core::BerryPhaseResult> for BerryPhaseResult {
    fn from(r: core::BerryPhaseResult) -> Self {
        Self {
            level: r.level,
            analytic: r.analytic,
            numerical: r.numerical,
            unwrapped: r.unwrapped,
            discrepancy: r.discrepancy,
            points: r.points,
            refined: r.refined,
        }
    }
}

#[pyclass(frozen, get_all, name = "QuantizedLevel", module = "berryline")]
struct QuantizedLevel {
    m: i64,
    branch: &'static str,
    gamma: f64,
    p_quantized: f64,
    energy_exact: f64,
    energy_first_order: f64,
}

#[pymethods]
impl QuantizedLevel {
    fn truncation_residual(&self) -> f64 {
        (self.energy_exact - self.energy_first_order).abs()
    }

    fn __repr__(&self) -> String {
        format!(
            "QuantizedLevel(m={}, branch={:?}, energy={})",
            self.m, self.branch, self.energy_exact
        )
    }
}

impl From<core::QuantizedLevel> for QuantizedLevel {
    fn from(q: core::QuantizedLevel) -> Self {
        Self {
            m: q.m,
            branch: q.branch.label(),
            gamma: q.gamma,
            p_quantized: q.p_quantized,
            energy_exact: q.energy_exact,
            energy_first_order: q.energy_first_order,
        }
    }
}

#[pyclass(
    frozen,
    skip_from_py_object,
    name = "PatchConfig",
    module = "berryline"
)]
#[derive(Clone, Copy)]
struct PatchConfig(core::PatchConfig);

#[pymethods]
impl PatchConfig {
    #[new]
    #[pyo3(signature = (l, rc, collective, m = 0, branch = "plus", samples = core::broadening::DEFAULT_SAMPLES))]
    fn new(
        l: f64,
        rc: f64,
        collective: &CollectiveModel,
        m: i64,
        branch: &str,
        samples: usize,
    ) -> PyResult<Self> {
        core::PatchConfig::new(l, rc, samples, collective.0, m, self::branch(branch)?)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn ratio(&self) -> f64 {
        self.0.ratio()
    }

    fn warnings(&self) -> Vec<String> {
        self.0.warnings()
    }
}

#[pyclass(frozen, get_all, name = "BroadeningReport", module = "berryline")]
struct BroadeningReport {
    de_berry: f64,
    de_gap: f64,
    de_predicted: f64,
    relative_error: f64,
    gap_to_berry: f64,
    /// `(r, berry_shift, internal_shift)` per sample.
    samples: Vec<(f64, f64, f64)>,
    warnings: Vec<String>,
}

#[pymethods]
impl BroadeningReport {
    fn __repr__(&self) -> String {
        format!(
            "BroadeningReport(de_berry={}, de_predicted={}, relative_error={})",
            self.de_berry, self.de_predicted, self.relative_error
        )
    }
}

impl From<core::BroadeningReport> for BroadeningReport {
    fn from(r: core::BroadeningReport) -> Self {
        Self {
            de_berry: r.de_berry,
            de_gap: r.de_gap,
            de_predicted: r.de_predicted,
            relative_error: r.relative_error,
            gap_to_berry: r.gap_to_berry,
            samples: r
                .samples
                .iter()
                .map(|s| (s.r, s.berry_shift, s.internal_shift))
                .collect(),
            warnings: r.warnings,
        }
    }
}

#[pyclass(frozen, get_all, name = "FitResult", module = "berryline")]
struct FitResult {
    slope: f64,
    intercept: f64,
    rms_residual: f64,
    n_points: usize,
}

impl From<core::FitResult> for FitResult {
    fn from(f: core::FitResult) -> Self {
        Self {
            slope: f.slope,
            intercept: f.intercept,
            rms_residual: f.rms_residual,
            n_points: f.n_points,
        }
    }
}

#[pymethods]
impl FitResult {
    fn __repr__(&self) -> String {
        format!(
            "FitResult(slope={}, intercept={}, n_points={})",
            self.slope, self.intercept, self.n_points
        )
    }
}

fn matrix_rows(h: &core::ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..h.dim())
        .map(|i| (0..h.dim()).map(|j| h.get(i, j)).collect())
        .collect()
}

/// Eigenvalues (ascending) and eigenvectors of a 2×2 or 3×3 Hermitian matrix.
#[pyfunction]
fn eig_hermitian(rows: Vec<Vec<Complex64>>) -> PyResult<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let dim = rows.len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
    let h = core::ComplexMatrix::from_row_major(dim, &flat).map_err(err)?;
    let es = core::eig_hermitian(&h).map_err(err)?;
    Ok((
        es.values().to_vec(),
        es.vectors().map(<[_]>::to_vec).collect(),
    ))
}

/// Overlap-product phase of a closed chain of states, `(wrapped, unwrapped)`.
#[pyfunction]
fn overlap_phase(states: Vec<Vec<Complex64>>) -> PyResult<(f64, f64)> {
    core::overlap_phase(&states)
        .map(|p| (p.wrapped, p.unwrapped))
        .map_err(err)
}

/// Transport `level` (ascending-eigenvalue index) around `lp`.
#[pyfunction]
#[pyo3(signature = (lp, level, gap_tol = core::berry::DEFAULT_GAP_TOL, phase_tol = core::berry::DEFAULT_PHASE_TOL, eigen = false))]
fn wilson_loop_phase(
    py: Python<'_>,
    lp: &ParameterLoop,
    level: usize,
    gap_tol: f64,
    phase_tol: f64,
    eigen: bool,
) -> PyResult<BerryPhaseResult> {
    let opts = core::WilsonOptions {
        gap_tol,
        phase_tol,
        tracking: if eigen {
            core::berry::Tracking::Eigen
        } else {
            core::berry::Tracking::Auto
        },
    };
    let lp = lp.0;
    py.detach(|| core::wilson_loop_phase(&lp, level, &opts))
        .map(Into::into)
        .map_err(err)
}

#[pyfunction]
fn analytic_su3_phase(lp: &ParameterLoop) -> PyResult<f64> {
    core::analytic_su3_phase(&lp.0).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (lp, n = 4096))]
fn connection_integral_su3(lp: &ParameterLoop, n: usize) -> PyResult<f64> {
    core::connection_integral_su3(&lp.0, n).map_err(err)
}

#[pyfunction]
fn quantize_level(
    collective: &CollectiveModel,
    internal: &TwoLevelModel,
    m: i64,
    branch: &str,
) -> PyResult<QuantizedLevel> {
    core::quantize_level(&collective.0, &internal.0, m, self::branch(branch)?)
        .map(Into::into)
        .map_err(err)
}

/// Levels for `m_min ..= m_max` on both branches, sorted by energy.
#[pyfunction]
fn spectrum(
    collective: &CollectiveModel,
    internal: &TwoLevelModel,
    m_min: i64,
    m_max: i64,
) -> PyResult<Vec<QuantizedLevel>> {
    core::spectrum(&collective.0, &internal.0, m_min..=m_max)
        .map(|v| v.into_iter().map(Into::into).collect())
        .map_err(err)
}

#[pyfunction]
fn sweep_patch(config: &PatchConfig) -> PyResult<BroadeningReport> {
    core::sweep_patch(&config.0).map(Into::into).map_err(err)
}

#[pyfunction]
fn sweep_patch_su3(config: &PatchConfig) -> PyResult<BroadeningReport> {
    core::sweep_patch_su3(&config.0)
        .map(Into::into)
        .map_err(err)
}

/// Log-log fit of the broadening against `l/Rc`; returns `(points, fit)`.
#[pyfunction]
#[pyo3(signature = (ratios, base, model = "two-level"))]
fn scaling_study(
    ratios: Vec<f64>,
    base: &PatchConfig,
    model: &str,
) -> PyResult<(Vec<(f64, f64)>, FitResult)> {
    let model: core::ScalingModel = model.parse().map_err(err)?;
    let study = core::scaling_study(&ratios, model, &base.0).map_err(err)?;
    Ok((study.points, study.fit.into()))
}

/// Linear bound `ν₀ (l/Rc) β`.
#[pyfunction]
#[pyo3(signature = (nu0, l_over_rc, beta = 1.0))]
fn mead_bound(nu0: f64, l_over_rc: f64, beta: f64) -> PyResult<f64> {
    core::mead_bound(nu0, l_over_rc, beta)
        .map(|m| m.bound)
        .map_err(err)
}

/// `(geometric_spread, bound, ratio)` for the two-level sweep at `config`.
#[pyfunction]
#[pyo3(signature = (config, nu0, beta = 1.0))]
fn compare_with_mead(config: &PatchConfig, nu0: f64, beta: f64) -> PyResult<(f64, f64, f64)> {
    core::compare_with_mead(&config.0, nu0, beta)
        .map(|c| (c.geometric_spread, c.mead.bound, c.ratio))
        .map_err(err)
}

#[pyfunction]
fn fit_loglog(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<FitResult> {
    core::fit_loglog(&xs, &ys).map(Into::into).map_err(err)
}

#[pymodule]
#[pyo3(name = "berryline")]
fn berryline_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<TwoLevelModel>()?;
    m.add_class::<ThreeLevelModel>()?;
    m.add_class::<CollectiveModel>()?;
    m.add_class::<ParameterLoop>()?;
    m.add_class::<BerryPhaseResult>()?;
    m.add_class::<QuantizedLevel>()?;
    m.add_class::<PatchConfig>()?;
    m.add_class::<BroadeningReport>()?;
    m.add_class::<FitResult>()?;
    m.add_function(wrap_pyfunction!(eig_hermitian, m)?)?;
    m.add_function(wrap_pyfunction!(overlap_phase, m)?)?;
    m.add_function(wrap_pyfunction!(wilson_loop_phase, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_su3_phase, m)?)?;
    m.add_function(wrap_pyfunction!(connection_integral_su3, m)?)?;
    m.add_function(wrap_pyfunction!(quantize_level, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_patch, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_patch_su3, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_study, m)?)?;
    m.add_function(wrap_pyfunction!(mead_bound, m)?)?;
    m.add_function(wrap_pyfunction!(compare_with_mead, m)?)?;
    m.add_function(wrap_pyfunction!(fit_loglog, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
