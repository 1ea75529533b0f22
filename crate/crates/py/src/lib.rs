//! Python bindings: continued fractions, trigonometric polynomials,
//! almost-period scans, Kronecker solving and dimension estimates.

use num_bigint::BigInt;
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use apdim_core::apfun::{FrequencyBasis, PolyFile, Term, TrigPolynomial as CoreTrig};
use apdim_core::contfrac::{expand_certified, ContinuedFraction as CoreCf, DiophantineProfile, TermSource};
use apdim_core::dimension::{self, DimensionEstimate as CoreEstimate};
use apdim_core::periods::{self, PeriodScan as CoreScan, DEFAULT_BUDGET};
use apdim_core::{kronecker, Error};

create_exception!(apdim, BudgetExceeded, PyRuntimeError);
create_exception!(apdim, CertificationError, PyRuntimeError);

fn to_py(e: Error) -> PyErr {
    match e.exit_code() {
        3 => BudgetExceeded::new_err(e.to_string()),
        4 => CertificationError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(frozen, module = "apdim")]
pub struct Profile {
    #[pyo3(get)]
    nu_hat: f64,
    #[pyo3(get)]
    g_property: bool,
    #[pyo3(get)]
    g_constant: Option<f64>,
    #[pyo3(get)]
    growth_ratios: Vec<f64>,
    #[pyo3(get)]
    depth: usize,
}

impl From<DiophantineProfile> for Profile {
    fn from(p: DiophantineProfile) -> Self {
        Profile {
            nu_hat: p.nu_hat,
            g_property: p.g_property,
            g_constant: p.g_constant,
            growth_ratios: p.growth_ratios,
            depth: p.depth,
        }
    }
}

#[pymethods]
impl Profile {
    fn __repr__(&self) -> String {
        format!("Profile(nu_hat={:.6}, g_property={}, depth={})", self.nu_hat, self.g_property, self.depth)
    }
}

/// Exact continued fraction of a described number.
#[pyclass(frozen, module = "apdim")]
pub struct ContinuedFraction {
    inner: CoreCf,
}

#[pymethods]
impl ContinuedFraction {
    /// `number` accepts names (`sqrt2`, `phi`, `pi`), expansions
    /// (`[0; 5, 10^9, (1)]`), fractions and decimal literals.
    #[new]
    #[pyo3(signature = (number, depth = 40))]
    fn new(number: &str, depth: usize) -> PyResult<Self> {
        let source = TermSource::parse(number).map_err(to_py)?;
        Ok(ContinuedFraction { inner: expand_certified(&source, depth).map_err(to_py)? })
    }

    #[getter]
    fn a0(&self) -> BigInt {
        self.inner.a0().clone()
    }

    #[getter]
    fn terms(&self) -> Vec<BigInt> {
        self.inner.terms().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// `(p_k, q_k)` for every available `k`.
    fn convergents(&self) -> Vec<(BigInt, BigInt)> {
        self.inner.all_convergents().into_iter().map(|c| (c.p, c.q)).collect()
    }

    /// Certified bounds `(lo, hi)` on `|ω - p_k/q_k|`, as floats.
    fn approximation_gap(&self, k: usize) -> PyResult<(f64, f64)> {
        let (lo, hi) = self.inner.approximation_gap(k).map_err(to_py)?;
        Ok((apdim_core::exact::rational_to_f64(&lo), apdim_core::exact::rational_to_f64(&hi)))
    }

    #[pyo3(signature = (depth = None))]
    fn classify(&self, depth: Option<usize>) -> PyResult<Profile> {
        Ok(self.inner.classify(depth.unwrap_or(self.inner.len())).map_err(to_py)?.into())
    }

    fn invert(&self) -> PyResult<ContinuedFraction> {
        Ok(ContinuedFraction { inner: self.inner.invert().map_err(to_py)? })
    }

    fn __float__(&self) -> f64 {
        self.inner.to_f64()
    }

    fn __repr__(&self) -> String {
        format!("ContinuedFraction({})", self.inner)
    }
}

/// Finite sum `Σ_k A_k e^{i2π ⟨m_k, ν⟩ t}`.
#[pyclass(frozen, module = "apdim")]
pub struct TrigPolynomial {
    inner: CoreTrig,
}

#[pymethods]
impl TrigPolynomial {
    /// Scalar polynomial from frequencies, exponent rows and complex amplitudes.
    #[new]
    fn new(frequencies: Vec<String>, exponents: Vec<Vec<i64>>, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        if exponents.len() != amplitudes.len() {
            return Err(PyValueError::new_err("one amplitude per exponent row"));
        }
        let names: Vec<&str> = frequencies.iter().map(String::as_str).collect();
        let basis = FrequencyBasis::parse(&names).map_err(to_py)?;
        let terms = exponents.into_iter().zip(amplitudes).map(|(m, a)| Term::scalar(m, a)).collect();
        Ok(TrigPolynomial { inner: CoreTrig::new(basis, terms).map_err(to_py)? })
    }

    /// `Σ_j e^{i2π ν_j t}`.
    #[staticmethod]
    fn unit_sum(frequencies: Vec<String>) -> PyResult<Self> {
        let names: Vec<&str> = frequencies.iter().map(String::as_str).collect();
        Ok(TrigPolynomial { inner: CoreTrig::unit_sum(&names).map_err(to_py)? })
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let file = PolyFile::parse(text).map_err(to_py)?;
        Ok(TrigPolynomial { inner: file.build().map_err(to_py)? })
    }

    fn __call__(&self, t: f64) -> PyResult<Vec<Complex64>> {
        self.inner.evaluate(t).map_err(to_py)
    }

    /// Certified `(lo, hi)` enclosure of `sup_t |P(t+τ) - P(t)|`.
    fn shift_distance(&self, tau: f64) -> (f64, f64) {
        let d = self.inner.shift_distance(tau);
        (d.lo, d.hi)
    }

    #[getter]
    fn lipschitz(&self) -> f64 {
        self.inner.lipschitz()
    }
}

#[pyclass(frozen, module = "apdim")]
pub struct PeriodScan {
    inner: CoreScan,
}

#[pymethods]
impl PeriodScan {
    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    #[getter]
    fn window(&self) -> f64 {
        self.inner.window
    }

    #[getter]
    fn l_hat(&self) -> f64 {
        self.inner.l_hat
    }

    #[getter]
    fn reliable(&self) -> bool {
        self.inner.reliable
    }

    #[getter]
    fn periods(&self) -> Vec<f64> {
        self.inner.periods()
    }

    #[getter]
    fn gaps(&self) -> Vec<f64> {
        self.inner.gaps.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "PeriodScan(epsilon={}, l_hat={:.6}, periods={}, reliable={})",
            self.inner.epsilon,
            self.inner.l_hat,
            self.inner.clusters.len(),
            self.inner.reliable
        )
    }
}

#[pyclass(frozen, module = "apdim")]
pub struct DimensionEstimate {
    #[pyo3(get)]
    fit_slope: f64,
    #[pyo3(get)]
    slope_upper: f64,
    #[pyo3(get)]
    slope_lower: f64,
    #[pyo3(get)]
    intercept: f64,
    #[pyo3(get)]
    residual: f64,
    #[pyo3(get)]
    ladder: Vec<(f64, f64)>,
}

impl From<CoreEstimate> for DimensionEstimate {
    fn from(e: CoreEstimate) -> Self {
        DimensionEstimate {
            fit_slope: e.fit_slope,
            slope_upper: e.slope_upper,
            slope_lower: e.slope_lower,
            intercept: e.intercept,
            residual: e.residual,
            ladder: e.ladder,
        }
    }
}

#[pymethods]
impl DimensionEstimate {
    fn __repr__(&self) -> String {
        format!(
            "DimensionEstimate(fit_slope={:.6}, lower={:.6}, upper={:.6})",
            self.fit_slope, self.slope_lower, self.slope_upper
        )
    }
}

/// Verified ε-almost periods of `p` in `[0, window]`.
#[pyfunction]
#[pyo3(signature = (p, epsilon, window, budget = DEFAULT_BUDGET))]
fn scan(py: Python<'_>, p: &TrigPolynomial, epsilon: f64, window: f64, budget: u64) -> PyResult<PeriodScan> {
    let inner = py.detach(|| periods::scan(&p.inner, epsilon, window, budget)).map_err(to_py)?;
    Ok(PeriodScan { inner })
}

/// Integer solutions `q ≤ window` of `‖qω‖ < δ` and the largest gap between them.
#[pyfunction]
fn solve_one_freq(omega: &ContinuedFraction, delta: f64, window: f64) -> PyResult<(Vec<u64>, f64)> {
    let set = kronecker::solve_one_freq(&omega.inner, delta, window).map_err(to_py)?;
    Ok((set.lattice_centers(), set.max_gap))
}

/// Box-counting slope of a point cloud over a decreasing scale ladder.
#[pyfunction]
fn box_dimension(py: Python<'_>, points: Vec<Vec<f64>>, ladder: Vec<f64>) -> PyResult<DimensionEstimate> {
    Ok(py.detach(|| dimension::box_dimension(&points, &ladder)).map_err(to_py)?.into())
}

/// Slope of `ln l_hat` against `ln 1/ε` over a ladder of scans.
#[pyfunction]
fn diophantine_estimate(scans: Vec<PyRef<'_, PeriodScan>>) -> PyResult<DimensionEstimate> {
    let scans: Vec<CoreScan> = scans.iter().map(|s| s.inner.clone()).collect();
    Ok(dimension::diophantine_estimate(&scans).map_err(to_py)?.into())
}

#[pymodule]
fn apdim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<ContinuedFraction>()?;
    m.add_class::<Profile>()?;
    m.add_class::<TrigPolynomial>()?;
    m.add_class::<PeriodScan>()?;
    m.add_class::<DimensionEstimate>()?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(solve_one_freq, m)?)?;
    m.add_function(wrap_pyfunction!(box_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(diophantine_estimate, m)?)?;
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    m.add("CertificationError", m.py().get_type::<CertificationError>())?;
    Ok(())
}
