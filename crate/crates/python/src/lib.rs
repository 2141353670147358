use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use cubic_periods::arith;
use cubic_periods::cli::{self, ReportFormat};
use cubic_periods::cubicpoly::{self, RationalCubic};
use cubic_periods::groupring;
use cubic_periods::periods::{self, FieldRecord, DEFAULT_TOLERANCE};
use cubic_periods::quadform;
use cubic_periods::Error;

create_exception!(cubic_periods_py, VerificationError, PyException);

fn to_py(e: Error) -> PyErr {
    if cli::is_input_error(&e) {
        PyValueError::new_err(e.to_string())
    } else {
        VerificationError::new_err(e.to_string())
    }
}

fn conductor(f: u64) -> PyResult<arith::Conductor> {
    arith::validate_conductor(f).map_err(to_py)
}

fn parse_cubic(coeffs: Vec<String>) -> PyResult<RationalCubic> {
    RationalCubic::from_ratio_strings(&coeffs).ok_or_else(|| {
        PyValueError::new_err("expected 4 coefficients as \"p/q\" strings, highest degree first")
    })
}

/// A validated conductor.
#[pyclass(frozen, get_all, skip_from_py_object, module = "cubic_periods_py")]
#[derive(Clone)]
struct Conductor {
    value: u64,
    kind: String,
    odd_primes: Vec<u64>,
    nu: usize,
    mu: i64,
    field_count: usize,
}

#[pymethods]
impl Conductor {
    fn __repr__(&self) -> String {
        format!("Conductor({}, {})", self.value, self.kind)
    }
}

impl From<&arith::Conductor> for Conductor {
    fn from(c: &arith::Conductor) -> Self {
        Self {
            value: c.value,
            kind: c.kind.to_string(),
            odd_primes: c.odd_primes.clone(),
            nu: c.nu(),
            mu: c.mu(),
            field_count: c.field_count(),
        }
    }
}

/// One cyclic cubic field with its periods and verdicts.
#[pyclass(frozen, get_all, skip_from_py_object, module = "cubic_periods_py")]
#[derive(Clone)]
struct Field {
    conductor: u64,
    m: i64,
    n: i64,
    n1: i64,
    n2: i64,
    /// Shanks' cubic, coefficients as "p/q" strings from X^3 down.
    shanks: Vec<String>,
    /// Period polynomial, coefficients as "p/q" strings from X^3 down.
    period_poly: Vec<String>,
    periods: Vec<f64>,
    shanks_roots: Vec<f64>,
    predicted_periods: Vec<f64>,
    kernel: Vec<u64>,
    verdicts: BTreeMap<String, bool>,
    residual: f64,
}

#[pymethods]
impl Field {
    fn all_pass(&self) -> bool {
        self.verdicts.values().all(|&b| b)
    }

    fn __repr__(&self) -> String {
        format!(
            "Field(conductor={}, M={}, N={}, n1={}, n2={})",
            self.conductor, self.m, self.n, self.n1, self.n2
        )
    }
}

impl From<&FieldRecord> for Field {
    fn from(r: &FieldRecord) -> Self {
        Self {
            conductor: r.conductor.value,
            m: r.representation.m,
            n: r.representation.n,
            n1: r.shanks_params.n1,
            n2: r.shanks_params.n2,
            shanks: r.shanks_poly.to_ratio_strings().to_vec(),
            period_poly: r.predicted_p.to_ratio_strings().to_vec(),
            periods: r.periods.etas.to_vec(),
            shanks_roots: r.shanks_roots.to_vec(),
            predicted_periods: r.predicted_periods().to_vec(),
            kernel: r.matched_kernel.members.clone(),
            verdicts: r
                .verdicts
                .iter()
                .map(|(k, v)| (k.clone(), v.pass))
                .collect(),
            residual: r.max_residual(),
        }
    }
}

/// Validates a conductor, raising ValueError with the reason if it is not one.
#[pyfunction]
fn validate_conductor(f: u64) -> PyResult<Conductor> {
    Ok((&conductor(f)?).into())
}

/// Conductors in `[lo, hi]`, optionally restricted to "tame" or "wild".
#[pyfunction]
#[pyo3(signature = (lo, hi, kind=None))]
fn conductors(lo: u64, hi: u64, kind: Option<&str>) -> PyResult<Vec<u64>> {
    let kind = match kind {
        None => None,
        Some("tame") => Some(arith::Ramification::Tame),
        Some("wild") => Some(arith::Ramification::Wild),
        Some(other) => {
            return Err(PyValueError::new_err(format!(
                "kind must be tame or wild, got {other:?}"
            )))
        }
    };
    Ok(arith::conductors_in(lo, hi, kind)
        .iter()
        .map(|c| c.value)
        .collect())
}

/// Normalized pairs `(M, N)` with `4f = M^2 + 27N^2`, M descending.
#[pyfunction]
fn representations(f: u64) -> PyResult<Vec<(i64, i64)>> {
    let c = conductor(f)?;
    Ok(quadform::representations(&c)
        .map_err(to_py)?
        .iter()
        .map(|r| (r.m, r.n))
        .collect())
}

/// Closed-form period polynomial for every pair of `f`, as "p/q" strings.
#[pyfunction]
fn period_polys(f: u64) -> PyResult<Vec<Vec<String>>> {
    let c = conductor(f)?;
    quadform::representations(&c)
        .map_err(to_py)?
        .iter()
        .map(|r| {
            cubicpoly::period_poly_formula(&c, r)
                .map(|p| p.to_ratio_strings().to_vec())
                .map_err(to_py)
        })
        .collect()
}

/// Shanks' cubic `f_n` for `n = n1/n2`, as "p/q" strings.
#[pyfunction]
fn shanks_poly(n1: i64, n2: i64) -> PyResult<Vec<String>> {
    if n2 == 0 {
        return Err(PyValueError::new_err("n2 must be nonzero"));
    }
    Ok(cubicpoly::shanks_poly(&cubicpoly::rat(n1, n2))
        .to_ratio_strings()
        .to_vec())
}

/// `p(aX + b)`, all rationals as strings.
#[pyfunction]
fn substitute_affine(coeffs: Vec<String>, a: &str, b: &str) -> PyResult<Vec<String>> {
    let p = parse_cubic(coeffs)?;
    let parse = |t: &str| {
        cubicpoly::parse_rational(t)
            .ok_or_else(|| PyValueError::new_err(format!("not a rational: {t:?}")))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    Ok(cubicpoly::substitute_affine(&p, &a, &b)
        .to_ratio_strings()
        .to_vec())
}

/// Renders a cubic given as "p/q" strings, e.g. "X^3 - 273X + 1729".
#[pyfunction]
fn format_cubic(coeffs: Vec<String>) -> PyResult<String> {
    Ok(parse_cubic(coeffs)?.to_string())
}

/// Periods of every field of conductor `f`, each triple descending.
#[pyfunction]
fn gaussian_periods(f: u64) -> PyResult<Vec<Vec<f64>>> {
    let c = conductor(f)?;
    let ctx = periods::PeriodContext::new(&c);
    ctx.primitive_kernels()
        .map_err(to_py)?
        .iter()
        .map(|k| ctx.periods(k).map(|p| p.etas.to_vec()).map_err(to_py))
        .collect()
}

/// Matches pairs to fields and runs every check. Raises VerificationError when the
/// periods cannot be rounded or matched within `tolerance`.
#[pyfunction]
#[pyo3(signature = (f, tolerance=DEFAULT_TOLERANCE))]
fn match_fields(py: Python<'_>, f: u64, tolerance: f64) -> PyResult<Vec<Field>> {
    let c = conductor(f)?;
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(PyValueError::new_err("tolerance must be positive"));
    }
    let recs = py
        .detach(|| periods::match_fields(&c, tolerance))
        .map_err(to_py)?;
    Ok(recs.iter().map(Field::from).collect())
}

/// The JSON report `verify` would print.
#[pyfunction]
#[pyo3(signature = (f, tolerance=DEFAULT_TOLERANCE))]
fn verify_json(py: Python<'_>, f: u64, tolerance: f64) -> PyResult<String> {
    let c = conductor(f)?;
    let report = py
        .detach(|| cli::verify_report(&c, tolerance))
        .map_err(to_py)?;
    Ok(cli::render_conductor(&report, ReportFormat::Json))
}

/// The conductor 819 table as markdown.
#[pyfunction]
fn table_markdown() -> PyResult<String> {
    Ok(cli::table_markdown(&cli::table().map_err(to_py)?))
}

/// Group-ring units of the associated order as coefficient triples of `1, s, s^2`.
#[pyfunction]
fn unit_list(wild: bool) -> Vec<Vec<String>> {
    groupring::unit_list_p3(wild)
        .iter()
        .map(|u| u.c.iter().map(|x| x.to_string()).collect())
        .collect()
}

#[pymodule]
fn cubic_periods_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("VerificationError", m.py().get_type::<VerificationError>())?;
    m.add("DEFAULT_TOLERANCE", DEFAULT_TOLERANCE)?;
    m.add_class::<Conductor>()?;
    m.add_class::<Field>()?;
    m.add_function(wrap_pyfunction!(validate_conductor, m)?)?;
    m.add_function(wrap_pyfunction!(conductors, m)?)?;
    m.add_function(wrap_pyfunction!(representations, m)?)?;
    m.add_function(wrap_pyfunction!(period_polys, m)?)?;
    m.add_function(wrap_pyfunction!(shanks_poly, m)?)?;
    m.add_function(wrap_pyfunction!(substitute_affine, m)?)?;
    m.add_function(wrap_pyfunction!(format_cubic, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_periods, m)?)?;
    m.add_function(wrap_pyfunction!(match_fields, m)?)?;
    m.add_function(wrap_pyfunction!(verify_json, m)?)?;
    m.add_function(wrap_pyfunction!(table_markdown, m)?)?;
    m.add_function(wrap_pyfunction!(unit_list, m)?)?;
    Ok(())
}
