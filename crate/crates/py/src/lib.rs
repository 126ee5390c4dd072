//! Python bindings for `awtp-core`.
//!
//! Fractions are passed as strings (`"0.3"`, `"1/3"`) and returned as
//! strings in the same form, so nothing is lost to floating point.

use awtp_core::analysis::{
    self, achieved_rate, estimate_reliability, exhaustive_mi, exhaustive_secrecy, forgery_oracles,
};
use awtp_core::protocols::SessionTranscript;
use awtp_core::rational::{display, parse_fraction};
use awtp_core::verify::{run_suite as core_run_suite, Suite, VerifyOptions};
use awtp_core::{
    build_strategy, primitives, run_session as core_run_session, ChannelParams, FieldElement as CoreElement,
    LVParams, RngSampler, SkaConfig, Variant, STRATEGY_NAMES,
};
use pyo3::exceptions::{PyValueError, PyZeroDivisionError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn err(e: awtp_core::Error) -> PyErr {
    match e {
        awtp_core::Error::DivisionByZero => PyZeroDivisionError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn channel(rho_r: &str, rho_w: &str, rho: &str) -> PyResult<ChannelParams> {
    ChannelParams::new(
        parse_fraction(rho_r).map_err(err)?,
        parse_fraction(rho_w).map_err(err)?,
        parse_fraction(rho).map_err(err)?,
    )
    .map_err(err)
}

fn field(q: u32) -> PyResult<awtp_core::Field> {
    awtp_core::Field::new(q).map_err(err)
}

fn rng(seed: u64) -> RngSampler<ChaCha8Rng> {
    RngSampler(ChaCha8Rng::seed_from_u64(seed))
}

/// Prime field `F_q` over plain integers.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Field {
    inner: awtp_core::Field,
}

#[pymethods]
impl Field {
    #[new]
    fn new(q: u32) -> PyResult<Self> {
        Ok(Field { inner: field(q)? })
    }

    #[getter]
    fn modulus(&self) -> u32 {
        self.inner.modulus()
    }

    fn add(&self, a: u64, b: u64) -> u32 {
        let f = self.inner;
        f.add(f.reduce(a), f.reduce(b))
    }

    fn sub(&self, a: u64, b: u64) -> u32 {
        let f = self.inner;
        f.sub(f.reduce(a), f.reduce(b))
    }

    fn mul(&self, a: u64, b: u64) -> u32 {
        let f = self.inner;
        f.mul(f.reduce(a), f.reduce(b))
    }

    fn inv(&self, a: u64) -> PyResult<u32> {
        self.inner.inv(self.inner.reduce(a)).map_err(err)
    }

    fn pow(&self, a: u64, e: u64) -> u32 {
        self.inner.pow(self.inner.reduce(a), e)
    }

    fn element(&self, value: u64) -> FieldElement {
        FieldElement {
            inner: CoreElement::new(value, self.inner.modulus()).expect("field modulus is prime"),
        }
    }

    /// Evaluates the polynomial with coefficients `coeffs` (constant first) at `x`.
    fn eval(&self, coeffs: Vec<u32>, x: u64) -> u32 {
        let f = self.inner;
        let c: Vec<u32> = coeffs.iter().map(|&v| f.reduce(v as u64)).collect();
        f.eval(&c, f.reduce(x))
    }

    /// Coefficients of the unique polynomial of degree < len(points) through `points`.
    fn interpolate(&self, points: Vec<(u32, u32)>) -> PyResult<Vec<u32>> {
        Ok(awtp_core::gf::interpolate(self.inner, &points).map_err(err)?.coeffs().to_vec())
    }

    fn __repr__(&self) -> String {
        format!("Field({})", self.inner.modulus())
    }
}

#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct FieldElement {
    inner: CoreElement,
}

#[pymethods]
impl FieldElement {
    #[new]
    fn new(value: u64, q: u32) -> PyResult<Self> {
        Ok(FieldElement {
            inner: CoreElement::new(value, q).map_err(err)?,
        })
    }

    #[getter]
    fn value(&self) -> u32 {
        self.inner.value()
    }

    #[getter]
    fn modulus(&self) -> u32 {
        self.inner.modulus()
    }

    fn __add__(&self, o: &FieldElement) -> PyResult<Self> {
        Ok(FieldElement {
            inner: self.inner.add(o.inner).map_err(err)?,
        })
    }

    fn __sub__(&self, o: &FieldElement) -> PyResult<Self> {
        Ok(FieldElement {
            inner: self.inner.sub(o.inner).map_err(err)?,
        })
    }

    fn __mul__(&self, o: &FieldElement) -> PyResult<Self> {
        Ok(FieldElement {
            inner: self.inner.mul(o.inner).map_err(err)?,
        })
    }

    fn inv(&self) -> PyResult<Self> {
        Ok(FieldElement {
            inner: self.inner.inv().map_err(err)?,
        })
    }

    fn __pow__(&self, e: u64, _modulo: Option<u64>) -> Self {
        FieldElement {
            inner: self.inner.pow(e),
        }
    }

    fn __eq__(&self, o: &FieldElement) -> bool {
        self.inner == o.inner
    }

    fn __hash__(&self) -> u64 {
        ((self.inner.modulus() as u64) << 32) | self.inner.value() as u64
    }

    fn __repr__(&self) -> String {
        format!("FieldElement({}, {})", self.inner.value(), self.inner.modulus())
    }
}

#[pyfunction]
fn universal_hash(q: u32, x: Vec<u32>, alpha: u32) -> PyResult<u32> {
    primitives::universal_hash(field(q)?, &x, alpha).map_err(err)
}

#[pyfunction]
fn mac_tag(q: u32, m: Vec<u32>, alpha: u32, beta: u32) -> PyResult<u32> {
    primitives::mac_tag(field(q)?, &m, primitives::MacKey { alpha, beta }).map_err(err)
}

#[pyfunction]
fn mac_verify(q: u32, m: Vec<u32>, tag: u32, alpha: u32, beta: u32) -> PyResult<bool> {
    Ok(primitives::mac_verify(field(q)?, &m, tag, primitives::MacKey { alpha, beta }))
}

#[pyfunction]
fn amd_tag(q: u32, x: Vec<u32>, r: u32) -> PyResult<u32> {
    let amd = primitives::AmdParams::new(field(q)?, x.len()).map_err(err)?;
    Ok(amd.tag(&x, r))
}

#[pyfunction]
fn amd_check(q: u32, x: Vec<u32>, r: u32, t: u32) -> PyResult<bool> {
    let amd = primitives::AmdParams::new(field(q)?, x.len()).map_err(err)?;
    Ok(amd.check(&x, r, t))
}

#[pyfunction]
fn sf_extract(q: u32, x: Vec<u32>, m: usize) -> PyResult<Vec<u32>> {
    primitives::sf_extract(field(q)?, &x, m).map_err(err)
}

#[pyfunction]
fn lv_rate(rho_r: &str, rho_w: &str, rho: &str) -> PyResult<String> {
    let r = awtp_core::lvcode::lv_rate(
        parse_fraction(rho_r).map_err(err)?,
        parse_fraction(rho_w).map_err(err)?,
        parse_fraction(rho).map_err(err)?,
    )
    .map_err(err)?;
    Ok(display(r))
}

/// LV code: `k` message symbols of `u-2` elements into `n` channel symbols.
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct LVCode {
    inner: LVParams,
}

#[pymethods]
impl LVCode {
    #[new]
    #[pyo3(signature = (q, u, k, rho_r="0", rho_w="0", rho="0", n=None))]
    fn new(q: u32, u: usize, k: usize, rho_r: &str, rho_w: &str, rho: &str, n: Option<usize>) -> PyResult<Self> {
        let ch = channel(rho_r, rho_w, rho)?;
        let f = field(q)?;
        let inner = match n {
            Some(n) => LVParams::new(f, u, k, n, ch),
            None => LVParams::for_message(f, u, k, ch),
        }
        .map_err(err)?;
        Ok(LVCode { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn u(&self) -> usize {
        self.inner.u()
    }

    fn encode(&self, msg: Vec<Vec<u32>>, seed: u64) -> PyResult<Vec<Vec<u32>>> {
        Ok(self.inner.encode(&msg, &mut rng(seed)).map_err(err)?.to_word())
    }

    /// The message, or `None` for ⊥.
    fn decode(&self, word: Vec<Vec<u32>>) -> Option<Vec<Vec<u32>>> {
        self.inner.decode(&word)
    }
}

/// Protocol configuration; `key_len=None` picks the largest allowed key.
#[pyclass(skip_from_py_object)]
struct Config {
    inner: SkaConfig,
}

#[pymethods]
impl Config {
    #[new]
    #[pyo3(signature = (variant="awtp", q=65521, u=8, n1=64, rho_r="0.3", rho_w="0.2", rho="0.5", key_len=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        variant: &str,
        q: u32,
        u: usize,
        n1: usize,
        rho_r: &str,
        rho_w: &str,
        rho: &str,
        key_len: Option<usize>,
    ) -> PyResult<Self> {
        let v = Variant::parse(variant).map_err(err)?;
        let ch = channel(rho_r, rho_w, rho)?;
        let f = field(q)?;
        let inner = match key_len {
            Some(l) => SkaConfig::new(f, u, n1, v, ch, l),
            None => SkaConfig::with_max_key(f, u, n1, v, ch),
        }
        .map_err(err)?;
        Ok(Config { inner })
    }

    #[getter]
    fn key_len(&self) -> usize {
        self.inner.key_len()
    }

    #[getter]
    fn round_lengths(&self) -> Vec<usize> {
        self.inner.round_lengths()
    }

    #[getter]
    fn achieved_rate(&self) -> String {
        display(achieved_rate(&self.inner))
    }

    #[getter]
    fn hash(&self) -> String {
        analysis::config_hash(&self.inner)
    }

    fn __repr__(&self) -> String {
        serde_json::to_string(&self.inner.summary()).expect("summary serializes")
    }
}

#[pyfunction]
fn strategies() -> Vec<&'static str> {
    STRATEGY_NAMES.to_vec()
}

/// One seeded session; keys are lists or `None` for ⊥.
#[pyfunction]
#[pyo3(signature = (config, strategy="passive", seed=0))]
fn run_session<'py>(py: Python<'py>, config: &Config, strategy: &str, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let mut adv = build_strategy(strategy, seed).map_err(err)?;
    let out = core_run_session(&config.inner, adv.as_mut(), &mut rng(seed)).map_err(err)?;
    let transcript = SessionTranscript::new(&config.inner, strategy, Some(seed), &out);
    let d = PyDict::new(py);
    d.set_item("k_a", out.k_a.clone())?;
    d.set_item("k_b", out.k_b.clone())?;
    d.set_item("agreed", out.agreed())?;
    d.set_item("accepted", out.accepted)?;
    d.set_item("secrecy_void", out.secrecy_void)?;
    d.set_item("transcript", transcript.to_json_pretty())?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (config, strategy, trials, seed))]
fn reliability<'py>(py: Python<'py>, config: &Config, strategy: &str, trials: u64, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let r = estimate_reliability(&config.inner, strategy, trials, seed).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("estimator", r.estimator.clone())?;
    d.set_item("failures", r.failures)?;
    d.set_item("trials", r.trials)?;
    d.set_item("estimate", r.estimate_f64())?;
    d.set_item("std_error", r.std_error)?;
    d.set_item("bound", display(r.bound))?;
    d.set_item("pass", r.pass)?;
    Ok(d)
}

/// Exact `max_z SD(K | Z = z, U)` as a fraction string.
#[pyfunction]
#[pyo3(signature = (config, strategy, strategy_seed=0))]
fn secrecy_distance(config: &Config, strategy: &str, strategy_seed: u64) -> PyResult<String> {
    Ok(display(exhaustive_secrecy(&config.inner, strategy, strategy_seed).map_err(err)?.max_distance))
}

#[pyfunction]
fn forgery<'py>(py: Python<'py>, q: u32, mac_len: usize, amd_dim: usize) -> PyResult<Bound<'py, PyDict>> {
    let r = forgery_oracles(q, mac_len, amd_dim).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("mac_max", display(r.mac_max))?;
    d.set_item("mac_bound", display(r.mac_bound))?;
    d.set_item("amd_max", display(r.amd_max))?;
    d.set_item("amd_bound", display(r.amd_bound))?;
    Ok(d)
}

/// `(I(X;Y), I(X;Y|Z))` in bits for explicit read and write sets.
#[pyfunction]
fn mutual_information(n: usize, q: u32, u: usize, read_set: Vec<usize>, write_set: Vec<usize>) -> PyResult<(f64, f64)> {
    let r = exhaustive_mi(n, q, u, &read_set, &write_set).map_err(err)?;
    Ok((r.i_xy, r.i_xy_given_z))
}

/// Runs a verification suite; returns `(check, pass, detail)` triples.
#[pyfunction]
#[pyo3(signature = (suite, trials=10_000, seed=2024))]
fn run_suite(suite: &str, trials: u64, seed: u64) -> PyResult<Vec<(String, bool, String)>> {
    let s = Suite::parse(suite).map_err(err)?;
    let opts = VerifyOptions {
        trials,
        seed,
        ..VerifyOptions::default()
    };
    Ok(core_run_suite(s, &opts)
        .map_err(err)?
        .into_iter()
        .map(|c| (c.name, c.pass, c.detail))
        .collect())
}

#[pymodule]
fn awtp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Field>()?;
    m.add_class::<FieldElement>()?;
    m.add_class::<LVCode>()?;
    m.add_class::<Config>()?;
    m.add_function(wrap_pyfunction!(universal_hash, m)?)?;
    m.add_function(wrap_pyfunction!(mac_tag, m)?)?;
    m.add_function(wrap_pyfunction!(mac_verify, m)?)?;
    m.add_function(wrap_pyfunction!(amd_tag, m)?)?;
    m.add_function(wrap_pyfunction!(amd_check, m)?)?;
    m.add_function(wrap_pyfunction!(sf_extract, m)?)?;
    m.add_function(wrap_pyfunction!(lv_rate, m)?)?;
    m.add_function(wrap_pyfunction!(strategies, m)?)?;
    m.add_function(wrap_pyfunction!(run_session, m)?)?;
    m.add_function(wrap_pyfunction!(reliability, m)?)?;
    m.add_function(wrap_pyfunction!(secrecy_distance, m)?)?;
    m.add_function(wrap_pyfunction!(forgery, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
