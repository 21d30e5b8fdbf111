//! Python bindings. Groups are passed as lists of cyclic factors and
//! subsets as [`Subset`] objects or lists of element codes.

use addcomb_core::ap;
use addcomb_core::cayley::{self, CayleyInstance, GraphKind, LoopConvention};
use addcomb_core::cover::{self, CoverConfig, Regime};
use addcomb_core::fourier::{self, Mode};
use addcomb_core::group::{self, make_group, SubsetBits};
use addcomb_core::nonsumset::{self, SumsetVerdict};
use addcomb_core::verify::{self, VerifyOptions};
use addcomb_core::{Error, RngStream};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

fn json<T: serde::Serialize>(x: &T) -> String {
    serde_json::to_string(x).expect("serializable")
}

/// A subset of a finite abelian group.
#[pyclass(frozen, skip_from_py_object, module = "addcomb")]
#[derive(Clone)]
struct Subset {
    inner: SubsetBits,
}

#[pymethods]
impl Subset {
    #[new]
    fn new(factors: Vec<usize>, elements: Vec<usize>) -> PyResult<Self> {
        let g = make_group(&factors).map_err(err)?;
        let inner = SubsetBits::from_elements(&g, elements).map_err(err)?;
        Ok(Self { inner })
    }

    /// Each element kept independently with probability `density`.
    #[staticmethod]
    #[pyo3(signature = (factors, density, seed=0))]
    fn random(factors: Vec<usize>, density: f64, seed: u64) -> PyResult<Self> {
        let g = make_group(&factors).map_err(err)?;
        Ok(Self {
            inner: group::random_subset(&g, density, &mut RngStream::new(seed)),
        })
    }

    #[getter]
    fn factors(&self) -> Vec<usize> {
        self.inner.group().factors().to_vec()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    fn elements(&self) -> Vec<usize> {
        self.inner.to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, x: usize) -> bool {
        x < self.inner.order() && self.inner.contains(x)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Subset(factors={:?}, size={})", self.inner.group().factors(), self.inner.len())
    }

    fn sumset(&self, other: &Self) -> PyResult<Self> {
        Ok(Self {
            inner: group::sumset(&self.inner, &other.inner).map_err(err)?,
        })
    }

    fn difference_set(&self) -> Self {
        Self {
            inner: group::difference_set(&self.inner),
        }
    }

    /// `(|A+A| / |A|, |A-A| / |A|)`.
    fn doubling(&self) -> PyResult<(f64, f64)> {
        let r = group::doubling(&self.inner).map_err(err)?;
        Ok((r.k_sum_f64(), r.k_diff_f64()))
    }

    /// Fourier coefficients of the indicator, indexed by character code.
    fn fourier(&self) -> Vec<Complex64> {
        fourier::dft_indicator(&self.inner).coeffs().to_vec()
    }

    /// Representation function `1_A*1_{-A}` or `1_A*1_A`.
    #[pyo3(signature = (mode="difference"))]
    fn convolution(&self, mode: &str) -> PyResult<Vec<f64>> {
        let m: Mode = parse(mode)?;
        let other = match m {
            Mode::Difference => self.inner.negate(),
            Mode::Sum => self.inner.clone(),
        };
        fourier::convolve_sets(&self.inner, &other).map_err(err)
    }

    /// Sizes of the dyadic level sets `A_0, A_1, ...`.
    #[pyo3(signature = (mode="difference"))]
    fn level_sizes(&self, mode: &str) -> PyResult<Vec<usize>> {
        Ok(cover::level_profile(&self.inner, parse(mode)?).map_err(err)?.sizes)
    }

    fn to_json(&self) -> String {
        json(&self.inner)
    }
}

/// Builds and sandwich-verifies a cover element; returns it as JSON.
#[pyfunction]
#[pyo3(signature = (a, mode="difference", regime="auto", seed=0, c=cover::DEFAULT_C))]
fn build_cover_element(a: &Subset, mode: &str, regime: &str, seed: u64, c: f64) -> PyResult<String> {
    let mode: Mode = parse(mode)?;
    let cfg = CoverConfig {
        c,
        ..CoverConfig::default()
    };
    let regime = match regime {
        "auto" => cover::select_regime(&a.inner, mode, c).map_err(err)?,
        "small" => Regime::Small,
        "large" => Regime::Large,
        other => return Err(PyValueError::new_err(format!("unknown regime {other:?}"))),
    };
    let mut rng = RngStream::new(seed);
    let built = match regime {
        Regime::Small => cover::build_small_with(&a.inner, mode, &mut rng, &cfg),
        Regime::Large => cover::build_large_with(&a.inner, mode, &mut rng, &cfg),
    }
    .map_err(err)?;
    Ok(json(&cover::verify_cover_element(&a.inner, &built).map_err(err)?))
}

/// A random Cayley (`kind="difference"`) or Cayley-sum (`kind="sum"`) graph.
#[pyclass(frozen, module = "addcomb")]
struct CayleyGraph {
    inner: CayleyInstance,
}

#[pymethods]
impl CayleyGraph {
    #[staticmethod]
    #[pyo3(signature = (factors, p, kind="difference", seed=0, loops=None))]
    fn sample(factors: Vec<usize>, p: f64, kind: &str, seed: u64, loops: Option<&str>) -> PyResult<Self> {
        let g = make_group(&factors).map_err(err)?;
        let kind: GraphKind = parse(kind)?;
        let mut inst = cayley::sample_cayley(&g, p, kind, &mut RngStream::new(seed)).map_err(err)?;
        inst = match loops {
            None => inst,
            Some("ignore") => inst.with_loops(LoopConvention::Ignore),
            Some("block") => inst.with_loops(LoopConvention::Block),
            Some(other) => return Err(PyValueError::new_err(format!("unknown loop convention {other:?}"))),
        };
        Ok(Self { inner: inst })
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    fn generators(&self) -> Subset {
        Subset {
            inner: self.inner.generators.clone(),
        }
    }

    fn adjacent(&self, x: usize, y: usize) -> bool {
        self.inner.adjacent(x, y)
    }

    fn is_independent(&self, b: &Subset) -> PyResult<bool> {
        Ok(cayley::is_independent(&b.inner, &self.inner).map_err(err)?.holds())
    }

    /// `(alpha, witness)` from the exact solver (order at most 64).
    fn alpha_exact(&self) -> PyResult<(usize, Subset)> {
        let r = cayley::alpha_exact(&self.inner).map_err(err)?;
        Ok((r.alpha, Subset { inner: r.witness }))
    }

    /// `(lower bound, witness)` from the local-search heuristic.
    #[pyo3(signature = (effort=200))]
    fn alpha_heuristic(&self, effort: usize) -> (usize, Subset) {
        let r = cayley::alpha_heuristic(&self.inner, effort);
        (r.alpha, Subset { inner: r.witness })
    }
}

/// `f` of a group, from the exhaustive sumset atlas (order at most 24).
#[pyfunction]
fn f_value(factors: Vec<usize>) -> PyResult<usize> {
    if factors == [1] {
        return nonsumset::f_cyclic(1).map_err(err);
    }
    let g = make_group(&factors).map_err(err)?;
    Ok(nonsumset::sumset_atlas(&g).map_err(err)?.f_value)
}

/// A `B` with `B+B = t`, or `None` when no such `B` exists.
#[pyfunction]
fn sumset_root(t: &Subset) -> PyResult<Option<Subset>> {
    match nonsumset::is_sumset_exhaustive(&t.inner, nonsumset::DEFAULT_ATLAS_CAP).map_err(err)? {
        SumsetVerdict::Sumset { witness } => Ok(Some(Subset { inner: witness })),
        _ => Ok(None),
    }
}

/// Randomized large non-sumset search; returns the outcome as JSON.
#[pyfunction]
#[pyo3(signature = (factors, p=0.25, seed=0))]
fn probabilistic_nonsumset(factors: Vec<usize>, p: f64, seed: u64) -> PyResult<String> {
    let g = make_group(&factors).map_err(err)?;
    let out = nonsumset::probabilistic_nonsumset(&g, p, &mut RngStream::new(seed), Default::default()).map_err(err)?;
    Ok(json(&out))
}

/// `(start, diff, len)` of a longest progression in `t ⊆ Z_p`.
#[pyfunction]
fn longest_ap(t: &Subset) -> PyResult<(usize, usize, usize)> {
    let ap = ap::longest_ap(&t.inner).map_err(err)?;
    Ok((ap.start, ap.diff, ap.len))
}

/// `P(0 ∉ A+A)` for `A ⊆ Z_p` sampled at rate `q`.
#[pyfunction]
fn miss_probability(p: usize, q: f64) -> PyResult<f64> {
    ap::miss_probability(p, q).map_err(err)
}

/// Runs the verification suite and returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (quick=true, seed=verify::DEFAULT_SEED))]
fn verify_all(py: Python<'_>, quick: bool, seed: u64) -> String {
    let opts = VerifyOptions {
        quick,
        slow: false,
        seed,
    };
    py.detach(|| verify::run_all(&opts).to_json())
}

#[pymodule]
fn addcomb(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Subset>()?;
    m.add_class::<CayleyGraph>()?;
    m.add_function(wrap_pyfunction!(build_cover_element, m)?)?;
    m.add_function(wrap_pyfunction!(f_value, m)?)?;
    m.add_function(wrap_pyfunction!(sumset_root, m)?)?;
    m.add_function(wrap_pyfunction!(probabilistic_nonsumset, m)?)?;
    m.add_function(wrap_pyfunction!(longest_ap, m)?)?;
    m.add_function(wrap_pyfunction!(miss_probability, m)?)?;
    m.add_function(wrap_pyfunction!(verify_all, m)?)?;
    Ok(())
}
