//! Fourier analysis on finite abelian groups.
//!
//! Conventions: the character indexed by `t` acts as
//! `chi_t(x) = exp(2 pi i sum_j t_j x_j / n_j)`, the transform is
//! `f^(chi) = E_x f(x) chi(x)`, convolution is `(f*g)(x) = E_y f(y) g(x-y)`
//! and inversion reads `f(x) = sum_chi f^(chi) chi(-x)`. With these
//! normalisations `(1_A * 1_{-A})(x)` is the number of representations
//! `x = a - b` divided by `n`.
//!
//! Transforms are computed axis by axis (one 1-D FFT per cyclic factor);
//! factors of length at most [`NAIVE_MAX_FACTOR`] use a direct DFT.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::group::{make_group, Group, SubsetBits};
use crate::report::fmt12;
use crate::{Error, Result, RngStream};

pub const NAIVE_MAX_FACTOR: usize = 4;

/// Spectral coefficients below this modulus are treated as exact zeros.
/// FFT round-off on a group of order `2^26` stays several orders of
/// magnitude below it.
pub const ZERO_COEFF: f64 = 1e-13;

/// Which convolution of an indicator with itself is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `A*(-A)`, supported on `A-A`.
    Difference,
    /// `A*A`, supported on `A+A`.
    Sum,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "difference" | "diff" => Ok(Mode::Difference),
            "sum" => Ok(Mode::Sum),
            other => Err(Error::InvalidParameter(format!("unknown mode {other:?}"))),
        }
    }
}

enum AxisKernel {
    /// `roots[m] = e^{2 pi i m / f}`.
    Naive { roots: Vec<Complex64> },
    Fft { forward: Arc<dyn Fft<f64>>, inverse: Arc<dyn Fft<f64>> },
}

struct TensorPlan {
    axes: Vec<AxisKernel>,
}

fn plan_for(group: &Group) -> Arc<TensorPlan> {
    static CACHE: OnceLock<Mutex<HashMap<Vec<usize>, Arc<TensorPlan>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("plan cache poisoned");
    guard
        .entry(group.factors().to_vec())
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            let axes = group
                .factors()
                .iter()
                .map(|&f| {
                    if f <= NAIVE_MAX_FACTOR {
                        let roots = (0..f).map(|m| Complex64::from_polar(1.0, 2.0 * PI * m as f64 / f as f64)).collect();
                        AxisKernel::Naive { roots }
                    } else {
                        AxisKernel::Fft {
                            forward: planner.plan_fft_forward(f),
                            inverse: planner.plan_fft_inverse(f),
                        }
                    }
                })
                .collect();
            Arc::new(TensorPlan { axes })
        })
        .clone()
}

/// `sign = +1` computes `sum_k v_k e^{+2 pi i jk/f}`, `-1` the conjugate kernel.
fn naive_dft(buf: &mut [Complex64], roots: &[Complex64], sign: f64) {
    let f = buf.len();
    let mut input = [Complex64::default(); NAIVE_MAX_FACTOR];
    input[..f].copy_from_slice(buf);
    for (j, out) in buf.iter_mut().enumerate() {
        *out = (0..f)
            .map(|k| {
                let w = roots[(j * k) % f];
                input[k] * if sign > 0.0 { w } else { w.conj() }
            })
            .sum();
    }
}

/// Applies the 1-D kernel with exponent sign `sign` along every axis.
fn tensor_transform(group: &Group, data: &mut [Complex64], sign: f64) {
    let plan = plan_for(group);
    let n = group.order();
    let mut buf = Vec::new();
    let mut scratch = Vec::new();
    for (j, axis) in plan.axes.iter().enumerate() {
        let f = group.factors()[j];
        let stride = group.stride(j);
        if f == 2 {
            // the kernel is the same butterfly for both signs
            for outer in (0..n).step_by(2 * stride) {
                for i in outer..outer + stride {
                    let (u, v) = (data[i], data[i + stride]);
                    data[i] = u + v;
                    data[i + stride] = u - v;
                }
            }
            continue;
        }
        let run = |line: &mut [Complex64], scratch: &mut Vec<Complex64>| match axis {
            AxisKernel::Naive { roots } => naive_dft(line, roots, sign),
            AxisKernel::Fft { forward, inverse } => {
                let fft = if sign > 0.0 { inverse } else { forward };
                scratch.resize(fft.get_inplace_scratch_len(), Complex64::default());
                fft.process_with_scratch(line, scratch);
            }
        };
        if stride == 1 {
            for line in data.chunks_exact_mut(f) {
                run(line, &mut scratch);
            }
            continue;
        }
        buf.resize(f, Complex64::default());
        let block = stride * f;
        for outer in (0..n).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (k, b) in buf.iter_mut().enumerate() {
                    *b = data[base + k * stride];
                }
                run(&mut buf, &mut scratch);
                for (k, b) in buf.iter().enumerate() {
                    data[base + k * stride] = *b;
                }
            }
        }
    }
}

/// Fourier coefficients of a function on a group, indexed by character code.
#[derive(Clone, Debug)]
pub struct Spectrum {
    group: Group,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn from_coeffs(group: &Group, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != group.order() {
            return Err(Error::LengthMismatch {
                expected: group.order(),
                got: coeffs.len(),
            });
        }
        Ok(Self {
            group: group.clone(),
            coeffs,
        })
    }

    pub fn zero(group: &Group) -> Self {
        Self {
            group: group.clone(),
            coeffs: vec![Complex64::default(); group.order()],
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, character: usize) -> Complex64 {
        self.coeffs[character]
    }

    /// `sum_chi |f^(chi)|^2`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Writes `t_0,...,t_{k-1},re,im` rows, one per character.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let k = self.group.rank();
        let header: Vec<String> = (0..k).map(|j| format!("t{j}")).chain(["re".into(), "im".into()]).collect();
        writeln!(w, "{}", header.join(","))?;
        for (t, c) in self.coeffs.iter().enumerate() {
            let digits: Vec<String> = self.group.decode(t).iter().map(|d| d.to_string()).collect();
            writeln!(w, "{},{},{}", digits.join(","), fmt12(c.re), fmt12(c.im))?;
        }
        Ok(())
    }
}

pub fn dft_complex(group: &Group, f: &[Complex64]) -> Result<Spectrum> {
    let n = group.order();
    if f.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: f.len() });
    }
    let mut data = f.to_vec();
    tensor_transform(group, &mut data, 1.0);
    let inv_n = 1.0 / n as f64;
    data.iter_mut().for_each(|c| *c *= inv_n);
    Ok(Spectrum {
        group: group.clone(),
        coeffs: data,
    })
}

/// `f^(chi) = E_x f(x) chi(x)` for a real function given by its values.
pub fn dft(group: &Group, f: &[f64]) -> Result<Spectrum> {
    let data: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    dft_complex(group, &data)
}

pub fn dft_indicator(a: &SubsetBits) -> Spectrum {
    dft(a.group(), &a.indicator()).expect("indicator has group length")
}

/// `f(x) = sum_chi f^(chi) chi(-x)`.
pub fn idft(s: &Spectrum) -> Vec<Complex64> {
    let mut data = s.coeffs.clone();
    tensor_transform(&s.group, &mut data, -1.0);
    data
}

/// Real part of [`idft`].
pub fn idft_real(s: &Spectrum) -> Vec<f64> {
    idft(s).into_iter().map(|c| c.re).collect()
}

/// Imaginary residue below this is discarded by [`convolve`].
pub const IMAG_RESIDUE: f64 = 1e-9;

/// `(f*g)(x) = E_y f(y) g(x-y)` via the convolution theorem.
pub fn convolve(group: &Group, f: &[f64], g: &[f64]) -> Result<Vec<f64>> {
    let fs = dft(group, f)?;
    let gs = dft(group, g)?;
    let prod: Vec<Complex64> = fs.coeffs.iter().zip(&gs.coeffs).map(|(a, b)| a * b).collect();
    let out = idft(&Spectrum {
        group: group.clone(),
        coeffs: prod,
    });
    debug_assert!(out.iter().all(|c| c.im.abs() < IMAG_RESIDUE.max(1e-6)));
    Ok(out.into_iter().map(|c| c.re).collect())
}

/// Convolution of two subsets given as [`SubsetBits`].
pub fn convolve_sets(a: &SubsetBits, b: &SubsetBits) -> Result<Vec<f64>> {
    if a.group().factors() != b.group().factors() {
        return Err(Error::GroupMismatch {
            left: a.group().factors().to_vec(),
            right: b.group().factors().to_vec(),
        });
    }
    convolve(a.group(), &a.indicator(), &b.indicator())
}

/// Entries `> 1/(2 n^2)` of a spectrally computed convolution of two
/// indicators; exact values are integer multiples of `1/n`.
pub fn support(group: &Group, values: &[f64]) -> SubsetBits {
    let n = group.order() as f64;
    let threshold = 1.0 / (2.0 * n * n);
    SubsetBits::from_fn(group, |x| values[x] > threshold)
}

/// Exact self-convolution of an indicator as integer representation
/// counts `r(x) = n * conv(x)`: `#{(a,b) in A^2 : a - b = x}` in difference
/// mode and `#{(a,b) : a + b = x}` in sum mode.
#[derive(Clone, Debug)]
pub struct RepresentationCounts {
    pub mode: Mode,
    pub set_size: usize,
    pub counts: Vec<u64>,
}

impl RepresentationCounts {
    pub fn from_spectrum(spec: &Spectrum, mode: Mode, set_size: usize) -> Self {
        let n = spec.group.order() as f64;
        let sq: Vec<Complex64> = match mode {
            Mode::Difference => spec.coeffs.iter().map(|c| Complex64::new(c.norm_sqr(), 0.0)).collect(),
            Mode::Sum => spec.coeffs.iter().map(|c| c * c).collect(),
        };
        let conv = idft(&Spectrum {
            group: spec.group.clone(),
            coeffs: sq,
        });
        // snap to the 1/n grid
        let counts = conv.iter().map(|c| (c.re * n).round().max(0.0) as u64).collect();
        Self { mode, set_size, counts }
    }

    pub fn of(a: &SubsetBits, mode: Mode) -> Self {
        Self::from_spectrum(&dft_indicator(a), mode, a.len())
    }

    /// `conv(x)` as a real.
    pub fn value(&self, x: usize) -> f64 {
        self.counts[x] as f64 / self.counts.len() as f64
    }

    pub fn support(&self, group: &Group) -> SubsetBits {
        SubsetBits::from_fn(group, |x| self.counts[x] > 0)
    }
}

/// Base of the logarithm in `m = ceil(4 eta^-2 log n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
        }
    }
}

/// Number of sampled characters for relative error `eta` on a group of
/// order `n`.
pub fn sample_count(eta: f64, n: usize, base: LogBase) -> usize {
    (4.0 / (eta * eta) * base.log(n as f64)).ceil().max(1.0) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseTerm {
    pub character: usize,
    pub phase: Complex64,
}

/// `x -> (alpha/m) sum_i t_i chi_i(-x)`, a Fourier-sparse surrogate for
/// `A*(-A)` (all phases 1) or `A*A` (phases `A^(chi)^2 / |A^(chi)|^2`).
#[derive(Clone, Debug)]
pub struct SparseApprox {
    group: Group,
    pub mode: Mode,
    pub eta: f64,
    pub alpha: f64,
    pub m: usize,
    pub scale: f64,
    pub terms: Vec<SparseTerm>,
}

impl SparseApprox {
    pub fn group(&self) -> &Group {
        &self.group
    }

    /// Full complex value at `x`, by direct summation.
    pub fn eval_complex(&self, x: usize) -> Complex64 {
        let n = self.group.order();
        let sum: Complex64 = self
            .terms
            .iter()
            .map(|t| {
                let k = self.group.pairing(t.character, x);
                // chi(-x) = exp(-2 pi i k / n)
                t.phase * Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64)
            })
            .sum();
        sum * self.scale
    }

    /// Complex values at every element in `O(n log n)`: the terms are binned
    /// into a spectrum and inverted.
    pub fn eval_all(&self) -> Vec<Complex64> {
        let mut coeffs = vec![Complex64::default(); self.group.order()];
        for t in &self.terms {
            coeffs[t.character] += t.phase * self.scale;
        }
        idft(&Spectrum {
            group: self.group.clone(),
            coeffs,
        })
    }
}

/// Real part of the approximation at `x`.
pub fn eval_sparse(approx: &SparseApprox, x: usize) -> f64 {
    approx.eval_complex(x).re
}

#[derive(Clone, Debug, Default)]
pub struct SamplerConfig {
    pub log_base: LogBase,
}

fn validate_sampling(a: &SubsetBits, eta: f64) -> Result<()> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParameter(format!("eta = {eta} outside (0, 1)")));
    }
    Ok(())
}

/// Sampling measure `P(chi) = |A^(chi)|^2 / alpha` with numerically zero
/// coefficients given exactly zero mass.
fn sampling_weights(spec: &Spectrum) -> Vec<f64> {
    spec.coeffs
        .iter()
        .map(|c| if c.norm() < ZERO_COEFF { 0.0 } else { c.norm_sqr() })
        .collect()
}

/// Sampler over characters with the `|A^(chi)|^2` measure, reusable across
/// retries.
pub struct CharacterSampler {
    group: Group,
    spectrum: Spectrum,
    alpha: f64,
    dist: WeightedIndex<f64>,
}

impl CharacterSampler {
    pub fn new(a: &SubsetBits) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::EmptySet);
        }
        let spectrum = dft_indicator(a);
        let dist = WeightedIndex::new(sampling_weights(&spectrum))
            .map_err(|e| Error::InvalidParameter(format!("degenerate spectrum: {e}")))?;
        Ok(Self {
            group: a.group().clone(),
            spectrum,
            alpha: a.density(),
            dist,
        })
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn draw_character(&self, rng: &mut RngStream) -> usize {
        self.dist.sample(rng)
    }

    pub fn sample(&self, eta: f64, mode: Mode, rng: &mut RngStream, cfg: &SamplerConfig) -> SparseApprox {
        let m = sample_count(eta, self.group.order(), cfg.log_base);
        let terms = (0..m)
            .map(|_| {
                let character = self.draw_character(rng);
                let phase = match mode {
                    Mode::Difference => Complex64::new(1.0, 0.0),
                    Mode::Sum => {
                        let c = self.spectrum.coeffs[character];
                        let r = c.norm();
                        assert!(r >= 1e-14, "sampled a character with zero mass");
                        let u = c / r;
                        u * u
                    }
                };
                SparseTerm { character, phase }
            })
            .collect();
        SparseApprox {
            group: self.group.clone(),
            mode,
            eta,
            alpha: self.alpha,
            m,
            scale: self.alpha / m as f64,
            terms,
        }
    }
}

/// Draws `m = ceil(4 eta^-2 ln n)` characters i.i.d. from `|A^(chi)|^2 / alpha`.
pub fn sample_sparse_approx(a: &SubsetBits, eta: f64, mode: Mode, rng: &mut RngStream) -> Result<SparseApprox> {
    sample_sparse_approx_with(a, eta, mode, rng, &SamplerConfig::default())
}

pub fn sample_sparse_approx_with(
    a: &SubsetBits,
    eta: f64,
    mode: Mode,
    rng: &mut RngStream,
    cfg: &SamplerConfig,
) -> Result<SparseApprox> {
    validate_sampling(a, eta)?;
    Ok(CharacterSampler::new(a)?.sample(eta, mode, rng, cfg))
}

/// `max_x |conv(x) - approx(x)|` (complex modulus) against the exact
/// convolution of `a` in the approximation's mode.
pub fn sup_error(approx: &SparseApprox, a: &SubsetBits) -> Result<f64> {
    let counts = RepresentationCounts::of(a, approx.mode);
    sup_error_against(approx, a, &counts)
}

pub fn sup_error_against(approx: &SparseApprox, a: &SubsetBits, counts: &RepresentationCounts) -> Result<f64> {
    if approx.group.factors() != a.group().factors() {
        return Err(Error::GroupMismatch {
            left: approx.group.factors().to_vec(),
            right: a.group().factors().to_vec(),
        });
    }
    if counts.mode != approx.mode {
        return Err(Error::ModeMismatch);
    }
    let values = approx.eval_all();
    Ok(values
        .iter()
        .enumerate()
        .map(|(x, v)| (Complex64::new(counts.value(x), 0.0) - v).norm())
        .fold(0.0, f64::max))
}

pub const DEFAULT_MAX_RETRIES: usize = 16;

#[derive(Clone, Debug)]
pub struct RetryOutcome {
    pub approx: SparseApprox,
    pub sup_error: f64,
    pub attempts: usize,
}

/// First sample with `sup_error <= eta * alpha`, within `max_retries` draws.
pub fn sparse_approx_with_retry(
    a: &SubsetBits,
    eta: f64,
    mode: Mode,
    rng: &mut RngStream,
    max_retries: usize,
) -> Result<RetryOutcome> {
    validate_sampling(a, eta)?;
    if max_retries == 0 {
        return Err(Error::InvalidParameter("max_retries must be at least 1".into()));
    }
    let sampler = CharacterSampler::new(a)?;
    let counts = RepresentationCounts::from_spectrum(sampler.spectrum(), mode, a.len());
    let target = eta * a.density();
    let mut best = f64::INFINITY;
    for attempt in 1..=max_retries {
        let approx = sampler.sample(eta, mode, rng, &SamplerConfig::default());
        let err = sup_error_against(&approx, a, &counts)?;
        if err <= target {
            return Ok(RetryOutcome {
                approx,
                sup_error: err,
                attempts: attempt,
            });
        }
        best = best.min(err);
    }
    Err(Error::RetriesExhausted {
        attempts: max_retries,
        best,
    })
}

#[derive(Serialize, Deserialize)]
struct SparseWire {
    factors: Vec<usize>,
    mode: Mode,
    eta: f64,
    alpha: f64,
    m: usize,
    terms: Vec<(usize, f64, f64)>,
}

impl Serialize for SparseApprox {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SparseWire {
            factors: self.group.factors().to_vec(),
            mode: self.mode,
            eta: self.eta,
            alpha: self.alpha,
            m: self.m,
            terms: self.terms.iter().map(|t| (t.character, t.phase.re, t.phase.im)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SparseApprox {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = SparseWire::deserialize(deserializer)?;
        let group = make_group(&w.factors).map_err(D::Error::custom)?;
        if w.terms.len() != w.m {
            return Err(D::Error::custom("term count differs from m"));
        }
        if let Some(&(c, ..)) = w.terms.iter().find(|t| t.0 >= group.order()) {
            return Err(D::Error::custom(format!("character {c} out of range")));
        }
        Ok(SparseApprox {
            group,
            mode: w.mode,
            eta: w.eta,
            alpha: w.alpha,
            m: w.m,
            scale: w.alpha / w.m as f64,
            terms: w
                .terms
                .into_iter()
                .map(|(character, re, im)| SparseTerm {
                    character,
                    phase: Complex64::new(re, im),
                })
                .collect(),
        })
    }
}
