//! Dyadic level sets and certified dense subsets of `A-A` and `A+A`.
//!
//! For a nonempty `A` of density `alpha` the level set `A_l` collects the
//! points where the self-convolution lies in `(2^{-l-1} alpha, 2^{-l} alpha]`.
//! Since `conv(x) = r(x)/n` for the integer representation count `r`, the
//! membership test reduces to `|A| / 2^{l+1} < r(x) <= |A| / 2^l`, evaluated
//! exactly in integers.
//!
//! A cover element is one set `F` with `A_l ⊆ F ⊆ A±A` at the level
//! `l = l(A)`. Two constructions are provided: thresholding a Fourier-sparse
//! approximation (small doubling) and taking `A'±A'` for a random
//! subsample `A'` of `A` (large doubling). The exponentially large
//! collections the elements are drawn from are not materialised; their
//! cardinality is bounded analytically by [`complexity_bound`].

use serde::{Deserialize, Serialize};

use crate::fourier::{sparse_approx_with_retry, RepresentationCounts, SparseApprox, DEFAULT_MAX_RETRIES};
use crate::group::{difference_set, sumset, SubsetBits};
use crate::{Error, Result, RngStream};

pub use crate::fourier::Mode;

/// Working constant in `|A_l| >= c 2^l alpha n / max(l,1)^2`. The exhaustive
/// scan over all nonempty subsets of `Z_16` (see `verify::criterion_05`)
/// finds every set feasible at this value.
pub const DEFAULT_C: f64 = 0.125;

/// `l` with the `l = 0` divisor convention.
fn divisor(ell: u32) -> f64 {
    let l = ell.max(1) as f64;
    l * l
}

/// `r` lies in level `ell` for a set of size `size`.
#[inline]
fn in_level(r: u64, size: usize, ell: u32) -> bool {
    if r == 0 {
        return false;
    }
    if ell >= 100 {
        return false;
    }
    let r = r as u128;
    let size = size as u128;
    (r << (ell + 1)) > size && (r << ell) <= size
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSet {
    pub ell: u32,
    pub mode: Mode,
    pub members: SubsetBits,
}

fn level_from_counts(a: &SubsetBits, counts: &RepresentationCounts, ell: u32) -> SubsetBits {
    SubsetBits::from_fn(a.group(), |x| in_level(counts.counts[x], a.len(), ell))
}

pub fn level_set(a: &SubsetBits, ell: u32, mode: Mode) -> Result<LevelSet> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let counts = RepresentationCounts::of(a, mode);
    Ok(LevelSet {
        ell,
        mode,
        members: level_from_counts(a, &counts, ell),
    })
}

/// Level sizes `|A_l|` for `l = 0..=floor(log2 K)`, where `K` is the
/// doubling matching the mode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelProfile {
    pub mode: Mode,
    pub set_size: usize,
    /// `|A+A|` or `|A-A|`.
    pub target_size: usize,
    /// `floor(log2 K)`.
    pub max_level: u32,
    pub sizes: Vec<usize>,
}

impl LevelProfile {
    pub fn from_counts(counts: &RepresentationCounts) -> Self {
        let set_size = counts.set_size;
        let target_size = counts.counts.iter().filter(|&&r| r > 0).count();
        let mut max_level = 0u32;
        while ((set_size as u128) << (max_level + 1)) <= target_size as u128 {
            max_level += 1;
        }
        let mut sizes = vec![0usize; max_level as usize + 1];
        for &r in &counts.counts {
            for (ell, slot) in sizes.iter_mut().enumerate() {
                if in_level(r, set_size, ell as u32) {
                    *slot += 1;
                    break;
                }
            }
        }
        Self {
            mode: counts.mode,
            set_size,
            target_size,
            max_level,
            sizes,
        }
    }

    /// `c 2^l |A| / max(l,1)^2`.
    pub fn size_floor(&self, ell: u32, c: f64) -> f64 {
        c * 2f64.powi(ell as i32) * self.set_size as f64 / divisor(ell)
    }

    /// Smallest feasible level at constant `c`.
    pub fn ell_at(&self, c: f64) -> Option<u32> {
        (0..=self.max_level).find(|&ell| self.sizes[ell as usize] as f64 >= self.size_floor(ell, c))
    }

    /// Largest `c` for which some level is feasible.
    pub fn max_feasible_c(&self) -> f64 {
        (0..=self.max_level)
            .map(|ell| self.sizes[ell as usize] as f64 * divisor(ell) / (2f64.powi(ell as i32) * self.set_size as f64))
            .fold(0.0, f64::max)
    }
}

pub fn level_profile(a: &SubsetBits, mode: Mode) -> Result<LevelProfile> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(LevelProfile::from_counts(&RepresentationCounts::of(a, mode)))
}

/// `l(A)`: the smallest `l <= log2 K` with `|A_l| >= c 2^l alpha n / max(l,1)^2`.
pub fn ell_of(a: &SubsetBits, c: f64, mode: Mode) -> Result<u32> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParameter(format!("c = {c} outside (0, 1)")));
    }
    let profile = level_profile(a, mode)?;
    profile.ell_at(c).ok_or(Error::NoFeasibleLevel {
        c,
        profile: profile.sizes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// Threshold of a Fourier-sparse approximation.
    Small,
    /// `A'±A'` for a random subsample `A'`.
    Large,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    SparseCharacters { approx: SparseApprox, sup_error: f64 },
    SubsampledPair { subsample: SubsetBits, rate: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Violation {
    /// An element of `A_l` missing from `F`.
    MissingLevelElement,
    /// An element of `F` outside `A±A`.
    OutsideTarget,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verification {
    Unverified,
    SandwichVerified,
    Failed { witness: usize, violation: Violation },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverElement {
    pub ell: u32,
    pub mode: Mode,
    pub regime: Regime,
    pub set: SubsetBits,
    pub provenance: Provenance,
    pub attempts: usize,
    pub verification: Verification,
}

impl CoverElement {
    pub fn is_verified(&self) -> bool {
        self.verification == Verification::SandwichVerified
    }
}

#[derive(Clone, Debug)]
pub struct CoverConfig {
    pub c: f64,
    pub max_retries: usize,
}

impl Default for CoverConfig {
    fn default() -> Self {
        Self {
            c: DEFAULT_C,
            max_retries: DEFAULT_MAX_RETRIES,
        }
    }
}

fn target_of(a: &SubsetBits, mode: Mode) -> SubsetBits {
    match mode {
        Mode::Difference => difference_set(a),
        Mode::Sum => sumset(a, a).expect("same group"),
    }
}

pub fn build_cover_element_small(a: &SubsetBits, mode: Mode, rng: &mut RngStream) -> Result<CoverElement> {
    build_small_with(a, mode, rng, &CoverConfig::default())
}

/// Small-doubling construction: `eta = 2^{-l-2}`, a certified sparse
/// approximation, and `F = {x : Re approx(x) > eta alpha}`.
pub fn build_small_with(a: &SubsetBits, mode: Mode, rng: &mut RngStream, cfg: &CoverConfig) -> Result<CoverElement> {
    let ell = ell_of(a, cfg.c, mode)?;
    let eta = 2f64.powi(-(ell as i32) - 2);
    let out = sparse_approx_with_retry(a, eta, mode, rng, cfg.max_retries)?;
    let threshold = eta * a.density();
    let values = out.approx.eval_all();
    let set = SubsetBits::from_fn(a.group(), |x| values[x].re > threshold);
    Ok(CoverElement {
        ell,
        mode,
        regime: Regime::Small,
        set,
        provenance: Provenance::SparseCharacters {
            approx: out.approx,
            sup_error: out.sup_error,
        },
        attempts: out.attempts,
        verification: Verification::Unverified,
    })
}

/// `q = sqrt(2^{l+3} ln n / |A|)`.
pub fn subsample_rate(ell: u32, n: usize, size: usize) -> f64 {
    (2f64.powi(ell as i32 + 3) * (n as f64).ln() / size as f64).sqrt()
}

/// `sqrt(2^{l+4} |A| ln n)`.
pub fn subsample_cap(ell: u32, n: usize, size: usize) -> f64 {
    (2f64.powi(ell as i32 + 4) * size as f64 * (n as f64).ln()).sqrt()
}

pub fn build_cover_element_large(a: &SubsetBits, mode: Mode, rng: &mut RngStream) -> Result<CoverElement> {
    build_large_with(a, mode, rng, &CoverConfig::default())
}

/// Large-doubling construction: keep each element of `A` with probability
/// `q` and return `A'±A'`, retrying until it covers `A_l` and `A'` is
/// within the size cap.
pub fn build_large_with(a: &SubsetBits, mode: Mode, rng: &mut RngStream, cfg: &CoverConfig) -> Result<CoverElement> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let counts = RepresentationCounts::of(a, mode);
    let profile = LevelProfile::from_counts(&counts);
    let ell = profile.ell_at(cfg.c).ok_or(Error::NoFeasibleLevel {
        c: cfg.c,
        profile: profile.sizes.clone(),
    })?;
    let n = a.order();
    let q = subsample_rate(ell, n, a.len());
    if q > 1.0 {
        return Err(Error::RegimeInapplicable { q });
    }
    let cap = subsample_cap(ell, n, a.len());
    let level = level_from_counts(a, &counts, ell);
    let mut fewest_missing = usize::MAX;
    for attempt in 1..=cfg.max_retries {
        let picked: Vec<usize> = a.iter().filter(|_| rng.bernoulli(q)).collect();
        let subsample = SubsetBits::from_elements(a.group(), picked)?;
        if subsample.len() as f64 > cap {
            continue;
        }
        let set = target_of(&subsample, mode);
        let missing = level.minus(&set)?.len();
        if missing == 0 {
            return Ok(CoverElement {
                ell,
                mode,
                regime: Regime::Large,
                set,
                provenance: Provenance::SubsampledPair { subsample, rate: q },
                attempts: attempt,
                verification: Verification::Unverified,
            });
        }
        fewest_missing = fewest_missing.min(missing);
    }
    Err(Error::RetriesExhausted {
        attempts: cfg.max_retries,
        best: fewest_missing as f64,
    })
}

/// Checks `A_l ⊆ F ⊆ A±A` with exact bitset operations.
pub fn verify_cover_element(a: &SubsetBits, elem: &CoverElement) -> Result<CoverElement> {
    let level = level_set(a, elem.ell, elem.mode)?;
    let target = target_of(a, elem.mode);
    let verification = if let Some(w) = level.members.first_not_in(&elem.set)? {
        Verification::Failed {
            witness: w,
            violation: Violation::MissingLevelElement,
        }
    } else if let Some(w) = elem.set.first_not_in(&target)? {
        Verification::Failed {
            witness: w,
            violation: Violation::OutsideTarget,
        }
    } else {
        Verification::SandwichVerified
    };
    Ok(CoverElement {
        verification,
        ..elem.clone()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityBound {
    pub ell: u32,
    pub n: f64,
    pub s: f64,
    /// `C 2^{2l} (ln n)^2`.
    pub small_regime_log: f64,
    /// `C sqrt(2^l s (ln n)^{3/2})`.
    pub large_regime_log: f64,
    pub min_regime_log: f64,
    /// `c 2^l s / max(l,1)^2`.
    pub min_size_lower: f64,
    pub big_c: f64,
    pub c: f64,
}

pub fn complexity_bound(ell: u32, n: f64, s: f64, big_c: f64, c: f64) -> Result<ComplexityBound> {
    if !(n > 1.0 && s > 0.0 && big_c > 0.0 && c > 0.0) {
        return Err(Error::InvalidParameter("complexity bound needs n > 1 and positive s, C, c".into()));
    }
    let ln = n.ln();
    let h = 2f64.powi(ell as i32);
    let small = big_c * h * h * ln * ln;
    let large = big_c * (h * s * ln.powf(1.5)).sqrt();
    Ok(ComplexityBound {
        ell,
        n,
        s,
        small_regime_log: small,
        large_regime_log: large,
        min_regime_log: small.min(large),
        min_size_lower: c * h * s / divisor(ell),
        big_c,
        c,
    })
}

/// Real `l*` where the two regime bounds coincide:
/// `2^{l*} = s^{1/3} (ln n)^{-5/6}`.
pub fn regime_crossover(n: f64, s: f64) -> f64 {
    (s.cbrt() * n.ln().powf(-5.0 / 6.0)).log2()
}

/// Natural log of the number of threshold sets `{x : f(x) > 2^{-l-2} alpha}`
/// with `f` a scaled sum of `m = 2^{2l+6} ln n` characters, plus (sum mode)
/// a phase from a net of size `ceil(64 pi / eta)` per character with
/// `eta = c / n`. This is the counting the collections rest on; it stays
/// within a constant multiple of `4^l (ln n)^2`.
pub fn class_log_cardinality(ell: u32, n: usize, mode: Mode, c: f64) -> f64 {
    let ln = (n as f64).ln();
    let m = (2f64.powi(2 * ell as i32 + 6) * ln).ceil();
    let characters = m * ln;
    match mode {
        Mode::Difference => characters,
        Mode::Sum => {
            let eta = c / n as f64;
            let net = (64.0 * std::f64::consts::PI / eta).ceil();
            characters + m * net.ln()
        }
    }
}

/// Small regime when its class bound at `l(A)` (with `s = |A|`) is the
/// smaller of the two, or when the subsampling rate would exceed 1.
pub fn select_regime(a: &SubsetBits, mode: Mode, c: f64) -> Result<Regime> {
    let ell = ell_of(a, c, mode)?;
    if subsample_rate(ell, a.order(), a.len()) > 1.0 {
        return Ok(Regime::Small);
    }
    let b = complexity_bound(ell, a.order() as f64, a.len() as f64, 1.0, c)?;
    Ok(if b.small_regime_log <= b.large_regime_log {
        Regime::Small
    } else {
        Regime::Large
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_group, random_subset, random_subset_of_size};

    /// Direct pair counting, independent of the spectral path.
    fn pair_counts(a: &SubsetBits, mode: Mode) -> Vec<u64> {
        let g = a.group();
        let mut r = vec![0u64; g.order()];
        for x in a.iter() {
            for y in a.iter() {
                let z = match mode {
                    Mode::Difference => g.sub(x, y),
                    Mode::Sum => g.add(x, y),
                };
                r[z] += 1;
            }
        }
        r
    }

    #[test]
    fn subgroup_levels() {
        let g = make_group(&[32]).unwrap();
        let h = SubsetBits::cyclic_subgroup(&g, 4).unwrap();
        assert_eq!(level_set(&h, 0, Mode::Difference).unwrap().members, h);
        for ell in 1..6 {
            assert!(level_set(&h, ell, Mode::Difference).unwrap().members.is_empty());
        }
        assert_eq!(ell_of(&h, 0.5, Mode::Difference).unwrap(), 0);
        assert_eq!(ell_of(&h, DEFAULT_C, Mode::Sum).unwrap(), 0);
    }

    #[test]
    fn sum_levels_of_interval_match_pair_counts() {
        let g = make_group(&[16]).unwrap();
        let a = SubsetBits::from_elements(&g, [0, 1, 2, 3]).unwrap();
        let counts = pair_counts(&a, Mode::Sum);
        // r = 1,2,3,4,3,2,1 on 0..=6
        assert_eq!(&counts[..8], &[1, 2, 3, 4, 3, 2, 1, 0]);
        for ell in 0..4 {
            let want = SubsetBits::from_fn(&g, |x| in_level(counts[x], 4, ell));
            assert_eq!(level_set(&a, ell, Mode::Sum).unwrap().members, want);
        }
        // (2, 4] -> {2,3,4}; (1,2] -> {1,5}; (0.5,1] -> {0,6}
        assert_eq!(level_set(&a, 0, Mode::Sum).unwrap().members.to_vec(), vec![2, 3, 4]);
        assert_eq!(level_set(&a, 1, Mode::Sum).unwrap().members.to_vec(), vec![1, 5]);
        assert_eq!(level_set(&a, 2, Mode::Sum).unwrap().members.to_vec(), vec![0, 6]);
    }

    #[test]
    fn interval_in_z64_has_level_zero() {
        let g = make_group(&[64]).unwrap();
        let a = SubsetBits::from_elements(&g, 0..8).unwrap();
        // differences with at least 5 of 8 representations: |x| <= 3
        let a0 = level_set(&a, 0, Mode::Difference).unwrap().members;
        assert_eq!(a0.to_vec(), vec![0, 1, 2, 3, 61, 62, 63]);
        assert_eq!(ell_of(&a, 0.125, Mode::Difference).unwrap(), 0);
    }

    #[test]
    fn levels_are_disjoint_and_partition_support() {
        let mut rng = RngStream::new(31);
        for factors in [vec![64], vec![2; 6], vec![3, 27]] {
            let g = make_group(&factors).unwrap();
            for mode in [Mode::Difference, Mode::Sum] {
                let a = random_subset(&g, 0.2, &mut rng).with(1).unwrap();
                let counts = pair_counts(&a, mode);
                let mut union = SubsetBits::empty(&g);
                for ell in 0..=12 {
                    let lv = level_set(&a, ell, mode).unwrap().members;
                    assert!(lv.is_disjoint(&union).unwrap());
                    union = union.union(&lv).unwrap();
                }
                let supp = SubsetBits::from_fn(&g, |x| counts[x] > 0);
                assert_eq!(union, supp);
            }
        }
    }

    #[test]
    fn level_errors() {
        let g = make_group(&[8]).unwrap();
        assert!(matches!(level_set(&SubsetBits::empty(&g), 0, Mode::Sum), Err(Error::EmptySet)));
        assert!(ell_of(&SubsetBits::full(&g), 1.5, Mode::Sum).is_err());
    }

    #[test]
    fn no_feasible_level_reports_profile() {
        let g = make_group(&[64]).unwrap();
        let a = random_subset_of_size(&g, 10, &mut RngStream::new(3));
        match ell_of(&a, 0.99, Mode::Difference) {
            Err(Error::NoFeasibleLevel { profile, .. }) => assert!(!profile.is_empty()),
            Ok(ell) => {
                let p = level_profile(&a, Mode::Difference).unwrap();
                assert!(p.sizes[ell as usize] as f64 >= p.size_floor(ell, 0.99));
            }
            Err(e) => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn small_build_full_group() {
        let g = make_group(&[64]).unwrap();
        let a = SubsetBits::full(&g);
        for mode in [Mode::Difference, Mode::Sum] {
            let e = build_cover_element_small(&a, mode, &mut RngStream::new(0)).unwrap();
            assert_eq!(e.ell, 0);
            assert!(e.set.is_full());
            assert!(verify_cover_element(&a, &e).unwrap().is_verified());
        }
    }

    #[test]
    fn small_build_subgroup_is_exact() {
        let g = make_group(&[256]).unwrap();
        let h = SubsetBits::cyclic_subgroup(&g, 4).unwrap();
        assert_eq!(h.len(), 64);
        let e = build_cover_element_small(&h, Mode::Difference, &mut RngStream::new(4)).unwrap();
        let e = verify_cover_element(&h, &e).unwrap();
        assert!(e.is_verified());
        assert_eq!(e.set, h);
    }

    #[test]
    fn small_build_random_sets_verify() {
        let g = make_group(&[256]).unwrap();
        let root = RngStream::new(77);
        for i in 0..60 {
            let mut rng = root.split(i);
            let a = random_subset(&g, 0.25, &mut rng);
            for mode in [Mode::Difference, Mode::Sum] {
                let e = build_cover_element_small(&a, mode, &mut rng).unwrap();
                let v = verify_cover_element(&a, &e).unwrap();
                assert!(v.is_verified(), "{:?}", v.verification);
                let p = level_profile(&a, mode).unwrap();
                assert!(v.set.len() as f64 >= p.size_floor(v.ell, DEFAULT_C));
            }
        }
    }

    #[test]
    fn large_build_on_dense_level_zero_set() {
        // an interval of 600 in Z_4096: l(A) = 0 and |A| >= 8 ln n
        let g = make_group(&[4096]).unwrap();
        let a = SubsetBits::from_elements(&g, 0..600).unwrap();
        assert_eq!(ell_of(&a, DEFAULT_C, Mode::Difference).unwrap(), 0);
        let q = subsample_rate(0, 4096, 600);
        assert!((q - (8.0 * 4096f64.ln() / 600.0).sqrt()).abs() < 1e-15);
        for mode in [Mode::Difference, Mode::Sum] {
            let e = build_cover_element_large(&a, mode, &mut RngStream::new(5)).unwrap();
            let v = verify_cover_element(&a, &e).unwrap();
            assert!(v.is_verified());
            match &v.provenance {
                Provenance::SubsampledPair { subsample, .. } => {
                    assert!(subsample.is_subset_of(&a).unwrap());
                    assert!(subsample.len() as f64 <= subsample_cap(v.ell, 4096, 600));
                }
                _ => panic!("wrong provenance"),
            }
        }
    }

    #[test]
    fn large_build_inapplicable_for_small_sets() {
        let g = make_group(&[1024]).unwrap();
        let a = SubsetBits::from_elements(&g, 0..20).unwrap();
        // 20 < 8 ln 1024 ~ 55.5
        assert!(matches!(
            build_cover_element_large(&a, Mode::Difference, &mut RngStream::new(0)),
            Err(Error::RegimeInapplicable { .. })
        ));
    }

    #[test]
    fn verify_trivial_and_failing_cases() {
        let g = make_group(&[40]).unwrap();
        let a = random_subset(&g, 0.3, &mut RngStream::new(8));
        let e = build_cover_element_small(&a, Mode::Difference, &mut RngStream::new(9)).unwrap();
        let whole = CoverElement {
            set: difference_set(&a),
            ..e.clone()
        };
        assert!(verify_cover_element(&a, &whole).unwrap().is_verified());
        let empty = CoverElement {
            set: SubsetBits::empty(&g),
            ..e.clone()
        };
        match verify_cover_element(&a, &empty).unwrap().verification {
            Verification::Failed { witness, violation } => {
                assert_eq!(violation, Violation::MissingLevelElement);
                assert!(level_set(&a, e.ell, e.mode).unwrap().members.contains(witness));
            }
            other => panic!("expected failure, got {other:?}"),
        }
        let too_big = CoverElement {
            set: SubsetBits::full(&g),
            ..e
        };
        if !difference_set(&a).is_full() {
            assert!(matches!(
                verify_cover_element(&a, &too_big).unwrap().verification,
                Verification::Failed {
                    violation: Violation::OutsideTarget,
                    ..
                }
            ));
        }
    }

    #[test]
    fn complexity_unit_case() {
        let b = complexity_bound(0, std::f64::consts::E, 1.0, 1.0, 1.0).unwrap();
        assert!((b.small_regime_log - 1.0).abs() < 1e-12);
        assert!((b.large_regime_log - 1.0).abs() < 1e-12);
        assert!((b.min_size_lower - 1.0).abs() < 1e-12);
        assert!(complexity_bound(0, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn crossover_closed_form_matches_numeric_root() {
        for (n, s) in [(1e6, 1e5), (4096.0, 64.0), (1e9, 3e7)] {
            // bisection on small - large over real l
            let gap = |l: f64| {
                let h = 2f64.powf(l);
                let ln = f64::ln(n);
                h * h * ln * ln - (h * s * ln.powf(1.5)).sqrt()
            };
            let (mut lo, mut hi) = (-40.0, 40.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if gap(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert!((lo - regime_crossover(n, s)).abs() < 1e-9);
        }
    }

    #[test]
    fn crossover_at_union_bound_scale() {
        // s = p^{-3/2} (ln n)^{19/4} puts the crossover at p^{-1/2} (ln n)^{3/4}
        let n: f64 = 1e6;
        let p = n.powf(-1.0 / 3.0);
        let ln = n.ln();
        let s = p.powf(-1.5) * ln.powf(19.0 / 4.0);
        let scale = p.powf(-0.5) * ln.powf(0.75);
        assert!((regime_crossover(n, s) - scale.log2()).abs() < 1e-9);
        let ell0 = scale.log2().round() as u32;
        let ratio = 2f64.powi(ell0 as i32) / scale;
        assert!((0.5..=2.0).contains(&ratio));
        let below = complexity_bound(ell0 - 1, n, s, 1.0, 1.0).unwrap();
        let above = complexity_bound(ell0 + 1, n, s, 1.0, 1.0).unwrap();
        assert!(below.small_regime_log < below.large_regime_log);
        assert!(above.small_regime_log > above.large_regime_log);
    }

    #[test]
    fn class_cardinality_is_quadratic_in_log_n() {
        for ell in 0..4 {
            for n in [256usize, 4096, 1 << 20] {
                let ln = (n as f64).ln();
                let unit = 4f64.powi(ell) * ln * ln;
                let d = class_log_cardinality(ell as u32, n, Mode::Difference, 0.5);
                assert!(d / unit <= 70.0);
                let s = class_log_cardinality(ell as u32, n, Mode::Sum, 0.5);
                assert!(s / unit <= 64.0 * 4.0);
            }
        }
    }

    #[test]
    fn cover_element_json_has_expected_fields() {
        let g = make_group(&[16]).unwrap();
        let a = SubsetBits::from_elements(&g, [0, 1, 2, 5]).unwrap();
        let e = verify_cover_element(&a, &build_cover_element_small(&a, Mode::Sum, &mut RngStream::new(1)).unwrap())
            .unwrap();
        let v: serde_json::Value = serde_json::to_value(&e).unwrap();
        assert_eq!(v["mode"], "sum");
        assert_eq!(v["verification"]["status"], "sandwich-verified");
        assert_eq!(v["provenance"]["kind"], "sparse-characters");
        assert!(v["set"]["bits"].is_string());
        let back: CoverElement = serde_json::from_value(v).unwrap();
        assert_eq!(back.set, e.set);
    }
}
