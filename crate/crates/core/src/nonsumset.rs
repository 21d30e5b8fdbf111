//! Sets that are not of the form `B + B`: the exact value of `f(n)` by
//! enumeration, a decision procedure for "is `T` a sumset", and the random
//! `S₁`/`S₂` construction of a large non-sumset.
//!
//! The empty set counts as representable (`∅ + ∅ = ∅`).

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use serde::{Deserialize, Serialize};

use crate::group::{random_subset, Group, SubsetBits};
use crate::{Error, Result, RngStream};

pub const DEFAULT_ATLAS_CAP: usize = 24;
pub const DEFAULT_SEARCH_BUDGET: usize = 100_000;
pub const DEFAULT_CANDIDATE_CAP: usize = 1 << 24;
const MASK_MAX: usize = 64;

/// Subsets of a group of order at most 64 as `u64` masks, with translation
/// by lookup tables over the eight bytes of a mask.
#[derive(Clone, Debug)]
pub struct MaskGroup {
    group: Group,
    bytes: usize,
    /// `table[(g * bytes + j) * 256 + v]` is the image of byte `j` holding `v`.
    table: Vec<u64>,
}

impl MaskGroup {
    pub fn new(group: &Group) -> Result<Self> {
        let n = group.order();
        if n > MASK_MAX {
            return Err(Error::CapExceeded { order: n, cap: MASK_MAX });
        }
        let bytes = n.div_ceil(8);
        let mut table = vec![0u64; n * bytes * 256];
        for g in 0..n {
            for j in 0..bytes {
                for v in 0..256usize {
                    let mut img = 0u64;
                    for bit in 0..8 {
                        let x = j * 8 + bit;
                        if v >> bit & 1 == 1 && x < n {
                            img |= 1 << group.add(x, g);
                        }
                    }
                    table[(g * bytes + j) * 256 + v] = img;
                }
            }
        }
        Ok(Self {
            group: group.clone(),
            bytes,
            table,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn full(&self) -> u64 {
        u64::MAX >> (64 - self.order())
    }

    #[inline]
    pub fn translate(&self, mask: u64, g: usize) -> u64 {
        let base = g * self.bytes * 256;
        let mut out = 0;
        for j in 0..self.bytes {
            out |= self.table[base + j * 256 + (mask >> (8 * j) & 0xff) as usize];
        }
        out
    }

    pub fn sumset(&self, b: u64) -> u64 {
        let mut out = 0;
        let mut rest = b;
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            out |= self.translate(b, x);
            rest &= rest - 1;
        }
        out
    }

    pub fn to_bits(&self, mask: u64) -> SubsetBits {
        SubsetBits::from_fn(&self.group, |x| mask >> x & 1 == 1)
    }

    pub fn from_bits(&self, set: &SubsetBits) -> Result<u64> {
        if set.group() != &self.group {
            return Err(Error::GroupMismatch {
                left: set.group().factors().to_vec(),
                right: self.group.factors().to_vec(),
            });
        }
        Ok(set.words().first().copied().unwrap_or(0))
    }
}

/// All sumsets `B + B` of a small group, stored as a bitmap over the `2^n`
/// subset masks.
#[derive(Clone, Debug)]
pub struct SumsetAtlas {
    masks: MaskGroup,
    representable: Vec<u64>,
    /// Largest non-representable subset; `None` when every subset is a sumset.
    pub max_nonrep_size: Option<usize>,
    pub max_nonrep_witness: Option<u64>,
    pub f_value: usize,
    pub distinct_sumsets: u64,
}

impl SumsetAtlas {
    pub fn group(&self) -> &Group {
        self.masks.group()
    }

    pub fn masks(&self) -> &MaskGroup {
        &self.masks
    }

    pub fn is_representable(&self, t: u64) -> bool {
        self.representable[(t >> 6) as usize] >> (t & 63) & 1 == 1
    }

    pub fn contains(&self, t: &SubsetBits) -> Result<bool> {
        Ok(self.is_representable(self.masks.from_bits(t)?))
    }
}

/// Elements fixed by a block prefix; each block extends one `B ∩ [0, t)`.
const PREFIX_BITS: usize = 8;

fn atlas_dfs(m: &MaskGroup, n: usize, next: usize, b: u64, sum: u64, rep: &[AtomicU64]) {
    let (word, bit) = (&rep[(sum >> 6) as usize], 1u64 << (sum & 63));
    if word.load(Ordering::Relaxed) & bit == 0 {
        word.fetch_or(bit, Ordering::Relaxed);
    }
    for x in next..n {
        let nb = b | 1 << x;
        atlas_dfs(m, n, x + 1, nb, sum | m.translate(nb, x), rep);
    }
}

pub fn sumset_atlas(group: &Group) -> Result<SumsetAtlas> {
    sumset_atlas_capped(group, DEFAULT_ATLAS_CAP)
}

pub fn sumset_atlas_capped(group: &Group, cap: usize) -> Result<SumsetAtlas> {
    let n = group.order();
    if n > cap.min(32) {
        return Err(Error::CapExceeded { order: n, cap: cap.min(32) });
    }
    let masks = MaskGroup::new(group)?;
    let total = 1usize << n;
    let shared: Vec<AtomicU64> = (0..total.div_ceil(64)).map(|_| AtomicU64::new(0)).collect();
    let t = n.min(PREFIX_BITS);
    (0..1u64 << t).into_par_iter().for_each(|prefix| {
        atlas_dfs(&masks, n, t, prefix, masks.sumset(prefix), &shared);
    });
    let representable: Vec<u64> = shared.into_iter().map(AtomicU64::into_inner).collect();
    let mut best: Option<(usize, u64)> = None;
    let mut distinct = 0u64;
    for t in 0..total as u64 {
        if representable[(t >> 6) as usize] >> (t & 63) & 1 == 1 {
            distinct += 1;
        } else {
            let size = t.count_ones() as usize;
            if best.is_none_or(|(s, _)| size > s) {
                best = Some((size, t));
            }
        }
    }
    Ok(SumsetAtlas {
        masks,
        representable,
        max_nonrep_size: best.map(|b| b.0),
        max_nonrep_witness: best.map(|b| b.1),
        f_value: n - best.map_or(0, |b| b.0),
        distinct_sumsets: distinct,
    })
}

/// `f(n)` for the cyclic group of order `n`. The trivial group is not a
/// valid group descriptor; both of its subsets are sumsets, so `f(1) = 1`.
pub fn f_cyclic(n: usize) -> Result<usize> {
    if n == 1 {
        return Ok(1);
    }
    Ok(sumset_atlas(&crate::group::make_group(&[n])?)?.f_value)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SumsetVerdict {
    Sumset { witness: SubsetBits },
    NotSumset,
    /// The heuristic search gave up; nothing is claimed.
    Unknown,
}

impl SumsetVerdict {
    pub fn is_sumset(&self) -> bool {
        matches!(self, SumsetVerdict::Sumset { .. })
    }
}

struct Decider<'a> {
    m: &'a MaskGroup,
    target: u64,
    /// Elements `x` with `2x ∈ T`, the only possible members of `B`.
    cands: Vec<usize>,
}

impl Decider<'_> {
    /// Members of `cands[from..]` that can join `b` keeping `B + B ⊆ T`.
    fn compatible(&self, b: u64, from: usize) -> u64 {
        let mut out = 0;
        for &y in &self.cands[from..] {
            if self.m.translate(b | 1 << y, y) & !self.target == 0 {
                out |= 1 << y;
            }
        }
        out
    }

    fn search(&self, b: u64, sum: u64, from: usize) -> Option<u64> {
        if sum == self.target {
            return Some(b);
        }
        let free = self.compatible(b, from);
        // everything still reachable from b and the compatible extensions
        let pool = b | free;
        let mut reach = sum;
        let mut rest = free;
        while rest != 0 {
            let y = rest.trailing_zeros() as usize;
            reach |= self.m.translate(pool, y);
            rest &= rest - 1;
        }
        if reach & self.target != self.target {
            return None;
        }
        for i in from..self.cands.len() {
            let y = self.cands[i];
            if free >> y & 1 == 0 {
                continue;
            }
            let nb = b | 1 << y;
            if let Some(w) = self.search(nb, sum | self.m.translate(nb, y), i + 1) {
                return Some(w);
            }
        }
        None
    }
}

/// Exhaustive decision for groups of order at most 24 (or the given cap,
/// never above 64).
pub fn is_sumset_exhaustive(t: &SubsetBits, cap: usize) -> Result<SumsetVerdict> {
    let n = t.order();
    if n > cap.min(MASK_MAX) {
        return Err(Error::CapExceeded { order: n, cap: cap.min(MASK_MAX) });
    }
    let m = MaskGroup::new(t.group())?;
    let target = m.from_bits(t)?;
    let g = t.group();
    let cands: Vec<usize> = (0..n).filter(|&x| target >> g.double(x) & 1 == 1).collect();
    let d = Decider { m: &m, target, cands };
    Ok(match d.search(0, 0, 0) {
        Some(b) => SumsetVerdict::Sumset { witness: m.to_bits(b) },
        None => SumsetVerdict::NotSumset,
    })
}

/// Randomised maximal-set search: builds maximal `B` with `B + B ⊆ T` in
/// random orders and reports success if one fills `T`.
pub fn is_sumset_heuristic(t: &SubsetBits, effort: usize, rng: &mut RngStream) -> SumsetVerdict {
    let g = t.group();
    if t.is_empty() {
        return SumsetVerdict::Sumset { witness: t.clone() };
    }
    let base: Vec<usize> = (0..t.order()).filter(|&x| t.contains(g.double(x))).collect();
    // the first round keeps the natural order
    for round in 0..effort.max(1) {
        let mut order = base.clone();
        if round > 0 {
            for i in (1..order.len()).rev() {
                order.swap(i, rng.below(i + 1));
            }
        }
        let mut b = SubsetBits::empty(g);
        for &y in &order {
            let ok = b.iter().all(|x| t.contains(g.add(x, y)));
            if ok {
                b = b.with(y).expect("in range");
            }
        }
        if crate::group::sumset(&b, &b).expect("same group") == *t {
            return SumsetVerdict::Sumset { witness: b };
        }
    }
    SumsetVerdict::Unknown
}

/// Exhaustive up to `DEFAULT_ATLAS_CAP`, heuristic above.
pub fn is_sumset(t: &SubsetBits, rng: &mut RngStream) -> SumsetVerdict {
    if t.order() <= DEFAULT_ATLAS_CAP {
        is_sumset_exhaustive(t, DEFAULT_ATLAS_CAP).expect("within cap")
    } else {
        is_sumset_heuristic(t, 64, rng)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CountingReport {
    /// Independent sets `B` of the Cayley-sum graph on `S₁` (with the
    /// diagonal convention), i.e. all `B` with `(B + B) ∩ S₁ = ∅`.
    pub candidates: u64,
    pub distinct_candidate_sumsets: u64,
    pub ln_candidates: f64,
    /// `ln C(n - |S₁|, |S₂|)`, the number of possible `S₂`.
    pub ln_s2_choices: f64,
    /// `p n ln n`, the scale of both counts in the asymptotic argument.
    pub pn_ln_n: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum NonsumsetOutcome {
    Witness {
        s1: SubsetBits,
        s2: SubsetBits,
        witness: SubsetBits,
        draws: usize,
        counting: CountingReport,
    },
    /// `S₁ = G` (or nothing left for `S₂`): the complement is empty.
    Degenerate { s1: SubsetBits },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonsumsetConfig {
    pub budget: usize,
    pub candidate_cap: usize,
}

impl Default for NonsumsetConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_SEARCH_BUDGET,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
        }
    }
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

struct Enumerator<'a> {
    m: &'a MaskGroup,
    allowed: u64,
    forbidden: u64,
    n: usize,
    count: u64,
    cap: u64,
    sums: HashSet<u64>,
}

impl Enumerator<'_> {
    fn run(&mut self, next: usize, b: u64, sum: u64) -> bool {
        self.count += 1;
        if self.count > self.cap {
            return false;
        }
        self.sums.insert(sum);
        for y in next..self.n {
            if self.allowed >> y & 1 == 0 {
                continue;
            }
            let nb = b | 1 << y;
            let ns = sum | self.m.translate(nb, y);
            if ns & self.forbidden == 0 && !self.run(y + 1, nb, ns) {
                return false;
            }
        }
        true
    }
}

/// Draws `S₁` at density `p`, lists every `B` with `(B + B) ∩ S₁ = ∅`, then
/// draws `S₂ ⊆ G ∖ S₁` of size `⌈p n⌉` until `T = G ∖ (S₁ ∪ S₂)` equals no
/// `B + B`. Any `B` with `B + B = T` avoids `S₁`, so the list is complete
/// and a returned `T` is certainly not a sumset. Groups of order at most 64.
pub fn probabilistic_nonsumset(
    group: &Group,
    p: f64,
    rng: &mut RngStream,
    cfg: NonsumsetConfig,
) -> Result<NonsumsetOutcome> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} outside (0, 1]")));
    }
    let m = MaskGroup::new(group)?;
    let n = group.order();
    let s1 = random_subset(group, p, rng);
    let rest = s1.complement();
    let s2_size = ((p * n as f64).ceil() as usize).min(rest.len());
    if rest.is_empty() || s2_size == rest.len() {
        return Ok(NonsumsetOutcome::Degenerate { s1 });
    }
    let forbidden = m.from_bits(&s1)?;
    let allowed = (0..n)
        .filter(|&x| forbidden >> group.double(x) & 1 == 0)
        .fold(0u64, |acc, x| acc | 1 << x);
    let mut e = Enumerator {
        m: &m,
        allowed,
        forbidden,
        n,
        count: 0,
        cap: cfg.candidate_cap as u64,
        sums: HashSet::new(),
    };
    if !e.run(0, 0, 0) {
        return Err(Error::BudgetExhausted {
            candidates: e.count as usize,
            draws: 0,
        });
    }
    let counting = CountingReport {
        candidates: e.count,
        distinct_candidate_sumsets: e.sums.len() as u64,
        ln_candidates: (e.count as f64).ln(),
        ln_s2_choices: ln_binomial(rest.len(), s2_size),
        pn_ln_n: p * n as f64 * (n as f64).ln(),
    };
    let rest_elems = rest.to_vec();
    for draw in 1..=cfg.budget {
        let picks = rand::seq::index::sample(rng, rest_elems.len(), s2_size);
        let s2 = SubsetBits::from_elements(group, picks.iter().map(|i| rest_elems[i]))?;
        let t = rest.minus(&s2)?;
        if !e.sums.contains(&m.from_bits(&t)?) {
            return Ok(NonsumsetOutcome::Witness {
                s1,
                s2,
                witness: t,
                draws: draw,
                counting,
            });
        }
    }
    Err(Error::BudgetExhausted {
        candidates: e.count as usize,
        draws: cfg.budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_group, sumset};

    fn z(n: usize) -> Group {
        make_group(&[n]).unwrap()
    }

    fn set(g: &Group, xs: &[usize]) -> SubsetBits {
        SubsetBits::from_elements(g, xs.iter().copied()).unwrap()
    }

    /// All `B` by plain mask iteration with the generic sumset.
    fn naive_is_sumset(t: &SubsetBits) -> bool {
        let g = t.group();
        (0u64..1 << g.order()).any(|mask| {
            let b = SubsetBits::from_fn(g, |x| mask >> x & 1 == 1);
            sumset(&b, &b).unwrap() == *t
        })
    }

    #[test]
    fn mask_translate_matches_generic() {
        for factors in [vec![13], vec![2, 2, 2, 2], vec![3, 5], vec![64]] {
            let g = make_group(&factors).unwrap();
            let m = MaskGroup::new(&g).unwrap();
            let mut rng = RngStream::new(8);
            for _ in 0..20 {
                let b = random_subset(&g, 0.4, &mut rng);
                let mask = m.from_bits(&b).unwrap();
                for h in [0, 1, g.order() - 1] {
                    assert_eq!(m.to_bits(m.translate(mask, h)), b.translate(h));
                }
                assert_eq!(m.to_bits(m.sumset(mask)), sumset(&b, &b).unwrap());
            }
        }
        assert!(MaskGroup::new(&z(65)).is_err());
    }

    #[test]
    fn spec_examples() {
        let g5 = z(5);
        let v = is_sumset_exhaustive(&set(&g5, &[0, 1, 2]), 24).unwrap();
        match v {
            SumsetVerdict::Sumset { witness } => {
                assert_eq!(sumset(&witness, &witness).unwrap(), set(&g5, &[0, 1, 2]))
            }
            other => panic!("{other:?}"),
        }
        let g4 = z(4);
        assert_eq!(is_sumset_exhaustive(&set(&g4, &[1]), 24).unwrap(), SumsetVerdict::NotSumset);
        assert!(!naive_is_sumset(&set(&g4, &[1])));
        let g12 = z(12);
        let h = SubsetBits::cyclic_subgroup(&g12, 3).unwrap();
        assert!(is_sumset_exhaustive(&h, 24).unwrap().is_sumset());
        assert!(is_sumset_exhaustive(&SubsetBits::empty(&g12), 24).unwrap().is_sumset());
    }

    #[test]
    fn z8_minus_zero_by_direct_scan() {
        let g = z(8);
        let t = SubsetBits::full(&g).without(0);
        let direct = naive_is_sumset(&t);
        assert_eq!(is_sumset_exhaustive(&t, 24).unwrap().is_sumset(), direct);
        let atlas = sumset_atlas(&g).unwrap();
        assert_eq!(atlas.contains(&t).unwrap(), direct);
    }

    #[test]
    fn decider_matches_naive_exhaustively() {
        for factors in [vec![7], vec![8], vec![2, 4], vec![9], vec![10]] {
            let g = make_group(&factors).unwrap();
            let atlas = sumset_atlas(&g).unwrap();
            for mask in 0u64..1 << g.order() {
                let t = atlas.masks().to_bits(mask);
                let v = is_sumset_exhaustive(&t, 24).unwrap();
                assert_eq!(v.is_sumset(), atlas.is_representable(mask), "{factors:?} {mask:b}");
                if let SumsetVerdict::Sumset { witness } = v {
                    assert_eq!(sumset(&witness, &witness).unwrap(), t);
                }
            }
        }
    }

    #[test]
    fn atlas_small_values() {
        assert_eq!(f_cyclic(1).unwrap(), 1);
        // Z_2: {1} is not a sumset, {0} and Z_2 are
        let two = sumset_atlas(&z(2)).unwrap();
        assert_eq!(two.max_nonrep_size, Some(1));
        assert_eq!(two.f_value, 1);
        assert!(sumset_atlas(&z(25)).is_err());
    }

    #[test]
    fn atlas_definitional_consistency() {
        for n in 2..=12 {
            let atlas = sumset_atlas(&z(n)).unwrap();
            let f = atlas.f_value;
            let mut seen_boundary = false;
            for mask in 0u64..1 << n {
                let size = mask.count_ones() as usize;
                if size > n - f {
                    assert!(atlas.is_representable(mask));
                }
                if size == n - f && !atlas.is_representable(mask) {
                    seen_boundary = true;
                }
            }
            assert!(seen_boundary, "n = {n}");
            assert!(atlas.is_representable(atlas.masks().full()));
        }
    }

    #[test]
    fn heuristic_is_sound() {
        let g = z(40);
        let mut rng = RngStream::new(21);
        for _ in 0..30 {
            let b = random_subset(&g, 0.1, &mut rng);
            let t = sumset(&b, &b).unwrap();
            let v = is_sumset_heuristic(&t, 16, &mut rng);
            if let SumsetVerdict::Sumset { witness } = &v {
                assert_eq!(&sumset(witness, witness).unwrap(), &t);
            }
        }
        let lonely = set(&g, &[1]);
        assert_eq!(is_sumset_heuristic(&lonely, 8, &mut rng), SumsetVerdict::Unknown);
    }

    #[test]
    fn probabilistic_witness_on_z16() {
        let g = z(16);
        let atlas = sumset_atlas(&g).unwrap();
        let root = RngStream::new(31);
        for i in 0..20 {
            let out = probabilistic_nonsumset(&g, 0.25, &mut root.split(i), NonsumsetConfig::default()).unwrap();
            match out {
                NonsumsetOutcome::Witness {
                    s1, s2, witness, counting, ..
                } => {
                    assert!(!atlas.contains(&witness).unwrap());
                    assert_eq!(is_sumset_exhaustive(&witness, 24).unwrap(), SumsetVerdict::NotSumset);
                    assert!(s1.is_disjoint(&s2).unwrap());
                    assert_eq!(witness.len(), 16 - s1.len() - s2.len());
                    assert!(counting.candidates >= 1);
                }
                NonsumsetOutcome::Degenerate { .. } => panic!("unexpected degenerate run"),
            }
        }
    }

    #[test]
    fn probabilistic_degenerate_and_errors() {
        let g = z(10);
        let mut rng = RngStream::new(1);
        assert!(matches!(
            probabilistic_nonsumset(&g, 1.0, &mut rng, NonsumsetConfig::default()).unwrap(),
            NonsumsetOutcome::Degenerate { .. }
        ));
        assert!(probabilistic_nonsumset(&g, 0.0, &mut rng, NonsumsetConfig::default()).is_err());
        let tiny = NonsumsetConfig {
            budget: 10,
            candidate_cap: 2,
        };
        assert!(matches!(
            probabilistic_nonsumset(&g, 0.1, &mut rng, tiny),
            Err(Error::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn ln_binomial_values() {
        assert!((ln_binomial(10, 3) - 120f64.ln()).abs() < 1e-12);
        assert_eq!(ln_binomial(5, 0), 0.0);
        assert_eq!(ln_binomial(5, 5), 0.0);
    }
}
