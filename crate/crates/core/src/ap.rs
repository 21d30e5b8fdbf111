//! Random subsets of `Z_p`, arithmetic progressions in their sumsets, and
//! the first-moment quantities for long progressions in `A + A`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::group::{make_group, random_subset, sumset, Group, SubsetBits};
use crate::report::fmt12;
use crate::{Error, Result, RngStream};

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn prime_group(p: usize) -> Result<Group> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    make_group(&[p])
}

fn check_prime_cyclic(t: &SubsetBits) -> Result<usize> {
    let g = t.group();
    let p = g.order();
    if !g.is_cyclic() || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(p)
}

/// Each residue joins independently with probability `q`.
pub fn sample_subset(p: usize, q: f64, rng: &mut RngStream) -> Result<SubsetBits> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("q = {q} outside [0, 1]")));
    }
    Ok(random_subset(&prime_group(p)?, q, rng))
}

/// `start, start + diff, …` with `len` terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progression {
    pub start: usize,
    pub diff: usize,
    pub len: usize,
}

impl Progression {
    pub fn terms(&self, modulus: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).map(move |i| (self.start + i * self.diff) % modulus)
    }
}

/// Longest run of `t` along the `d`-cycle, walking once from a non-member.
fn longest_run_mod(t: &SubsetBits, p: usize, d: usize, outside: usize) -> (usize, usize) {
    let (mut best, mut best_start) = (0, 0);
    let mut run = 0;
    let mut x = outside;
    for _ in 0..p {
        x += d;
        if x >= p {
            x -= p;
        }
        if t.contains(x) {
            run += 1;
            if run > best {
                best = run;
                best_start = (x + p - d * (run - 1) % p) % p;
            }
        } else {
            run = 0;
        }
    }
    (best, best_start)
}

/// Longest arithmetic progression inside `t ⊆ Z_p` with nonzero difference;
/// the whole group counts as length `p`.
pub fn longest_ap(t: &SubsetBits) -> Result<Progression> {
    let p = check_prime_cyclic(t)?;
    if t.is_full() {
        return Ok(Progression { start: 0, diff: 1, len: p });
    }
    if t.is_empty() {
        return Ok(Progression { start: 0, diff: 1, len: 0 });
    }
    let outside = (0..p).find(|&x| !t.contains(x)).expect("not full");
    let best = (1..=(p - 1) / 2)
        .into_par_iter()
        .map(|d| {
            let (len, start) = longest_run_mod(t, p, d, outside);
            Progression { start, diff: d, len }
        })
        .reduce(
            || Progression { start: t.iter().next().unwrap_or(0), diff: 1, len: 1 },
            |a, b| if b.len > a.len || (b.len == a.len && b.diff < a.diff) { b } else { a },
        );
    Ok(best)
}

/// Longest progression of integers (no wraparound) with positive
/// difference inside `t`, reading elements of `Z_m` as `0..m`.
pub fn longest_ap_integers(t: &SubsetBits) -> Progression {
    let m = t.order();
    let members = t.to_vec();
    if members.len() <= 1 {
        return Progression { start: members.first().copied().unwrap_or(0), diff: 1, len: members.len() };
    }
    (1..m)
        .into_par_iter()
        .map(|d| {
            let mut run = vec![0u32; m];
            let mut best = Progression { start: 0, diff: d, len: 0 };
            for x in 0..m {
                if t.contains(x) {
                    run[x] = if x >= d { run[x - d] + 1 } else { 1 };
                    if run[x] as usize > best.len {
                        best.len = run[x] as usize;
                        best.start = x - d * (best.len - 1);
                    }
                }
            }
            best
        })
        .reduce(
            || Progression { start: members[0], diff: 1, len: 1 },
            |a, b| if b.len > a.len || (b.len == a.len && b.diff < a.diff) { b } else { a },
        )
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApSample {
    pub p: usize,
    pub q: f64,
    pub a: SubsetBits,
    pub sumset: SubsetBits,
    pub ap: Progression,
    pub seed: u64,
}

impl ApSample {
    pub fn draw(p: usize, q: f64, rng: &mut RngStream) -> Result<Self> {
        let a = sample_subset(p, q, rng)?;
        let s = sumset(&a, &a)?;
        let ap = longest_ap(&s)?;
        Ok(Self {
            p,
            q,
            a,
            sumset: s,
            ap,
            seed: rng.seed(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApRow {
    pub trial: usize,
    pub size_a: usize,
    pub size_sum: usize,
    pub ap_len: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApScan {
    pub p: usize,
    pub q: f64,
    /// `Some(n)` for the interval variant `A ⊆ {0, …, n-1}`.
    pub interval_n: Option<usize>,
    pub log2_scale: f64,
    pub rows: Vec<ApRow>,
    pub min: usize,
    pub median: f64,
    pub max: usize,
}

fn median_of(sorted: &[usize]) -> f64 {
    let k = sorted.len();
    if k % 2 == 1 {
        sorted[k / 2] as f64
    } else {
        (sorted[k / 2 - 1] + sorted[k / 2]) as f64 / 2.0
    }
}

/// Per trial `t` (stream `rng.split(t)`): `|A|`, `|A + A|`, `ap(A + A)` and
/// its ratio to `log₂ p`. With `interval_n = Some(n)` the set lives in
/// `{0, …, n-1}`, embedded in `Z_{2n+1}` so sums never wrap, and the ratio
/// uses `log₂ n`.
pub fn ap_scan(p: usize, q: f64, trials: usize, rng: &RngStream, interval_n: Option<usize>) -> Result<ApScan> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("q = {q} outside [0, 1]")));
    }
    let (modulus, scale) = match interval_n {
        None => {
            prime_group(p)?;
            (p, (p as f64).log2())
        }
        Some(n) if n >= 2 => (2 * n + 1, (n as f64).log2()),
        Some(_) => return Err(Error::InvalidParameter("interval length must be at least 2".into())),
    };
    let g = make_group(&[modulus])?;
    let rows: Vec<ApRow> = (0..trials)
        .map(|trial| {
            let mut r = rng.split(trial as u64);
            let a = match interval_n {
                None => random_subset(&g, q, &mut r),
                Some(n) => SubsetBits::from_fn(&g, |x| x < n && r.bernoulli(q)),
            };
            let s = sumset(&a, &a)?;
            let ap = match interval_n {
                None => longest_ap(&s)?,
                Some(_) => longest_ap_integers(&s),
            };
            Ok(ApRow {
                trial,
                size_a: a.len(),
                size_sum: s.len(),
                ap_len: ap.len,
                ratio: ap.len as f64 / scale,
            })
        })
        .collect::<Result<_>>()?;
    let mut lens: Vec<usize> = rows.iter().map(|r| r.ap_len).collect();
    lens.sort_unstable();
    Ok(ApScan {
        p: if interval_n.is_some() { modulus } else { p },
        q,
        interval_n,
        log2_scale: scale,
        min: lens[0],
        median: median_of(&lens),
        max: lens[lens.len() - 1],
        rows,
    })
}

pub fn write_ap_csv<W: Write>(scan: &ApScan, mut w: W) -> std::io::Result<()> {
    writeln!(w, "trial,size_a,size_sum,ap_len,ap_len_over_log2")?;
    for r in &scan.rows {
        writeln!(w, "{},{},{},{},{}", r.trial, r.size_a, r.size_sum, r.ap_len, fmt12(r.ratio))?;
    }
    Ok(())
}

/// Probability that a fixed element of `Z_p` (odd `p`) misses `A + A`:
/// `(1 - q)(1 - q^2)^{(p-1)/2}`.
pub fn miss_probability(p: usize, q: f64) -> Result<f64> {
    if p < 3 || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("q = {q} outside [0, 1]")));
    }
    Ok((1.0 - q) * (1.0 - q * q).powi(((p - 1) / 2) as i32))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub trials: usize,
    pub hits: usize,
    pub frequency: f64,
    /// Binomial standard error at the reference probability.
    pub sigma: f64,
    pub reference: f64,
}

impl MonteCarlo {
    pub fn z_score(&self) -> f64 {
        if self.sigma == 0.0 {
            if self.frequency == self.reference { 0.0 } else { f64::INFINITY }
        } else {
            (self.frequency - self.reference) / self.sigma
        }
    }
}

/// Frequency of `0 ∉ A + A` over independent full samples of `A`.
pub fn miss_probability_mc(p: usize, q: f64, trials: usize, rng: &RngStream) -> Result<MonteCarlo> {
    let reference = miss_probability(p, q)?;
    let g = prime_group(p)?;
    let hits = (0..trials)
        .filter(|&t| {
            let a = random_subset(&g, q, &mut rng.split(t as u64));
            let hit = a.iter().any(|x| a.contains(g.neg(x)));
            !hit
        })
        .count();
    Ok(MonteCarlo {
        trials,
        hits,
        frequency: hits as f64 / trials as f64,
        sigma: (reference * (1.0 - reference) / trials as f64).sqrt(),
        reference,
    })
}

/// A length-`k` progression (difference at most `(p-1)/2`) holding at least
/// five members of `a`, if any.
pub fn five_in_short_ap(a: &SubsetBits, k: usize) -> Result<Option<Progression>> {
    let p = check_prime_cyclic(a)?;
    if k > p {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds p = {p}")));
    }
    if a.len() < 5 || k < 5 {
        return Ok(None);
    }
    let found = (1..=(p - 1) / 2).into_par_iter().find_map_first(|d| {
        // window over x_j = j d for j in 0..p + k - 1
        let at = |j: usize| a.contains(j * d % p);
        let mut count = (0..k).filter(|&j| at(j)).count();
        for s in 0..p {
            if count >= 5 {
                return Some(Progression { start: s * d % p, diff: d, len: k });
            }
            count = count + at(s + k) as usize - at(s) as usize;
        }
        None
    });
    Ok(found)
}

/// Union bound on the event above: number of progressions times
/// `C(k, 5) q^5`, next to the cruder `p² k⁵ q⁵`.
pub fn five_in_short_ap_bound(p: usize, k: usize, q: f64) -> (f64, f64) {
    let pf = p as f64;
    let kf = k as f64;
    let choose5 = if k >= 5 {
        (0..5).map(|i| (kf - i as f64) / (i + 1) as f64).product::<f64>()
    } else {
        0.0
    };
    (pf * (pf - 1.0) / 2.0 * choose5 * q.powi(5), pf * pf * kf.powi(5) * q.powi(5))
}

/// `p² / 2^{k+1}`.
pub fn first_moment_mu(p: f64, k: f64) -> Result<f64> {
    if k < 1.0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    Ok(p * p / 2f64.powf(k + 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstMomentCount {
    pub p: usize,
    pub k: usize,
    pub progressions: u64,
    /// All choices of one unordered summing pair per term.
    pub raw_choices: u64,
    /// Choices with all `2k` elements distinct and all their pairwise sums
    /// distinct.
    pub valid: u64,
    /// `(p²/2)((p-1)/2)^k`.
    pub reference: f64,
    pub deficit: f64,
    pub relative_deviation: f64,
    /// `valid · q^{2k}` at `q = p^{-1/2}`.
    pub expectation: f64,
}

pub const DEFAULT_ENUMERATION_BUDGET: u64 = 100_000_000;

/// Counts the indicator family: progressions `P` of `k` terms with
/// difference below `p/2`, and sequences of unordered pairs `{c, c'}` with
/// `c ≠ c'` and `c + c' = b_i`, subject to the distinctness conditions.
pub fn first_moment_exact(p: usize, k: usize, budget: u64) -> Result<FirstMomentCount> {
    if !is_prime(p) || p < 3 {
        return Err(Error::NotPrime(p));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let half = (p - 1) / 2;
    let diffs = if k == 1 { 1 } else { half };
    let progressions = (p * diffs) as u64;
    let per_term = (half as u64).checked_pow(k as u32);
    let raw = per_term.and_then(|x| x.checked_mul(progressions));
    let raw = match raw {
        Some(r) if r <= budget => r,
        _ => return Err(Error::InvalidParameter(format!("enumeration of ({p}, {k}) exceeds budget {budget}"))),
    };
    let mut valid = 0u64;
    let mut elems = vec![0usize; 2 * k];
    for b1 in 0..p {
        for d in 1..=diffs {
            let terms: Vec<usize> = (0..k).map(|i| (b1 + i * d) % p).collect();
            // pair index j in 0..half for each term: c = smaller member
            let pairs: Vec<Vec<(usize, usize)>> = terms
                .iter()
                .map(|&b| {
                    (0..p)
                        .filter_map(|c| {
                            let c2 = (b + p - c) % p;
                            (c < c2).then_some((c, c2))
                        })
                        .collect()
                })
                .collect();
            let mut idx = vec![0usize; k];
            loop {
                for i in 0..k {
                    let (x, y) = pairs[i][idx[i]];
                    elems[2 * i] = x;
                    elems[2 * i + 1] = y;
                }
                if all_distinct_with_sums(&elems, p) {
                    valid += 1;
                }
                let mut i = 0;
                while i < k {
                    idx[i] += 1;
                    if idx[i] < half {
                        break;
                    }
                    idx[i] = 0;
                    i += 1;
                }
                if i == k {
                    break;
                }
            }
        }
    }
    let pf = p as f64;
    let reference = pf * pf / 2.0 * ((pf - 1.0) / 2.0).powi(k as i32);
    Ok(FirstMomentCount {
        p,
        k,
        progressions,
        raw_choices: raw,
        valid,
        reference,
        deficit: reference - valid as f64,
        relative_deviation: (valid as f64 - reference).abs() / reference,
        expectation: valid as f64 * pf.powi(-(k as i32)),
    })
}

fn all_distinct_with_sums(elems: &[usize], p: usize) -> bool {
    let mut seen = vec![false; p];
    for &e in elems {
        if seen[e] {
            return false;
        }
        seen[e] = true;
    }
    let mut sums = vec![false; p];
    for i in 0..elems.len() {
        for j in i + 1..elems.len() {
            let s = (elems[i] + elems[j]) % p;
            if sums[s] {
                return false;
            }
            sums[s] = true;
        }
    }
    true
}
