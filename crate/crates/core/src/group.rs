//! Finite abelian groups, bitset subsets and sumset algebra.
//!
//! A group is a product `Z_{n_0} x ... x Z_{n_{k-1}}` of cyclic factors.
//! Elements are encoded as mixed-radix integers in `[0, n)` with the first
//! factor as the least significant digit:
//! `code(x) = x_0 + n_0 * (x_1 + n_1 * (x_2 + ...))`.
//! Characters of the dual group use the same encoding.
//!
//! Subsets are bit-vectors over codes. Translating a subset by a group
//! element moves whole runs of the first cyclic factor at a time, so
//! `sumset` costs `O(min(|A|, |B|) * n / 64)` word operations when the first
//! factor is at least a word wide.

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

pub const DEFAULT_MAX_ORDER: usize = 1 << 26;

/// Below this first-factor length translations are done element by element.
const SEGMENT_MIN_FACTOR: usize = 32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupDescriptor {
    factors: Vec<usize>,
    strides: Vec<usize>,
    order: usize,
}

/// Shared handle to a group; subsets hold one of these.
pub type Group = Arc<GroupDescriptor>;

/// Builds `Z_{factors[0]} x ... ` with the default order cap.
pub fn make_group(factors: &[usize]) -> Result<Group> {
    GroupDescriptor::with_max_order(factors, DEFAULT_MAX_ORDER).map(Arc::new)
}

impl GroupDescriptor {
    pub fn with_max_order(factors: &[usize], max_order: usize) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::EmptyFactors);
        }
        let mut strides = Vec::with_capacity(factors.len());
        let mut order: usize = 1;
        for &f in factors {
            if f < 2 {
                return Err(Error::FactorTooSmall(f));
            }
            strides.push(order);
            order = order
                .checked_mul(f)
                .filter(|&o| o <= max_order)
                .ok_or(Error::OrderTooLarge { max: max_order })?;
        }
        Ok(Self {
            factors: factors.to_vec(),
            strides,
            order,
        })
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn stride(&self, j: usize) -> usize {
        self.strides[j]
    }

    pub fn is_cyclic(&self) -> bool {
        self.factors.len() == 1
    }

    /// Encodes a digit tuple; each digit is reduced modulo its factor.
    pub fn encode(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.factors.len());
        digits
            .iter()
            .zip(&self.factors)
            .zip(&self.strides)
            .map(|((&d, &f), &s)| (d % f) * s)
            .sum()
    }

    pub fn decode(&self, code: usize) -> Vec<usize> {
        self.factors
            .iter()
            .zip(&self.strides)
            .map(|(&f, &s)| (code / s) % f)
            .collect()
    }

    #[inline]
    pub fn digit(&self, code: usize, j: usize) -> usize {
        (code / self.strides[j]) % self.factors[j]
    }

    #[inline]
    pub fn add(&self, x: usize, y: usize) -> usize {
        if self.factors.len() == 1 {
            let s = x + y;
            return if s >= self.order { s - self.order } else { s };
        }
        let mut code = 0;
        for (&f, &s) in self.factors.iter().zip(&self.strides) {
            let d = (x / s) % f + (y / s) % f;
            code += if d >= f { d - f } else { d } * s;
        }
        code
    }

    #[inline]
    pub fn neg(&self, x: usize) -> usize {
        if self.factors.len() == 1 {
            return if x == 0 { 0 } else { self.order - x };
        }
        let mut code = 0;
        for (&f, &s) in self.factors.iter().zip(&self.strides) {
            let d = (x / s) % f;
            code += if d == 0 { 0 } else { f - d } * s;
        }
        code
    }

    #[inline]
    pub fn sub(&self, x: usize, y: usize) -> usize {
        self.add(x, self.neg(y))
    }

    /// `x + x`.
    #[inline]
    pub fn double(&self, x: usize) -> usize {
        self.add(x, x)
    }

    /// Phase of `chi_t(x)` as an integer multiple of `1/n`:
    /// `chi_t(x) = exp(2 pi i k / n)` with `k = sum_j t_j x_j n / n_j mod n`.
    pub fn pairing(&self, t: usize, x: usize) -> usize {
        let n = self.order as u128;
        let mut k: u128 = 0;
        for (&f, &s) in self.factors.iter().zip(&self.strides) {
            let tj = ((t / s) % f) as u128;
            let xj = ((x / s) % f) as u128;
            k = (k + tj * xj % f as u128 * (n / f as u128)) % n;
        }
        k as usize
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|n| format!("Z_{n}")).collect();
        f.write_str(&parts.join(" x "))
    }
}

fn same_group(a: &Group, b: &Group) -> Result<()> {
    if Arc::ptr_eq(a, b) || a.factors == b.factors {
        Ok(())
    } else {
        Err(Error::GroupMismatch {
            left: a.factors.clone(),
            right: b.factors.clone(),
        })
    }
}

/// A subset of a finite abelian group stored as a bit-vector over element
/// codes, with the cardinality cached.
#[derive(Clone)]
pub struct SubsetBits {
    group: Group,
    words: Vec<u64>,
    card: usize,
}

impl PartialEq for SubsetBits {
    fn eq(&self, other: &Self) -> bool {
        self.group.factors == other.group.factors && self.words == other.words
    }
}

impl Eq for SubsetBits {}

impl fmt::Debug for SubsetBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubsetBits")
            .field("group", &self.group.factors)
            .field("card", &self.card)
            .field("elements", &self.to_vec())
            .finish()
    }
}

#[inline]
fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

#[inline]
fn tail_mask(n: usize) -> u64 {
    match n % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Reads `cnt <= 64` bits starting at bit `pos`, returned in the low bits.
#[inline]
fn read_bits(src: &[u64], pos: usize, cnt: usize) -> u64 {
    let w = pos / 64;
    let b = pos % 64;
    let mut v = src[w] >> b;
    if b != 0 && b + cnt > 64 {
        v |= src[w + 1] << (64 - b);
    }
    if cnt < 64 {
        v &= (1u64 << cnt) - 1;
    }
    v
}

/// ORs `len` bits of `src` starting at `src_off` into `dst` at `dst_off`.
fn or_bit_range(dst: &mut [u64], dst_off: usize, src: &[u64], src_off: usize, len: usize) {
    let mut done = 0;
    while done < len {
        let d = dst_off + done;
        let bi = d % 64;
        let take = (64 - bi).min(len - done);
        dst[d / 64] |= read_bits(src, src_off + done, take) << bi;
        done += take;
    }
}

impl SubsetBits {
    pub fn empty(group: &Group) -> Self {
        Self {
            group: group.clone(),
            words: vec![0; word_count(group.order())],
            card: 0,
        }
    }

    pub fn full(group: &Group) -> Self {
        let n = group.order();
        let mut words = vec![u64::MAX; word_count(n)];
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(n);
        }
        Self {
            group: group.clone(),
            words,
            card: n,
        }
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(group: &Group, elements: I) -> Result<Self> {
        let n = group.order();
        let mut words = vec![0u64; word_count(n)];
        for x in elements {
            if x >= n {
                return Err(Error::ElementOutOfRange { code: x, order: n });
            }
            words[x / 64] |= 1 << (x % 64);
        }
        Ok(Self::from_words(group.clone(), words))
    }

    pub fn from_fn(group: &Group, mut pred: impl FnMut(usize) -> bool) -> Self {
        let n = group.order();
        let mut words = vec![0u64; word_count(n)];
        for x in 0..n {
            if pred(x) {
                words[x / 64] |= 1 << (x % 64);
            }
        }
        Self::from_words(group.clone(), words)
    }

    /// Subgroup generated by a single element.
    pub fn cyclic_subgroup(group: &Group, generator: usize) -> Result<Self> {
        let mut elems = vec![0usize];
        let mut x = generator % group.order();
        while x != 0 {
            elems.push(x);
            x = group.add(x, generator);
        }
        Self::from_elements(group, elems)
    }

    pub(crate) fn from_words(group: Group, mut words: Vec<u64>) -> Self {
        let n = group.order();
        debug_assert_eq!(words.len(), word_count(n));
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(n);
        }
        let card = words.iter().map(|w| w.count_ones() as usize).sum();
        Self { group, words, card }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// Cardinality.
    pub fn len(&self) -> usize {
        self.card
    }

    pub fn is_empty(&self) -> bool {
        self.card == 0
    }

    pub fn is_full(&self) -> bool {
        self.card == self.group.order()
    }

    pub fn density(&self) -> f64 {
        self.card as f64 / self.group.order() as f64
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        x < self.group.order() && self.words[x / 64] >> (x % 64) & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Indicator as a real vector of length `n`.
    pub fn indicator(&self) -> Vec<f64> {
        (0..self.order()).map(|x| if self.contains(x) { 1.0 } else { 0.0 }).collect()
    }

    fn zip_words(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Result<Self> {
        same_group(&self.group, &other.group)?;
        let words = self.words.iter().zip(&other.words).map(|(&a, &b)| op(a, b)).collect();
        Ok(Self::from_words(self.group.clone(), words))
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a & b)
    }

    /// Set difference `self \ other`.
    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.zip_words(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Self {
        let words = self.words.iter().map(|w| !w).collect();
        Self::from_words(self.group.clone(), words)
    }

    pub fn is_subset_of(&self, other: &Self) -> Result<bool> {
        Ok(self.first_not_in(other)?.is_none())
    }

    /// Smallest element of `self` missing from `other`, if any.
    pub fn first_not_in(&self, other: &Self) -> Result<Option<usize>> {
        same_group(&self.group, &other.group)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .enumerate()
            .find_map(|(i, (&a, &b))| {
                let d = a & !b;
                (d != 0).then(|| i * 64 + d.trailing_zeros() as usize)
            }))
    }

    pub fn is_disjoint(&self, other: &Self) -> Result<bool> {
        same_group(&self.group, &other.group)?;
        Ok(self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0))
    }

    pub fn with(&self, x: usize) -> Result<Self> {
        let n = self.order();
        if x >= n {
            return Err(Error::ElementOutOfRange { code: x, order: n });
        }
        let mut words = self.words.clone();
        words[x / 64] |= 1 << (x % 64);
        Ok(Self::from_words(self.group.clone(), words))
    }

    pub fn without(&self, x: usize) -> Self {
        let mut words = self.words.clone();
        if x < self.order() {
            words[x / 64] &= !(1 << (x % 64));
        }
        Self::from_words(self.group.clone(), words)
    }

    /// `self + a`.
    pub fn translate(&self, a: usize) -> Self {
        let mut words = vec![0u64; self.words.len()];
        or_translated(&mut words, self, a % self.order());
        Self::from_words(self.group.clone(), words)
    }

    /// `-self`.
    pub fn negate(&self) -> Self {
        let g = &self.group;
        let mut words = vec![0u64; self.words.len()];
        for x in self.iter() {
            let y = g.neg(x);
            words[y / 64] |= 1 << (y % 64);
        }
        Self::from_words(g.clone(), words)
    }

    /// Hex encoding of the bit-vector, little-endian bit order: bit `i`
    /// is bit `i % 8` of byte `i / 8`.
    pub fn to_hex(&self) -> String {
        let nbytes = self.order().div_ceil(8);
        let bytes: Vec<u8> = self.words.iter().flat_map(|w| w.to_le_bytes()).take(nbytes).collect();
        hex::encode(bytes)
    }

    pub fn from_hex(group: &Group, s: &str) -> Result<Self> {
        let n = group.order();
        let bytes = hex::decode(s).map_err(|e| Error::Decode(e.to_string()))?;
        if bytes.len() != n.div_ceil(8) {
            return Err(Error::Decode(format!(
                "expected {} bytes for order {n}, got {}",
                n.div_ceil(8),
                bytes.len()
            )));
        }
        let mut words = vec![0u64; word_count(n)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        if words.last().is_some_and(|&w| w & !tail_mask(n) != 0) {
            return Err(Error::Decode("bits set beyond the group order".into()));
        }
        Ok(Self::from_words(group.clone(), words))
    }
}

/// ORs `src + a` into `dst`.
fn or_translated(dst: &mut [u64], src: &SubsetBits, a: usize) {
    let g = &*src.group;
    let n0 = g.factors[0];
    if g.factors.len() >= 6 && g.factors[..6].iter().all(|&f| f == 2) {
        // each word is a coset of the leading Z_2^6: permute words, then
        // flip bit positions by the low digits of `a`
        let low = a & 63;
        let high = a & !63;
        let binary = g.factors.iter().all(|&f| f == 2);
        for (h, &w) in src.words.iter().enumerate() {
            if w == 0 {
                continue;
            }
            let t = if binary {
                h ^ (high >> 6)
            } else {
                g.add(h << 6, high) >> 6
            };
            dst[t] |= xor_permute(w, low);
        }
    } else if g.factors.len() == 1 || n0 >= SEGMENT_MIN_FACTOR {
        let a0 = a % n0;
        let rows = g.order / n0;
        let upper_shift = a - a0;
        for r in 0..rows {
            let t = if upper_shift == 0 {
                r
            } else {
                g.add(r * n0, upper_shift) / n0
            };
            let (s, d) = (r * n0, t * n0);
            or_bit_range(dst, d + a0, &src.words, s, n0 - a0);
            if a0 > 0 {
                or_bit_range(dst, d, &src.words, s + n0 - a0, a0);
            }
        }
    } else {
        for x in src.iter() {
            let y = g.add(x, a);
            dst[y / 64] |= 1 << (y % 64);
        }
    }
}

/// Moves bit `i` to bit `i ^ low`.
#[inline]
fn xor_permute(mut w: u64, low: usize) -> u64 {
    const MASKS: [u64; 6] = [
        0x5555_5555_5555_5555,
        0x3333_3333_3333_3333,
        0x0f0f_0f0f_0f0f_0f0f,
        0x00ff_00ff_00ff_00ff,
        0x0000_ffff_0000_ffff,
        0x0000_0000_ffff_ffff,
    ];
    for (k, m) in MASKS.iter().enumerate() {
        if low >> k & 1 == 1 {
            let s = 1 << k;
            w = (w & m) << s | (w >> s) & m;
        }
    }
    w
}

/// `A + B = {a + b}`: the union over the smaller operand of translates of
/// the larger one; stops early once the result is the whole group.
pub fn sumset(a: &SubsetBits, b: &SubsetBits) -> Result<SubsetBits> {
    same_group(&a.group, &b.group)?;
    let (small, large) = if a.card <= b.card { (a, b) } else { (b, a) };
    let n = a.order();
    let mut words = vec![0u64; a.words.len()];
    for (i, x) in small.iter().enumerate() {
        or_translated(&mut words, large, x);
        if i % 8 == 7 && words.iter().map(|w| w.count_ones() as usize).sum::<usize>() == n {
            break;
        }
    }
    Ok(SubsetBits::from_words(a.group.clone(), words))
}

/// `A - A = {a - b}`.
pub fn difference_set(a: &SubsetBits) -> SubsetBits {
    sumset(a, &a.negate()).expect("same group")
}

/// Sizes of `A`, `A+A`, `A-A` and the exact doubling ratios.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoublingReport {
    pub size_a: usize,
    pub size_sum: usize,
    pub size_diff: usize,
    pub k_sum: Ratio<u64>,
    pub k_diff: Ratio<u64>,
}

impl DoublingReport {
    pub fn k_sum_f64(&self) -> f64 {
        self.size_sum as f64 / self.size_a as f64
    }

    pub fn k_diff_f64(&self) -> f64 {
        self.size_diff as f64 / self.size_a as f64
    }
}

pub fn doubling(a: &SubsetBits) -> Result<DoublingReport> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let size_sum = sumset(a, a)?.len();
    let size_diff = difference_set(a).len();
    let size_a = a.len();
    Ok(DoublingReport {
        size_a,
        size_sum,
        size_diff,
        k_sum: Ratio::new(size_sum as u64, size_a as u64),
        k_diff: Ratio::new(size_diff as u64, size_a as u64),
    })
}

/// Each element included independently with probability `density`.
pub fn random_subset(group: &Group, density: f64, rng: &mut crate::RngStream) -> SubsetBits {
    SubsetBits::from_fn(group, |_| rng.bernoulli(density))
}

/// Uniformly random subset of exactly `size` elements.
pub fn random_subset_of_size(group: &Group, size: usize, rng: &mut crate::RngStream) -> SubsetBits {
    use rand::seq::index::sample;
    let n = group.order();
    let picked = sample(rng, n, size.min(n));
    SubsetBits::from_elements(group, picked.into_iter()).expect("indices below n")
}

#[derive(Serialize, Deserialize)]
struct SubsetWire {
    factors: Vec<usize>,
    bits: String,
}

impl Serialize for SubsetBits {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SubsetWire {
            factors: self.group.factors.clone(),
            bits: self.to_hex(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SubsetBits {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = SubsetWire::deserialize(deserializer)?;
        let group = make_group(&wire.factors).map_err(D::Error::custom)?;
        SubsetBits::from_hex(&group, &wire.bits).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RngStream;
    use proptest::prelude::*;

    fn set(g: &Group, xs: &[usize]) -> SubsetBits {
        SubsetBits::from_elements(g, xs.iter().copied()).unwrap()
    }

    fn naive_sumset(a: &SubsetBits, b: &SubsetBits) -> SubsetBits {
        let g = a.group();
        let mut out = vec![];
        for x in a.iter() {
            for y in b.iter() {
                out.push(g.add(x, y));
            }
        }
        SubsetBits::from_elements(g, out).unwrap()
    }

    #[test]
    fn make_group_examples() {
        assert_eq!(make_group(&[8]).unwrap().order(), 8);
        assert_eq!(make_group(&[2, 2, 2]).unwrap().order(), 8);
        assert_eq!(make_group(&[3, 81]).unwrap().order(), 243);
    }

    #[test]
    fn make_group_errors() {
        assert!(matches!(make_group(&[]), Err(Error::EmptyFactors)));
        assert!(matches!(make_group(&[4, 1]), Err(Error::FactorTooSmall(1))));
        assert!(matches!(make_group(&[1 << 14, 1 << 13]), Err(Error::OrderTooLarge { .. })));
        assert!(GroupDescriptor::with_max_order(&[16, 16], 255).is_err());
        assert!(GroupDescriptor::with_max_order(&[16, 16], 256).is_ok());
    }

    #[test]
    fn encode_decode_bijective() {
        let g = make_group(&[3, 4, 5]).unwrap();
        for code in 0..g.order() {
            assert_eq!(g.encode(&g.decode(code)), code);
        }
        assert_eq!(g.encode(&[1, 0, 0]), 1);
        assert_eq!(g.encode(&[0, 1, 0]), 3);
        assert_eq!(g.encode(&[0, 0, 1]), 12);
    }

    #[test]
    fn group_axioms_small() {
        let g = make_group(&[2, 3, 4]).unwrap();
        let n = g.order();
        for x in 0..n {
            assert_eq!(g.add(x, g.neg(x)), 0);
            for y in 0..n {
                assert_eq!(g.add(x, y), g.add(y, x));
                for z in (0..n).step_by(5) {
                    assert_eq!(g.add(x, g.add(y, z)), g.add(g.add(x, y), z));
                }
            }
        }
    }

    #[test]
    fn sumset_examples() {
        let g = make_group(&[5]).unwrap();
        let a = set(&g, &[0, 1]);
        assert_eq!(sumset(&a, &a).unwrap().to_vec(), vec![0, 1, 2]);
        let e = SubsetBits::empty(&g);
        assert!(sumset(&e, &e).unwrap().is_empty());
        assert!(sumset(&e, &a).unwrap().is_empty());

        let g = make_group(&[12]).unwrap();
        let h = SubsetBits::cyclic_subgroup(&g, 3).unwrap();
        assert_eq!(h.to_vec(), vec![0, 3, 6, 9]);
        assert_eq!(sumset(&h, &h).unwrap(), h);
    }

    #[test]
    fn sumset_group_mismatch() {
        let a = SubsetBits::full(&make_group(&[4]).unwrap());
        let b = SubsetBits::full(&make_group(&[2, 2]).unwrap());
        assert!(matches!(sumset(&a, &b), Err(Error::GroupMismatch { .. })));
    }

    #[test]
    fn difference_set_examples() {
        let g = make_group(&[7]).unwrap();
        assert_eq!(difference_set(&set(&g, &[0, 2])).to_vec(), vec![0, 2, 5]);
        assert!(difference_set(&SubsetBits::empty(&g)).is_empty());
        assert_eq!(difference_set(&set(&g, &[4])).to_vec(), vec![0]);
    }

    #[test]
    fn doubling_examples() {
        let g = make_group(&[100]).unwrap();
        let r = doubling(&set(&g, &[0, 1, 2, 3])).unwrap();
        assert_eq!(r.k_sum, Ratio::new(7, 4));
        assert_eq!(r.size_diff, 7);

        let g = make_group(&[2, 8]).unwrap();
        let idx2 = SubsetBits::from_fn(&g, |x| g.digit(x, 0) == 0);
        assert_eq!(idx2.len(), 8);
        assert_eq!(doubling(&idx2).unwrap().k_sum, Ratio::from_integer(1));

        assert!(matches!(doubling(&SubsetBits::empty(&g)), Err(Error::EmptySet)));
    }

    #[test]
    fn doubling_random_z64_matches_pairs() {
        let g = make_group(&[64]).unwrap();
        let mut rng = RngStream::new(11);
        let a = random_subset_of_size(&g, 16, &mut rng);
        let mut sums = std::collections::BTreeSet::new();
        for x in a.iter() {
            for y in a.iter() {
                sums.insert((x + y) % 64);
            }
        }
        let r = doubling(&a).unwrap();
        assert_eq!(r.size_sum, sums.len());
        assert_eq!(r.k_sum, Ratio::new(sums.len() as u64, 16));
    }

    #[test]
    fn translate_matches_elementwise_for_all_layouts() {
        let mut rng = RngStream::new(3);
        for factors in [
            vec![70],
            vec![64, 3],
            vec![33, 5],
            vec![2, 2, 2, 2, 2],
            vec![3, 81],
            vec![5, 40],
            vec![2; 6],
            vec![2; 9],
            vec![2, 2, 2, 2, 2, 2, 3, 5],
        ] {
            let g = make_group(&factors).unwrap();
            let a = random_subset(&g, 0.3, &mut rng);
            for shift in [0, 1, g.order() / 3, g.order() - 1] {
                let expect = SubsetBits::from_elements(&g, a.iter().map(|x| g.add(x, shift))).unwrap();
                assert_eq!(a.translate(shift), expect, "factors {factors:?} shift {shift}");
            }
        }
    }

    #[test]
    fn hex_roundtrip_and_bit_order() {
        let g = make_group(&[12]).unwrap();
        let a = set(&g, &[0, 9]);
        assert_eq!(a.to_hex(), "0102");
        assert_eq!(SubsetBits::from_hex(&g, "0102").unwrap(), a);
        assert!(SubsetBits::from_hex(&g, "01").is_err());
        assert!(SubsetBits::from_hex(&g, "0110").is_err());
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"factors":[12],"bits":"0102"}"#);
        let back: SubsetBits = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }

    fn arb_group() -> impl Strategy<Value = Vec<usize>> {
        prop_oneof![
            (2usize..=300).prop_map(|n| vec![n]),
            (2usize..=40, 2usize..=40).prop_map(|(a, b)| vec![a, b]),
            (1usize..=10).prop_map(|d| vec![2; d]),
            (2usize..=6, 2usize..=6, 2usize..=6).prop_map(|(a, b, c)| vec![a, b, c]),
        ]
    }

    proptest! {
        #[test]
        fn sumset_matches_naive(factors in arb_group(), seed in any::<u64>(), da in 0.0f64..0.6, db in 0.0f64..0.6) {
            let g = make_group(&factors).unwrap();
            let mut rng = RngStream::new(seed);
            let a = random_subset(&g, da, &mut rng);
            let b = random_subset(&g, db, &mut rng);
            let s = sumset(&a, &b).unwrap();
            prop_assert_eq!(&s, &naive_sumset(&a, &b));
            prop_assert_eq!(&s, &sumset(&b, &a).unwrap());
        }

        #[test]
        fn difference_set_symmetric(factors in arb_group(), seed in any::<u64>(), d in 0.0f64..0.5) {
            let g = make_group(&factors).unwrap();
            let a = random_subset(&g, d, &mut RngStream::new(seed));
            let dset = difference_set(&a);
            prop_assert_eq!(&dset.negate(), &dset);
            prop_assert_eq!(dset.contains(0), !a.is_empty());
        }

        #[test]
        fn sumset_monotone_and_contains_a_when_zero_in_a(factors in arb_group(), seed in any::<u64>(), d in 0.0f64..0.4) {
            let g = make_group(&factors).unwrap();
            let mut rng = RngStream::new(seed);
            let a = random_subset(&g, d, &mut rng);
            let extra = random_subset(&g, 0.1, &mut rng);
            let a2 = a.union(&extra).unwrap();
            prop_assert!(sumset(&a, &a).unwrap().is_subset_of(&sumset(&a2, &a2).unwrap()).unwrap());
            let a0 = a.with(0).unwrap();
            prop_assert!(a0.is_subset_of(&sumset(&a0, &a0).unwrap()).unwrap());
        }

        #[test]
        fn hex_roundtrip(factors in arb_group(), seed in any::<u64>()) {
            let g = make_group(&factors).unwrap();
            let a = random_subset(&g, 0.5, &mut RngStream::new(seed));
            prop_assert_eq!(SubsetBits::from_hex(&g, &a.to_hex()).unwrap(), a);
        }
    }
}
