//! Random Cayley graphs `Γ(G;S)` (edges `y - x ∈ S`) and Cayley-sum graphs
//! `Γ⁺(G;S)` (edges `x + y ∈ S`), their independence numbers, and the
//! union-bound estimate for the probability that `α(Γ) > s`.
//!
//! Loop conventions: in a difference graph `0 ∈ S` would put a loop on
//! every vertex; by default the zero difference is ignored (simple graph on
//! distinct vertices). In a sum graph `x` carries a loop when `2x ∈ S`; by
//! default looped vertices cannot be in an independent set, so that
//! "`B + B` disjoint from `S`" is exactly "`B` independent". Both defaults can
//! be flipped with [`LoopConvention`].

use std::collections::BinaryHeap;
use std::cmp::Reverse;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::group::{difference_set, sumset, Group, SubsetBits};
use crate::report::fmt12;
use crate::{Error, Result, RngStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Difference,
    Sum,
}

impl std::str::FromStr for GraphKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "difference" | "diff" | "cayley" => Ok(GraphKind::Difference),
            "sum" | "cayley-sum" => Ok(GraphKind::Sum),
            other => Err(Error::InvalidParameter(format!("unknown graph kind {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopConvention {
    /// Loops are ignored; only edges between distinct vertices count.
    Ignore,
    /// A looped vertex is adjacent to itself and never independent.
    Block,
}

impl LoopConvention {
    pub fn default_for(kind: GraphKind) -> Self {
        match kind {
            GraphKind::Difference => LoopConvention::Ignore,
            GraphKind::Sum => LoopConvention::Block,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CayleyInstance {
    pub kind: GraphKind,
    pub loops: LoopConvention,
    pub generators: SubsetBits,
    pub p: f64,
    pub seed: u64,
}

impl CayleyInstance {
    pub fn new(kind: GraphKind, generators: SubsetBits, loops: LoopConvention) -> Result<Self> {
        if kind == GraphKind::Difference && generators.negate() != generators {
            return Err(Error::InvalidParameter("difference-graph generators must satisfy S = -S".into()));
        }
        Ok(Self {
            kind,
            loops,
            generators,
            p: f64::NAN,
            seed: 0,
        })
    }

    pub fn group(&self) -> &Group {
        self.generators.group()
    }

    pub fn order(&self) -> usize {
        self.generators.order()
    }

    pub fn with_loops(mut self, loops: LoopConvention) -> Self {
        self.loops = loops;
        self
    }

    /// Edge between distinct `x`, `y`.
    #[inline]
    pub fn adjacent(&self, x: usize, y: usize) -> bool {
        if x == y {
            return self.has_blocking_loop(x);
        }
        let g = self.group();
        match self.kind {
            GraphKind::Difference => self.generators.contains(g.sub(y, x)),
            GraphKind::Sum => self.generators.contains(g.add(x, y)),
        }
    }

    /// The vertex cannot belong to an independent set.
    #[inline]
    pub fn has_blocking_loop(&self, x: usize) -> bool {
        if self.loops == LoopConvention::Ignore {
            return false;
        }
        match self.kind {
            GraphKind::Difference => self.generators.contains(0),
            GraphKind::Sum => self.generators.contains(self.group().double(x)),
        }
    }

    /// Neighbours of `x` other than `x` itself.
    pub fn neighbours(&self, x: usize) -> Vec<usize> {
        let g = self.group();
        let mut out: Vec<usize> = self
            .generators
            .iter()
            .map(|s| match self.kind {
                GraphKind::Difference => g.add(x, s),
                GraphKind::Sum => g.sub(s, x),
            })
            .filter(|&y| y != x)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// One uniform per generator class: `{x, -x}` for difference graphs (value
/// stored at every member), each element for sum graphs. `S(p) = {x : u_x < p}`
/// is then monotone in `p` for fixed uniforms.
pub fn class_uniforms(group: &Group, kind: GraphKind, rng: &mut RngStream) -> Vec<f64> {
    let n = group.order();
    let mut u = vec![0.0; n];
    for x in 0..n {
        match kind {
            GraphKind::Sum => u[x] = rng.uniform(),
            GraphKind::Difference => {
                let nx = group.neg(x);
                if x <= nx {
                    let v = rng.uniform();
                    u[x] = v;
                    u[nx] = v;
                }
            }
        }
    }
    u
}

pub fn instance_from_uniforms(group: &Group, kind: GraphKind, uniforms: &[f64], p: f64, seed: u64) -> CayleyInstance {
    let generators = SubsetBits::from_fn(group, |x| uniforms[x] < p);
    CayleyInstance {
        kind,
        loops: LoopConvention::default_for(kind),
        generators,
        p,
        seed,
    }
}

pub fn sample_cayley(group: &Group, p: f64, kind: GraphKind, rng: &mut RngStream) -> Result<CayleyInstance> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    let seed = rng.seed();
    let u = class_uniforms(group, kind, rng);
    Ok(instance_from_uniforms(group, kind, &u, p, seed))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Independence {
    Independent,
    /// `element ∈ S` is realised as `pair.1 - pair.0` or `pair.0 + pair.1`.
    Violated { element: usize, pair: (usize, usize) },
}

impl Independence {
    pub fn holds(&self) -> bool {
        matches!(self, Independence::Independent)
    }
}

fn distinct_sums(b: &SubsetBits) -> SubsetBits {
    let mut acc = SubsetBits::empty(b.group());
    for a in b.iter() {
        acc = acc.union(&b.without(a).translate(a)).expect("same group");
    }
    acc
}

pub fn is_independent(b: &SubsetBits, inst: &CayleyInstance) -> Result<Independence> {
    let s = &inst.generators;
    let g = inst.group();
    if b.is_empty() {
        return Ok(Independence::Independent);
    }
    if let Some(x) = b.iter().find(|&x| inst.has_blocking_loop(x)) {
        let element = match inst.kind {
            GraphKind::Difference => 0,
            GraphKind::Sum => g.double(x),
        };
        return Ok(Independence::Violated { element, pair: (x, x) });
    }
    let hits = match inst.kind {
        GraphKind::Difference => difference_set(b).without(0).intersection(s)?,
        GraphKind::Sum => match inst.loops {
            LoopConvention::Block => sumset(b, b)?.intersection(s)?,
            LoopConvention::Ignore => distinct_sums(b).intersection(s)?,
        },
    };
    let Some(element) = hits.iter().next() else {
        return Ok(Independence::Independent);
    };
    let pair = b
        .iter()
        .find_map(|x| {
            let y = match inst.kind {
                GraphKind::Difference => g.add(x, element),
                GraphKind::Sum => g.sub(element, x),
            };
            (y != x && b.contains(y)).then_some((x, y))
        })
        .or_else(|| b.iter().find(|&x| g.double(x) == element).map(|x| (x, x)))
        .expect("hit element has a representation");
    Ok(Independence::Violated { element, pair })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaMethod {
    Exact,
    Greedy,
    LocalSearch,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlphaReport {
    pub alpha: usize,
    pub method: AlphaMethod,
    pub witness: SubsetBits,
    /// Search nodes expanded by the exact solver.
    pub nodes: Option<u64>,
    #[serde(skip)]
    pub elapsed_secs: f64,
}

pub const DEFAULT_EXACT_CAP: usize = 64;

struct BitGraph {
    adj: Vec<u64>,
    allowed: u64,
}

impl BitGraph {
    fn of(inst: &CayleyInstance) -> Self {
        let n = inst.order();
        let mut adj = vec![0u64; n];
        let mut allowed = 0u64;
        for (x, row) in adj.iter_mut().enumerate() {
            if !inst.has_blocking_loop(x) {
                allowed |= 1 << x;
            }
            for y in inst.neighbours(x) {
                *row |= 1 << y;
            }
        }
        Self { adj, allowed }
    }
}

struct Search<'a> {
    graph: &'a BitGraph,
    best: u64,
    best_size: u32,
    nodes: u64,
}

impl Search<'_> {
    /// Branch and bound with a greedy clique-cover bound: an independent set
    /// meets each clique of the cover at most once.
    fn expand(&mut self, mut cand: u64, current: u64, size: u32) {
        self.nodes += 1;
        if cand == 0 {
            if size > self.best_size {
                self.best_size = size;
                self.best = current;
            }
            return;
        }
        let mut order = [0u8; 64];
        let mut bound = [0u32; 64];
        let mut len = 0;
        let mut uncovered = cand;
        let mut cliques = 0;
        while uncovered != 0 {
            cliques += 1;
            let mut q = uncovered;
            while q != 0 {
                let v = q.trailing_zeros() as usize;
                q &= self.graph.adj[v] & !(1 << v);
                uncovered &= !(1 << v);
                order[len] = v as u8;
                bound[len] = cliques;
                len += 1;
            }
        }
        for i in (0..len).rev() {
            if size + bound[i] <= self.best_size {
                return;
            }
            let v = order[i] as usize;
            let next = cand & !self.graph.adj[v] & !(1 << v);
            self.expand(next, current | 1 << v, size + 1);
            cand &= !(1 << v);
        }
    }
}

pub fn alpha_exact(inst: &CayleyInstance) -> Result<AlphaReport> {
    alpha_exact_capped(inst, DEFAULT_EXACT_CAP)
}

pub fn alpha_exact_capped(inst: &CayleyInstance, cap: usize) -> Result<AlphaReport> {
    let n = inst.order();
    if n > cap.min(64) {
        return Err(Error::CapExceeded { order: n, cap: cap.min(64) });
    }
    let start = Instant::now();
    let graph = BitGraph::of(inst);
    let seed = alpha_heuristic(inst, 0);
    let mut search = Search {
        graph: &graph,
        best: seed.witness.words()[0],
        best_size: seed.alpha as u32,
        nodes: 0,
    };
    search.expand(graph.allowed, 0, 0);
    let witness = SubsetBits::from_fn(inst.group(), |x| search.best >> x & 1 == 1);
    debug_assert!(is_independent(&witness, inst).unwrap().holds());
    Ok(AlphaReport {
        alpha: search.best_size as usize,
        method: AlphaMethod::Exact,
        witness,
        nodes: Some(search.nodes),
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

struct ListGraph {
    adj: Vec<Vec<u32>>,
    allowed: Vec<bool>,
}

impl ListGraph {
    fn of(inst: &CayleyInstance) -> Self {
        let n = inst.order();
        let adj = (0..n).map(|x| inst.neighbours(x).into_iter().map(|y| y as u32).collect()).collect();
        let allowed = (0..n).map(|x| !inst.has_blocking_loop(x)).collect();
        Self { adj, allowed }
    }
}

/// Dynamic minimum-degree greedy: repeatedly take a remaining vertex of
/// smallest residual degree and delete its neighbourhood.
fn greedy_min_degree(graph: &ListGraph) -> Vec<usize> {
    let n = graph.adj.len();
    let mut alive: Vec<bool> = graph.allowed.clone();
    let mut degree: Vec<usize> = (0..n)
        .map(|x| graph.adj[x].iter().filter(|&&y| alive[y as usize]).count())
        .collect();
    let mut heap: BinaryHeap<Reverse<(usize, usize)>> =
        (0..n).filter(|&x| alive[x]).map(|x| Reverse((degree[x], x))).collect();
    let mut chosen = Vec::new();
    while let Some(Reverse((d, v))) = heap.pop() {
        if !alive[v] || d != degree[v] {
            continue;
        }
        chosen.push(v);
        alive[v] = false;
        for &u in &graph.adj[v] {
            let u = u as usize;
            if alive[u] {
                alive[u] = false;
                for &w in &graph.adj[u] {
                    let w = w as usize;
                    if alive[w] {
                        degree[w] -= 1;
                        heap.push(Reverse((degree[w], w)));
                    }
                }
            }
        }
    }
    chosen
}

struct LocalSearch<'a> {
    graph: &'a ListGraph,
    inst: &'a CayleyInstance,
    in_sol: Vec<bool>,
    tight: Vec<u32>,
    size: usize,
}

impl<'a> LocalSearch<'a> {
    fn new(graph: &'a ListGraph, inst: &'a CayleyInstance, start: &[usize]) -> Self {
        let n = graph.adj.len();
        let mut ls = Self {
            graph,
            inst,
            in_sol: vec![false; n],
            tight: vec![0; n],
            size: 0,
        };
        for &v in start {
            ls.insert(v);
        }
        ls
    }

    fn insert(&mut self, v: usize) {
        debug_assert!(!self.in_sol[v]);
        self.in_sol[v] = true;
        self.size += 1;
        for &u in &self.graph.adj[v] {
            self.tight[u as usize] += 1;
        }
    }

    fn remove(&mut self, v: usize) {
        debug_assert!(self.in_sol[v]);
        self.in_sol[v] = false;
        self.size -= 1;
        for &u in &self.graph.adj[v] {
            self.tight[u as usize] -= 1;
        }
    }

    fn fill_free(&mut self, rng: &mut RngStream) {
        let n = self.in_sol.len();
        let offset = rng.below(n);
        for i in 0..n {
            let v = (i + offset) % n;
            if !self.in_sol[v] && self.tight[v] == 0 && self.graph.allowed[v] {
                self.insert(v);
            }
        }
    }

    /// Replaces one solution vertex by two non-adjacent vertices that only
    /// it blocks.
    fn two_improvement(&mut self, x: usize) -> bool {
        let ones: Vec<usize> = self.graph.adj[x]
            .iter()
            .map(|&u| u as usize)
            .filter(|&u| self.tight[u] == 1 && self.graph.allowed[u])
            .collect();
        for (i, &u) in ones.iter().enumerate() {
            for &w in &ones[i + 1..] {
                if !self.inst.adjacent(u, w) {
                    self.remove(x);
                    self.insert(u);
                    self.insert(w);
                    return true;
                }
            }
        }
        false
    }

    fn solution(&self) -> Vec<usize> {
        (0..self.in_sol.len()).filter(|&v| self.in_sol[v]).collect()
    }
}

fn report_from(inst: &CayleyInstance, members: &[usize], method: AlphaMethod, start: Instant) -> AlphaReport {
    let witness = SubsetBits::from_elements(inst.group(), members.iter().copied()).expect("in range");
    assert!(
        is_independent(&witness, inst).expect("same group").holds(),
        "heuristic produced a dependent set"
    );
    AlphaReport {
        alpha: witness.len(),
        method,
        witness,
        nodes: None,
        elapsed_secs: start.elapsed().as_secs_f64(),
    }
}

/// Minimum-degree greedy followed by `effort` rounds of iterated local
/// search (2-improvements plus random perturbation). A lower bound on `α`.
pub fn alpha_heuristic(inst: &CayleyInstance, effort: usize) -> AlphaReport {
    alpha_heuristic_seeded(inst, effort, &mut RngStream::new(inst.seed ^ 0x0a1f_a000))
}

pub fn alpha_heuristic_seeded(inst: &CayleyInstance, effort: usize, rng: &mut RngStream) -> AlphaReport {
    let start = Instant::now();
    let graph = ListGraph::of(inst);
    let greedy = greedy_min_degree(&graph);
    if effort == 0 {
        return report_from(inst, &greedy, AlphaMethod::Greedy, start);
    }
    let mut ls = LocalSearch::new(&graph, inst, &greedy);
    ls.fill_free(rng);
    let mut best = ls.solution();
    let n = graph.adj.len();
    for _ in 0..effort {
        let mut improved = true;
        while improved {
            improved = false;
            for x in ls.solution() {
                if ls.in_sol[x] && ls.two_improvement(x) {
                    ls.fill_free(rng);
                    improved = true;
                }
            }
        }
        if ls.size > best.len() {
            best = ls.solution();
        }
        // perturb: force in a random outside vertex, preferring 1-tight ones
        let mut v = rng.below(n);
        for _ in 0..4 {
            let c = rng.below(n);
            if !ls.in_sol[c] && graph.allowed[c] && (ls.in_sol[v] || ls.tight[c] < ls.tight[v]) {
                v = c;
            }
        }
        if ls.in_sol[v] || !graph.allowed[v] {
            continue;
        }
        let blockers: Vec<usize> = graph.adj[v].iter().map(|&u| u as usize).filter(|&u| ls.in_sol[u]).collect();
        for u in blockers {
            ls.remove(u);
        }
        ls.insert(v);
        ls.fill_free(rng);
        // drift back to the best solution when far behind it
        if ls.size + 2 < best.len() {
            ls = LocalSearch::new(&graph, inst, &best);
        }
    }
    if ls.size > best.len() {
        best = ls.solution();
    }
    report_from(inst, &best, AlphaMethod::LocalSearch, start)
}

/// Which divisor multiplies `2^l` in the exponent `p c 2^l s / divisor`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelDivisor {
    /// `max(l, 1)^2`, the level-by-level value.
    MaxEllSquared,
    /// `(ln n)^2`, the uniform relaxation valid because `l <= ln n`.
    LogSquared,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnionBoundConstants {
    pub big_c: f64,
    pub c: f64,
    pub divisor: LevelDivisor,
}

impl Default for UnionBoundConstants {
    fn default() -> Self {
        Self {
            big_c: 1.0,
            c: 1.0,
            divisor: LevelDivisor::MaxEllSquared,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundRegime {
    Small,
    Large,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnionBoundTerm {
    pub ell: u32,
    pub regime: BoundRegime,
    /// Natural log of the summand.
    pub log_term: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnionBoundReport {
    pub p: f64,
    pub n: f64,
    pub s: f64,
    pub ell0: u32,
    pub terms: Vec<UnionBoundTerm>,
    pub dominant_small: Option<u32>,
    pub dominant_large: Option<u32>,
    /// Natural log of the whole bound (log-sum-exp of the terms).
    pub log_total: f64,
    pub constants: UnionBoundConstants,
}

impl UnionBoundReport {
    pub fn max_log_term(&self) -> f64 {
        self.terms.iter().map(|t| t.log_term).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `2^{l0}` nearest (in log scale) to `p^{-1/2} (ln n)^{3/4}`.
pub fn ell_zero(p: f64, n: f64) -> u32 {
    (p.powf(-0.5) * n.ln().powf(0.75)).log2().round().max(0.0) as u32
}

/// `s = xi p^{-3/2} (ln n)^{19/4}`.
pub fn independence_scale(xi: f64, p: f64, n: f64) -> f64 {
    xi * p.powf(-1.5) * n.ln().powf(19.0 / 4.0)
}

fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Evaluates the two union-bound sums level by level for `l = 0..=log2 n`.
pub fn union_bound_estimate(p: f64, n: f64, s: f64, k: UnionBoundConstants) -> Result<UnionBoundReport> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p = {p} outside (0, 1)")));
    }
    if !(s >= 1.0 && n > 1.0) {
        return Err(Error::InvalidParameter("need s >= 1 and n > 1".into()));
    }
    let ln = n.ln();
    let ell0 = ell_zero(p, n);
    let top = n.log2().floor() as u32;
    let terms: Vec<UnionBoundTerm> = (0..=top)
        .map(|ell| {
            let h = 2f64.powi(ell as i32);
            let div = match k.divisor {
                LevelDivisor::MaxEllSquared => (ell.max(1) as f64).powi(2),
                LevelDivisor::LogSquared => ln * ln,
            };
            let gain = p * k.c * h * s / div;
            let (regime, cost) = if ell < ell0 {
                (BoundRegime::Small, k.big_c * h * h * ln * ln)
            } else {
                (BoundRegime::Large, k.big_c * (h * ln.powf(1.5) * s).sqrt())
            };
            UnionBoundTerm {
                ell,
                regime,
                log_term: cost - gain,
            }
        })
        .collect();
    let dominant = |r: BoundRegime| {
        terms
            .iter()
            .filter(|t| t.regime == r)
            .max_by(|a, b| a.log_term.total_cmp(&b.log_term))
            .map(|t| t.ell)
    };
    Ok(UnionBoundReport {
        p,
        n,
        s,
        ell0,
        dominant_small: dominant(BoundRegime::Small),
        dominant_large: dominant(BoundRegime::Large),
        log_total: log_sum_exp(terms.iter().map(|t| t.log_term)),
        terms,
        constants: k,
    })
}

/// Smallest `xi` (to relative precision `1e-9`) at which every summand of
/// the bound with `s = xi p^{-3/2} (ln n)^{19/4}` is below 1.
pub fn feasibility_threshold(p: f64, n: f64, k: UnionBoundConstants) -> Result<f64> {
    let feasible = |xi: f64| -> Result<bool> {
        let s = independence_scale(xi, p, n).max(1.0);
        Ok(union_bound_estimate(p, n, s, k)?.max_log_term() < 0.0)
    };
    let (mut lo, mut hi) = (1e-12f64, 1.0f64);
    while !feasible(hi)? {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::InvalidParameter("no feasible xi below 1e12".into()));
        }
    }
    if feasible(lo)? {
        return Ok(lo);
    }
    while hi / lo > 1.0 + 1e-9 {
        let mid = (lo * hi).sqrt();
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    Auto,
    Exact,
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub p: f64,
    pub trials: usize,
    pub method: AlphaMethod,
    pub min: usize,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: usize,
}

fn quantile(sorted: &[usize], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] as f64 + (sorted[hi] as f64 - sorted[lo] as f64) * (pos - lo as f64)
}

/// Per `(n, p)`: quartiles of `α` over `trials` coupled samples. Trial `t`
/// draws one set of class uniforms and reuses it for every `p`, so the
/// generating sets are nested in `p`.
pub fn alpha_scaling_experiment(
    groups: &[Group],
    ps: &[f64],
    trials: usize,
    kind: GraphKind,
    method: MethodChoice,
    effort: usize,
    rng: &RngStream,
) -> Result<Vec<ScalingRow>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let mut rows = Vec::new();
    for (gi, group) in groups.iter().enumerate() {
        let exact = match method {
            MethodChoice::Exact => true,
            MethodChoice::Heuristic => false,
            MethodChoice::Auto => group.order() <= DEFAULT_EXACT_CAP,
        };
        let stream = rng.split(gi as u64);
        let per_trial: Vec<Vec<usize>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut trng = stream.split(t as u64);
                let u = class_uniforms(group, kind, &mut trng);
                ps.iter()
                    .map(|&p| {
                        let inst = instance_from_uniforms(group, kind, &u, p, trng.seed());
                        if exact {
                            alpha_exact(&inst).map(|r| r.alpha)
                        } else {
                            Ok(alpha_heuristic_seeded(&inst, effort, &mut trng.split(1)).alpha)
                        }
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<_>>()?;
        for (pi, &p) in ps.iter().enumerate() {
            let mut vals: Vec<usize> = per_trial.iter().map(|v| v[pi]).collect();
            vals.sort_unstable();
            rows.push(ScalingRow {
                n: group.order(),
                p,
                trials,
                method: if exact { AlphaMethod::Exact } else { AlphaMethod::LocalSearch },
                min: vals[0],
                q1: quantile(&vals, 0.25),
                median: quantile(&vals, 0.5),
                q3: quantile(&vals, 0.75),
                max: vals[vals.len() - 1],
            });
        }
    }
    Ok(rows)
}

/// Least-squares slope of `ln median α` against `ln(1/p)` for one `n`,
/// ignoring rows with `median α = 0`.
pub fn fitted_exponent(rows: &[ScalingRow], n: usize) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.n == n && r.median > 0.0 && r.p > 0.0 && r.p < 1.0)
        .map(|r| ((1.0 / r.p).ln(), r.median.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn write_scaling_csv<W: Write>(rows: &[ScalingRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "n,p,trials,method,min,q1,median,q3,max")?;
    for r in rows {
        let method = match r.method {
            AlphaMethod::Exact => "exact",
            AlphaMethod::Greedy => "greedy",
            AlphaMethod::LocalSearch => "local-search",
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            fmt12(r.p),
            r.trials,
            method,
            r.min,
            fmt12(r.q1),
            fmt12(r.median),
            fmt12(r.q3),
            r.max
        )?;
    }
    Ok(())
}

/// Maximum independent set size by a full scan over all `2^n` vertex
/// subsets, built up one vertex at a time. Independent of the
/// branch-and-bound path; only for `n <= 26`.
pub fn alpha_brute_force(inst: &CayleyInstance) -> usize {
    let n = inst.order();
    assert!(n <= 26, "brute force limited to 26 vertices");
    let mut adj = vec![0u32; n];
    let mut looped = vec![false; n];
    for x in 0..n {
        looped[x] = inst.has_blocking_loop(x);
        for y in 0..n {
            if x != y && inst.adjacent(x, y) {
                adj[x] |= 1 << y;
            }
        }
    }
    let mut indep = vec![false; 1 << n];
    indep[0] = true;
    let mut best = 0;
    for mask in 1u32..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let ok = indep[rest as usize] && !looped[low] && adj[low] & rest == 0;
        indep[mask as usize] = ok;
        if ok {
            best = best.max(mask.count_ones() as usize);
        }
    }
    best
}
