//! The acceptance suite: thirteen checks with fixed seeds and sizes, each
//! producing a serializable outcome. Reports carry no timings, so two runs
//! with the same options are byte-identical; wall-clock limits are checked
//! and logged to stderr only.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ap::{ap_scan, first_moment_exact, longest_ap, miss_probability, miss_probability_mc, DEFAULT_ENUMERATION_BUDGET};
use crate::cayley::{
    alpha_brute_force, alpha_exact, feasibility_threshold, independence_scale, sample_cayley, union_bound_estimate,
    GraphKind, LevelDivisor, LoopConvention, UnionBoundConstants,
};
use crate::cover::{
    build_cover_element_large, build_small_with, level_profile, verify_cover_element, CoverConfig, Mode, DEFAULT_C,
};
use crate::fourier::{
    convolve_sets, dft_indicator, idft_real, sample_sparse_approx, sparse_approx_with_retry, support, sup_error,
};
use crate::group::{difference_set, make_group, random_subset, random_subset_of_size, sumset, Group, SubsetBits};
use crate::nonsumset::{f_cyclic, probabilistic_nonsumset, sumset_atlas, NonsumsetConfig, NonsumsetOutcome};
use crate::report::{round12, SCHEMA_VERSION};
use crate::{Error, Result, RngStream};

/// `f(n)` goldens for cyclic groups, produced by the exhaustive atlas.
pub const F_GOLDENS_JSON: &str = include_str!("../tests/fixtures/f_values.json");

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Criteria whose stated thresholds a faithful implementation cannot meet.
/// They still report FAIL; callers decide whether that is fatal.
pub const KNOWN_UNATTAINABLE: [u32; 3] = [6, 8, 13];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Reduced sizes for a fast smoke run.
    pub quick: bool,
    /// Extended sizes where a criterion has a slow variant.
    pub slow: bool,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            quick: false,
            slow: false,
            seed: DEFAULT_SEED,
        }
    }
}

impl VerifyOptions {
    pub fn quick(seed: u64) -> Self {
        Self {
            quick: true,
            slow: false,
            seed,
        }
    }

    fn pick(&self, full: usize, quick: usize) -> usize {
        if self.quick {
            quick
        } else {
            full
        }
    }

    fn stream(&self, id: u32) -> RngStream {
        RngStream::new(self.seed).split_named(&format!("criterion-{id:02}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

impl CriterionOutcome {
    fn new(id: u32, name: &str, passed: bool, detail: Value) -> Self {
        Self {
            id,
            name: name.to_string(),
            passed,
            detail,
        }
    }

    /// `PASS 03 sparse-approximation`-style summary line.
    pub fn line(&self) -> String {
        format!("{} {:02} {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub options: VerifyOptions,
    pub outcomes: Vec<CriterionOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn first_failure(&self) -> Option<&CriterionOutcome> {
        self.outcomes.iter().find(|o| !o.passed)
    }

    /// First failure outside [`KNOWN_UNATTAINABLE`].
    pub fn first_unexpected_failure(&self) -> Option<&CriterionOutcome> {
        self.outcomes
            .iter()
            .find(|o| !o.passed && !KNOWN_UNATTAINABLE.contains(&o.id))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn timed<T>(label: &str, limit_secs: Option<f64>, f: impl FnOnce() -> T) -> (T, bool) {
    let start = Instant::now();
    let out = f();
    let secs = start.elapsed().as_secs_f64();
    let within = limit_secs.is_none_or(|l| secs < l);
    eprintln!("[verify] {label}: {secs:.2}s{}", if within { "" } else { " (over time limit)" });
    (out, within)
}

fn r12(x: f64) -> Value {
    json!(round12(x))
}

fn mixed_groups() -> Vec<Group> {
    [
        vec![4096],
        vec![2; 12],
        vec![64, 64],
        vec![8, 8, 8, 8],
        vec![3, 5, 7, 11],
        vec![2, 3, 4, 5, 6],
        vec![1000],
        vec![3; 7],
    ]
    .iter()
    .map(|f| make_group(f).expect("valid group"))
    .collect()
}

pub fn criterion_01(opts: &VerifyOptions) -> CriterionOutcome {
    let groups = mixed_groups();
    let trials = opts.pick(200, 40);
    let root = opts.stream(1);
    let ((parseval, inversion), in_time) = timed("criterion 01", Some(5.0), || {
        let mut parseval = 0f64;
        let mut inversion = 0f64;
        for i in 0..trials {
            let mut rng = root.split(i as u64);
            let g = &groups[i % groups.len()];
            let density = 0.05 + 0.9 * rng.uniform();
            let a = random_subset(g, density, &mut rng);
            let spec = dft_indicator(&a);
            parseval = parseval.max((spec.energy() - a.density()).abs());
            let back = idft_real(&spec);
            let ind = a.indicator();
            let err = back.iter().zip(&ind).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            inversion = inversion.max(err);
        }
        (parseval, inversion)
    });
    let passed = parseval <= 1e-9 && inversion <= 1e-9 && in_time;
    CriterionOutcome::new(
        1,
        "fourier-parseval-inversion",
        passed,
        json!({
            "indicators": trials,
            "groups": groups.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "max_parseval_error_below_1e-9": parseval <= 1e-9,
            "max_inversion_error_below_1e-9": inversion <= 1e-9,
            "within_time_limit": in_time,
        }),
    )
}

fn support_mismatches(a: &SubsetBits) -> (bool, bool) {
    let g = a.group();
    let sum_ok = support(g, &convolve_sets(a, a).expect("same group")) == sumset(a, a).expect("same group");
    let diff_ok = support(g, &convolve_sets(a, &a.negate()).expect("same group")) == difference_set(a);
    (sum_ok, diff_ok)
}

pub fn criterion_02(opts: &VerifyOptions) -> CriterionOutcome {
    let z12 = make_group(&[12]).expect("valid group");
    let mut exhaustive_mismatches = 0;
    for mask in 0u64..1 << 12 {
        let a = SubsetBits::from_fn(&z12, |x| mask >> x & 1 == 1);
        let (s, d) = support_mismatches(&a);
        exhaustive_mismatches += usize::from(!s) + usize::from(!d);
    }
    let groups: Vec<Group> = [
        vec![64],
        vec![97],
        vec![2; 10],
        vec![3, 9, 27],
        vec![1024],
        vec![32, 32],
        vec![5, 7, 11, 13],
        vec![4096],
        vec![2; 14],
        vec![65536],
        vec![256, 256],
        vec![2; 16],
    ]
    .iter()
    .map(|f| make_group(f).expect("valid group"))
    .collect();
    let trials = opts.pick(10_000, 400);
    let root = opts.stream(2);
    let (random_mismatches, _) = timed("criterion 02", None, || {
        let mut mismatches = 0;
        for i in 0..trials {
            let mut rng = root.split(i as u64);
            // small orders dominate the mix; every fourth trial uses the large ones
            let g = if i % 4 == 3 {
                &groups[8 + rng.below(4)]
            } else {
                &groups[rng.below(8)]
            };
            let density = [0.002, 0.01, 0.05, 0.2, 0.5][rng.below(5)];
            let a = random_subset(g, density, &mut rng);
            let (s, d) = support_mismatches(&a);
            mismatches += usize::from(!s) + usize::from(!d);
        }
        mismatches
    });
    CriterionOutcome::new(
        2,
        "convolution-support",
        exhaustive_mismatches == 0 && random_mismatches == 0,
        json!({
            "exhaustive_z12_subsets": 4096,
            "exhaustive_mismatches": exhaustive_mismatches,
            "random_subsets": trials,
            "random_mismatches": random_mismatches,
        }),
    )
}

pub fn criterion_03(opts: &VerifyOptions) -> CriterionOutcome {
    let g = make_group(&[512]).expect("valid group");
    let eta = 0.25;
    let sets = opts.pick(100, 20);
    let root = opts.stream(3);
    let (per_mode, in_time) = timed("criterion 03", Some(30.0), || {
        [Mode::Difference, Mode::Sum]
            .into_iter()
            .map(|mode| {
                let mut single = 0;
                let mut retried = 0;
                let mut worst_ratio = 0f64;
                for i in 0..sets {
                    let base = root.split(i as u64);
                    let a = random_subset(&g, 0.25, &mut base.split(0));
                    if a.is_empty() {
                        continue;
                    }
                    let approx = sample_sparse_approx(&a, eta, mode, &mut base.split(1 + mode as u64)).expect("valid");
                    let err = sup_error(&approx, &a).expect("same group");
                    worst_ratio = worst_ratio.max(err / (eta * a.density()));
                    single += usize::from(err <= eta * a.density());
                    let retry = sparse_approx_with_retry(&a, eta, mode, &mut base.split(3 + mode as u64), 16);
                    retried += usize::from(retry.is_ok());
                }
                (mode, single, retried, worst_ratio)
            })
            .collect::<Vec<_>>()
    });
    let need_single = sets - sets.div_ceil(100);
    let passed = in_time && per_mode.iter().all(|&(_, s, r, _)| s >= need_single && r == sets);
    CriterionOutcome::new(
        3,
        "sparse-approximation",
        passed,
        json!({
            "group": "Z_512",
            "density": 0.25,
            "eta": eta,
            "sets": sets,
            "required_single_round_successes": need_single,
            "modes": per_mode.iter().map(|(m, s, r, w)| json!({
                "mode": m,
                "single_round_successes": s,
                "retry_successes": r,
                "worst_error_over_eta_alpha": r12(*w),
            })).collect::<Vec<_>>(),
            "within_time_limit": in_time,
        }),
    )
}

pub fn criterion_04(opts: &VerifyOptions) -> CriterionOutcome {
    let groups = mixed_groups();
    let trials = opts.pick(200, 40);
    let root = opts.stream(4);
    let mut worst = 0f64;
    for i in 0..trials {
        let mut rng = root.split(i as u64);
        let g = &groups[i % groups.len()];
        let a = random_subset(g, 0.01 + 0.9 * rng.uniform(), &mut rng);
        let alpha = a.density();
        for b in [a.negate(), a.clone()] {
            let conv = convolve_sets(&a, &b).expect("same group");
            let mean = conv.iter().sum::<f64>() / conv.len() as f64;
            worst = worst.max((mean - alpha * alpha).abs());
        }
    }
    CriterionOutcome::new(
        4,
        "mean-identity",
        worst <= 1e-12,
        json!({ "sets": trials, "max_error_below_1e-12": worst <= 1e-12 }),
    )
}

pub fn criterion_05(opts: &VerifyOptions) -> CriterionOutcome {
    let g16 = make_group(&[16]).expect("valid group");
    let mut per_mode = Vec::new();
    let mut calibrated = DEFAULT_C;
    let mut level_breach = 0;
    for mode in [Mode::Difference, Mode::Sum] {
        let mut failures = 0;
        let mut min_c = f64::INFINITY;
        let mut hist = [0usize; 5];
        for mask in 1u64..1 << 16 {
            let a = SubsetBits::from_fn(&g16, |x| mask >> x & 1 == 1);
            let profile = level_profile(&a, mode).expect("nonempty");
            min_c = min_c.min(profile.max_feasible_c());
            match profile.ell_at(DEFAULT_C) {
                Some(ell) => {
                    hist[(ell as usize).min(4)] += 1;
                    level_breach += usize::from(ell > profile.max_level);
                }
                None => failures += 1,
            }
        }
        calibrated = calibrated.min(min_c);
        per_mode.push(json!({
            "mode": mode,
            "sets": 65535,
            "failures_at_default_c": failures,
            "max_feasible_c_over_all_sets": r12(min_c),
            "ell_histogram_0_to_4plus": hist,
        }));
    }
    // random sets over larger groups at the calibrated constant
    let groups: Vec<Group> = [vec![256], vec![2; 8], vec![4096], vec![64, 64], vec![65536]]
        .iter()
        .map(|f| make_group(f).expect("valid group"))
        .collect();
    let trials = opts.pick(10_000, 300);
    let root = opts.stream(5);
    let mut random_failures = 0;
    for i in 0..trials {
        let mut rng = root.split(i as u64);
        let g = &groups[if i % 10 == 9 { 3 + rng.below(2) } else { rng.below(3) }];
        let size = 1 + rng.below(g.order().min(2048));
        let a = random_subset_of_size(g, size, &mut rng);
        let mode = if i % 2 == 0 { Mode::Difference } else { Mode::Sum };
        let profile = level_profile(&a, mode).expect("nonempty");
        random_failures += usize::from(profile.ell_at(calibrated).is_none());
    }
    CriterionOutcome::new(
        5,
        "dyadic-level-existence",
        calibrated > 0.0 && random_failures == 0 && level_breach == 0,
        json!({
            "default_c": DEFAULT_C,
            "calibrated_c": r12(calibrated),
            "recalibrated": calibrated < DEFAULT_C,
            "exhaustive_z16": per_mode,
            "random_sets": trials,
            "random_failures_at_calibrated_c": random_failures,
        }),
    )
}

pub fn criterion_06(opts: &VerifyOptions) -> CriterionOutcome {
    let groups: Vec<(String, Group)> = [vec![256], vec![2; 8], vec![3, 81]]
        .iter()
        .map(|f| {
            let g = make_group(f).expect("valid group");
            (g.to_string(), g)
        })
        .collect();
    let per_group = opts.pick(1000, 40);
    let root = opts.stream(6);
    let cfg = CoverConfig::default();
    let mut small = Vec::new();
    let mut small_ok = true;
    for (gi, (name, g)) in groups.iter().enumerate() {
        for mode in [Mode::Difference, Mode::Sum] {
            let mut verified = 0;
            let mut errors = 0;
            let mut attempted = 0;
            for i in 0..per_group {
                let mut rng = root.split((gi * 2 + mode as usize) as u64).split(i as u64);
                let density = [0.05, 0.1, 0.25, 0.5][i % 4];
                let a = random_subset(g, density, &mut rng);
                if a.is_empty() {
                    continue;
                }
                attempted += 1;
                match build_small_with(&a, mode, &mut rng, &cfg).and_then(|e| verify_cover_element(&a, &e)) {
                    Ok(e) if e.is_verified() => verified += 1,
                    Ok(_) => {}
                    Err(_) => errors += 1,
                }
            }
            small_ok &= verified == attempted;
            small.push(json!({
                "group": name, "mode": mode, "sets": attempted, "verified": verified, "errors": errors,
            }));
        }
    }
    let z4096 = make_group(&[4096]).expect("valid group");
    let large_sets = opts.pick(200, 20);
    let lroot = root.split_named("large");
    let mut large = Vec::new();
    let mut large_ok = true;
    for mode in [Mode::Difference, Mode::Sum] {
        let mut verified = 0;
        let mut inapplicable = 0;
        let mut exhausted = 0;
        let mut ell_hist = std::collections::BTreeMap::new();
        for i in 0..large_sets {
            let mut rng = lroot.split(mode as u64).split(i as u64);
            let a = random_subset_of_size(&z4096, 64, &mut rng);
            if let Some(ell) = level_profile(&a, mode).expect("nonempty").ell_at(cfg.c) {
                *ell_hist.entry(ell).or_insert(0usize) += 1;
            }
            match build_cover_element_large(&a, mode, &mut rng).and_then(|e| verify_cover_element(&a, &e)) {
                Ok(e) if e.is_verified() => verified += 1,
                Ok(_) => {}
                Err(Error::RegimeInapplicable { .. }) => inapplicable += 1,
                Err(_) => exhausted += 1,
            }
        }
        large_ok &= verified == large_sets;
        large.push(json!({
            "mode": mode, "sets": large_sets, "verified": verified,
            "regime_inapplicable": inapplicable, "retries_exhausted_or_other": exhausted,
            "ell_histogram": ell_hist,
        }));
    }
    CriterionOutcome::new(
        6,
        "cover-sandwich",
        small_ok && large_ok,
        json!({ "small_regime": small, "large_regime_z4096_64_subsets": large }),
    )
}

pub fn criterion_07(opts: &VerifyOptions) -> CriterionOutcome {
    let n = opts.pick(20, 16);
    let g = make_group(&[n]).expect("valid group");
    let instances = opts.pick(50, 10);
    let root = opts.stream(7);
    let ((comparisons, mismatches), in_time) = timed("criterion 07", Some(60.0), || {
        let mut comparisons = 0;
        let mut mismatches = 0;
        for i in 0..instances {
            let mut rng = root.split(i as u64);
            let p = 0.05 + 0.4 * rng.uniform();
            for kind in [GraphKind::Difference, GraphKind::Sum] {
                let base = sample_cayley(&g, p, kind, &mut rng).expect("valid p");
                for loops in [LoopConvention::Ignore, LoopConvention::Block] {
                    let inst = base.clone().with_loops(loops);
                    let exact = alpha_exact(&inst).expect("within cap");
                    comparisons += 1;
                    mismatches += usize::from(exact.alpha != alpha_brute_force(&inst));
                }
            }
        }
        (comparisons, mismatches)
    });
    CriterionOutcome::new(
        7,
        "independence-oracle",
        mismatches == 0 && in_time,
        json!({
            "group": g.to_string(), "instances": instances, "comparisons": comparisons,
            "mismatches": mismatches, "within_time_limit": in_time,
        }),
    )
}

fn union_bound_structure(divisor: LevelDivisor) -> Result<Value> {
    let n = 1e6f64;
    let p = n.powf(-1.0 / 3.0);
    let k = UnionBoundConstants {
        divisor,
        ..UnionBoundConstants::default()
    };
    let xi_star = feasibility_threshold(p, n, k)?;
    let xi = 4.0 * xi_star;
    let r = union_bound_estimate(p, n, independence_scale(xi, p, n), k)?;
    let ok = r.dominant_small == Some(0) && r.dominant_large == Some(r.ell0) && r.log_total < 0.0;
    let small_terms: Vec<Value> = r
        .terms
        .iter()
        .filter(|t| t.ell < r.ell0)
        .map(|t| json!({ "ell": t.ell, "log_term": r12(t.log_term) }))
        .collect();
    Ok(json!({
        "divisor": divisor,
        "structure_matches": ok,
        "p": r12(p),
        "feasibility_threshold_xi": r12(xi_star),
        "xi": r12(xi),
        "ell0": r.ell0,
        "dominant_small": r.dominant_small,
        "dominant_large": r.dominant_large,
        "log_total": r12(r.log_total),
        "small_regime_terms": small_terms,
    }))
}

pub fn criterion_08(_opts: &VerifyOptions) -> CriterionOutcome {
    let main = union_bound_structure(LevelDivisor::MaxEllSquared);
    let relaxed = union_bound_structure(LevelDivisor::LogSquared);
    let passed = matches!(&main, Ok(v) if v["structure_matches"] == json!(true));
    let show = |r: Result<Value>| r.unwrap_or_else(|e| json!({ "error": e.to_string() }));
    CriterionOutcome::new(
        8,
        "union-bound-structure",
        passed,
        json!({ "max_ell_squared": show(main), "log_squared_diagnostic": show(relaxed) }),
    )
}

#[derive(Deserialize)]
struct Goldens {
    values: Vec<GoldenEntry>,
}

#[derive(Deserialize)]
struct GoldenEntry {
    n: usize,
    f: usize,
}

pub fn golden_f_values() -> Vec<(usize, usize)> {
    let g: Goldens = serde_json::from_str(F_GOLDENS_JSON).expect("fixture parses");
    g.values.into_iter().map(|e| (e.n, e.f)).collect()
}

pub fn criterion_09(opts: &VerifyOptions) -> CriterionOutcome {
    let top = if opts.slow {
        24
    } else {
        opts.pick(20, 16)
    };
    let goldens = golden_f_values();
    let mut computed = Vec::new();
    let mut golden_mismatches = 0;
    for n in 1..=top {
        let f = f_cyclic(n).expect("within cap");
        if let Some(&(_, want)) = goldens.iter().find(|(m, _)| *m == n) {
            golden_mismatches += usize::from(want != f);
        } else {
            golden_mismatches += 1;
        }
        computed.push(json!([n, f]));
    }
    let root = opts.stream(9);
    let witness_top = opts.pick(20, 14);
    let runs_per_n = opts.pick(4, 2);
    let mut witnesses = 0;
    let mut confirmed = 0;
    let mut degenerate_or_budget = 0;
    for n in 8..=witness_top {
        let g = make_group(&[n]).expect("valid group");
        let atlas = sumset_atlas(&g).expect("within cap");
        for r in 0..runs_per_n {
            let mut rng = root.split((n * 16 + r) as u64);
            match probabilistic_nonsumset(&g, 0.25, &mut rng, NonsumsetConfig::default()) {
                Ok(NonsumsetOutcome::Witness { witness, .. }) => {
                    witnesses += 1;
                    confirmed += usize::from(!atlas.contains(&witness).expect("same group"));
                }
                _ => degenerate_or_budget += 1,
            }
        }
    }
    CriterionOutcome::new(
        9,
        "nonsumset-goldens",
        golden_mismatches == 0 && witnesses == confirmed,
        json!({
            "max_n": top,
            "f_values": computed,
            "golden_mismatches": golden_mismatches,
            "witness_runs": (witness_top - 7) * runs_per_n,
            "witnesses": witnesses,
            "witnesses_confirmed_nonrepresentable": confirmed,
            "runs_without_witness": degenerate_or_budget,
        }),
    )
}

pub fn criterion_10(opts: &VerifyOptions) -> CriterionOutcome {
    let p = 10007usize;
    let exact = miss_probability(p, 1.0 / (p as f64).sqrt()).expect("prime");
    let trials = opts.pick(10_000, 2000);
    let mc = miss_probability_mc(101, 1.0 / 101f64.sqrt(), trials, &opts.stream(10)).expect("prime");
    let z = mc.z_score();
    CriterionOutcome::new(
        10,
        "miss-probability",
        exact > 0.60 && exact < 0.62 && z.abs() <= 3.0,
        json!({
            "exact_p10007": r12(exact),
            "mc_p101": { "trials": trials, "hits": mc.hits, "reference": r12(mc.reference), "z_score": r12(z) },
        }),
    )
}

pub fn criterion_11(opts: &VerifyOptions) -> CriterionOutcome {
    let p = if opts.quick { 1009 } else { 10007 };
    let trials = opts.pick(50, 10);
    let q = 1.0 / (p as f64).sqrt();
    let (scan, in_time) = timed("criterion 11", Some(600.0), || ap_scan(p, q, trials, &opts.stream(11), None));
    let scan = match scan {
        Ok(s) => s,
        Err(e) => return CriterionOutcome::new(11, "ap-band", false, json!({ "error": e.to_string() })),
    };
    let l = scan.log2_scale;
    let all_in = scan.rows.iter().all(|r| (0.3 * l..=5.0 * l).contains(&(r.ap_len as f64)));
    let median_in = (0.5 * l..=4.0 * l).contains(&scan.median);
    CriterionOutcome::new(
        11,
        "ap-band",
        all_in && median_in && in_time,
        json!({
            "p": p, "trials": trials,
            "min": scan.min, "median": r12(scan.median), "max": scan.max,
            "min_ratio": r12(scan.min as f64 / l), "median_ratio": r12(scan.median / l), "max_ratio": r12(scan.max as f64 / l),
            "all_in_band": all_in, "median_in_band": median_in, "within_time_limit": in_time,
        }),
    )
}

/// Every `(start, difference, length)` triple.
fn cubic_longest_ap(t: &SubsetBits) -> usize {
    let p = t.order();
    if t.is_full() {
        return p;
    }
    let mut best = usize::from(!t.is_empty());
    for start in t.iter() {
        for d in 1..p {
            let mut len = 0;
            while len < p && t.contains((start + len * d) % p) {
                len += 1;
            }
            best = best.max(len);
        }
    }
    best
}

pub fn criterion_12(opts: &VerifyOptions) -> CriterionOutcome {
    let z13 = make_group(&[13]).expect("valid group");
    let mut exhaustive_mismatches = 0;
    for mask in 0u64..1 << 13 {
        let t = SubsetBits::from_fn(&z13, |x| mask >> x & 1 == 1);
        exhaustive_mismatches += usize::from(longest_ap(&t).expect("prime").len != cubic_longest_ap(&t));
    }
    let z101 = make_group(&[101]).expect("valid group");
    let trials = opts.pick(1000, 100);
    let root = opts.stream(12);
    let mut random_mismatches = 0;
    for i in 0..trials {
        let mut rng = root.split(i as u64);
        let t = random_subset(&z101, 0.1 + 0.8 * rng.uniform(), &mut rng);
        random_mismatches += usize::from(longest_ap(&t).expect("prime").len != cubic_longest_ap(&t));
    }
    CriterionOutcome::new(
        12,
        "longest-ap-oracle",
        exhaustive_mismatches == 0 && random_mismatches == 0,
        json!({
            "exhaustive_z13": 8192, "exhaustive_mismatches": exhaustive_mismatches,
            "random_z101": trials, "random_mismatches": random_mismatches,
        }),
    )
}

pub fn criterion_13(_opts: &VerifyOptions) -> CriterionOutcome {
    match first_moment_exact(13, 2, DEFAULT_ENUMERATION_BUDGET) {
        Ok(c) => CriterionOutcome::new(
            13,
            "first-moment-count",
            c.relative_deviation <= 0.25,
            json!({
                "p": c.p, "k": c.k,
                "progressions": c.progressions,
                "raw_pair_choices": c.raw_choices,
                "valid": c.valid,
                "reference": r12(c.reference),
                "deficit": r12(c.deficit),
                "relative_deviation": r12(c.relative_deviation),
            }),
        ),
        Err(e) => CriterionOutcome::new(13, "first-moment-count", false, json!({ "error": e.to_string() })),
    }
}

pub type CriterionFn = fn(&VerifyOptions) -> CriterionOutcome;

pub const CRITERIA: [CriterionFn; 13] = [
    criterion_01,
    criterion_02,
    criterion_03,
    criterion_04,
    criterion_05,
    criterion_06,
    criterion_07,
    criterion_08,
    criterion_09,
    criterion_10,
    criterion_11,
    criterion_12,
    criterion_13,
];

/// Runs every criterion in order.
pub fn run_all(opts: &VerifyOptions) -> VerifyReport {
    VerifyReport {
        schema_version: SCHEMA_VERSION,
        options: *opts,
        outcomes: CRITERIA.iter().map(|c| c(opts)).collect(),
    }
}
