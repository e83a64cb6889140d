//! Schurity tests, fusion enumeration and verification suites.

use std::collections::HashMap;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{lemma41_witness, lemma42_check, primes_up_to, quadratic_class};
use crate::aut::{automorphism_group_with, translation, AutOptions};
use crate::catalog::{catalog_of_degree, GroupSpec};
use crate::error::{Error, Result};
use crate::fusion::{ClassMap, EntryKey, FusionProblem, SearchBudget, MAX_ENTRY_ARITY};
use crate::group::PermGroup;
use crate::perm::Permutation;
use crate::schur::{is_schur_partition, Carrier, SchurPartition, SchurVerdict};
use crate::tensor::{coordinate_maps, EquivPattern, FusionSpec, TensorConfig, Verdict};

/// Environment variable holding a wall-clock limit in seconds for searches.
pub const BUDGET_ENV: &str = "TCC_BUDGET_SECONDS";

/// Default search budget, with the wall limit taken from the environment.
pub fn default_budget() -> SearchBudget {
    let time_limit = std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|s| *s > 0.0)
        .map(Duration::from_secs_f64);
    SearchBudget {
        time_limit,
        ..SearchBudget::default()
    }
}

/// Schurity verdict with the automorphism group that decides it.
#[derive(Clone, Debug)]
pub struct Schurity {
    pub schurian: bool,
    pub group: PermGroup,
}

/// Automorphism group, seeded with the translation when it preserves `cfg`.
pub fn automorphism_group(cfg: &TensorConfig) -> Result<PermGroup> {
    let opts = AutOptions {
        seeds: vec![translation(cfg.n())],
        ..AutOptions::default()
    };
    automorphism_group_with(cfg, &opts)
}

/// `cfg` is the orbit partition of its automorphism group.
pub fn is_schurian(cfg: &TensorConfig) -> Result<Schurity> {
    let group = automorphism_group(cfg)?;
    let orbits = TensorConfig::orbit_coloring(&group, cfg.m())?;
    Ok(Schurity {
        schurian: orbits == *cfg,
        group,
    })
}

fn require_prime_ternary(cfg: &TensorConfig) -> Result<u32> {
    if cfg.m() != 3 {
        return Err(Error::InvalidArgument(format!("arity {} is not 3", cfg.m())));
    }
    let p = cfg.n() as u32;
    if p < 3 || !crate::arith::is_prime(p as u64) {
        return Err(Error::InvalidArgument(format!("{} is not an odd prime", p)));
    }
    Ok(p)
}

/// Classes of the residue at `(0, 1)` other than `{0}`, as a partition of
/// `F_p^×`.
pub fn pi_classes(cfg: &TensorConfig) -> Result<Vec<Vec<u32>>> {
    let p = require_prime_ternary(cfg)?;
    if !cfg.is_preserved_by(&translation(p as usize)) {
        return Err(Error::Precondition("configuration is not translation invariant".into()));
    }
    let res = cfg.residue(&[0, 1], &[0, 1])?;
    let mut classes: Vec<Vec<u32>> = vec![Vec::new(); res.class_count()];
    for (x, &c) in res.colors().iter().enumerate() {
        classes[c as usize].push(x as u32);
    }
    for point in [0u32, 1] {
        let c = res.colors()[point as usize] as usize;
        if classes[c].len() != 1 {
            return Err(Error::Anomaly(format!(
                "{{{}}} is not a class of the residue at (0,1)",
                point
            )));
        }
    }
    classes.retain(|c| c != &[0]);
    classes.sort();
    Ok(classes)
}

/// The partition Π of `F_p^×`, which must be a Schur partition.
pub fn pi_partition(cfg: &TensorConfig) -> Result<SchurPartition> {
    let classes = pi_classes(cfg)?;
    let carrier = Carrier::fstar(cfg.n() as u32)?;
    match is_schur_partition(&carrier, &classes)? {
        SchurVerdict::Accepted(p) => Ok(p),
        SchurVerdict::Rejected(reason) => Err(Error::Anomaly(format!("Π is not a Schur partition: {}", reason))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PiCheck {
    pub p: u32,
    pub classes: Vec<Vec<u32>>,
    pub schur: bool,
    pub tau_closed: bool,
    /// `p ≡ ±3 (mod 8)`.
    pub pm3: bool,
    pub discrete_or_trivial: bool,
    pub holds: bool,
}

/// Π is Schur and τ-closed, and discrete or trivial when `p ≡ ±3 (mod 8)`.
pub fn verify_pi_partition(cfg: &TensorConfig) -> Result<PiCheck> {
    let p = require_prime_ternary(cfg)?;
    let agl = GroupSpec::Agl1(p as usize).build()?;
    if !agl.generators().iter().all(|g| cfg.is_preserved_by(g)) {
        return Err(Error::Precondition("configuration is not AGL_1(p)-invariant".into()));
    }
    let classes = pi_classes(cfg)?;
    let carrier = Carrier::fstar(p)?;
    let verdict = is_schur_partition(&carrier, &classes)?;
    let (schur, tau_closed, discrete_or_trivial) = match &verdict {
        SchurVerdict::Accepted(part) => (true, part.is_tau_closed()?, part.is_discrete() || part.is_trivial()),
        SchurVerdict::Rejected(_) => (false, false, false),
    };
    let pm3 = quadratic_class(p as u64)?.is_pm3();
    Ok(PiCheck {
        p,
        holds: schur && tau_closed && (!pm3 || discrete_or_trivial),
        classes,
        schur,
        tau_closed,
        pm3,
        discrete_or_trivial,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StarredReport {
    pub starred: Vec<u32>,
    /// With a group supplied: every other class is a single orbit of it.
    pub others_are_orbits: Option<bool>,
}

/// Classes whose tuples have three distinct entries.
pub fn starred_classes(cfg: &TensorConfig, group: Option<&PermGroup>) -> Result<StarredReport> {
    if cfg.m() != 3 {
        return Err(Error::InvalidArgument(format!("arity {} is not 3", cfg.m())));
    }
    let starred: Vec<u32> = (0..cfg.class_count() as u32)
        .filter(|&c| cfg.classes()[c as usize].pattern.class_count() == 3)
        .collect();
    let others_are_orbits = match group {
        None => None,
        Some(g) => {
            if g.degree() != cfg.n() {
                return Err(Error::DegreeMismatch {
                    expected: cfg.n(),
                    found: g.degree(),
                });
            }
            if !g.is_two_transitive() {
                return Err(Error::Precondition("supplied group is not 2-transitive".into()));
            }
            let orbits = g.orbits_on_tuples(3)?;
            let mut label_of: HashMap<u32, u32> = HashMap::new();
            let mut ok = true;
            for (r, &c) in cfg.colors().iter().enumerate() {
                if cfg.classes()[c as usize].pattern.class_count() == 3 {
                    continue;
                }
                let l = *label_of.entry(c).or_insert(orbits.labels[r]);
                ok &= l == orbits.labels[r];
            }
            Some(ok)
        }
    };
    Ok(StarredReport {
        starred,
        others_are_orbits,
    })
}

/// Inputs of a fusion enumeration.
#[derive(Clone, Debug)]
pub struct EnumerationJob {
    pub base: TensorConfig,
    /// Ternary only: keep only fusions whose binary projection is trivial.
    pub ast_only: bool,
    pub budget: SearchBudget,
}

#[derive(Clone, Debug)]
pub struct EnumerationOutcome {
    /// Coherent fusions, sorted by coloring.
    pub results: Vec<TensorConfig>,
    pub complete: bool,
    pub nodes: u64,
}

/// All coherent fusions of a coherent base.
pub fn enumerate_fusions(job: &EnumerationJob) -> Result<EnumerationOutcome> {
    let base = &job.base;
    if let Verdict::Violation(v) = base.validate() {
        return Err(Error::NotCoherent(format!("base fails {:?}: {}", v.axiom, v.detail)));
    }
    if job.ast_only && base.m() != 3 {
        return Err(Error::InvalidArgument("the AST constraint needs arity 3".into()));
    }
    let problem = fusion_problem(base, job.ast_only)?;
    let outcome = problem.solve(&job.budget)?;
    let mut results = Vec::new();
    for labels in outcome.partitions {
        let fused = base.fuse(&FusionSpec::new(labels)?)?;
        let closed = fused.wl_close();
        if closed != fused {
            return Err(Error::Anomaly("enumerated fusion is not stable under WL closure".into()));
        }
        results.push(closed);
    }
    results.sort_by(|a, b| a.colors().cmp(b.colors()));
    results.dedup();
    Ok(EnumerationOutcome {
        results,
        complete: outcome.complete,
        nodes: outcome.nodes,
    })
}

fn fusion_problem(base: &TensorConfig, ast_only: bool) -> Result<FusionProblem> {
    let n = base.n();
    let m = base.m();
    let k = base.class_count();
    let mut pattern_ids: HashMap<EquivPattern, u32> = HashMap::new();
    let kinds: Vec<u32> = base
        .classes()
        .iter()
        .map(|c| {
            let next = pattern_ids.len() as u32;
            *pattern_ids.entry(c.pattern.clone()).or_insert(next)
        })
        .collect();
    let color = |x: &[u32]| base.colors()[x.iter().fold(0, |acc, &d| acc * n + d as usize)];
    let entries = base
        .classes()
        .iter()
        .map(|info| {
            let mut hist: HashMap<EntryKey, u32> = HashMap::new();
            let mut y = info.representative.clone();
            for alpha in 0..n as u32 {
                let mut key = [0u32; MAX_ENTRY_ARITY];
                for (i, slot) in key.iter_mut().enumerate().take(m) {
                    let keep = y[i];
                    y[i] = alpha;
                    *slot = color(&y);
                    y[i] = keep;
                }
                *hist.entry(key).or_insert(0) += 1;
            }
            let mut v: Vec<(EntryKey, u32)> = hist.into_iter().collect();
            v.sort_unstable();
            v
        })
        .collect();
    let maps = coordinate_maps(m)
        .into_iter()
        .filter(|s| s.iter().enumerate().any(|(i, &j)| i != j))
        .map(|sigma| {
            let mut sorted = sigma.clone();
            sorted.sort_unstable();
            sorted.dedup();
            ClassMap {
                image: base
                    .classes()
                    .iter()
                    .map(|info| {
                        let x: Vec<u32> = sigma.iter().map(|&i| info.representative[i]).collect();
                        color(&x)
                    })
                    .collect(),
                bijective: sorted.len() == m,
            }
        })
        .collect();
    let mut priority: Vec<u32> = (0..k as u32).collect();
    priority.sort_by_key(|&c| (base.classes()[c as usize].pattern.class_count(), c));
    let mut forced = Vec::new();
    if ast_only {
        let mut groups: HashMap<u32, Vec<u32>> = HashMap::new();
        for c in 0..k as u32 {
            if base.classes()[c as usize].pattern.class_count() <= 2 {
                groups.entry(kinds[c as usize]).or_default().push(c);
            }
        }
        let mut groups: Vec<Vec<u32>> = groups.into_values().collect();
        groups.sort();
        forced = groups;
    }
    Ok(FusionProblem {
        kinds,
        arity: m,
        entries,
        maps,
        priority,
        forced,
    })
}

/// Machine-readable verdict of one suite.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub p: Option<u64>,
    pub complete: bool,
    pub results: Vec<ResultEntry>,
    /// "PASS" or "FAIL".
    pub verdict: String,
    pub details: Value,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.verdict == "PASS"
    }

    pub fn new(suite: &str, p: Option<u64>, complete: bool, pass: bool, results: Vec<ResultEntry>, details: Value) -> Self {
        Report {
            suite: suite.to_string(),
            p,
            complete,
            results,
            verdict: if pass { "PASS" } else { "FAIL" }.to_string(),
            details,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultEntry {
    pub classes: usize,
    pub ast: bool,
    pub aut_order: u128,
    pub aut_matches: Option<String>,
    pub schurian: bool,
    /// Generators of the automorphism group in image notation.
    pub aut_generators: Vec<String>,
    pub translations_in_aut: bool,
}

/// First catalog group of the same degree equal to `group`.
pub fn catalog_match(group: &PermGroup) -> Option<String> {
    catalog_of_degree(group.degree()).into_iter().find_map(|spec| {
        let g = spec.build().ok()?;
        g.equals(group).ok()?.then(|| spec.to_string())
    })
}

/// Schurity, AST flag and automorphism data of one configuration.
pub fn describe(cfg: &TensorConfig) -> Result<ResultEntry> {
    let verdict = is_schurian(cfg)?;
    let ast = if cfg.m() == 3 { cfg.is_ast()? } else { false };
    Ok(ResultEntry {
        classes: cfg.class_count(),
        ast,
        aut_order: verdict.group.order(),
        aut_matches: catalog_match(&verdict.group),
        schurian: verdict.schurian,
        aut_generators: verdict.group.generators().iter().map(|g| g.to_string()).collect(),
        translations_in_aut: verdict.group.is_member(&translation(cfg.n()))?,
    })
}

fn orbit_config(spec: &GroupSpec, m: usize) -> Result<TensorConfig> {
    TensorConfig::orbit_coloring(&spec.build()?, m)
}

fn require_suite_prime(suite: &str, p: u64) -> Result<()> {
    if p < 3 || !crate::arith::is_prime(p) || p > 31 {
        return Err(Error::InvalidArgument(format!("{}: p = {} is not an odd prime up to 31", suite, p)));
    }
    Ok(())
}

/// Enumerates fusions of `orb_3(AGL_1(p))` and expects exactly the orbit
/// configurations of `AGL_1(p)` and `Sym(p)`.
pub fn suite_thm51(p: u64, budget: &SearchBudget) -> Result<Report> {
    require_suite_prime("thm51", p)?;
    if !quadratic_class(p)?.is_pm3() {
        return Err(Error::InvalidArgument(format!("thm51 needs p ≡ ±3 (mod 8), got {}", p)));
    }
    let agl = orbit_config(&GroupSpec::Agl1(p as usize), 3)?;
    let sym = orbit_config(&GroupSpec::Sym(p as usize), 3)?;
    let outcome = enumerate_fusions(&EnumerationJob {
        base: agl.clone(),
        ast_only: false,
        budget: budget.clone(),
    })?;
    let mut entries = Vec::new();
    let mut pi_checks = Vec::new();
    for cfg in &outcome.results {
        entries.push(describe(cfg)?);
        pi_checks.push(verify_pi_partition(cfg)?);
    }
    let mut expected = vec![agl, sym];
    expected.sort_by(|a, b| a.colors().cmp(b.colors()));
    let matches = outcome.results == expected;
    let pass = outcome.complete && matches && pi_checks.iter().all(|c| c.holds);
    Ok(Report::new(
        "thm51",
        Some(p),
        outcome.complete,
        pass,
        entries,
        json!({
            "fusions": outcome.results.len(),
            "equal_to_agl_and_sym": matches,
            "pi_checks": pi_checks,
            "nodes": outcome.nodes,
        }),
    ))
}

/// Enumerates all fusions of `orb_3(C_p)` and checks that the ones with a
/// nontrivial binary projection are schurian.
pub fn suite_thm11(p: u64, budget: &SearchBudget) -> Result<Report> {
    require_suite_prime("thm11", p)?;
    let base = orbit_config(&GroupSpec::Cyclic(p as usize), 3)?;
    let outcome = enumerate_fusions(&EnumerationJob {
        base,
        ast_only: false,
        budget: budget.clone(),
    })?;
    let mut entries = Vec::new();
    for cfg in &outcome.results {
        entries.push(describe(cfg)?);
    }
    let violations = entries.iter().filter(|e| !e.ast && !e.schurian).count();
    let pass = outcome.complete && violations == 0 && entries.iter().all(|e| e.translations_in_aut);
    Ok(Report::new(
        "thm11",
        Some(p),
        outcome.complete,
        pass,
        entries,
        json!({
            "fusions": outcome.results.len(),
            "non_ast_nonschurian": violations,
            "nodes": outcome.nodes,
        }),
    ))
}

/// AST fusions of `orb_3(C_p ⋊ C_d)` for every `d | p - 1`. Outcomes are
/// reported; the suite passes when every search completes and every result
/// is consistent.
pub fn suite_exception_probe(p: u64, budget: &SearchBudget) -> Result<Report> {
    require_suite_prime("exception-probe", p)?;
    if quadratic_class(p)?.is_pm3() {
        return Err(Error::InvalidArgument(format!(
            "exception-probe needs p ≡ ±1 (mod 8), got {}",
            p
        )));
    }
    let mut entries = Vec::new();
    let mut per_base = Vec::new();
    let mut complete = true;
    let mut consistent = true;
    for d in (1..p).filter(|d| (p - 1) % d == 0) {
        let spec = GroupSpec::Cyclotomic { p: p as usize, d: d as usize };
        let base = orbit_config(&spec, 3)?;
        let outcome = enumerate_fusions(&EnumerationJob {
            base,
            ast_only: true,
            budget: budget.clone(),
        })?;
        complete &= outcome.complete;
        let mut summaries = Vec::new();
        for cfg in &outcome.results {
            let entry = describe(cfg)?;
            let witness_ok = if entry.schurian {
                TensorConfig::orbit_coloring(&is_schurian(cfg)?.group, 3)? == *cfg
            } else {
                true
            };
            let ok = cfg.validate().is_coherent() && entry.ast && entry.translations_in_aut && witness_ok;
            consistent &= ok;
            summaries.push(json!({
                "classes": entry.classes,
                "aut_order": entry.aut_order,
                "aut_matches": entry.aut_matches,
                "schurian": entry.schurian,
                "consistent": ok,
            }));
            entries.push(entry);
        }
        per_base.push(json!({
            "base": spec.to_string(),
            "complete": outcome.complete,
            "nodes": outcome.nodes,
            "fusions": summaries,
        }));
    }
    let nonschurian = entries.iter().filter(|e| !e.schurian).count();
    Ok(Report::new(
        "exception-probe",
        Some(p),
        complete,
        complete && consistent,
        entries,
        json!({ "bases": per_base, "nonschurian": nonschurian }),
    ))
}

/// Dispatches the theorem-level suites.
pub fn theorem_checks(p: u64, suite: &str, budget: &SearchBudget) -> Result<Report> {
    match suite {
        "thm11" => suite_thm11(p, budget),
        "thm51" => suite_thm51(p, budget),
        "exception-probe" => suite_exception_probe(p, budget),
        other => Err(Error::InvalidArgument(format!("unknown theorem suite `{}`", other))),
    }
}

pub fn suite_lemma41(max_p: u64) -> Result<Report> {
    let mut missing = Vec::new();
    let mut checked = 0;
    for p in primes_up_to(max_p).into_iter().filter(|&p| p > 2) {
        checked += 1;
        if lemma41_witness(p)?.is_none() {
            missing.push(p);
        }
    }
    Ok(Report::new(
        "lemma41",
        None,
        true,
        missing.is_empty(),
        Vec::new(),
        json!({ "max_p": max_p, "primes": checked, "without_witness": missing }),
    ))
}

pub fn suite_quadratic(max_p: u64) -> Result<Report> {
    let mut checked = 0;
    for p in primes_up_to(max_p).into_iter().filter(|&p| p > 2) {
        quadratic_class(p)?;
        checked += 1;
    }
    Ok(Report::new(
        "quadratic",
        None,
        true,
        true,
        Vec::new(),
        json!({ "max_p": max_p, "primes": checked }),
    ))
}

/// Random subsets `X ⊆ F_p^× ∖ {1}` for primes `3 ≤ p ≤ max_p`.
pub fn suite_lemma42(samples: usize, max_p: u64, seed: u64) -> Result<Report> {
    let primes: Vec<u64> = primes_up_to(max_p).into_iter().filter(|&p| p > 2).collect();
    if primes.is_empty() {
        return Err(Error::InvalidArgument("lemma42 needs max_p ≥ 3".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut radical, mut group_type, mut sum) = (Vec::new(), Vec::new(), Vec::new());
    for _ in 0..samples {
        let p = *primes.choose(&mut rng).expect("nonempty");
        let mut x = random_subset(&mut rng, p);
        if x.is_empty() {
            x.push(rng.gen_range(2..p as u32));
        }
        let r = lemma42_check(p, &x)?;
        if r.violates_radical_statement {
            radical.push(json!({ "p": p, "x": r.x }));
        }
        if r.violates_group_type_statement {
            group_type.push(json!({ "p": p, "x": r.x }));
        }
        if !r.sum_identity {
            sum.push(json!({ "p": p, "x": r.x }));
        }
    }
    let pass = radical.is_empty() && group_type.is_empty() && sum.is_empty();
    Ok(Report::new(
        "lemma42",
        None,
        true,
        pass,
        Vec::new(),
        json!({
            "samples": samples,
            "max_p": max_p,
            "seed": seed,
            "radical_violations": radical,
            "group_type_violations": group_type,
            "sum_identity_violations": sum,
        }),
    ))
}

/// A random subset of `{2, .., p-1}`. Half of the draws use a random
/// subgroup coset union so that nontrivial radicals and group-type sets
/// actually occur.
fn random_subset(rng: &mut ChaCha8Rng, p: u64) -> Vec<u32> {
    if rng.gen_bool(0.5) {
        let divisors: Vec<u64> = (1..p).filter(|d| (p - 1) % d == 0).collect();
        let d = *divisors.choose(rng).expect("nonempty");
        let carrier = Carrier::fstar(p as u32).expect("prime");
        let sub = carrier.subgroup_of_order(d as usize).expect("divisor");
        let mut chosen = Vec::new();
        let mut seen = vec![false; p as usize];
        for &g in carrier.elements() {
            if seen[g as usize] {
                continue;
            }
            let coset: Vec<u32> = sub.elements().iter().map(|&h| carrier.op(g, h)).collect();
            for &c in &coset {
                seen[c as usize] = true;
            }
            if rng.gen_bool(0.5) {
                chosen.extend(coset);
            }
        }
        chosen.retain(|&v| v != 1);
        chosen.sort_unstable();
        chosen
    } else {
        (2..p as u32).filter(|_| rng.gen_bool(0.5)).collect()
    }
}

/// Counts of starred classes of `orb_3(G)`, with the non-starred classes
/// checked to be single orbits when `G` is 2-transitive.
pub fn suite_starred(spec: &GroupSpec) -> Result<Report> {
    let group = spec.build()?;
    let cfg = TensorConfig::orbit_coloring(&group, 3)?;
    let two_transitive = group.is_two_transitive();
    let report = starred_classes(&cfg, two_transitive.then_some(&group))?;
    let pass = report.others_are_orbits.unwrap_or(true);
    Ok(Report::new(
        "starred",
        Some(group.degree() as u64),
        true,
        pass,
        Vec::new(),
        json!({
            "group": spec.to_string(),
            "starred_classes": report.starred.len(),
            "two_transitive": two_transitive,
            "others_are_orbits": report.others_are_orbits,
            "nonprime_degree": spec.has_nonprime_degree(),
        }),
    ))
}

/// Subgroups `K ≤ F_p^×` with `|orb_2(C_p ⋊ K)| > 2`, as their orders.
fn nontrivial_cyclotomic_orders(p: u64) -> Vec<u64> {
    (1..p - 1).filter(|d| (p - 1) % d == 0).collect()
}

/// The one-point extension at 0 of every nontrivial cyclotomic scheme has
/// discrete residues at all points other than 0.
pub fn suite_lemma61(max_p: u64) -> Result<Report> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in primes_up_to(max_p.min(31)).into_iter().filter(|&p| p > 2) {
        for d in nontrivial_cyclotomic_orders(p) {
            let cfg = orbit_config(&GroupSpec::Cyclotomic { p: p as usize, d: d as usize }, 2)?;
            let ext = cfg.one_point_extension(0)?;
            checked += 1;
            for y in 1..p as u32 {
                if ext.residue(&[0], &[y])?.class_count() != p as usize {
                    failures.push(json!({ "p": p, "d": d, "y": y }));
                    break;
                }
            }
        }
    }
    Ok(Report::new(
        "lemma61",
        None,
        true,
        failures.is_empty(),
        Vec::new(),
        json!({ "max_p": max_p, "schemes": checked, "failures": failures }),
    ))
}

/// The ternary closure of a nontrivial cyclotomic scheme is its orbit
/// configuration.
pub fn suite_wl3(max_p: u64) -> Result<Report> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in primes_up_to(max_p).into_iter().filter(|&p| p > 2) {
        for d in nontrivial_cyclotomic_orders(p) {
            let spec = GroupSpec::Cyclotomic { p: p as usize, d: d as usize };
            let binary = orbit_config(&spec, 2)?;
            checked += 1;
            if binary.wl3_of_binary()? != orbit_config(&spec, 3)? {
                failures.push(spec.to_string());
            }
        }
    }
    Ok(Report::new(
        "wl3",
        None,
        true,
        failures.is_empty(),
        Vec::new(),
        json!({ "max_p": max_p, "schemes": checked, "failures": failures }),
    ))
}

/// Identities relating groups, orbit configurations, projections and
/// residues, over the catalog groups of every degree up to `max_n`.
pub fn suite_galois(max_n: usize) -> Result<Report> {
    let mut failures: Vec<Value> = Vec::new();
    let mut checked = 0;
    for n in 3..=max_n {
        for spec in catalog_of_degree(n) {
            let group = spec.build()?;
            for m in [2usize, 3] {
                let cfg = TensorConfig::orbit_coloring(&group, m)?;
                checked += 1;
                for issue in galois_violations(&cfg, Some(&group))? {
                    failures.push(json!({ "group": spec.to_string(), "m": m, "issue": issue }));
                }
            }
        }
    }
    Ok(Report::new(
        "galois",
        None,
        true,
        failures.is_empty(),
        Vec::new(),
        json!({ "max_n": max_n, "configurations": checked, "failures": failures }),
    ))
}

/// Violated identities for one coherent configuration, optionally built
/// from `group`.
pub fn galois_violations(cfg: &TensorConfig, group: Option<&PermGroup>) -> Result<Vec<String>> {
    let mut issues = Vec::new();
    if !cfg.validate().is_coherent() {
        issues.push("not coherent".to_string());
    }
    if cfg.wl_close() != *cfg {
        issues.push("not a WL fixpoint".to_string());
    }
    let aut = automorphism_group(cfg)?;
    if let Some(g) = group {
        if !g.generators().iter().all(|f| aut.is_member(f).unwrap_or(false)) {
            issues.push("group not contained in the automorphism group".to_string());
        }
    }
    let orbits = TensorConfig::orbit_coloring(&aut, cfg.m())?;
    if !automorphism_group(&orbits)?.equals(&aut)? {
        issues.push("aut(orb(aut)) differs from aut".to_string());
    }
    if !cfg.leq(&orbits)? {
        issues.push("orbits of the automorphism group are not finer than the configuration".to_string());
    }
    for i in 0..cfg.m() {
        let others: Vec<usize> = (0..cfg.m()).filter(|&j| j != i).collect();
        if others.is_empty() {
            continue;
        }
        let projected = cfg.project(&others)?;
        if !automorphism_group(&projected)?.contains_group(&aut)? {
            issues.push(format!("projection to {:?} lost automorphisms", others));
        }
        for u in 0..cfg.n() as u32 {
            let res = cfg.residue(&[i], &[u])?;
            if !projected.leq(&res)? {
                issues.push(format!("residue at {} on coordinate {} is not finer than the projection", u, i));
            }
            if let Some(g) = group {
                let stab = g.stabilizer_of_tuple(&[u])?;
                if res != TensorConfig::orbit_coloring(&stab, cfg.m() - 1)? {
                    issues.push(format!("residue at {} is not the orbit configuration of the stabilizer", u));
                }
            }
        }
    }
    Ok(issues)
}

/// Convenience for callers holding a permutation list.
pub fn group_of(degree: usize, gens: Vec<Permutation>) -> Result<PermGroup> {
    PermGroup::from_generators(degree, gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orb(spec: &str, m: usize) -> TensorConfig {
        orbit_config(&GroupSpec::parse(spec).unwrap(), m).unwrap()
    }

    #[test]
    fn schurian_examples() {
        let v = is_schurian(&orb("cyclic:5", 3)).unwrap();
        assert!(v.schurian);
        assert_eq!(v.group.order(), 5);
        let closed = TensorConfig::pattern_coloring(7, 3).unwrap().wl_close();
        let v = is_schurian(&closed).unwrap();
        assert!(v.schurian);
        assert_eq!(v.group.order(), 5040);
        assert!(is_schurian(&orb("cyclotomic:7:3", 3)).unwrap().schurian);
    }

    #[test]
    fn pi_partition_examples() {
        let pi = pi_partition(&orb("sym:5", 3)).unwrap();
        assert_eq!(pi.classes(), &[vec![1], vec![2, 3, 4]]);
        assert!(pi_partition(&orb("agl1:7", 3)).unwrap().is_discrete());
        assert!(pi_partition(&orb("agl1:5", 3)).unwrap().is_discrete());
    }

    #[test]
    fn pi_partition_checks() {
        let c = verify_pi_partition(&orb("sym:7", 3)).unwrap();
        assert_eq!(c.classes, vec![vec![1], vec![2, 3, 4, 5, 6]]);
        assert!(c.holds && c.tau_closed);
        let c = verify_pi_partition(&orb("agl1:7", 3)).unwrap();
        assert!(c.holds && c.tau_closed);
        assert!(matches!(
            verify_pi_partition(&orb("cyclic:5", 3)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn starred_examples() {
        for (spec, count) in [("psl:2:11", 2), ("pgl:3:2", 2), ("sym:5", 1), ("agl1:5", 3)] {
            let g = GroupSpec::parse(spec).unwrap().build().unwrap();
            let cfg = TensorConfig::orbit_coloring(&g, 3).unwrap();
            let r = starred_classes(&cfg, Some(&g)).unwrap();
            assert_eq!(r.starred.len(), count, "{}", spec);
            assert_eq!(r.others_are_orbits, Some(true), "{}", spec);
        }
    }

    #[test]
    fn enumeration_examples() {
        let job = |spec: &str| EnumerationJob {
            base: orb(spec, 3),
            ast_only: false,
            budget: SearchBudget::default(),
        };
        let out = enumerate_fusions(&job("agl1:5")).unwrap();
        assert!(out.complete);
        let mut want = vec![orb("agl1:5", 3), orb("sym:5", 3)];
        want.sort_by(|a, b| a.colors().cmp(b.colors()));
        assert_eq!(out.results, want);

        let out = enumerate_fusions(&job("sym:5")).unwrap();
        assert_eq!(out.results, vec![orb("sym:5", 3)]);

        let out = enumerate_fusions(&job("cyclic:5")).unwrap();
        assert!(out.complete);
        for spec in ["cyclic:5", "cyclotomic:5:2", "agl1:5", "sym:5"] {
            assert!(out.results.contains(&orb(spec, 3)), "{}", spec);
        }
    }

    #[test]
    fn binary_enumeration_matches_schur_partitions() {
        // circulant binary schemes on Z_p correspond to Schur partitions of Z_p
        let out = enumerate_fusions(&EnumerationJob {
            base: orb("cyclic:7", 2),
            ast_only: false,
            budget: SearchBudget::default(),
        })
        .unwrap();
        let schur = crate::schur::enumerate_schur_partitions(&Carrier::zmod(7).unwrap()).unwrap();
        assert_eq!(out.results.len(), schur.len());
    }
}
