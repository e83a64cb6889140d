//! Property tests for the structural invariants.

mod common;

use proptest::prelude::*;

use common::{canonical, is_coarser};
use tcc_core::arith::{lemma42_check, quadratic_class};
use tcc_core::aut::translation;
use tcc_core::catalog::catalog_of_degree;
use tcc_core::fusion::SearchBudget;
use tcc_core::pipeline::{automorphism_group, enumerate_fusions, pi_partition, EnumerationJob};
use tcc_core::schur::{cyclotomic_partition, enumerate_schur_partitions, is_schur_partition};
use tcc_core::{Carrier, FusionSpec, GroupSpec, PermGroup, Permutation, TensorConfig};

fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n as u32).collect::<Vec<u32>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn group_strategy() -> impl Strategy<Value = PermGroup> {
    (2usize..=6).prop_flat_map(|n| {
        prop::collection::vec(perm_strategy(n), 0..3).prop_map(move |gens| PermGroup::from_generators(n, gens).unwrap())
    })
}

fn catalog_upto(n: usize) -> Vec<GroupSpec> {
    (3..=n).flat_map(catalog_of_degree).collect()
}

fn catalog_strategy(max_n: usize) -> impl Strategy<Value = GroupSpec> {
    prop::sample::select(catalog_upto(max_n))
}

/// A coloring of `Ω^m` with at most `k` colors.
fn coloring_strategy() -> impl Strategy<Value = TensorConfig> {
    (2usize..=4, 1usize..=3).prop_flat_map(|(n, m)| {
        let size = n.pow(m as u32);
        prop::collection::vec(0u32..4, size).prop_map(move |c| TensorConfig::from_colors(n, m, c).unwrap())
    })
}

/// A coloring together with a coarsening of it.
fn coarsening_strategy() -> impl Strategy<Value = (TensorConfig, TensorConfig)> {
    coloring_strategy().prop_flat_map(|fine| {
        let k = fine.class_count();
        prop::collection::vec(0u32..3, k).prop_map(move |map| {
            let coarse: Vec<u32> = fine.colors().iter().map(|&c| map[c as usize]).collect();
            let coarse = TensorConfig::from_colors(fine.n(), fine.m(), coarse).unwrap();
            (coarse, fine.clone())
        })
    })
}

fn circulant_fusions(p: usize) -> Vec<TensorConfig> {
    let base = TensorConfig::orbit_coloring(&GroupSpec::Cyclic(p).build().unwrap(), 3).unwrap();
    enumerate_fusions(&EnumerationJob {
        base,
        ast_only: false,
        budget: SearchBudget::default(),
    })
    .unwrap()
    .results
}

/// A random pattern-respecting fusion of `base`, which need not be coherent.
fn random_fusion(base: &TensorConfig, choice: &[u32]) -> TensorConfig {
    let mut first_of_kind: Vec<(tcc_core::EquivPattern, u32)> = Vec::new();
    let map: Vec<u32> = base
        .classes()
        .iter()
        .enumerate()
        .map(|(i, info)| {
            let target = choice[i % choice.len()] as usize % (i + 1);
            if base.classes()[target].pattern == info.pattern {
                target as u32
            } else {
                match first_of_kind.iter().find(|(p, _)| *p == info.pattern) {
                    Some(&(_, c)) => c,
                    None => {
                        first_of_kind.push((info.pattern.clone(), i as u32));
                        i as u32
                    }
                }
            }
        })
        .collect();
    let map: Vec<u32> = (0..map.len()).map(|i| resolve(&map, i as u32)).collect();
    base.fuse(&FusionSpec::new(canonical(&map)).unwrap()).unwrap()
}

/// The exponents `k^0, k^1, ...` modulo the order of the carrier.
fn generated(carrier: &Carrier, k: u64) -> Vec<u64> {
    let n = carrier.order().max(1) as u64;
    let mut out = vec![1 % n];
    let mut x = k % n;
    while !out.contains(&x) {
        out.push(x);
        x = x * k % n;
    }
    out
}

fn resolve(map: &[u32], mut c: u32) -> u32 {
    while map[c as usize] != c {
        c = map[c as usize];
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_acts_on_the_right(
        (f, g, x) in (2usize..=8).prop_flat_map(|n| (perm_strategy(n), perm_strategy(n), prop::collection::vec(0..n as u32, 1..4)))
    ) {
        let fg = f.compose(&g);
        prop_assert_eq!(fg.act_on_tuple(&x).unwrap(), g.act_on_tuple(&f.act_on_tuple(&x).unwrap()).unwrap());
    }

    #[test]
    fn tuple_orbits_partition_and_divide(g in group_strategy(), m in 1usize..=3) {
        let orbits = g.orbits_on_tuples(m).unwrap();
        let sizes = orbits.sizes();
        prop_assert_eq!(sizes.iter().sum::<usize>(), g.degree().pow(m as u32));
        for s in sizes {
            prop_assert_eq!(g.order() % s as u128, 0);
        }
    }

    #[test]
    fn orbit_stabilizer(g in group_strategy(), seed in any::<u64>(), k in 1usize..=3) {
        let n = g.degree() as u64;
        let y: Vec<u32> = (0..k).map(|i| ((seed >> (8 * i)) % n) as u32).collect();
        let orbits = g.orbits_on_tuples(k).unwrap();
        let r = y.iter().fold(0usize, |acc, &d| acc * n as usize + d as usize);
        let size = orbits.sizes()[orbits.labels[r] as usize] as u128;
        prop_assert_eq!(g.order(), size * g.stabilizer_of_tuple(&y).unwrap().order());
    }

    #[test]
    fn wl_close_is_idempotent_and_refines(c in coloring_strategy()) {
        let closed = c.wl_close();
        prop_assert!(c.leq(&closed).unwrap());
        prop_assert_eq!(closed.wl_close(), closed.clone());
        prop_assert!(closed.validate().is_coherent());
    }

    #[test]
    fn wl_close_is_monotone((coarse, fine) in coarsening_strategy()) {
        prop_assert!(coarse.leq(&fine).unwrap());
        prop_assert!(coarse.wl_close().leq(&fine.wl_close()).unwrap());
    }

    #[test]
    fn coherent_iff_fixpoint(c in coloring_strategy()) {
        prop_assert_eq!(c.validate().is_coherent(), c.wl_close() == c);
    }

    #[test]
    fn wl_close_is_deterministic_across_worker_counts(c in coloring_strategy()) {
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| c.wl_close())
        };
        let one = run(1);
        let four = run(4);
        let default = c.wl_close();
        prop_assert_eq!(one.colors(), four.colors());
        prop_assert_eq!(one.colors(), default.colors());
    }

    #[test]
    fn residues_of_orbit_configurations(spec in catalog_strategy(7), m in 2usize..=3, seed in any::<u64>()) {
        let g = spec.build().unwrap();
        let cfg = TensorConfig::orbit_coloring(&g, m).unwrap();
        let n = cfg.n() as u64;
        let k = 1 + (seed % (m as u64 - 1)) as usize;
        let coords: Vec<usize> = (0..k).collect();
        let u: Vec<u32> = (0..k).map(|i| ((seed >> (8 * i + 8)) % n) as u32).collect();
        let res = cfg.residue(&coords, &u).unwrap();
        let rest: Vec<usize> = (k..m).collect();
        prop_assert!(cfg.project(&rest).unwrap().leq(&res).unwrap());
        let stab = g.stabilizer_of_tuple(&u).unwrap();
        prop_assert_eq!(res, TensorConfig::orbit_coloring(&stab, m - k).unwrap());
    }

    #[test]
    fn residue_dominates_projection_for_coherent_closures(c in coloring_strategy(), seed in any::<u64>()) {
        let cfg = c.wl_close();
        prop_assume!(cfg.m() >= 2);
        let i = (seed % cfg.m() as u64) as usize;
        let u = ((seed >> 8) % cfg.n() as u64) as u32;
        let others: Vec<usize> = (0..cfg.m()).filter(|&j| j != i).collect();
        let res = cfg.residue(&[i], &[u]).unwrap();
        prop_assert!(cfg.project(&others).unwrap().leq(&res).unwrap());
    }

    #[test]
    fn radical_is_a_subgroup_fixing_the_set(
        (p, mask) in prop::sample::select(vec![5u32, 7, 11, 13, 17]).prop_flat_map(|p| (Just(p), 1u32..(1 << (p - 1))))
    ) {
        let carrier = Carrier::fstar(p).unwrap();
        let x: Vec<u32> = (1..p).filter(|v| mask >> (v - 1) & 1 == 1).collect();
        let rad = carrier.radical(&x).unwrap();
        for &a in &rad {
            for &b in &rad {
                prop_assert!(rad.contains(&carrier.op(a, b)));
            }
            let mut moved: Vec<u32> = x.iter().map(|&v| carrier.op(a, v)).collect();
            moved.sort_unstable();
            prop_assert_eq!(&moved, &x);
        }
    }

    #[test]
    fn lemma42_identities(
        (p, mask) in prop::sample::select(vec![3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61])
            .prop_flat_map(|p| (Just(p), any::<u64>()))
    ) {
        let mut x: Vec<u32> = (2..p as u32).filter(|v| mask >> (v % 64) & 1 == 1).collect();
        if x.is_empty() {
            x.push(2);
        }
        let r = lemma42_check(p, &x).unwrap();
        prop_assert!(r.sum_identity);
        prop_assert!(!r.violates_radical_statement);
        prop_assert!(!r.violates_group_type_statement);
    }

    #[test]
    fn galois_identity_on_random_fusions(choice in prop::collection::vec(any::<u32>(), 1..8), p in prop::sample::select(vec![5usize, 7])) {
        let base = TensorConfig::orbit_coloring(&GroupSpec::Cyclic(p).build().unwrap(), 3).unwrap();
        let c = random_fusion(&base, &choice);
        let aut = automorphism_group(&c).unwrap();
        let orbits = TensorConfig::orbit_coloring(&aut, 3).unwrap();
        prop_assert!(automorphism_group(&orbits).unwrap().equals(&aut).unwrap());
        prop_assert!(c.leq(&orbits).unwrap());
        // fusions of a circulant base keep the translation
        prop_assert!(aut.is_member(&translation(p)).unwrap());
        // monotonicity along base ≥ c and c ≥ wl_close(c)
        let closed = c.wl_close();
        prop_assert!(aut.contains_group(&automorphism_group(&base).unwrap()).unwrap());
        prop_assert!(aut.contains_group(&automorphism_group(&closed).unwrap()).unwrap());
        for i in 0..3 {
            let others: Vec<usize> = (0..3).filter(|&j| j != i).collect();
            let proj = closed.project(&others).unwrap();
            let closed_aut = automorphism_group(&closed).unwrap();
            prop_assert!(automorphism_group(&proj).unwrap().contains_group(&closed_aut).unwrap());
        }
    }
}

#[test]
fn agl_orders() {
    for p in (3..=31).filter(|&p| common::is_prime(p)) {
        let g = GroupSpec::Agl1(p as usize).build().unwrap();
        assert_eq!(g.order(), (p * (p - 1)) as u128);
    }
}

#[test]
fn group_equality_is_an_equivalence() {
    let specs: Vec<GroupSpec> = catalog_upto(7)
        .into_iter()
        .chain(["cyclic:7", "agl1:7", "pgl:3:2"].map(|s| GroupSpec::parse(s).unwrap()))
        .collect();
    let groups: Vec<PermGroup> = specs.iter().map(|s| s.build().unwrap()).collect();
    let eq = |a: &PermGroup, b: &PermGroup| a.degree() == b.degree() && a.equals(b).unwrap();
    for a in &groups {
        assert!(eq(a, a));
        for b in &groups {
            assert_eq!(eq(a, b), eq(b, a));
            for c in &groups {
                if eq(a, b) && eq(b, c) {
                    assert!(eq(a, c));
                }
            }
        }
    }
}

#[test]
fn catalog_orbit_configurations_are_coherent_and_contain_their_group() {
    for spec in catalog_upto(7) {
        let g = spec.build().unwrap();
        for m in [2usize, 3] {
            let cfg = TensorConfig::orbit_coloring(&g, m).unwrap();
            assert!(cfg.validate().is_coherent(), "{} m={}", spec, m);
            let aut = automorphism_group(&cfg).unwrap();
            for f in g.generators() {
                assert!(aut.is_member(f).unwrap(), "{} m={}", spec, m);
            }
        }
    }
}

#[test]
fn circulant_configurations_are_thin_on_full_classes() {
    for p in [5usize, 7, 11] {
        let cfg = TensorConfig::orbit_coloring(&GroupSpec::Cyclic(p).build().unwrap(), 3).unwrap();
        let full: Vec<u32> = (0..cfg.class_count() as u32)
            .filter(|&c| cfg.classes()[c as usize].pattern.class_count() == 3)
            .collect();
        for &x in &full {
            let rep = cfg.classes()[x as usize].representative.clone();
            for &a in &full {
                for &b in &full {
                    for &c in &full {
                        let v = cfg.intersection_number(x, &[a, b, c], &rep).unwrap();
                        assert!(v <= 1, "p={} {} {} {} {} -> {}", p, x, a, b, c, v);
                    }
                }
            }
        }
    }
}

#[test]
fn enumerated_fusions_are_coherent_fixpoints() {
    for p in [5usize, 7] {
        for cfg in circulant_fusions(p) {
            assert!(cfg.validate().is_coherent());
            assert_eq!(cfg.wl_close(), cfg);
            assert!(automorphism_group(&cfg).unwrap().is_member(&translation(p)).unwrap());
        }
    }
}

#[test]
fn agl_invariant_fusions_have_discrete_or_trivial_pi() {
    for p in [5u64, 11, 13] {
        assert!(quadratic_class(p).unwrap().is_pm3());
        let base = TensorConfig::orbit_coloring(&GroupSpec::Agl1(p as usize).build().unwrap(), 3).unwrap();
        let out = enumerate_fusions(&EnumerationJob {
            base,
            ast_only: false,
            budget: SearchBudget::default(),
        })
        .unwrap();
        for cfg in out.results {
            let pi = pi_partition(&cfg).unwrap();
            assert!(pi.is_discrete() || pi.is_trivial());
        }
    }
}

#[test]
fn cyclotomic_partitions_are_schur() {
    for n in 1..=16u32 {
        let carrier = Carrier::zmod(n).unwrap();
        for k in carrier.power_automorphisms() {
            let part = cyclotomic_partition(&carrier, &generated(&carrier, k)).unwrap();
            assert!(is_schur_partition(&carrier, part.classes()).unwrap().is_accepted());
        }
    }
    for p in [5u32, 7, 11, 13] {
        let carrier = Carrier::fstar(p).unwrap();
        for k in carrier.power_automorphisms() {
            let part = cyclotomic_partition(&carrier, &generated(&carrier, k)).unwrap();
            assert!(is_schur_partition(&carrier, part.classes()).unwrap().is_accepted());
        }
    }
}

#[test]
fn dichotomy_and_inverse_closure_for_all_small_schur_partitions() {
    for n in 1..=12u32 {
        let carrier = Carrier::zmod(n).unwrap();
        for part in enumerate_schur_partitions(&carrier).unwrap() {
            part.classify_lemma33().unwrap();
            for class in part.classes() {
                let mut inv: Vec<u32> = class.iter().map(|&x| carrier.inv(x)).collect();
                inv.sort_unstable();
                assert!(part.classes().contains(&inv));
            }
        }
    }
}

#[test]
fn tau_closed_partitions_with_a_foreign_singleton_are_discrete() {
    for p in [3u32, 5, 7, 11, 13] {
        let carrier = Carrier::fstar(p).unwrap();
        for part in enumerate_schur_partitions(&carrier).unwrap() {
            let foreign_singleton = part.classes().iter().any(|c| c.len() == 1 && c[0] != 1);
            if part.is_tau_closed().unwrap() && foreign_singleton {
                assert!(part.is_discrete(), "p={} {:?}", p, part.classes());
            }
        }
    }
}

#[test]
fn coarsening_helper_agrees_with_leq() {
    let fine = TensorConfig::orbit_coloring(&GroupSpec::Cyclic(5).build().unwrap(), 3).unwrap();
    let coarse = TensorConfig::pattern_coloring(5, 3).unwrap();
    assert_eq!(coarse.leq(&fine).unwrap(), is_coarser(coarse.colors(), fine.colors()));
    assert!(!fine.leq(&coarse).unwrap());
}
