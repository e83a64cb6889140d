//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls into the library beyond reading colorings and
//! generator images.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use tcc_core::Permutation;

/// Every element of the group generated by `gens`, as image vectors.
pub fn group_elements(n: usize, gens: &[Permutation]) -> Vec<Vec<u32>> {
    let identity: Vec<u32> = (0..n as u32).collect();
    let gens: Vec<Vec<u32>> = gens.iter().map(|g| g.images().to_vec()).collect();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(identity.clone());
    queue.push_back(identity);
    while let Some(e) = queue.pop_front() {
        for g in &gens {
            let next: Vec<u32> = e.iter().map(|&x| g[x as usize]).collect();
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    let mut all: Vec<Vec<u32>> = seen.into_iter().collect();
    all.sort();
    all
}

pub fn all_tuples(n: usize, m: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|t: Vec<u32>| {
                (0..n as u32).map(move |a| {
                    let mut t = t.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn rank(n: usize, x: &[u32]) -> usize {
    x.iter().fold(0, |acc, &d| acc * n + d as usize)
}

/// Relabels so that colors appear as 0, 1, 2, ... in first-occurrence order.
pub fn canonical(colors: &[u32]) -> Vec<u32> {
    let mut map = HashMap::new();
    colors
        .iter()
        .map(|c| {
            let next = map.len() as u32;
            *map.entry(*c).or_insert(next)
        })
        .collect()
}

/// Orbits of an explicit element list on m-tuples, canonically colored.
pub fn orbit_colors(n: usize, m: usize, elements: &[Vec<u32>]) -> Vec<u32> {
    let tuples = all_tuples(n, m);
    let mut color = vec![u32::MAX; tuples.len()];
    let mut next = 0;
    for (r, x) in tuples.iter().enumerate() {
        if color[r] != u32::MAX {
            continue;
        }
        for g in elements {
            let y: Vec<u32> = x.iter().map(|&v| g[v as usize]).collect();
            color[rank(n, &y)] = next;
        }
        next += 1;
    }
    color
}

fn pattern(x: &[u32]) -> Vec<usize> {
    x.iter().map(|v| x.iter().position(|w| w == v).unwrap()).collect()
}

/// Direct check of the three coherence axioms.
pub fn is_coherent(n: usize, m: usize, colors: &[u32]) -> bool {
    let tuples = all_tuples(n, m);
    let mut classes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (r, &c) in colors.iter().enumerate() {
        classes.entry(c).or_default().push(r);
    }
    for members in classes.values() {
        let p = pattern(&tuples[members[0]]);
        if members.iter().any(|&r| pattern(&tuples[r]) != p) {
            return false;
        }
    }
    let sigmas = all_tuples(m, m);
    for sigma in &sigmas {
        for members in classes.values() {
            let image: HashSet<usize> = members
                .iter()
                .map(|&r| {
                    let y: Vec<u32> = sigma.iter().map(|&i| tuples[r][i as usize]).collect();
                    rank(n, &y)
                })
                .collect();
            let c = colors[*image.iter().next().unwrap()];
            if image.iter().any(|&r| colors[r] != c) || image.len() != classes[&c].len() {
                return false;
            }
        }
    }
    for members in classes.values() {
        let counts = |r: usize| {
            let mut h: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
            for alpha in 0..n as u32 {
                let key: Vec<u32> = (0..m)
                    .map(|i| {
                        let mut y = tuples[r].clone();
                        y[i] = alpha;
                        colors[rank(n, &y)]
                    })
                    .collect();
                *h.entry(key).or_insert(0) += 1;
            }
            h
        };
        let reference = counts(members[0]);
        if members.iter().skip(1).any(|&r| counts(r) != reference) {
            return false;
        }
    }
    true
}

/// Every permutation of `0..n`, via Heap's algorithm.
pub fn all_permutations(n: usize) -> Vec<Vec<u32>> {
    let mut a: Vec<u32> = (0..n as u32).collect();
    let mut c = vec![0usize; n];
    let mut out = vec![a.clone()];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// All color-preserving permutations, by exhaustion.
pub fn automorphisms(n: usize, m: usize, colors: &[u32]) -> Vec<Vec<u32>> {
    let tuples = all_tuples(n, m);
    all_permutations(n)
        .into_iter()
        .filter(|g| {
            tuples.iter().enumerate().all(|(r, x)| {
                let y: Vec<u32> = x.iter().map(|&v| g[v as usize]).collect();
                colors[rank(n, &y)] == colors[r]
            })
        })
        .collect()
}

/// Set partitions of `0..k` as restricted growth strings.
pub fn set_partitions(k: usize) -> Vec<Vec<u32>> {
    fn go(k: usize, cur: &mut Vec<u32>, max: u32, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur.push(b);
            go(k, cur, max.max(b), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        out.push(Vec::new());
    } else {
        let mut cur = vec![0];
        go(k, &mut cur, 0, &mut out);
    }
    out
}

/// `coarse` is a union of classes of `fine`.
pub fn is_coarser(coarse: &[u32], fine: &[u32]) -> bool {
    let mut map: HashMap<u32, u32> = HashMap::new();
    fine.iter()
        .zip(coarse)
        .all(|(f, c)| *map.entry(*f).or_insert(*c) == *c)
}

/// Class lists of `colors` grouped by the equivalence pattern of their
/// members.
pub fn classes_by_pattern(n: usize, m: usize, colors: &[u32]) -> Vec<Vec<u32>> {
    let tuples = all_tuples(n, m);
    let mut by: BTreeMap<Vec<usize>, Vec<u32>> = BTreeMap::new();
    let mut seen = HashSet::new();
    for (r, &c) in colors.iter().enumerate() {
        if seen.insert(c) {
            by.entry(pattern(&tuples[r])).or_default().push(c);
        }
    }
    by.into_values().collect()
}

/// Every pattern-respecting merge of the classes of `colors`, as colorings.
pub fn pattern_respecting_fusions(n: usize, m: usize, colors: &[u32]) -> Vec<Vec<u32>> {
    let groups = classes_by_pattern(n, m, colors);
    let mut results: Vec<HashMap<u32, u32>> = vec![HashMap::new()];
    let mut offset = 0u32;
    for group in &groups {
        let parts = set_partitions(group.len());
        let mut next = Vec::new();
        for partial in &results {
            for rgs in &parts {
                let mut map = partial.clone();
                for (i, &c) in group.iter().enumerate() {
                    map.insert(c, offset + rgs[i]);
                }
                next.push(map);
            }
        }
        results = next;
        offset += group.len() as u32;
    }
    results
        .into_iter()
        .map(|map| canonical(&colors.iter().map(|c| map[c]).collect::<Vec<_>>()))
        .collect()
}

/// Multiplicative order of `a` modulo the prime `p`, by stepping.
pub fn order_mod(a: u64, p: u64) -> u64 {
    let mut x = a % p;
    let mut k = 1;
    while x != 1 {
        x = x * a % p;
        k += 1;
    }
    k
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}
