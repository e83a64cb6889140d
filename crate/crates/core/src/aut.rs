//! Automorphism groups of configurations.
//!
//! Points are individualized along a base chosen from the source
//! configuration; after each individualization the point coloring is refined
//! until stable. Colors are interned signatures shared between the source and
//! every target branch, so equal colors mean equal refinement histories.
//! Levels are processed from the deepest up: the orbit of each base point
//! under the stabilizer of the earlier ones is completed by searching for one
//! automorphism per candidate not already reached by known generators.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::group::PermGroup;
use crate::perm::Permutation;
use crate::tensor::TensorConfig;

pub const DEFAULT_AUT_NODE_LIMIT: u64 = 10_000_000;

#[derive(Clone, Debug)]
pub struct AutOptions {
    pub node_limit: u64,
    /// Candidate automorphisms; each is verified and dropped if it is not one.
    pub seeds: Vec<Permutation>,
}

impl Default for AutOptions {
    fn default() -> Self {
        AutOptions {
            node_limit: DEFAULT_AUT_NODE_LIMIT,
            seeds: Vec::new(),
        }
    }
}

/// The group of permutations preserving every class.
pub fn automorphism_group(cfg: &TensorConfig) -> Result<PermGroup> {
    automorphism_group_with(cfg, &AutOptions::default())
}

pub fn automorphism_group_with(cfg: &TensorConfig, options: &AutOptions) -> Result<PermGroup> {
    Searcher::new(cfg, options.node_limit).run(&options.seeds)
}

/// The translation `x ↦ x + 1 mod n`.
pub fn translation(n: usize) -> Permutation {
    Permutation::from_fn(n, |x| (x + 1) % n as u32).expect("translation is a bijection")
}

struct Searcher<'a> {
    cfg: &'a TensorConfig,
    n: usize,
    pair: Vec<u32>,
    dict: HashMap<Vec<u32>, u32>,
    nodes: u64,
    node_limit: u64,
}

impl<'a> Searcher<'a> {
    fn new(cfg: &'a TensorConfig, node_limit: u64) -> Self {
        let n = cfg.n();
        let mut pair_ids: HashMap<[u32; 3], u32> = HashMap::new();
        let mut pair = vec![0u32; n * n];
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                let key = match cfg.m() {
                    1 => [0, 0, 0],
                    2 => [color(cfg, &[a, b]), 0, 0],
                    _ => [color(cfg, &[a, b, b]), color(cfg, &[a, a, b]), color(cfg, &[a, b, a])],
                };
                let next = pair_ids.len() as u32;
                pair[a as usize * n + b as usize] = *pair_ids.entry(key).or_insert(next);
            }
        }
        Searcher {
            cfg,
            n,
            pair,
            dict: HashMap::new(),
            nodes: 0,
            node_limit,
        }
    }

    fn intern(&mut self, sig: Vec<u32>) -> u32 {
        let next = self.dict.len() as u32;
        *self.dict.entry(sig).or_insert(next)
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(Error::BudgetExhausted { nodes: self.nodes });
        }
        Ok(())
    }

    fn initial(&mut self) -> Vec<u32> {
        let cfg = self.cfg;
        let colors: Vec<u32> = (0..self.n as u32)
            .map(|a| {
                let diag = vec![a; cfg.m()];
                self.intern(vec![0, color(cfg, &diag)])
            })
            .collect();
        self.refine(colors)
    }

    /// Individualizes the last point of `seq` on top of `prev`.
    fn individualize(&mut self, prev: &[u32], seq: &[u32]) -> Vec<u32> {
        let cfg = self.cfg;
        let (&y, earlier) = seq.split_last().expect("nonempty sequence");
        let colors: Vec<u32> = (0..self.n as u32)
            .map(|a| {
                let mut sig = vec![1, prev[a as usize], u32::from(a == y)];
                match cfg.m() {
                    1 => {}
                    2 => {
                        sig.push(color(cfg, &[a, y]));
                        sig.push(color(cfg, &[y, a]));
                    }
                    _ => {
                        for t in [[a, y, y], [y, a, y], [y, y, a], [a, a, y], [a, y, a], [y, a, a]] {
                            sig.push(color(cfg, &t));
                        }
                        for &z in earlier {
                            for t in [[a, y, z], [a, z, y], [y, a, z], [z, a, y], [y, z, a], [z, y, a]] {
                                sig.push(color(cfg, &t));
                            }
                        }
                    }
                }
                self.intern(sig)
            })
            .collect();
        self.refine(colors)
    }

    fn refine(&mut self, mut colors: Vec<u32>) -> Vec<u32> {
        let n = self.n;
        let mut count = distinct(&colors);
        loop {
            let next: Vec<u32> = (0..n)
                .map(|a| {
                    let mut row: Vec<(u32, u32)> = (0..n).map(|b| (colors[b], self.pair[a * n + b])).collect();
                    row.sort_unstable();
                    let mut sig = Vec::with_capacity(2 * n + 2);
                    sig.push(2);
                    sig.push(colors[a]);
                    for (c, p) in row {
                        sig.push(c);
                        sig.push(p);
                    }
                    self.intern(sig)
                })
                .collect();
            let k = distinct(&next);
            colors = next;
            if k == count {
                return colors;
            }
            count = k;
        }
    }

    fn run(mut self, seeds: &[Permutation]) -> Result<PermGroup> {
        let n = self.n;
        let mut gens: Vec<Permutation> = seeds
            .iter()
            .filter(|s| s.degree() == n && !s.is_identity() && self.cfg.is_preserved_by(s))
            .cloned()
            .collect();

        let mut levels = vec![self.initial()];
        let mut base: Vec<u32> = Vec::new();
        loop {
            let colors = levels.last().expect("levels");
            let Some(b) = choose_target_cell(colors) else { break };
            base.push(b);
            let next = self.individualize(&levels[levels.len() - 1].clone(), &base);
            levels.push(next);
        }

        let mut orbit_sizes = vec![1u128; base.len()];
        for i in (0..base.len()).rev() {
            let prefix = &base[..i];
            let colors = &levels[i];
            let want = colors[base[i] as usize];
            let candidates: Vec<u32> = (0..n as u32).filter(|&t| colors[t as usize] == want).collect();
            let mut orbit = point_orbit(&stabilizing(&gens, prefix), base[i], n);
            let mut failed = vec![false; n];
            for t in candidates {
                if orbit[t as usize] || failed[t as usize] {
                    continue;
                }
                let mut seq = prefix.to_vec();
                seq.push(t);
                match self.extend(&base, &levels, i, &seq)? {
                    Some(f) => {
                        gens.push(f);
                        orbit = point_orbit(&stabilizing(&gens, prefix), base[i], n);
                    }
                    None => {
                        let reach = point_orbit(&stabilizing(&gens, prefix), t, n);
                        for (slot, r) in failed.iter_mut().zip(reach) {
                            *slot |= r;
                        }
                    }
                }
            }
            orbit_sizes[i] = orbit.iter().filter(|&&o| o).count() as u128;
        }

        let group = PermGroup::from_generators(n, gens)?;
        let expected: u128 = orbit_sizes.iter().product();
        if group.order() != expected {
            return Err(Error::Anomaly(format!(
                "automorphism search found orbit sizes with product {} but the generators give order {}",
                expected,
                group.order()
            )));
        }
        Ok(group)
    }

    /// Looks for one automorphism mapping `base[..=depth]` to `seq`.
    fn extend(
        &mut self,
        base: &[u32],
        levels: &[Vec<u32>],
        depth: usize,
        seq: &[u32],
    ) -> Result<Option<Permutation>> {
        self.tick()?;
        let target = self.individualize(&levels[depth], seq);
        self.extend_from(base, levels, depth + 1, seq.to_vec(), target)
    }

    fn extend_from(
        &mut self,
        base: &[u32],
        levels: &[Vec<u32>],
        depth: usize,
        seq: Vec<u32>,
        target: Vec<u32>,
    ) -> Result<Option<Permutation>> {
        if sorted(&target) != sorted(&levels[depth]) {
            return Ok(None);
        }
        if depth == base.len() {
            return Ok(self.leaf(&levels[depth], &target));
        }
        let want = levels[depth][base[depth] as usize];
        let candidates: Vec<u32> = (0..self.n as u32).filter(|&t| target[t as usize] == want).collect();
        for t in candidates {
            self.tick()?;
            let mut next_seq = seq.clone();
            next_seq.push(t);
            let next = self.individualize(&target, &next_seq);
            if let Some(f) = self.extend_from(base, levels, depth + 1, next_seq, next)? {
                return Ok(Some(f));
            }
        }
        Ok(None)
    }

    fn leaf(&self, source: &[u32], target: &[u32]) -> Option<Permutation> {
        let mut by_color: HashMap<u32, u32> = HashMap::new();
        for (t, &c) in target.iter().enumerate() {
            by_color.insert(c, t as u32);
        }
        let images: Vec<u32> = source.iter().map(|c| by_color[c]).collect();
        let f = Permutation::from_images(images).ok()?;
        self.cfg.is_preserved_by(&f).then_some(f)
    }
}

fn color(cfg: &TensorConfig, x: &[u32]) -> u32 {
    let n = cfg.n();
    cfg.colors()[x.iter().fold(0, |acc, &d| acc * n + d as usize)]
}

fn distinct(colors: &[u32]) -> usize {
    let mut v = colors.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn sorted(colors: &[u32]) -> Vec<u32> {
    let mut v = colors.to_vec();
    v.sort_unstable();
    v
}

/// First point of the smallest non-singleton cell, if any.
fn choose_target_cell(colors: &[u32]) -> Option<u32> {
    let mut sizes: HashMap<u32, usize> = HashMap::new();
    for &c in colors {
        *sizes.entry(c).or_insert(0) += 1;
    }
    (0..colors.len())
        .filter(|&a| sizes[&colors[a]] > 1)
        .min_by_key(|&a| (sizes[&colors[a]], a))
        .map(|a| a as u32)
}

fn stabilizing(gens: &[Permutation], prefix: &[u32]) -> Vec<Permutation> {
    gens.iter()
        .filter(|g| prefix.iter().all(|&b| g.apply(b) == b))
        .cloned()
        .collect()
}

fn point_orbit(gens: &[Permutation], start: u32, n: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[start as usize] = true;
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = g.apply(x);
            if !seen[y as usize] {
                seen[y as usize] = true;
                stack.push(y);
            }
        }
    }
    seen
}
