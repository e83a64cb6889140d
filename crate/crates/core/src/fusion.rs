//! Exhaustive search for coherent fusions of a coherent base.
//!
//! The engine is generic over what a "class" is. A problem supplies, for
//! every base class, the multiset of entry tuples whose labels must have the
//! same histogram for all members of a fused class, and a list of class maps
//! that must send fused classes onto fused classes. Tensor configurations use
//! the substitution tuples and the coordinate maps; Schur partitions use the
//! factorizations `z = x · (x⁻¹ z)` and inversion.
//!
//! Blocks are built one at a time. The open block starts at the first free
//! class in priority order and each candidate of the same kind is either
//! included or excluded. Merges propagate through the class maps with a
//! union-find; closing a block forces its images to be blocks as well. After
//! every step the histograms are compared with interval bounds, treating
//! undecided classes as either in the open block or outside it.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};

pub const MAX_ENTRY_ARITY: usize = 3;

pub type EntryKey = [u32; MAX_ENTRY_ARITY];

#[derive(Clone, Debug)]
pub struct ClassMap {
    pub image: Vec<u32>,
    pub bijective: bool,
}

#[derive(Clone, Debug)]
pub struct FusionProblem {
    /// Classes may only be merged within one kind.
    pub kinds: Vec<u32>,
    pub arity: usize,
    /// Per class: distinct entry tuples with multiplicities.
    pub entries: Vec<Vec<(EntryKey, u32)>>,
    pub maps: Vec<ClassMap>,
    /// Order in which classes are visited.
    pub priority: Vec<u32>,
    /// Groups of classes merged before the search starts.
    pub forced: Vec<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub struct SearchBudget {
    pub node_limit: u64,
    pub time_limit: Option<Duration>,
}

pub const DEFAULT_NODE_LIMIT: u64 = 100_000_000;

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            node_limit: DEFAULT_NODE_LIMIT,
            time_limit: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FusionOutcome {
    /// Each result maps base classes to fused classes, numbered by first
    /// occurrence. Sorted and deduplicated.
    pub partitions: Vec<Vec<u32>>,
    pub complete: bool,
    pub nodes: u64,
}

const FREE: u32 = u32::MAX;
const LABEL_U: u32 = u32::MAX;
const LABEL_X: u32 = u32::MAX - 1;
const LABEL_R: u32 = u32::MAX - 2;
const LABEL_OPEN: u32 = u32::MAX - 3;

#[derive(Clone)]
struct State {
    parent: Vec<u32>,
    /// Closed block id per root, `FREE` otherwise.
    closed: Vec<u32>,
    excluded: Vec<bool>,
    open: Option<u32>,
    blocks: u32,
}

impl State {
    fn find(&mut self, mut a: u32) -> u32 {
        while self.parent[a as usize] != a {
            let up = self.parent[self.parent[a as usize] as usize];
            self.parent[a as usize] = up;
            a = up;
        }
        a
    }
}

struct Search<'a> {
    problem: &'a FusionProblem,
    budget: SearchBudget,
    started: Instant,
    nodes: u64,
    exhausted: bool,
    results: BTreeSet<Vec<u32>>,
}

enum Step {
    Ok,
    Conflict,
}

impl FusionProblem {
    fn validate(&self) -> Result<()> {
        let k = self.kinds.len();
        if self.entries.len() != k || self.priority.len() != k {
            return Err(Error::InvalidArgument("fusion problem tables disagree in size".into()));
        }
        if self.arity == 0 || self.arity > MAX_ENTRY_ARITY {
            return Err(Error::InvalidArgument(format!("entry arity {}", self.arity)));
        }
        let mut seen = vec![false; k];
        for &c in &self.priority {
            if c as usize >= k || std::mem::replace(&mut seen[c as usize], true) {
                return Err(Error::InvalidArgument("priority is not a permutation".into()));
            }
        }
        for map in &self.maps {
            if map.image.len() != k || map.image.iter().any(|&c| c as usize >= k) {
                return Err(Error::InvalidArgument("class map out of range".into()));
            }
        }
        Ok(())
    }

    /// Runs the search.
    pub fn solve(&self, budget: &SearchBudget) -> Result<FusionOutcome> {
        self.validate()?;
        let k = self.kinds.len();
        let mut state = State {
            parent: (0..k as u32).collect(),
            closed: vec![FREE; k],
            excluded: vec![false; k],
            open: None,
            blocks: 0,
        };
        let mut search = Search {
            problem: self,
            budget: budget.clone(),
            started: Instant::now(),
            nodes: 0,
            exhausted: false,
            results: BTreeSet::new(),
        };
        let mut consistent = true;
        for group in &self.forced {
            for w in group.windows(2) {
                if let Step::Conflict = search.union(&mut state, w[0], w[1]) {
                    consistent = false;
                }
            }
        }
        if consistent {
            search.descend(state);
        }
        Ok(FusionOutcome {
            partitions: search.results.into_iter().collect(),
            complete: !search.exhausted,
            nodes: search.nodes,
        })
    }
}

impl<'a> Search<'a> {
    fn over_budget(&mut self) -> bool {
        if self.exhausted {
            return true;
        }
        self.nodes += 1;
        if self.nodes > self.budget.node_limit {
            self.exhausted = true;
        } else if self.nodes % 1024 == 0 {
            if let Some(limit) = self.budget.time_limit {
                if self.started.elapsed() > limit {
                    self.exhausted = true;
                }
            }
        }
        self.exhausted
    }

    fn descend(&mut self, mut state: State) {
        if self.over_budget() {
            return;
        }
        let k = self.problem.kinds.len();
        let open = match state.open {
            Some(x) => x,
            None => {
                let next = self.problem.priority.iter().copied().find(|&c| {
                    let r = state.find(c);
                    state.closed[r as usize] == FREE
                });
                match next {
                    None => {
                        self.record(&mut state);
                        return;
                    }
                    Some(c) => {
                        let r = state.find(c);
                        state.open = Some(r);
                        state.excluded.iter_mut().for_each(|e| *e = false);
                        if !self.consistent(&mut state) {
                            return;
                        }
                        r
                    }
                }
            }
        };
        let kind = self.problem.kinds[open as usize];
        let candidate = self.problem.priority.iter().copied().find(|&c| {
            if self.problem.kinds[c as usize] != kind {
                return false;
            }
            let r = state.find(c);
            state.closed[r as usize] == FREE && Some(r) != state.open && !state.excluded[r as usize]
        });
        debug_assert!(k > 0);
        match candidate {
            None => {
                if let Step::Ok = self.close_open(&mut state) {
                    if self.consistent(&mut state) {
                        self.descend(state);
                    }
                }
            }
            Some(c) => {
                let mut with = state.clone();
                if let Step::Ok = self.union(&mut with, open, c) {
                    if self.consistent(&mut with) {
                        self.descend(with);
                    }
                }
                if self.exhausted {
                    return;
                }
                if let Step::Ok = self.exclude(&mut state, c) {
                    if self.consistent(&mut state) {
                        self.descend(state);
                    }
                }
            }
        }
    }

    fn record(&mut self, state: &mut State) {
        let k = self.problem.kinds.len();
        let mut ids: HashMap<u32, u32> = HashMap::new();
        let labels: Vec<u32> = (0..k as u32)
            .map(|c| {
                let r = state.find(c);
                let next = ids.len() as u32;
                *ids.entry(r).or_insert(next)
            })
            .collect();
        self.results.insert(labels);
    }

    /// Merges the components of `a` and `b` and everything forced by the
    /// class maps.
    fn union(&self, state: &mut State, a: u32, b: u32) -> Step {
        let mut queue = vec![(a, b)];
        while let Some((a, b)) = queue.pop() {
            let ra = state.find(a);
            let rb = state.find(b);
            if ra == rb {
                continue;
            }
            if self.problem.kinds[ra as usize] != self.problem.kinds[rb as usize] {
                return Step::Conflict;
            }
            if state.closed[ra as usize] != FREE || state.closed[rb as usize] != FREE {
                return Step::Conflict;
            }
            let xa = state.open == Some(ra);
            let xb = state.open == Some(rb);
            let ea = state.excluded[ra as usize];
            let eb = state.excluded[rb as usize];
            if (xa && eb) || (xb && ea) {
                return Step::Conflict;
            }
            let (keep, gone) = if xb { (rb, ra) } else { (ra, rb) };
            state.parent[gone as usize] = keep;
            state.excluded[keep as usize] = ea || eb;
            for map in &self.problem.maps {
                queue.push((map.image[ra as usize], map.image[rb as usize]));
            }
        }
        if self.propagate_exclusions(state) {
            Step::Ok
        } else {
            Step::Conflict
        }
    }

    fn exclude(&self, state: &mut State, c: u32) -> Step {
        let r = state.find(c);
        if state.open == Some(r) {
            return Step::Conflict;
        }
        state.excluded[r as usize] = true;
        if self.propagate_exclusions(state) {
            Step::Ok
        } else {
            Step::Conflict
        }
    }

    /// A bijective map that sends the open block into itself also sends
    /// excluded classes outside it.
    fn propagate_exclusions(&self, state: &mut State) -> bool {
        let Some(open) = state.open else { return true };
        let open = state.find(open);
        let k = self.problem.kinds.len() as u32;
        loop {
            let mut changed = false;
            for map in self.problem.maps.iter().filter(|m| m.bijective) {
                if state.find(map.image[open as usize]) != open {
                    continue;
                }
                for c in 0..k {
                    let r = state.find(c);
                    if !state.excluded[r as usize] {
                        continue;
                    }
                    let t = state.find(map.image[c as usize]);
                    if t == open {
                        return false;
                    }
                    if state.closed[t as usize] == FREE && !state.excluded[t as usize] {
                        state.excluded[t as usize] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn members(&self, state: &mut State, root: u32) -> Vec<u32> {
        (0..self.problem.kinds.len() as u32)
            .filter(|&c| state.find(c) == root)
            .collect()
    }

    /// Turns the open block into a closed one, together with all its images.
    fn close_open(&self, state: &mut State) -> Step {
        let open = state.open.take().expect("open block");
        let open = state.find(open);
        state.excluded.iter_mut().for_each(|e| *e = false);
        state.closed[open as usize] = state.blocks;
        state.blocks += 1;
        let mut work = vec![open];
        while let Some(root) = work.pop() {
            let members = self.members(state, root);
            for map in &self.problem.maps {
                let mut image: Vec<u32> = members.iter().map(|&c| map.image[c as usize]).collect();
                image.sort_unstable();
                image.dedup();
                let target = state.find(image[0]);
                let block = self.members(state, target);
                if block != image {
                    return Step::Conflict;
                }
                if state.closed[target as usize] == FREE {
                    state.closed[target as usize] = state.blocks;
                    state.blocks += 1;
                    work.push(target);
                }
            }
        }
        Step::Ok
    }

    fn labels(&self, state: &mut State) -> Vec<u32> {
        let open = state.open.map(|o| state.find(o));
        let open_kind = open.map(|o| self.problem.kinds[o as usize]);
        (0..self.problem.kinds.len() as u32)
            .map(|c| {
                let r = state.find(c);
                if state.closed[r as usize] != FREE {
                    state.closed[r as usize]
                } else if Some(r) == open {
                    LABEL_X
                } else if state.excluded[r as usize] || Some(self.problem.kinds[c as usize]) != open_kind {
                    LABEL_R
                } else {
                    LABEL_U
                }
            })
            .collect()
    }

    /// Interval test of the histogram condition on every closed block and
    /// the open block.
    fn consistent(&self, state: &mut State) -> bool {
        let labels = self.labels(state);
        let k = labels.len();
        let mut groups: HashMap<u32, Vec<u32>> = HashMap::new();
        for c in 0..k as u32 {
            let l = labels[c as usize];
            if l != LABEL_U && l != LABEL_R {
                groups.entry(l).or_default().push(c);
            }
        }
        groups
            .values()
            .filter(|members| members.len() > 1)
            .all(|members| self.group_consistent(&labels, members))
    }

    fn group_consistent(&self, labels: &[u32], members: &[u32]) -> bool {
        let arity = self.problem.arity;
        let mut exact: Vec<HashMap<EntryKey, u32>> = Vec::with_capacity(members.len());
        let mut fuzzy: Vec<Vec<(EntryKey, u32)>> = Vec::with_capacity(members.len());
        let mut coarse: Option<HashMap<EntryKey, u32>> = None;
        for &c in members {
            let mut ex: HashMap<EntryKey, u32> = HashMap::new();
            let mut fz: Vec<(EntryKey, u32)> = Vec::new();
            let mut co: HashMap<EntryKey, u32> = HashMap::new();
            for &(key, mult) in &self.problem.entries[c as usize] {
                let mut lk = [0u32; MAX_ENTRY_ARITY];
                let mut ck = [0u32; MAX_ENTRY_ARITY];
                let mut undecided = false;
                for i in 0..arity {
                    let l = labels[key[i] as usize];
                    lk[i] = l;
                    undecided |= l == LABEL_U;
                    ck[i] = if l == LABEL_U || l == LABEL_X || l == LABEL_R { LABEL_OPEN } else { l };
                }
                *co.entry(ck).or_insert(0) += mult;
                if undecided {
                    fz.push((lk, mult));
                } else {
                    *ex.entry(lk).or_insert(0) += mult;
                }
            }
            match &coarse {
                None => coarse = Some(co),
                Some(reference) => {
                    if *reference != co {
                        return false;
                    }
                }
            }
            exact.push(ex);
            fuzzy.push(fz);
        }

        let mut queries: BTreeSet<EntryKey> = BTreeSet::new();
        for ex in &exact {
            queries.extend(ex.keys().copied());
        }
        for fz in &fuzzy {
            for &(key, _) in fz {
                expand_undecided(key, arity, &mut queries);
            }
        }
        for q in &queries {
            let mut max_lo = 0;
            let mut min_hi = u32::MAX;
            for (ex, fz) in exact.iter().zip(&fuzzy) {
                let lo = ex.get(q).copied().unwrap_or(0);
                let extra: u32 = fz
                    .iter()
                    .filter(|(key, _)| compatible(key, q, arity))
                    .map(|&(_, m)| m)
                    .sum();
                max_lo = max_lo.max(lo);
                min_hi = min_hi.min(lo + extra);
                if max_lo > min_hi {
                    return false;
                }
            }
        }
        true
    }
}

fn compatible(key: &EntryKey, q: &EntryKey, arity: usize) -> bool {
    (0..arity).all(|i| key[i] == q[i] || (key[i] == LABEL_U && (q[i] == LABEL_X || q[i] == LABEL_R)))
}

fn expand_undecided(key: EntryKey, arity: usize, out: &mut BTreeSet<EntryKey>) {
    match (0..arity).find(|&i| key[i] == LABEL_U) {
        None => {
            out.insert(key);
        }
        Some(i) => {
            for l in [LABEL_X, LABEL_R] {
                let mut k2 = key;
                k2[i] = l;
                expand_undecided(k2, arity, out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Fusions of the complete graph `K_n` seen as a binary scheme on
    /// classes {diagonal, off-diagonal} are just the scheme itself.
    #[test]
    fn trivial_problem_has_one_solution() {
        let problem = FusionProblem {
            kinds: vec![0, 1],
            arity: 1,
            entries: vec![vec![([0, 0, 0], 1)], vec![([1, 0, 0], 1)]],
            maps: Vec::new(),
            priority: vec![0, 1],
            forced: Vec::new(),
        };
        let out = problem.solve(&SearchBudget::default()).unwrap();
        assert!(out.complete);
        assert_eq!(out.partitions, vec![vec![0, 1]]);
    }

    #[test]
    fn unconstrained_classes_give_all_set_partitions() {
        // three interchangeable classes with no entries: Bell(3) = 5
        let problem = FusionProblem {
            kinds: vec![0, 0, 0],
            arity: 1,
            entries: vec![Vec::new(); 3],
            maps: Vec::new(),
            priority: vec![0, 1, 2],
            forced: Vec::new(),
        };
        let out = problem.solve(&SearchBudget::default()).unwrap();
        assert_eq!(out.partitions.len(), 5);
    }

    #[test]
    fn node_limit_marks_incomplete() {
        let problem = FusionProblem {
            kinds: vec![0; 6],
            arity: 1,
            entries: vec![Vec::new(); 6],
            maps: Vec::new(),
            priority: (0..6).collect(),
            forced: Vec::new(),
        };
        let out = problem
            .solve(&SearchBudget {
                node_limit: 10,
                time_limit: None,
            })
            .unwrap();
        assert!(!out.complete);
        let full = problem.solve(&SearchBudget::default()).unwrap();
        assert!(full.complete);
        assert_eq!(full.partitions.len(), 203);
    }
}
