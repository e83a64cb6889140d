//! Finitely generated permutation groups of small degree.
//!
//! Orders and membership come from a deterministic Schreier-Sims stabilizer
//! chain. Degrees are bounded by [`MAX_DEGREE`], so the chain is recomputed
//! from scratch whenever a different base prefix is needed.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Largest degree accepted by the group catalog and the tuple machinery.
pub const MAX_DEGREE: usize = 31;

/// Largest number of tuples `n^m` an orbit computation will allocate.
pub const MAX_TUPLES: usize = 1 << 20;

#[derive(Clone, Debug)]
struct StabChain {
    base: Vec<u32>,
    strong: Vec<Permutation>,
    /// `transversals[l][b]` maps `base[l]` to `b`.
    transversals: Vec<Vec<Option<Permutation>>>,
}

impl StabChain {
    fn build(degree: usize, gens: &[Permutation], prefix: &[u32]) -> StabChain {
        let mut base: Vec<u32> = Vec::new();
        for &b in prefix {
            if !base.contains(&b) {
                base.push(b);
            }
        }
        let mut strong: Vec<Permutation> = Vec::new();
        for g in gens {
            if !g.is_identity() && !strong.contains(g) {
                strong.push(g.clone());
            }
        }
        for s in &strong {
            if base.iter().all(|&b| s.apply(b) == b) {
                base.push(s.first_moved().expect("non-identity generator"));
            }
        }
        let mut chain = StabChain {
            base,
            strong,
            transversals: Vec::new(),
        };
        for l in 0..chain.base.len() {
            let t = chain.orbit_transversal(degree, l);
            chain.transversals.push(t);
        }

        let mut i = chain.base.len() as isize - 1;
        while i >= 0 {
            let level = i as usize;
            match chain.find_nontrivial_schreier(level) {
                Some((h, j)) => {
                    if j == chain.base.len() {
                        chain.base.push(h.first_moved().expect("non-identity residue"));
                        chain.transversals.push(Vec::new());
                    }
                    chain.strong.push(h);
                    for l in level + 1..=j {
                        chain.transversals[l] = chain.orbit_transversal(degree, l);
                    }
                    i = j as isize;
                }
                None => i -= 1,
            }
        }
        chain
    }

    fn level_gens(&self, level: usize) -> impl Iterator<Item = &Permutation> {
        let fixed = &self.base[..level];
        self.strong
            .iter()
            .filter(move |s| fixed.iter().all(|&b| s.apply(b) == b))
    }

    fn orbit_transversal(&self, degree: usize, level: usize) -> Vec<Option<Permutation>> {
        let gens: Vec<&Permutation> = self.level_gens(level).collect();
        let root = self.base[level];
        let mut t: Vec<Option<Permutation>> = vec![None; degree];
        t[root as usize] = Some(Permutation::identity(degree));
        let mut queue = VecDeque::from([root]);
        while let Some(b) = queue.pop_front() {
            let ub = t[b as usize].clone().expect("visited");
            for s in &gens {
                let c = s.apply(b);
                if t[c as usize].is_none() {
                    t[c as usize] = Some(ub.compose(s));
                    queue.push_back(c);
                }
            }
        }
        t
    }

    fn find_nontrivial_schreier(&self, level: usize) -> Option<(Permutation, usize)> {
        let gens: Vec<&Permutation> = self.level_gens(level).collect();
        let t = &self.transversals[level];
        for ub in t.iter().flatten() {
            for s in &gens {
                let b = self.base[level];
                let bs = s.apply(ub.apply(b));
                let ubs = t[bs as usize].as_ref().expect("orbit closed under level gens");
                let y = ub.compose(s).compose(&ubs.inverse());
                let (h, j) = self.sift(y, level + 1);
                if !h.is_identity() {
                    return Some((h, j));
                }
            }
        }
        None
    }

    /// Strips `g` through levels `start..`; returns the residue and the level
    /// where stripping stopped (`base.len()` when it went all the way).
    fn sift(&self, mut g: Permutation, start: usize) -> (Permutation, usize) {
        for l in start..self.base.len() {
            let b = g.apply(self.base[l]);
            match &self.transversals[l][b as usize] {
                Some(u) => g = g.compose(&u.inverse()),
                None => return (g, l),
            }
        }
        (g, self.base.len())
    }

    fn order(&self) -> u128 {
        self.transversals
            .iter()
            .map(|t| t.iter().filter(|u| u.is_some()).count() as u128)
            .product()
    }
}

/// A permutation group on `0..degree` given by generators.
#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: StabChain,
}

impl PermGroup {
    /// The group generated by `gens` on `degree` points.
    pub fn from_generators(degree: usize, gens: Vec<Permutation>) -> Result<Self> {
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    found: g.degree(),
                });
            }
        }
        let chain = StabChain::build(degree, &gens, &[]);
        Ok(PermGroup {
            degree,
            generators: gens,
            chain,
        })
    }

    /// Like [`PermGroup::from_generators`], taking the degree from the first
    /// generator. An empty list is rejected since it carries no degree.
    pub fn generated_by(gens: Vec<Permutation>) -> Result<Self> {
        let degree = gens
            .first()
            .map(|g| g.degree())
            .ok_or_else(|| Error::InvalidArgument("empty generator list has no degree".into()))?;
        Self::from_generators(degree, gens)
    }

    pub fn trivial(degree: usize) -> Self {
        Self::from_generators(degree, Vec::new()).expect("no generators")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Strong generating set relative to the internal base.
    pub fn strong_generators(&self) -> &[Permutation] {
        &self.chain.strong
    }

    pub fn order(&self) -> u128 {
        self.chain.order()
    }

    pub fn is_member(&self, f: &Permutation) -> Result<bool> {
        if f.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: f.degree(),
            });
        }
        let (h, j) = self.chain.sift(f.clone(), 0);
        Ok(j == self.chain.base.len() && h.is_identity())
    }

    /// True iff both groups have the same elements.
    pub fn equals(&self, other: &PermGroup) -> Result<bool> {
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        if self.order() != other.order() {
            return Ok(false);
        }
        for g in &other.generators {
            if !self.is_member(g)? {
                return Ok(false);
            }
        }
        for g in &self.generators {
            if !other.is_member(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True iff every generator of `other` lies in `self`.
    pub fn contains_group(&self, other: &PermGroup) -> Result<bool> {
        for g in &other.generators {
            if !self.is_member(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Pointwise stabilizer of the entries of `y`.
    pub fn stabilizer_of_tuple(&self, y: &[u32]) -> Result<PermGroup> {
        if let Some(&bad) = y.iter().find(|&&v| v as usize >= self.degree) {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: bad as usize + 1,
            });
        }
        let chain = StabChain::build(self.degree, &self.generators, y);
        let gens: Vec<Permutation> = chain
            .strong
            .iter()
            .filter(|s| y.iter().all(|&b| s.apply(b) == b))
            .cloned()
            .collect();
        PermGroup::from_generators(self.degree, gens)
    }

    /// Orbits on points, each sorted, in order of smallest element.
    pub fn point_orbits(&self) -> Vec<Vec<u32>> {
        let labels = self.orbits_on_tuples(1).expect("degree within bound");
        let mut orbits: Vec<Vec<u32>> = vec![Vec::new(); labels.count];
        for (x, &c) in labels.labels.iter().enumerate() {
            orbits[c as usize].push(x as u32);
        }
        orbits
    }

    pub fn is_transitive(&self) -> bool {
        self.degree <= 1 || self.point_orbits().len() == 1
    }

    /// 2-transitive: two orbits on ordered pairs (one when `n = 1`).
    pub fn is_two_transitive(&self) -> bool {
        match self.orbits_on_tuples(2) {
            Ok(o) => o.count <= 2,
            Err(_) => false,
        }
    }

    /// Orbits on `Ω^m`, labelled by first occurrence in row-major rank order.
    pub fn orbits_on_tuples(&self, m: usize) -> Result<TupleOrbits> {
        if m == 0 {
            return Err(Error::InvalidArgument("arity must be at least 1".into()));
        }
        let n = self.degree;
        let total = checked_pow(n, m)?;
        let mut parent: Vec<u32> = (0..total as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                let p = parent[x as usize];
                parent[x as usize] = parent[p as usize];
                x = p;
            }
            x
        }
        let mut digits = vec![0u32; m];
        for g in &self.generators {
            for r in 0..total {
                unrank_into(r, n, &mut digits);
                let mut image = 0usize;
                for &d in &digits {
                    image = image * n + g.apply(d) as usize;
                }
                let a = find(&mut parent, r as u32);
                let b = find(&mut parent, image as u32);
                if a != b {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    parent[hi as usize] = lo;
                }
            }
        }
        let mut labels = vec![u32::MAX; total];
        let mut root_label = vec![u32::MAX; total];
        let mut count = 0u32;
        for r in 0..total {
            let root = find(&mut parent, r as u32) as usize;
            if root_label[root] == u32::MAX {
                root_label[root] = count;
                count += 1;
            }
            labels[r] = root_label[root];
        }
        Ok(TupleOrbits {
            n,
            m,
            labels,
            count: count as usize,
        })
    }
}

/// Orbit labels of a group on `Ω^m`, indexed by tuple rank.
#[derive(Clone, Debug)]
pub struct TupleOrbits {
    pub n: usize,
    pub m: usize,
    pub labels: Vec<u32>,
    pub count: usize,
}

impl TupleOrbits {
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }
}

pub(crate) fn checked_pow(n: usize, m: usize) -> Result<usize> {
    let mut total: usize = 1;
    for _ in 0..m {
        total = total
            .checked_mul(n)
            .filter(|&t| t <= MAX_TUPLES)
            .ok_or_else(|| Error::SizeBound(format!("{}^{} tuples exceed {}", n, m, MAX_TUPLES)))?;
    }
    Ok(total)
}

pub(crate) fn unrank_into(mut r: usize, n: usize, out: &mut [u32]) {
    for d in out.iter_mut().rev() {
        *d = (r % n) as u32;
        r /= n;
    }
}
