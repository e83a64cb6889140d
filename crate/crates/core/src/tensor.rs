//! Colorings of `Ω^m` and the m-ary coherent configuration axioms.
//!
//! Tuples are addressed by their row-major rank
//! `rank(x) = Σ_i x_i · n^(m-1-i)` (coordinates are 0-based here; the
//! textbook indices `1..=m` map to `0..m`). Colors are always stored in
//! canonical form: class identifiers are assigned by first occurrence in rank
//! order, so two configurations are equal as partitions exactly when their
//! color vectors are equal.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{checked_pow, unrank_into, PermGroup};

/// Largest supported arity.
pub const MAX_ARITY: usize = 3;

/// The cube `Ω^m` with `Ω = {0, .., n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TupleSpace {
    pub n: usize,
    pub m: usize,
}

impl TupleSpace {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if m == 0 || m > MAX_ARITY {
            return Err(Error::InvalidArgument(format!("arity {} not in 1..={}", m, MAX_ARITY)));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("empty point set".into()));
        }
        checked_pow(n, m)?;
        Ok(TupleSpace { n, m })
    }

    pub fn size(&self) -> usize {
        self.n.pow(self.m as u32)
    }

    pub fn rank(&self, x: &[u32]) -> usize {
        x.iter().fold(0, |r, &d| r * self.n + d as usize)
    }

    pub fn unrank(&self, r: usize) -> Vec<u32> {
        let mut out = vec![0; self.m];
        unrank_into(r, self.n, &mut out);
        out
    }

    /// Place value of coordinate `i`.
    #[inline]
    fn weight(&self, i: usize) -> usize {
        self.n.pow((self.m - 1 - i) as u32)
    }

    fn check_tuple(&self, x: &[u32]) -> Result<()> {
        if x.len() != self.m {
            return Err(Error::InvalidArgument(format!(
                "tuple {:?} has length {}, expected {}",
                x,
                x.len(),
                self.m
            )));
        }
        if let Some(&bad) = x.iter().find(|&&v| v as usize >= self.n) {
            return Err(Error::InvalidArgument(format!("point {} out of range 0..{}", bad, self.n)));
        }
        Ok(())
    }
}

/// The coordinate-coincidence relation `ρ(x)`, stored as a restricted growth
/// string: coordinate `i` carries the index of its block, blocks numbered by
/// first appearance.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EquivPattern(Vec<u8>);

impl EquivPattern {
    pub fn of(x: &[u32]) -> Self {
        let mut code = Vec::with_capacity(x.len());
        let mut firsts: Vec<u32> = Vec::new();
        for &v in x {
            let idx = match firsts.iter().position(|&f| f == v) {
                Some(i) => i,
                None => {
                    firsts.push(v);
                    firsts.len() - 1
                }
            };
            code.push(idx as u8);
        }
        EquivPattern(code)
    }

    pub fn code(&self) -> &[u8] {
        &self.0
    }

    /// `‖ρ‖`.
    pub fn class_count(&self) -> usize {
        self.0.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
    }

    /// Blocks of coordinate indices, 1-based as in `{{1,3},{2}}`.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.class_count()];
        for (i, &c) in self.0.iter().enumerate() {
            blocks[c as usize].push(i + 1);
        }
        blocks
    }
}

impl fmt::Debug for EquivPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for EquivPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| {
                let inner: Vec<String> = b.iter().map(|i| i.to_string()).collect();
                format!("{{{}}}", inner.join(","))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Per-class metadata.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassInfo {
    pub size: usize,
    pub pattern: EquivPattern,
    /// Member of minimal rank.
    pub representative: Vec<u32>,
}

/// A partition of `Ω^m` given as a canonical coloring.
#[derive(Clone, Debug)]
pub struct TensorConfig {
    space: TupleSpace,
    colors: Vec<u32>,
    classes: Vec<ClassInfo>,
    coherent: bool,
}

impl PartialEq for TensorConfig {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.colors == other.colors
    }
}

impl Eq for TensorConfig {}

/// All maps `M -> M` as image lists, in lexicographic order.
pub fn coordinate_maps(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let total = m.pow(m as u32);
    for mut code in 0..total {
        let mut sigma = vec![0; m];
        for s in sigma.iter_mut().rev() {
            *s = code % m;
            code /= m;
        }
        out.push(sigma);
    }
    out
}

/// `x^σ = (x_{σ(1)}, .., x_{σ(m)})`.
pub fn apply_sigma(x: &[u32], sigma: &[usize]) -> Vec<u32> {
    sigma.iter().map(|&i| x[i]).collect()
}

/// Which of the three axioms failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Axiom {
    C1,
    C2,
    C3,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    pub class: u32,
    pub tuples: Vec<Vec<u32>>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Coherent,
    Violation(Violation),
}

impl Verdict {
    pub fn is_coherent(&self) -> bool {
        matches!(self, Verdict::Coherent)
    }
}

/// Result of mapping a class through a coordinate map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SigmaImage {
    Class(u32),
    /// The image is not a single class; the two tuples witness it. The
    /// second tuple is either an image landing in another class or a member
    /// of the target class that is not an image.
    Split { inside: Vec<u32>, outside: Vec<u32> },
}

/// Statistics from a WL closure run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WlStats {
    /// Refinement steps that increased the number of classes.
    pub refining_rounds: usize,
    /// Full σ-step plus counting-step alternations performed.
    pub alternations: usize,
}

/// A merge map from base classes to fused classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionSpec {
    map: Vec<u32>,
}

impl FusionSpec {
    /// Validates that `map` is onto `0..k'`.
    pub fn new(map: Vec<u32>) -> Result<Self> {
        let k = map.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut hit = vec![false; k];
        for &c in &map {
            hit[c as usize] = true;
        }
        if hit.iter().any(|h| !h) {
            return Err(Error::InvalidArgument("fusion map is not onto 0..k".into()));
        }
        Ok(FusionSpec { map })
    }

    pub fn identity(k: usize) -> Self {
        FusionSpec {
            map: (0..k as u32).collect(),
        }
    }

    pub fn map(&self) -> &[u32] {
        &self.map
    }
}

impl TensorConfig {
    /// Canonicalizes an arbitrary coloring of `Ω^m`.
    pub fn from_colors(n: usize, m: usize, colors: Vec<u32>) -> Result<Self> {
        let space = TupleSpace::new(n, m)?;
        if colors.len() != space.size() {
            return Err(Error::InvalidArgument(format!(
                "{} colors given for {}^{} = {} tuples",
                colors.len(),
                n,
                m,
                space.size()
            )));
        }
        Ok(Self::build(space, canonical_relabel(&colors), false))
    }

    /// Builds from colors already in canonical form.
    fn build(space: TupleSpace, colors: Vec<u32>, coherent: bool) -> Self {
        let k = colors.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut classes: Vec<Option<ClassInfo>> = vec![None; k];
        for (r, &c) in colors.iter().enumerate() {
            match &mut classes[c as usize] {
                Some(info) => info.size += 1,
                slot @ None => {
                    let x = space.unrank(r);
                    *slot = Some(ClassInfo {
                        size: 1,
                        pattern: EquivPattern::of(&x),
                        representative: x,
                    })
                }
            }
        }
        TensorConfig {
            space,
            colors,
            classes: classes.into_iter().map(|c| c.expect("canonical colors")).collect(),
            coherent,
        }
    }

    /// The coloring of `Ω^m` by coordinate pattern alone.
    pub fn pattern_coloring(n: usize, m: usize) -> Result<Self> {
        let space = TupleSpace::new(n, m)?;
        let colors = pattern_codes(space);
        Ok(Self::build(space, canonical_relabel(&colors), false))
    }

    pub fn space(&self) -> TupleSpace {
        self.space
    }

    pub fn n(&self) -> usize {
        self.space.n
    }

    pub fn m(&self) -> usize {
        self.space.m
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn classes(&self) -> &[ClassInfo] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Set when the configuration was validated or produced by a
    /// construction that guarantees coherence.
    pub fn is_marked_coherent(&self) -> bool {
        self.coherent
    }

    pub fn color_of(&self, x: &[u32]) -> Result<u32> {
        self.space.check_tuple(x)?;
        Ok(self.colors[self.space.rank(x)])
    }

    /// Members of a class, by rank.
    pub fn members(&self, class: u32) -> Vec<usize> {
        self.colors
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == class)
            .map(|(r, _)| r)
            .collect()
    }

    fn members_by_class(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.class_count()];
        for (r, &c) in self.colors.iter().enumerate() {
            out[c as usize].push(r);
        }
        out
    }

    fn check_class(&self, class: u32) -> Result<()> {
        if class as usize >= self.class_count() {
            return Err(Error::InvalidArgument(format!(
                "class {} out of range 0..{}",
                class,
                self.class_count()
            )));
        }
        Ok(())
    }

    fn check_sigma(&self, sigma: &[usize]) -> Result<()> {
        if sigma.len() != self.m() || sigma.iter().any(|&i| i >= self.m()) {
            return Err(Error::InvalidArgument(format!(
                "{:?} is not a map on {} coordinates",
                sigma,
                self.m()
            )));
        }
        Ok(())
    }

    /// Rank of `x^σ` for the tuple of rank `r`.
    #[inline]
    fn sigma_rank(&self, digits: &[u32], sigma: &[usize]) -> usize {
        sigma.iter().fold(0, |acc, &i| acc * self.space.n + digits[i] as usize)
    }

    /// The class `X^σ`, or a witness that it is not a class.
    pub fn sigma_image(&self, class: u32, sigma: &[usize]) -> Result<SigmaImage> {
        self.check_class(class)?;
        self.check_sigma(sigma)?;
        let mut digits = vec![0u32; self.m()];
        let mut target: Option<(u32, usize)> = None;
        let mut images = Vec::new();
        for r in self.members(class) {
            unrank_into(r, self.n(), &mut digits);
            let ir = self.sigma_rank(&digits, sigma);
            let c = self.colors[ir];
            match target {
                None => target = Some((c, ir)),
                Some((t, first)) if t != c => {
                    return Ok(SigmaImage::Split {
                        inside: self.space.unrank(first),
                        outside: self.space.unrank(ir),
                    })
                }
                _ => {}
            }
            images.push(ir);
        }
        images.sort_unstable();
        images.dedup();
        let (t, first) = target.expect("classes are nonempty");
        if images.len() != self.classes[t as usize].size {
            let missing = self
                .members(t)
                .into_iter()
                .find(|r| images.binary_search(r).is_err())
                .expect("size mismatch implies a missing member");
            return Ok(SigmaImage::Split {
                inside: self.space.unrank(first),
                outside: self.space.unrank(missing),
            });
        }
        Ok(SigmaImage::Class(t))
    }

    /// `|{α : x_{i←α} ∈ X_i for all i}|` for `x ∈ X`.
    pub fn intersection_number(&self, class: u32, targets: &[u32], x: &[u32]) -> Result<usize> {
        self.check_class(class)?;
        if targets.len() != self.m() {
            return Err(Error::InvalidArgument(format!(
                "{} target classes given for arity {}",
                targets.len(),
                self.m()
            )));
        }
        for &t in targets {
            self.check_class(t)?;
        }
        if self.color_of(x)? != class {
            return Err(Error::InvalidArgument(format!("{:?} is not in class {}", x, class)));
        }
        let r = self.space.rank(x);
        let mut count = 0;
        for alpha in 0..self.n() as u32 {
            let ok = (0..self.m()).all(|i| self.colors[self.substitute(r, x, i, alpha)] == targets[i]);
            if ok {
                count += 1;
            }
        }
        Ok(count)
    }

    #[inline]
    fn substitute(&self, r: usize, digits: &[u32], i: usize, alpha: u32) -> usize {
        let w = self.space.weight(i);
        r - digits[i] as usize * w + alpha as usize * w
    }

    /// Sorted list of substitution color tuples over all `α`, flattened.
    fn substitution_profile(&self, colors: &[u32], r: usize, digits: &[u32]) -> Vec<u32> {
        let m = self.m();
        let mut rows: Vec<[u32; MAX_ARITY]> = (0..self.n() as u32)
            .map(|alpha| {
                let mut row = [0u32; MAX_ARITY];
                for (i, slot) in row.iter_mut().enumerate().take(m) {
                    *slot = colors[self.substitute(r, digits, i, alpha)];
                }
                row
            })
            .collect();
        rows.sort_unstable();
        rows.iter().flat_map(|row| row[..m].iter().copied()).collect()
    }

    /// Checks C1, C2 (all `m^m` coordinate maps) and C3 (every tuple).
    pub fn validate(&self) -> Verdict {
        let space = self.space;
        let m = space.m;
        let mut digits = vec![0u32; m];

        for (r, &c) in self.colors.iter().enumerate() {
            unrank_into(r, space.n, &mut digits);
            if EquivPattern::of(&digits) != self.classes[c as usize].pattern {
                return Verdict::Violation(Violation {
                    axiom: Axiom::C1,
                    class: c,
                    tuples: vec![self.classes[c as usize].representative.clone(), digits.clone()],
                    detail: "coordinate pattern differs inside the class".into(),
                });
            }
        }

        let by_class = self.members_by_class();
        let mut stamp = vec![u32::MAX; space.size()];
        for sigma in coordinate_maps(m) {
            stamp.iter_mut().for_each(|s| *s = u32::MAX);
            for (c, members) in by_class.iter().enumerate() {
                let mut target: Option<(u32, usize)> = None;
                let mut distinct = 0usize;
                for &r in members {
                    unrank_into(r, space.n, &mut digits);
                    let ir = self.sigma_rank(&digits, &sigma);
                    let t = self.colors[ir];
                    match target {
                        None => target = Some((t, r)),
                        Some((t0, r0)) if t0 != t => {
                            return Verdict::Violation(Violation {
                                axiom: Axiom::C2,
                                class: c as u32,
                                tuples: vec![space.unrank(r0), space.unrank(r)],
                                detail: format!("images under {:?} fall into classes {} and {}", sigma, t0, t),
                            })
                        }
                        _ => {}
                    }
                    if stamp[ir] != c as u32 {
                        stamp[ir] = c as u32;
                        distinct += 1;
                    }
                }
                let (t, r0) = target.expect("nonempty class");
                if distinct != self.classes[t as usize].size {
                    return Verdict::Violation(Violation {
                        axiom: Axiom::C2,
                        class: c as u32,
                        tuples: vec![space.unrank(r0)],
                        detail: format!(
                            "image under {:?} covers {} of the {} tuples of class {}",
                            sigma, distinct, self.classes[t as usize].size, t
                        ),
                    });
                }
            }
        }

        for (c, members) in by_class.iter().enumerate() {
            let r0 = members[0];
            let d0 = space.unrank(r0);
            let reference = self.substitution_profile(&self.colors, r0, &d0);
            for &r in &members[1..] {
                unrank_into(r, space.n, &mut digits);
                if self.substitution_profile(&self.colors, r, &digits) != reference {
                    return Verdict::Violation(Violation {
                        axiom: Axiom::C3,
                        class: c as u32,
                        tuples: vec![d0, digits.clone()],
                        detail: "substitution counts differ between the two tuples".into(),
                    });
                }
            }
        }
        Verdict::Coherent
    }

    /// Returns the configuration with its coherence flag set, or the
    /// violation.
    pub fn into_validated(mut self) -> std::result::Result<Self, Violation> {
        match self.validate() {
            Verdict::Coherent => {
                self.coherent = true;
                Ok(self)
            }
            Verdict::Violation(v) => Err(v),
        }
    }

    fn require_coherent(&self, op: &str) -> Result<()> {
        if self.coherent {
            return Ok(());
        }
        match self.validate() {
            Verdict::Coherent => Ok(()),
            Verdict::Violation(v) => Err(Error::NotCoherent(format!(
                "{} requires a coherent configuration; {:?} fails in class {}: {}",
                op, v.axiom, v.class, v.detail
            ))),
        }
    }

    /// The coarsest coherent refinement.
    pub fn wl_close(&self) -> TensorConfig {
        self.wl_close_with_stats().0
    }

    pub fn wl_close_with_stats(&self) -> (TensorConfig, WlStats) {
        let space = self.space;
        let maps = coordinate_maps(space.m);
        let patterns = pattern_codes(space);
        let start: Vec<Vec<u32>> = self.colors.iter().zip(&patterns).map(|(&c, &p)| vec![c, p]).collect();
        let (mut colors, mut count) = relabel_signatures(&start);
        let mut stats = WlStats::default();
        if count > self.class_count() {
            stats.refining_rounds += 1;
        }
        loop {
            let mut changed = false;

            let sigma_sigs: Vec<Vec<u32>> = (0..space.size())
                .into_par_iter()
                .map(|r| {
                    let mut digits = vec![0u32; space.m];
                    unrank_into(r, space.n, &mut digits);
                    let mut sig = Vec::with_capacity(maps.len() + 1);
                    sig.push(colors[r]);
                    for sigma in &maps {
                        sig.push(colors[self.sigma_rank(&digits, sigma)]);
                    }
                    sig
                })
                .collect();
            let (next, k) = relabel_signatures(&sigma_sigs);
            if k > count {
                stats.refining_rounds += 1;
                changed = true;
            }
            colors = next;
            count = k;

            let count_sigs: Vec<Vec<u32>> = (0..space.size())
                .into_par_iter()
                .map(|r| {
                    let mut digits = vec![0u32; space.m];
                    unrank_into(r, space.n, &mut digits);
                    let mut sig = vec![colors[r]];
                    sig.extend(self.substitution_profile(&colors, r, &digits));
                    sig
                })
                .collect();
            let (next, k) = relabel_signatures(&count_sigs);
            if k > count {
                stats.refining_rounds += 1;
                changed = true;
            }
            colors = next;
            count = k;

            stats.alternations += 1;
            if !changed {
                break;
            }
        }
        (Self::build(space, colors, true), stats)
    }

    /// `orb_m(G)`.
    pub fn orbit_coloring(group: &PermGroup, m: usize) -> Result<TensorConfig> {
        let space = TupleSpace::new(group.degree(), m)?;
        let orbits = group.orbits_on_tuples(m)?;
        Ok(Self::build(space, orbits.labels, true))
    }

    /// `pr_I`, for a strictly increasing list of 0-based coordinates.
    pub fn project(&self, coords: &[usize]) -> Result<TensorConfig> {
        self.check_coordinate_set(coords)?;
        let space = self.space;
        let target = TupleSpace::new(space.n, coords.len())?;
        let mut label = vec![u32::MAX; target.size()];
        // projected sets of each class, as sorted rank lists
        let mut projections: Vec<Vec<usize>> = vec![Vec::new(); self.class_count()];
        let mut digits = vec![0u32; space.m];
        for (r, &c) in self.colors.iter().enumerate() {
            unrank_into(r, space.n, &mut digits);
            let pr = coords.iter().fold(0, |acc, &i| acc * space.n + digits[i] as usize);
            projections[c as usize].push(pr);
        }
        let mut set_ids: HashMap<Vec<usize>, u32> = HashMap::new();
        for proj in projections.iter_mut() {
            proj.sort_unstable();
            proj.dedup();
            let next = set_ids.len() as u32;
            let id = *set_ids.entry(proj.clone()).or_insert(next);
            for &pr in proj.iter() {
                if label[pr] != u32::MAX && label[pr] != id {
                    return Err(Error::NotCoherent(format!(
                        "projections of two classes overlap at {:?}",
                        target.unrank(pr)
                    )));
                }
                label[pr] = id;
            }
        }
        Ok(Self::build(target, canonical_relabel(&label), self.coherent))
    }

    /// The residue at `u` placed on the coordinates `coords`; the result is a
    /// configuration of arity `m - |coords|` on all of `Ω`.
    pub fn residue(&self, coords: &[usize], u: &[u32]) -> Result<TensorConfig> {
        self.check_coordinate_set(coords)?;
        if coords.len() >= self.m() {
            return Err(Error::InvalidArgument("residue needs |I| < m".into()));
        }
        if u.len() != coords.len() || u.iter().any(|&v| v as usize >= self.n()) {
            return Err(Error::InvalidArgument(format!(
                "{:?} is not a tuple over the coordinates {:?}",
                u, coords
            )));
        }
        let free: Vec<usize> = (0..self.m()).filter(|i| !coords.contains(i)).collect();
        let target = TupleSpace::new(self.n(), free.len())?;
        let mut v = vec![0u32; free.len()];
        let mut x = vec![0u32; self.m()];
        for (&i, &val) in coords.iter().zip(u) {
            x[i] = val;
        }
        let mut colors = Vec::with_capacity(target.size());
        for r in 0..target.size() {
            unrank_into(r, self.n(), &mut v);
            for (&i, &val) in free.iter().zip(&v) {
                x[i] = val;
            }
            colors.push(self.colors[self.space.rank(&x)]);
        }
        Ok(Self::build(target, canonical_relabel(&colors), self.coherent))
    }

    fn check_coordinate_set(&self, coords: &[usize]) -> Result<()> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("empty coordinate set".into()));
        }
        if coords.windows(2).any(|w| w[0] >= w[1]) || coords.iter().any(|&i| i >= self.m()) {
            return Err(Error::InvalidArgument(format!(
                "{:?} is not an increasing list of coordinates below {}",
                coords,
                self.m()
            )));
        }
        Ok(())
    }

    /// Projections of the classes to the first coordinate.
    pub fn fibers(&self) -> Result<Vec<Vec<u32>>> {
        let pr = self.project(&[0])?;
        let mut fibers = vec![Vec::new(); pr.class_count()];
        for (x, &c) in pr.colors.iter().enumerate() {
            fibers[c as usize].push(x as u32);
        }
        Ok(fibers)
    }

    /// The restriction to a fiber, with its points renumbered in increasing
    /// order.
    pub fn restrict_to_fiber(&self, fiber: &[u32]) -> Result<TensorConfig> {
        let mut delta = fiber.to_vec();
        delta.sort_unstable();
        if !self.fibers()?.contains(&delta) {
            return Err(Error::InvalidArgument(format!("{:?} is not a fiber", fiber)));
        }
        let target = TupleSpace::new(delta.len(), self.m())?;
        let mut local = vec![0u32; self.m()];
        let mut colors = Vec::with_capacity(target.size());
        for r in 0..target.size() {
            unrank_into(r, delta.len(), &mut local);
            let global: Vec<u32> = local.iter().map(|&i| delta[i as usize]).collect();
            colors.push(self.colors[self.space.rank(&global)]);
        }
        Ok(Self::build(target, canonical_relabel(&colors), self.coherent))
    }

    /// True iff every class of `self` is a union of classes of `finer`.
    pub fn leq(&self, finer: &TensorConfig) -> Result<bool> {
        if self.space != finer.space {
            return Err(Error::SpaceMismatch(format!(
                "{}^{} vs {}^{}",
                self.n(),
                self.m(),
                finer.n(),
                finer.m()
            )));
        }
        let mut coarse_of = vec![u32::MAX; finer.class_count()];
        for (&f, &c) in finer.colors.iter().zip(&self.colors) {
            let slot = &mut coarse_of[f as usize];
            if *slot == u32::MAX {
                *slot = c;
            } else if *slot != c {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Merges classes according to `spec`. The result is not validated.
    pub fn fuse(&self, spec: &FusionSpec) -> Result<TensorConfig> {
        if spec.map.len() != self.class_count() {
            return Err(Error::InvalidArgument(format!(
                "fusion map covers {} classes, configuration has {}",
                spec.map.len(),
                self.class_count()
            )));
        }
        let mut pattern_of: HashMap<u32, usize> = HashMap::new();
        for (base, &fused) in spec.map.iter().enumerate() {
            let first = *pattern_of.entry(fused).or_insert(base);
            if self.classes[first].pattern != self.classes[base].pattern {
                return Err(Error::PatternMismatch(format!(
                    "classes {} ({}) and {} ({})",
                    first, self.classes[first].pattern, base, self.classes[base].pattern
                )));
            }
        }
        let colors: Vec<u32> = self.colors.iter().map(|&c| spec.map[c as usize]).collect();
        Ok(Self::build(self.space, canonical_relabel(&colors), false))
    }

    /// Ternary configuration whose projection to the first two coordinates
    /// has at most two classes.
    pub fn is_ast(&self) -> Result<bool> {
        if self.m() != 3 {
            return Err(Error::InvalidArgument(format!("arity {} is not 3", self.m())));
        }
        Ok(self.project(&[0, 1])?.class_count() <= 2)
    }

    /// The minimal coherent configuration refining a binary one in which
    /// `{(ω, ω)}` is a class.
    pub fn one_point_extension(&self, omega: u32) -> Result<TensorConfig> {
        if self.m() != 2 {
            return Err(Error::InvalidArgument(format!("arity {} is not 2", self.m())));
        }
        if omega as usize >= self.n() {
            return Err(Error::InvalidArgument(format!("point {} out of range", omega)));
        }
        self.require_coherent("one-point extension")?;
        let mut colors = self.colors.clone();
        colors[self.space.rank(&[omega, omega])] = self.class_count() as u32;
        let start = Self::build(self.space, canonical_relabel(&colors), false);
        Ok(start.wl_close())
    }

    /// The minimal ternary coherent configuration whose projection to two
    /// coordinates is `self`.
    pub fn wl3_of_binary(&self) -> Result<TensorConfig> {
        if self.m() != 2 {
            return Err(Error::InvalidArgument(format!("arity {} is not 2", self.m())));
        }
        self.require_coherent("ternary closure")?;
        let n = self.n();
        let space = TupleSpace::new(n, 3)?;
        let pair = |a: u32, b: u32| self.colors[a as usize * n + b as usize];
        let mut keys: HashMap<(EquivPattern, u32, u32, u32), u32> = HashMap::new();
        let mut colors = Vec::with_capacity(space.size());
        let mut x = vec![0u32; 3];
        for r in 0..space.size() {
            unrank_into(r, n, &mut x);
            let key = (EquivPattern::of(&x), pair(x[0], x[1]), pair(x[1], x[2]), pair(x[0], x[2]));
            let next = keys.len() as u32;
            colors.push(*keys.entry(key).or_insert(next));
        }
        let closed = Self::build(space, canonical_relabel(&colors), false).wl_close();
        if closed.project(&[0, 1])? != *self {
            return Err(Error::Anomaly(
                "ternary closure refines the binary projection it started from".into(),
            ));
        }
        Ok(closed)
    }

    /// True iff `f` maps every class onto itself.
    pub fn is_preserved_by(&self, f: &crate::perm::Permutation) -> bool {
        if f.degree() != self.n() {
            return false;
        }
        let mut digits = vec![0u32; self.m()];
        (0..self.space.size()).all(|r| {
            unrank_into(r, self.n(), &mut digits);
            let image = digits.iter().fold(0, |acc, &d| acc * self.n() + f.apply(d) as usize);
            self.colors[image] == self.colors[r]
        })
    }

    pub fn to_json(&self, meta: serde_json::Map<String, serde_json::Value>) -> ConfigJson {
        ConfigJson {
            n: self.n(),
            m: self.m(),
            colors: self.colors.clone(),
            meta,
            classes: Some(self.classes.clone()),
        }
    }

    pub fn from_json(json: &ConfigJson) -> Result<TensorConfig> {
        Self::from_colors(json.n, json.m, json.colors.clone())
    }
}

/// On-disk configuration format. `classes` is written for inspection and
/// ignored when reading.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigJson {
    pub n: usize,
    pub m: usize,
    pub colors: Vec<u32>,
    #[serde(default)]
    pub meta: serde_json::Map<String, serde_json::Value>,
    #[serde(default, skip_deserializing, skip_serializing_if = "Option::is_none")]
    pub classes: Option<Vec<ClassInfo>>,
}

fn pattern_codes(space: TupleSpace) -> Vec<u32> {
    let mut ids: HashMap<EquivPattern, u32> = HashMap::new();
    let mut digits = vec![0u32; space.m];
    (0..space.size())
        .map(|r| {
            unrank_into(r, space.n, &mut digits);
            let next = ids.len() as u32;
            *ids.entry(EquivPattern::of(&digits)).or_insert(next)
        })
        .collect()
}

/// Relabels arbitrary colors by first occurrence.
pub(crate) fn canonical_relabel(colors: &[u32]) -> Vec<u32> {
    let mut ids: HashMap<u32, u32> = HashMap::new();
    colors
        .iter()
        .map(|&c| {
            let next = ids.len() as u32;
            *ids.entry(c).or_insert(next)
        })
        .collect()
}

/// Exact signature relabelling by first occurrence in rank order.
fn relabel_signatures(sigs: &[Vec<u32>]) -> (Vec<u32>, usize) {
    let mut ids: HashMap<&[u32], u32> = HashMap::with_capacity(sigs.len() / 4 + 1);
    let colors = sigs
        .iter()
        .map(|s| {
            let next = ids.len() as u32;
            *ids.entry(s.as_slice()).or_insert(next)
        })
        .collect();
    (colors, ids.len())
}
