//! Schur partitions of cyclic groups.
//!
//! A carrier is either the additive group `Z_n` or the multiplicative group
//! `F_p^×`, or a subgroup of one of these.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, pow_mod, prime_divisors};
use crate::error::{Error, Result};
use crate::fusion::{ClassMap, FusionProblem, SearchBudget};

/// Largest order for exhaustive Schur partition enumeration.
pub const MAX_ENUMERATION_ORDER: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CarrierKind {
    ZMod,
    FStar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Carrier {
    kind: CarrierKind,
    modulus: u32,
    elements: Vec<u32>,
    index: Vec<u32>,
}

impl Carrier {
    pub fn zmod(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("Z_0 is not a finite carrier".into()));
        }
        Ok(Self::with_elements(CarrierKind::ZMod, n, (0..n).collect()))
    }

    pub fn fstar(p: u32) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidArgument(format!("{} is not prime", p)));
        }
        Ok(Self::with_elements(CarrierKind::FStar, p, (1..p).collect()))
    }

    /// `zmod:<n>` or `fstar:<p>`.
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, num) = text
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("malformed carrier `{}`", text)))?;
        let n: u32 = num
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("malformed carrier `{}`", text)))?;
        match kind {
            "zmod" => Self::zmod(n),
            "fstar" => Self::fstar(n),
            _ => Err(Error::InvalidArgument(format!("unknown carrier `{}`", text))),
        }
    }

    fn with_elements(kind: CarrierKind, modulus: u32, elements: Vec<u32>) -> Self {
        let mut index = vec![u32::MAX; modulus as usize];
        for (i, &e) in elements.iter().enumerate() {
            index[e as usize] = i as u32;
        }
        Carrier {
            kind,
            modulus,
            elements,
            index,
        }
    }

    pub fn kind(&self) -> CarrierKind {
        self.kind
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn identity(&self) -> u32 {
        match self.kind {
            CarrierKind::ZMod => 0,
            CarrierKind::FStar => 1,
        }
    }

    pub fn contains(&self, x: u32) -> bool {
        (x as usize) < self.index.len() && self.index[x as usize] != u32::MAX
    }

    /// Position of `x` in `elements()`.
    pub fn position(&self, x: u32) -> Option<usize> {
        self.contains(x).then(|| self.index[x as usize] as usize)
    }

    pub fn op(&self, a: u32, b: u32) -> u32 {
        let m = self.modulus as u64;
        match self.kind {
            CarrierKind::ZMod => ((a as u64 + b as u64) % m) as u32,
            CarrierKind::FStar => ((a as u64 * b as u64) % m) as u32,
        }
    }

    pub fn pow(&self, a: u32, k: u64) -> u32 {
        let m = self.modulus as u64;
        match self.kind {
            CarrierKind::ZMod => ((a as u64 * (k % m)) % m) as u32,
            CarrierKind::FStar => pow_mod(a as u64, k, m) as u32,
        }
    }

    pub fn inv(&self, a: u32) -> u32 {
        match self.kind {
            CarrierKind::ZMod => (self.modulus - a % self.modulus) % self.modulus,
            CarrierKind::FStar => pow_mod(a as u64, self.modulus as u64 - 2, self.modulus as u64) as u32,
        }
    }

    pub fn element_order(&self, a: u32) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity() {
            x = self.op(x, a);
            k += 1;
        }
        k
    }

    pub fn is_generator(&self, a: u32) -> bool {
        self.element_order(a) == self.order()
    }

    /// The unique subgroup of order `d`.
    pub fn subgroup_of_order(&self, d: usize) -> Result<Carrier> {
        if d == 0 || self.order() % d != 0 {
            return Err(Error::InvalidArgument(format!(
                "{} does not divide the order {}",
                d,
                self.order()
            )));
        }
        let elements = self
            .elements
            .iter()
            .copied()
            .filter(|&x| self.pow(x, d as u64) == self.identity())
            .collect();
        Ok(Self::with_elements(self.kind, self.modulus, elements))
    }

    fn check_subset(&self, x: &[u32]) -> Result<Vec<u32>> {
        if let Some(&bad) = x.iter().find(|&&v| !self.contains(v)) {
            return Err(Error::InvalidArgument(format!("{} is not an element of {}", bad, self)));
        }
        let mut xs = x.to_vec();
        xs.sort_unstable();
        xs.dedup();
        Ok(xs)
    }

    /// `{y : yX = X}`, sorted.
    pub fn radical(&self, x: &[u32]) -> Result<Vec<u32>> {
        let xs = self.check_subset(x)?;
        if xs.is_empty() {
            return Err(Error::Precondition("radical of the empty set".into()));
        }
        Ok(self
            .elements
            .iter()
            .copied()
            .filter(|&y| xs.iter().all(|&v| xs.binary_search(&self.op(y, v)).is_ok()))
            .collect())
    }

    /// Exponents `k` coprime to the order, acting by `x ↦ x^k`.
    pub fn power_automorphisms(&self) -> Vec<u64> {
        let n = self.order() as u64;
        (1..=n.max(1)).filter(|&k| gcd(k, n) == 1).collect()
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            CarrierKind::ZMod => "zmod",
            CarrierKind::FStar => "fstar",
        };
        if self.order() == self.full_order() {
            write!(f, "{}:{}", name, self.modulus)
        } else {
            write!(f, "{}:{}[order {}]", name, self.modulus, self.order())
        }
    }
}

impl Carrier {
    fn full_order(&self) -> usize {
        match self.kind {
            CarrierKind::ZMod => self.modulus as usize,
            CarrierKind::FStar => self.modulus as usize - 1,
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A validated Schur partition with its structure constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchurPartition {
    carrier: Carrier,
    classes: Vec<Vec<u32>>,
    class_of: Vec<u32>,
    /// `constants[(x * k + y) * k + z]` is the coefficient of `Z` in `X·Y`.
    constants: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchurVerdict {
    Accepted(SchurPartition),
    Rejected(String),
}

impl SchurVerdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, SchurVerdict::Accepted(_))
    }

    pub fn accepted(self) -> Option<SchurPartition> {
        match self {
            SchurVerdict::Accepted(p) => Some(p),
            SchurVerdict::Rejected(_) => None,
        }
    }
}

/// Sorts each class and orders classes by their smallest element.
fn canonical_classes(mut classes: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    for c in classes.iter_mut() {
        c.sort_unstable();
    }
    classes.sort();
    classes
}

pub fn is_schur_partition(carrier: &Carrier, classes: &[Vec<u32>]) -> Result<SchurVerdict> {
    let classes = canonical_classes(classes.to_vec());
    let mut class_of = vec![u32::MAX; carrier.order()];
    for (i, class) in classes.iter().enumerate() {
        if class.is_empty() {
            return Err(Error::NotAPartition("empty class".into()));
        }
        for &x in class {
            let pos = carrier
                .position(x)
                .ok_or_else(|| Error::NotAPartition(format!("{} is not an element of {}", x, carrier)))?;
            if class_of[pos] != u32::MAX {
                return Err(Error::NotAPartition(format!("{} occurs twice", x)));
            }
            class_of[pos] = i as u32;
        }
    }
    if let Some(pos) = class_of.iter().position(|&c| c == u32::MAX) {
        return Err(Error::NotAPartition(format!(
            "{} is not covered",
            carrier.elements()[pos]
        )));
    }
    let e = carrier.identity();
    let cls = |x: u32| class_of[carrier.position(x).expect("element")] as usize;
    if classes[cls(e)].len() != 1 {
        return Ok(SchurVerdict::Rejected(format!("{{{}}} is not a class", e)));
    }
    for class in &classes {
        let mut inv: Vec<u32> = class.iter().map(|&x| carrier.inv(x)).collect();
        inv.sort_unstable();
        if classes[cls(inv[0])] != inv {
            return Ok(SchurVerdict::Rejected(format!("inverse of {:?} is not a class", class)));
        }
    }
    let k = classes.len();
    let mut constants = vec![0u32; k * k * k];
    let mut counts = vec![0u32; carrier.order()];
    for (xi, xc) in classes.iter().enumerate() {
        for (yi, yc) in classes.iter().enumerate() {
            counts.iter_mut().for_each(|c| *c = 0);
            for &x in xc {
                for &y in yc {
                    counts[carrier.position(carrier.op(x, y)).expect("closed")] += 1;
                }
            }
            for (zi, zc) in classes.iter().enumerate() {
                let first = counts[carrier.position(zc[0]).expect("element")];
                if let Some(&z) = zc
                    .iter()
                    .find(|&&z| counts[carrier.position(z).expect("element")] != first)
                {
                    return Ok(SchurVerdict::Rejected(format!(
                        "{:?}·{:?} hits {} and {} with different multiplicities",
                        xc, yc, zc[0], z
                    )));
                }
                constants[(xi * k + yi) * k + zi] = first;
            }
        }
    }
    Ok(SchurVerdict::Accepted(SchurPartition {
        carrier: carrier.clone(),
        classes,
        class_of,
        constants,
    }))
}

impl SchurPartition {
    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn classes(&self) -> &[Vec<u32>] {
        &self.classes
    }

    pub fn class_of(&self, x: u32) -> Option<usize> {
        self.carrier.position(x).map(|p| self.class_of[p] as usize)
    }

    /// Coefficient of the class `z` in the product of classes `x` and `y`.
    pub fn structure_constant(&self, x: usize, y: usize, z: usize) -> u32 {
        let k = self.classes.len();
        self.constants[(x * k + y) * k + z]
    }

    pub fn is_discrete(&self) -> bool {
        self.classes.len() == self.carrier.order()
    }

    /// At most two classes.
    pub fn is_trivial(&self) -> bool {
        self.classes.len() <= 2
    }

    /// Classes containing a generator of the carrier.
    pub fn highest_classes(&self) -> Vec<Vec<u32>> {
        self.classes
            .iter()
            .filter(|c| c.iter().any(|&x| self.carrier.is_generator(x)))
            .cloned()
            .collect()
    }

    pub fn to_json(&self) -> PartitionJson {
        PartitionJson {
            carrier: self.carrier.to_string(),
            classes: self.classes.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartitionJson {
    pub carrier: String,
    pub classes: Vec<Vec<u32>>,
}

impl PartitionJson {
    pub fn check(&self) -> Result<SchurVerdict> {
        is_schur_partition(&Carrier::parse(&self.carrier)?, &self.classes)
    }
}

/// `X ∪ {1}` is a subgroup of `F_p^×`.
pub fn is_group_type(p: u32, x: &[u32]) -> Result<bool> {
    let carrier = Carrier::fstar(p)?;
    let mut xs = carrier.check_subset(x)?;
    if xs.is_empty() {
        return Err(Error::Precondition("X is empty".into()));
    }
    if xs.contains(&1) {
        return Err(Error::Precondition("1 ∈ X".into()));
    }
    xs.push(1);
    xs.sort_unstable();
    Ok(xs
        .iter()
        .all(|&a| xs.iter().all(|&b| xs.binary_search(&carrier.op(a, b)).is_ok())))
}

/// `1 - X` in `F_p`, sorted.
pub fn tau_image(p: u32, x: &[u32]) -> Result<Vec<u32>> {
    if !is_prime(p as u64) {
        return Err(Error::InvalidArgument(format!("{} is not prime", p)));
    }
    if let Some(&bad) = x.iter().find(|&&v| v >= p) {
        return Err(Error::InvalidArgument(format!("{} is not an element of F_{}", bad, p)));
    }
    let mut out: Vec<u32> = x.iter().map(|&v| (p + 1 - v) % p).collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Orbits of the power maps `x ↦ x^k`, `k ∈ K`.
pub fn cyclotomic_partition(carrier: &Carrier, k: &[u64]) -> Result<SchurPartition> {
    let n = carrier.order() as u64;
    let ks: Vec<u64> = k.iter().map(|&a| a % n.max(1)).collect();
    if ks.is_empty() {
        return Err(Error::InvalidArgument("K is empty".into()));
    }
    if n > 1 {
        if let Some(&bad) = ks.iter().find(|&&a| gcd(a, n) != 1) {
            return Err(Error::InvalidArgument(format!("{} is not a unit modulo {}", bad, n)));
        }
        for &a in &ks {
            for &b in &ks {
                if !ks.contains(&(a * b % n)) {
                    return Err(Error::InvalidArgument(format!(
                        "K is not closed: {}·{} = {} mod {}",
                        a,
                        b,
                        a * b % n,
                        n
                    )));
                }
            }
        }
    }
    let classes = orbit_classes(carrier, &ks);
    match is_schur_partition(carrier, &classes)? {
        SchurVerdict::Accepted(p) => Ok(p),
        SchurVerdict::Rejected(reason) => Err(Error::Anomaly(format!(
            "orbit partition is not Schur: {}",
            reason
        ))),
    }
}

fn orbit_classes(carrier: &Carrier, ks: &[u64]) -> Vec<Vec<u32>> {
    let mut seen = vec![false; carrier.order()];
    let mut classes = Vec::new();
    for &x in carrier.elements() {
        if seen[carrier.position(x).expect("element")] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut stack = vec![x];
        while let Some(y) = stack.pop() {
            let pos = carrier.position(y).expect("element");
            if std::mem::replace(&mut seen[pos], true) {
                continue;
            }
            orbit.push(y);
            for &a in ks {
                stack.push(carrier.pow(y, a));
            }
        }
        classes.push(orbit);
    }
    canonical_classes(classes)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FactorLabel {
    Trivial,
    Orbit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factor {
    pub order: usize,
    pub elements: Vec<u32>,
    pub classes: Vec<Vec<u32>>,
    pub labels: Vec<FactorLabel>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Lemma33 {
    /// Every highest class has a nontrivial radical.
    CaseA { highest: Vec<Vec<u32>>, radicals: Vec<Vec<u32>> },
    /// A direct decomposition with trivial factors except at most one orbit
    /// factor, whose product is the partition.
    CaseB { factors: Vec<Factor> },
}

/// Partitions of `0..len` as restricted growth strings, in increasing
/// lexicographic order.
fn set_partitions(len: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, len: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        let max = prefix.iter().map(|&b| b + 1).max().unwrap_or(0);
        for b in 0..=max {
            prefix.push(b);
            rec(prefix, len, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), len, &mut out);
    out
}

/// Labels of `classes` as a partition of the subgroup `sub`.
fn factor_labels(sub: &Carrier, classes: &[Vec<u32>]) -> Vec<FactorLabel> {
    let mut labels = Vec::new();
    if classes.len() <= 2 {
        labels.push(FactorLabel::Trivial);
    }
    let preserving: Vec<u64> = sub
        .power_automorphisms()
        .into_iter()
        .filter(|&a| {
            classes.iter().all(|c| {
                let mut img: Vec<u32> = c.iter().map(|&x| sub.pow(x, a)).collect();
                img.sort_unstable();
                img == *c
            })
        })
        .collect();
    if orbit_classes(sub, &preserving) == classes {
        labels.push(FactorLabel::Orbit);
    }
    labels
}

impl SchurPartition {
    /// Case (a) is reported whenever it applies. Otherwise decompositions
    /// are tried from the finest (most factors) to the coarsest.
    pub fn classify_lemma33(&self) -> Result<Lemma33> {
        let carrier = &self.carrier;
        let highest = self.highest_classes();
        let radicals = highest
            .iter()
            .map(|c| carrier.radical(c))
            .collect::<Result<Vec<_>>>()?;
        if !highest.is_empty() && radicals.iter().all(|r| r.len() > 1) {
            return Ok(Lemma33::CaseA { highest, radicals });
        }

        let n = carrier.order() as u64;
        let components: Vec<u64> = prime_divisors(n)
            .into_iter()
            .map(|q| {
                let mut pk = 1;
                while n % (pk * q) == 0 {
                    pk *= q;
                }
                pk
            })
            .collect();
        let mut layouts = set_partitions(components.len());
        layouts.sort_by_key(|rgs| std::cmp::Reverse(rgs.iter().max().map(|&b| b + 1).unwrap_or(0)));
        if layouts.is_empty() {
            layouts.push(Vec::new());
        }
        for rgs in layouts {
            let blocks = rgs.iter().max().map(|&b| b + 1).unwrap_or(0).max(1);
            let mut orders = vec![1u64; blocks];
            for (i, &b) in rgs.iter().enumerate() {
                orders[b] *= components[i];
            }
            if let Some(factors) = self.try_decomposition(&orders)? {
                return Ok(Lemma33::CaseB { factors });
            }
        }
        Err(Error::Anomaly(
            "neither case of the dichotomy applies to this Schur partition".into(),
        ))
    }

    fn try_decomposition(&self, orders: &[u64]) -> Result<Option<Vec<Factor>>> {
        let carrier = &self.carrier;
        let n = carrier.order() as u64;
        let mut subs = Vec::new();
        let mut idempotents = Vec::new();
        for &d in orders {
            subs.push(carrier.subgroup_of_order(d as usize)?);
            let co = n / d;
            let t = (0..d.max(1)).find(|&t| (co * t) % d.max(1) == 1 % d.max(1)).unwrap_or(0);
            idempotents.push(co * t);
        }
        let mut factor_classes: Vec<Vec<Vec<u32>>> = Vec::new();
        for sub in &subs {
            let restricted: Vec<Vec<u32>> = self
                .classes
                .iter()
                .map(|c| c.iter().copied().filter(|&x| sub.contains(x)).collect::<Vec<u32>>())
                .filter(|c| !c.is_empty())
                .collect();
            factor_classes.push(canonical_classes(restricted));
        }
        let product: usize = factor_classes.iter().map(|f| f.len()).product();
        if product != self.classes.len() {
            return Ok(None);
        }
        for class in &self.classes {
            let mut size = 1;
            for (j, fc) in factor_classes.iter().enumerate() {
                let mut proj: Vec<u32> = class.iter().map(|&x| carrier.pow(x, idempotents[j])).collect();
                proj.sort_unstable();
                proj.dedup();
                if !fc.contains(&proj) {
                    return Ok(None);
                }
                size *= proj.len();
            }
            if size != class.len() {
                return Ok(None);
            }
        }
        let mut factors = Vec::new();
        for (sub, classes) in subs.iter().zip(factor_classes) {
            if !is_schur_partition(sub, &classes)?.is_accepted() {
                return Ok(None);
            }
            let labels = factor_labels(sub, &classes);
            factors.push(Factor {
                order: sub.order(),
                elements: sub.elements().to_vec(),
                classes,
                labels,
            });
        }
        let nontrivial: Vec<&Factor> = factors
            .iter()
            .filter(|f| !f.labels.contains(&FactorLabel::Trivial))
            .collect();
        let ok = match nontrivial.as_slice() {
            [] => true,
            [only] => only.labels.contains(&FactorLabel::Orbit),
            _ => false,
        };
        Ok(ok.then_some(factors))
    }

    /// True iff `X ↦ 1 - X` maps the classes onto classes.
    pub fn is_tau_closed(&self) -> Result<bool> {
        if self.carrier.kind != CarrierKind::FStar || self.carrier.order() != self.carrier.full_order() {
            return Err(Error::InvalidArgument("τ is defined on F_p^× only".into()));
        }
        let p = self.carrier.modulus;
        for class in &self.classes {
            if class.contains(&1) {
                continue;
            }
            if !self.classes.contains(&tau_image(p, class)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// All Schur partitions of a carrier, sorted.
pub fn enumerate_schur_partitions(carrier: &Carrier) -> Result<Vec<SchurPartition>> {
    let n = carrier.order();
    if n > MAX_ENUMERATION_ORDER {
        return Err(Error::SizeBound(format!(
            "order {} exceeds {}",
            n, MAX_ENUMERATION_ORDER
        )));
    }
    let elements = carrier.elements();
    let pos = |x: u32| carrier.position(x).expect("element") as u32;
    let e = carrier.identity();
    let kinds = elements.iter().map(|&x| u32::from(x != e)).collect();
    let entries = elements
        .iter()
        .map(|&z| {
            let mut hist: HashMap<[u32; 3], u32> = HashMap::new();
            for &x in elements {
                let y = carrier.op(carrier.inv(x), z);
                *hist.entry([pos(x), pos(y), 0]).or_insert(0) += 1;
            }
            let mut v: Vec<([u32; 3], u32)> = hist.into_iter().collect();
            v.sort_unstable();
            v
        })
        .collect();
    let inversion = ClassMap {
        image: elements.iter().map(|&x| pos(carrier.inv(x))).collect(),
        bijective: true,
    };
    let problem = FusionProblem {
        kinds,
        arity: 2,
        entries,
        maps: vec![inversion],
        priority: (0..n as u32).collect(),
        forced: Vec::new(),
    };
    let outcome = problem.solve(&SearchBudget::default())?;
    if !outcome.complete {
        return Err(Error::BudgetExhausted { nodes: outcome.nodes });
    }
    let mut out = Vec::new();
    for labels in outcome.partitions {
        let k = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0);
        let mut classes = vec![Vec::new(); k];
        for (i, &l) in labels.iter().enumerate() {
            classes[l as usize].push(elements[i]);
        }
        match is_schur_partition(carrier, &classes)? {
            SchurVerdict::Accepted(p) => out.push(p),
            SchurVerdict::Rejected(reason) => {
                return Err(Error::Anomaly(format!("enumerated partition rejected: {}", reason)))
            }
        }
    }
    out.sort_by(|a, b| a.classes.cmp(&b.classes));
    out.dedup();
    Ok(out)
}
