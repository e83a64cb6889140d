//! Named permutation groups.
//!
//! Grammar: `cyclic:<n>` | `cyclotomic:<p>:<d>` | `agl1:<p>` | `sym:<n>` |
//! `alt:<n>` | `psl:2:11` | `pgl:<d>:<q>` | `file:<path>`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::arith::{is_prime, pow_mod, primitive_roots};
use crate::error::{Error, Result};
use crate::group::{PermGroup, MAX_DEGREE};
use crate::perm::Permutation;

/// The exceptional degree-11 action of `PSL(2,11)`.
const PSL_2_11_GENERATORS: [[u32; 11]; 2] = [
    [0, 9, 6, 3, 5, 4, 2, 8, 7, 1, 10],
    [4, 0, 2, 6, 5, 7, 8, 1, 10, 3, 9],
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(usize),
    /// `x ↦ ax + b` over `F_p` with `a` in the subgroup of order `d`.
    Cyclotomic { p: usize, d: usize },
    Agl1(usize),
    Sym(usize),
    Alt(usize),
    Psl2_11,
    /// `PGL_d(q)` on the projective points of `F_q^d`, `q` prime.
    Pgl { d: usize, q: usize },
    File(PathBuf),
}

fn spec_error(spec: &str, reason: impl Into<String>) -> Error {
    Error::GroupSpec {
        spec: spec.to_string(),
        reason: reason.into(),
    }
}

fn parse_num(spec: &str, field: &str) -> Result<usize> {
    field
        .parse::<usize>()
        .map_err(|_| spec_error(spec, format!("`{}` is not a nonnegative integer", field)))
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

impl GroupSpec {
    pub fn parse(spec: &str) -> Result<Self> {
        if let Some(path) = spec.strip_prefix("file:") {
            if path.is_empty() {
                return Err(spec_error(spec, "missing path"));
            }
            return Ok(GroupSpec::File(PathBuf::from(path)));
        }
        let parts: Vec<&str> = spec.split(':').collect();
        let arity = |k: usize| -> Result<()> {
            if parts.len() != k + 1 {
                Err(spec_error(spec, format!("expected {} parameter(s)", k)))
            } else {
                Ok(())
            }
        };
        let parsed = match parts[0] {
            "cyclic" => {
                arity(1)?;
                GroupSpec::Cyclic(parse_num(spec, parts[1])?)
            }
            "cyclotomic" => {
                arity(2)?;
                GroupSpec::Cyclotomic {
                    p: parse_num(spec, parts[1])?,
                    d: parse_num(spec, parts[2])?,
                }
            }
            "agl1" => {
                arity(1)?;
                GroupSpec::Agl1(parse_num(spec, parts[1])?)
            }
            "sym" => {
                arity(1)?;
                GroupSpec::Sym(parse_num(spec, parts[1])?)
            }
            "alt" => {
                arity(1)?;
                GroupSpec::Alt(parse_num(spec, parts[1])?)
            }
            "psl" => {
                arity(2)?;
                if parts[1] != "2" || parts[2] != "11" {
                    return Err(spec_error(spec, "only psl:2:11 is available"));
                }
                GroupSpec::Psl2_11
            }
            "pgl" => {
                arity(2)?;
                GroupSpec::Pgl {
                    d: parse_num(spec, parts[1])?,
                    q: parse_num(spec, parts[2])?,
                }
            }
            other => return Err(spec_error(spec, format!("unknown family `{}`", other))),
        };
        parsed.check(spec)?;
        Ok(parsed)
    }

    fn check(&self, spec: &str) -> Result<()> {
        let bound = |n: usize| -> Result<()> {
            if n == 0 || n > MAX_DEGREE {
                Err(spec_error(spec, format!("degree {} not in 1..={}", n, MAX_DEGREE)))
            } else {
                Ok(())
            }
        };
        let prime = |p: usize| -> Result<()> {
            if !is_prime(p as u64) {
                Err(spec_error(spec, format!("{} is not prime", p)))
            } else {
                Ok(())
            }
        };
        match *self {
            GroupSpec::Cyclic(n) | GroupSpec::Sym(n) | GroupSpec::Alt(n) => bound(n),
            GroupSpec::Agl1(p) => {
                prime(p)?;
                bound(p)
            }
            GroupSpec::Cyclotomic { p, d } => {
                prime(p)?;
                bound(p)?;
                if d == 0 || (p - 1) % d != 0 {
                    return Err(spec_error(spec, format!("{} does not divide {}", d, p - 1)));
                }
                Ok(())
            }
            GroupSpec::Psl2_11 | GroupSpec::File(_) => Ok(()),
            GroupSpec::Pgl { d, q } => {
                if d < 2 {
                    return Err(spec_error(spec, "dimension must be at least 2"));
                }
                if !is_prime(q as u64) {
                    return Err(spec_error(
                        spec,
                        format!("q = {} is not prime; only prime fields are constructed", q),
                    ));
                }
                let degree = pgl_degree(d, q).filter(|&n| n <= MAX_DEGREE);
                match degree {
                    Some(_) => Ok(()),
                    None => Err(spec_error(spec, format!("degree exceeds {}", MAX_DEGREE))),
                }
            }
        }
    }

    /// Number of points, when known without reading a file.
    pub fn degree(&self) -> Option<usize> {
        match *self {
            GroupSpec::Cyclic(n) | GroupSpec::Sym(n) | GroupSpec::Alt(n) | GroupSpec::Agl1(n) => Some(n),
            GroupSpec::Cyclotomic { p, .. } => Some(p),
            GroupSpec::Psl2_11 => Some(11),
            GroupSpec::Pgl { d, q } => pgl_degree(d, q),
            GroupSpec::File(_) => None,
        }
    }

    /// True for `pgl` specs whose number of points is not prime.
    pub fn has_nonprime_degree(&self) -> bool {
        match self {
            GroupSpec::Pgl { .. } => !self.degree().map(|n| is_prime(n as u64)).unwrap_or(false),
            _ => false,
        }
    }

    /// Order predicted by the family, when known.
    pub fn catalog_order(&self) -> Option<u128> {
        match *self {
            GroupSpec::Cyclic(n) => Some(n as u128),
            GroupSpec::Cyclotomic { p, d } => Some((p * d) as u128),
            GroupSpec::Agl1(p) => Some((p * (p - 1)) as u128),
            GroupSpec::Sym(n) => Some(factorial(n)),
            GroupSpec::Alt(n) => Some(if n < 2 { 1 } else { factorial(n) / 2 }),
            GroupSpec::Psl2_11 => Some(660),
            GroupSpec::Pgl { d, q } => {
                let q = q as u128;
                let mut order = q.pow((d * (d - 1) / 2) as u32);
                for i in 2..=d as u32 {
                    order *= q.pow(i) - 1;
                }
                Some(order)
            }
            GroupSpec::File(_) => None,
        }
    }

    pub fn generators(&self) -> Result<Vec<Permutation>> {
        match self {
            GroupSpec::Cyclic(n) => Ok(vec![translation(*n)?]),
            GroupSpec::Cyclotomic { p, d } => {
                let g = primitive_roots(*p as u64)?[0] as u64;
                let a = pow_mod(g, ((p - 1) / d) as u64, *p as u64) as u32;
                Ok(vec![translation(*p)?, scaling(*p, a)?])
            }
            GroupSpec::Agl1(p) => {
                let g = primitive_roots(*p as u64)?[0];
                Ok(vec![translation(*p)?, scaling(*p, g)?])
            }
            GroupSpec::Sym(n) => {
                if *n < 2 {
                    return Ok(Vec::new());
                }
                Ok(vec![Permutation::cycle(*n, &[0, 1])?, translation(*n)?])
            }
            GroupSpec::Alt(n) => (2..*n as u32)
                .map(|i| Permutation::cycle(*n, &[0, 1, i]))
                .collect(),
            GroupSpec::Psl2_11 => PSL_2_11_GENERATORS
                .iter()
                .map(|g| Permutation::from_images(g.to_vec()))
                .collect(),
            GroupSpec::Pgl { d, q } => pgl_generators(*d, *q),
            GroupSpec::File(path) => read_generator_file(path),
        }
    }

    /// Builds the group and checks its order against the catalog.
    pub fn build(&self) -> Result<PermGroup> {
        let gens = self.generators()?;
        let degree = match self.degree() {
            Some(n) => n,
            None => gens.first().map(|g| g.degree()).ok_or_else(|| {
                spec_error(&self.to_string(), "generator file contains no permutations")
            })?,
        };
        if degree > MAX_DEGREE {
            return Err(Error::SizeBound(format!("degree {} exceeds {}", degree, MAX_DEGREE)));
        }
        let group = PermGroup::from_generators(degree, gens)?;
        if let Some(expected) = self.catalog_order() {
            if group.order() != expected {
                return Err(Error::Anomaly(format!(
                    "{} generated a group of order {}, expected {}",
                    self,
                    group.order(),
                    expected
                )));
            }
        }
        if *self == GroupSpec::Psl2_11 && !group.is_two_transitive() {
            return Err(Error::Anomaly("psl:2:11 generators are not 2-transitive".into()));
        }
        Ok(group)
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GroupSpec::parse(s)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "cyclic:{}", n),
            GroupSpec::Cyclotomic { p, d } => write!(f, "cyclotomic:{}:{}", p, d),
            GroupSpec::Agl1(p) => write!(f, "agl1:{}", p),
            GroupSpec::Sym(n) => write!(f, "sym:{}", n),
            GroupSpec::Alt(n) => write!(f, "alt:{}", n),
            GroupSpec::Psl2_11 => write!(f, "psl:2:11"),
            GroupSpec::Pgl { d, q } => write!(f, "pgl:{}:{}", d, q),
            GroupSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// Every spec of the built-in catalog with degree `n`, in a fixed order.
pub fn catalog_of_degree(n: usize) -> Vec<GroupSpec> {
    let mut out = vec![GroupSpec::Cyclic(n)];
    if is_prime(n as u64) {
        for d in 2..n - 1 {
            if (n - 1) % d == 0 {
                out.push(GroupSpec::Cyclotomic { p: n, d });
            }
        }
        if n > 2 {
            out.push(GroupSpec::Agl1(n));
        }
    }
    for d in 3..=5 {
        for q in [2usize, 3, 5] {
            if pgl_degree(d, q) == Some(n) {
                out.push(GroupSpec::Pgl { d, q });
            }
        }
    }
    if n == 11 {
        out.push(GroupSpec::Psl2_11);
    }
    if n >= 4 {
        out.push(GroupSpec::Alt(n));
    }
    if n >= 3 {
        out.push(GroupSpec::Sym(n));
    }
    out
}

fn pgl_degree(d: usize, q: usize) -> Option<usize> {
    let mut total: usize = 0;
    let mut power: usize = 1;
    for _ in 0..d {
        total = total.checked_add(power)?;
        power = power.checked_mul(q)?;
    }
    Some(total)
}

fn translation(n: usize) -> Result<Permutation> {
    Permutation::from_fn(n, |x| (x + 1) % n as u32)
}

fn scaling(p: usize, a: u32) -> Result<Permutation> {
    Permutation::from_fn(p, |x| ((x as u64 * a as u64) % p as u64) as u32)
}

/// Normalized projective points of `F_q^d`, lexicographic.
fn projective_points(d: usize, q: usize) -> Vec<Vec<usize>> {
    let total = q.pow(d as u32);
    let mut out = Vec::new();
    for code in 1..total {
        let mut v = vec![0; d];
        let mut c = code;
        for slot in v.iter_mut().rev() {
            *slot = c % q;
            c /= q;
        }
        if v.iter().find(|&&x| x != 0) == Some(&1) {
            out.push(v);
        }
    }
    out
}

fn normalize(v: &mut [usize], q: usize) {
    if let Some(&lead) = v.iter().find(|&&x| x != 0) {
        let inv = pow_mod(lead as u64, q as u64 - 2, q as u64) as usize;
        for x in v.iter_mut() {
            *x = *x * inv % q;
        }
    }
}

fn pgl_generators(d: usize, q: usize) -> Result<Vec<Permutation>> {
    let points = projective_points(d, q);
    let index = |v: &[usize]| points.iter().position(|p| p.as_slice() == v).expect("normalized point");
    let act = |matrix: &Vec<Vec<usize>>| -> Result<Permutation> {
        let images = points
            .iter()
            .map(|v| {
                let mut w: Vec<usize> = (0..d)
                    .map(|j| (0..d).map(|i| v[i] * matrix[i][j]).sum::<usize>() % q)
                    .collect();
                normalize(&mut w, q);
                index(&w) as u32
            })
            .collect();
        Permutation::from_images(images)
    };
    let identity = |d: usize| -> Vec<Vec<usize>> {
        (0..d).map(|i| (0..d).map(|j| usize::from(i == j)).collect()).collect()
    };
    let mut gens = Vec::new();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                let mut t = identity(d);
                t[i][j] = 1;
                gens.push(act(&t)?);
            }
        }
    }
    if q > 2 {
        let mut s = identity(d);
        s[0][0] = primitive_roots(q as u64)?[0] as usize;
        gens.push(act(&s)?);
    }
    Ok(gens)
}

fn read_generator_file(path: &PathBuf) -> Result<Vec<Permutation>> {
    let text = std::fs::read_to_string(path)?;
    let spec = format!("file:{}", path.display());
    let mut gens = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let images = line
            .split_whitespace()
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|_| spec_error(&spec, format!("`{}` is not a point", t)))
            })
            .collect::<Result<Vec<u32>>>()?;
        gens.push(Permutation::from_images(images)?);
    }
    if let Some(first) = gens.first() {
        let n = first.degree();
        if let Some(bad) = gens.iter().find(|g| g.degree() != n) {
            return Err(Error::DegreeMismatch {
                expected: n,
                found: bad.degree(),
            });
        }
    }
    Ok(gens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(spec: &str) -> PermGroup {
        GroupSpec::parse(spec).unwrap().build().unwrap()
    }

    #[test]
    fn named_group_examples() {
        let g = build("psl:2:11");
        assert_eq!((g.degree(), g.order()), (11, 660));
        assert!(g.is_two_transitive());
        let g = build("pgl:3:2");
        assert_eq!((g.degree(), g.order()), (7, 168));
        let g = build("agl1:7");
        assert_eq!((g.degree(), g.order()), (7, 42));
        let g = build("pgl:3:3");
        assert_eq!((g.degree(), g.order()), (13, 5616));
        assert_eq!(build("pgl:2:5").degree(), 6);
        assert!(GroupSpec::parse("pgl:2:5").unwrap().has_nonprime_degree());
        assert!(!GroupSpec::parse("pgl:3:2").unwrap().has_nonprime_degree());
    }

    #[test]
    fn family_orders() {
        assert_eq!(build("cyclotomic:13:4").order(), 52);
        assert_eq!(build("sym:6").order(), 720);
        assert_eq!(build("alt:6").order(), 360);
        assert_eq!(build("cyclic:1").order(), 1);
        for p in [3usize, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            assert_eq!(build(&format!("agl1:{}", p)).order(), (p * (p - 1)) as u128);
        }
    }

    #[test]
    fn malformed_specs() {
        for bad in [
            "cyclic", "cyclic:x", "cyclotomic:7:4", "agl1:9", "sym:40", "psl:2:13", "pgl:2:4", "pgl:1:3",
            "foo:3", "file:",
        ] {
            assert!(GroupSpec::parse(bad).is_err(), "{} should be rejected", bad);
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["cyclic:5", "cyclotomic:7:3", "agl1:5", "sym:5", "alt:5", "psl:2:11", "pgl:3:2"] {
            assert_eq!(GroupSpec::parse(s).unwrap().to_string(), s);
        }
    }

    #[test]
    fn spec_and_generators_agree() {
        let p = 5;
        let from_gens = PermGroup::from_generators(
            p,
            vec![
                Permutation::from_fn(p, |x| (x + 1) % 5).unwrap(),
                Permutation::from_fn(p, |x| (2 * x) % 5).unwrap(),
            ],
        )
        .unwrap();
        assert!(build("agl1:5").equals(&from_gens).unwrap());
        assert!(!build("alt:5").equals(&build("sym:5")).unwrap());
    }
}
