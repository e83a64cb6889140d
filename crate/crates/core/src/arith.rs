//! Arithmetic in prime fields `F_p`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::schur::Carrier;

/// Deterministic trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn primes_up_to(limit: u64) -> Vec<u64> {
    (2..=limit).filter(|&n| is_prime(n)).collect()
}

fn require_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{} is not an odd prime", p)));
    }
    Ok(())
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Distinct prime divisors, increasing.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Multiplicative order of `a` modulo the prime `p`.
pub fn multiplicative_order(a: u64, p: u64) -> u64 {
    let mut x = a % p;
    let mut k = 1;
    while x != 1 {
        x = x * a % p;
        k += 1;
    }
    k
}

/// All generators of `F_p^×`, increasing.
pub fn primitive_roots(p: u64) -> Result<Vec<u32>> {
    if p == 2 {
        return Ok(vec![1]);
    }
    require_odd_prime(p)?;
    let divisors = prime_divisors(p - 1);
    Ok((1..p)
        .filter(|&a| divisors.iter().all(|&q| pow_mod(a, (p - 1) / q, p) != 1))
        .map(|a| a as u32)
        .collect())
}

/// `F_p` with its primitive roots and squares precomputed.
#[derive(Clone, Debug)]
pub struct PrimeField {
    p: u64,
    primitive: Vec<bool>,
    square: Vec<bool>,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        require_odd_prime(p)?;
        let mut primitive = vec![false; p as usize];
        for g in primitive_roots(p)? {
            primitive[g as usize] = true;
        }
        let mut square = vec![false; p as usize];
        for x in 1..p {
            square[(x * x % p) as usize] = true;
        }
        Ok(PrimeField { p, primitive, square })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_primitive_root(&self, x: u64) -> bool {
        self.primitive[(x % self.p) as usize]
    }

    pub fn is_nonzero_square(&self, x: u64) -> bool {
        self.square[(x % self.p) as usize]
    }

    pub fn primitive_roots(&self) -> Vec<u32> {
        (0..self.p as u32).filter(|&x| self.primitive[x as usize]).collect()
    }

    pub fn squares(&self) -> Vec<u32> {
        (0..self.p as u32).filter(|&x| self.square[x as usize]).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticClass {
    /// Residue of `p` modulo 8 as one of `1, 3, -3, -1`.
    pub p_mod_8: i8,
    pub two_is_square: bool,
}

impl QuadraticClass {
    pub fn is_pm3(&self) -> bool {
        self.p_mod_8.abs() == 3
    }
}

/// `p mod 8` and the quadratic character of 2, checked against each other.
pub fn quadratic_class(p: u64) -> Result<QuadraticClass> {
    let field = PrimeField::new(p)?;
    let p_mod_8: i8 = match p % 8 {
        1 => 1,
        3 => 3,
        5 => -3,
        7 => -1,
        _ => unreachable!("odd prime"),
    };
    let two_is_square = field.is_nonzero_square(2);
    if two_is_square != (p_mod_8.abs() == 1) {
        return Err(Error::Anomaly(format!(
            "p = {}: residue {} mod 8 disagrees with the character of 2",
            p, p_mod_8
        )));
    }
    Ok(QuadraticClass { p_mod_8, two_is_square })
}

/// Smallest `x` such that `x` and `1 - x` are both primitive roots.
pub fn lemma41_witness(p: u64) -> Result<Option<u32>> {
    let field = PrimeField::new(p)?;
    Ok((2..p)
        .find(|&x| field.is_primitive_root(x) && field.is_primitive_root(p + 1 - x))
        .map(|x| x as u32))
}

/// Radical and group-type data for a subset `X` of `F_p^×` and `1 - X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma42Record {
    pub x: Vec<u32>,
    pub one_minus_x: Vec<u32>,
    pub rad_x: Vec<u32>,
    pub rad_one_minus_x: Vec<u32>,
    pub x_group_type: bool,
    pub one_minus_x_group_type: bool,
    /// `Σ X + Σ (1 - X) ≡ |X|` modulo `p`.
    pub sum_identity: bool,
    /// Both radicals nontrivial.
    pub violates_radical_statement: bool,
    /// Both sets of group type although `X ≠ F^× ∖ {1}`.
    pub violates_group_type_statement: bool,
}

pub fn lemma42_check(p: u64, x: &[u32]) -> Result<Lemma42Record> {
    require_odd_prime(p)?;
    let mut xs = x.to_vec();
    xs.sort_unstable();
    xs.dedup();
    if xs.is_empty() {
        return Err(Error::Precondition("X is empty".into()));
    }
    if xs.iter().any(|&v| v == 0 || v as u64 >= p) {
        return Err(Error::Precondition(format!("X is not a subset of F_{}^×", p)));
    }
    if xs.contains(&1) {
        return Err(Error::Precondition("1 ∈ X".into()));
    }
    let carrier = Carrier::fstar(p as u32)?;
    let ys = crate::schur::tau_image(p as u32, &xs)?;
    let rad_x = carrier.radical(&xs)?;
    let rad_y = carrier.radical(&ys)?;
    let x_group_type = crate::schur::is_group_type(p as u32, &xs)?;
    let y_group_type = crate::schur::is_group_type(p as u32, &ys)?;
    let total: u64 = xs.iter().chain(ys.iter()).map(|&v| v as u64).sum();
    let sum_identity = total % p == xs.len() as u64 % p;
    let punctured = xs.len() as u64 == p - 2;
    Ok(Lemma42Record {
        violates_radical_statement: rad_x.len() > 1 && rad_y.len() > 1,
        violates_group_type_statement: x_group_type && y_group_type && !punctured,
        x: xs,
        one_minus_x: ys,
        rad_x,
        rad_one_minus_x: rad_y,
        x_group_type,
        one_minus_x_group_type: y_group_type,
        sum_identity,
    })
}
