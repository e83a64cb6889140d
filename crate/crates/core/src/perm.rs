//! Permutations of `0..n` acting on the right: `x^(fg) = (x^f)^g`.

use std::fmt;

use crate::error::{Error, Result};

/// A bijection on `{0, .., n-1}` stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u32).collect(),
        }
    }

    /// Builds a permutation from its image list, checking bijectivity.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(Error::InvalidPermutation(format!(
                    "image list {:?} is not a bijection on 0..{}",
                    images, n
                )));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds the permutation `x -> f(x)` on `0..n`.
    pub fn from_fn(n: usize, f: impl Fn(u32) -> u32) -> Result<Self> {
        Self::from_images((0..n as u32).map(f).collect())
    }

    /// A single cycle `(c0 c1 .. ck)` on `0..n`.
    pub fn cycle(n: usize, cycle: &[u32]) -> Result<Self> {
        let mut images: Vec<u32> = (0..n as u32).collect();
        for (i, &c) in cycle.iter().enumerate() {
            if c as usize >= n {
                return Err(Error::InvalidPermutation(format!("point {} out of range 0..{}", c, n)));
            }
            images[c as usize] = cycle[(i + 1) % cycle.len()];
        }
        Self::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self * other`: first `self`, then `other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: self.images.iter().map(|&x| other.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x as usize] = i as u32;
        }
        Permutation { images }
    }

    /// Componentwise image of a tuple.
    pub fn act_on_tuple(&self, x: &[u32]) -> Result<Vec<u32>> {
        if let Some(&bad) = x.iter().find(|&&v| v as usize >= self.degree()) {
            return Err(Error::DegreeMismatch {
                expected: self.degree(),
                found: bad as usize + 1,
            });
        }
        Ok(x.iter().map(|&v| self.apply(v)).collect())
    }

    /// Smallest point moved, if any.
    pub fn first_moved(&self) -> Option<u32> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &x)| *i as u32 != x)
            .map(|(i, _)| i as u32)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.images)
    }
}

impl fmt::Display for Permutation {
    /// Image notation, `0 2 4 1 3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}
