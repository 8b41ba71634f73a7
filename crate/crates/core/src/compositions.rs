//! Weak compositions: ordered tuples of non-negative integers with a fixed sum.

use std::fmt;

use crate::error::{Error, Result};

/// An ordered tuple `(d_1, ..., d_r)` of non-negative integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    parts: Vec<u32>,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Self {
        Composition { parts }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn part(&self, i: usize) -> u32 {
        self.parts[i]
    }

    /// `d_i - d_j` for 0-based positions `i`, `j`.
    pub fn difference(&self, i: usize, j: usize) -> Result<i64> {
        let len = self.parts.len();
        match (self.parts.get(i), self.parts.get(j)) {
            (Some(&a), Some(&b)) => Ok(a as i64 - b as i64),
            _ => Err(Error::InvalidArgument(format!(
                "index ({i}, {j}) out of range for a composition of length {len}"
            ))),
        }
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

/// Lexicographically increasing iterator over all `r`-part weak
/// compositions of `d`, from `(0, ..., 0, d)` to `(d, 0, ..., 0)`.
#[derive(Clone, Debug)]
pub struct WeakCompositions {
    current: Option<Vec<u32>>,
}

impl Iterator for WeakCompositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        let cur = self.current.take()?;
        let r = cur.len();
        // Successor: bump the rightmost position (excluding the last) whose
        // suffix carries mass, then dump the remaining mass at the end.
        let mut next = cur.clone();
        let mut tail = 0u32;
        let mut k = r;
        while k > 1 {
            k -= 1;
            tail += next[k];
            if tail > 0 {
                let pos = k - 1;
                next[pos] += 1;
                for slot in next.iter_mut().skip(pos + 1) {
                    *slot = 0;
                }
                next[r - 1] = tail - 1;
                self.current = Some(next);
                break;
            }
        }
        Some(Composition::new(cur))
    }
}

/// All `r`-tuples of non-negative integers summing to `d`, in lexicographic
/// order. `r = 0` yields the empty composition when `d = 0` and nothing
/// otherwise.
pub fn weak_compositions(d: u32, r: usize) -> WeakCompositions {
    let current = match r {
        0 if d == 0 => Some(Vec::new()),
        0 => None,
        _ => {
            let mut v = vec![0; r];
            v[r - 1] = d;
            Some(v)
        }
    };
    WeakCompositions { current }
}

/// `C(d + r - 1, r - 1)`, the number of weak compositions.
pub fn weak_composition_count(d: u32, r: usize) -> u128 {
    if r == 0 {
        return u128::from(d == 0);
    }
    binomial(d as u128 + r as u128 - 1, r as u128 - 1)
}

pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}
