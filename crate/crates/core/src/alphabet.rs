//! Base alphabets, tau-mer codes and run-length decomposition.
//!
//! A tau-mer over `q` bases is stored as an integer in `[0, q^tau)` whose
//! base-`q` digits, most significant first, are the bases in read order.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest state space any kernel or channel will index.
pub const MAX_STATES: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    q: u32,
}

impl Alphabet {
    pub fn new(q: u32) -> Result<Self> {
        if q < 2 {
            return Err(invalid(format!("alphabet size q={q} must be at least 2")));
        }
        Ok(Alphabet { q })
    }

    pub fn q(self) -> u32 {
        self.q
    }
}

/// Geometry of the tau-mer state space for a given `(q, tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TauMerSpace {
    pub q: u32,
    pub tau: u32,
    n_states: usize,
    /// `q^(tau-1)`, the modulus that drops the leading base.
    high: usize,
}

impl TauMerSpace {
    pub fn new(q: u32, tau: u32) -> Result<Self> {
        Alphabet::new(q)?;
        if tau < 1 {
            return Err(invalid("tau must be at least 1"));
        }
        let states = (q as u128).checked_pow(tau).unwrap_or(u128::MAX);
        if states > MAX_STATES as u128 {
            return Err(Error::StateSpaceTooLarge {
                states,
                cap: MAX_STATES,
            });
        }
        let n_states = states as usize;
        Ok(TauMerSpace {
            q,
            tau,
            n_states,
            high: n_states / q as usize,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    /// Drop the first base of `code` and append `base`.
    #[inline]
    pub fn shift(&self, code: usize, base: u32) -> usize {
        (code % self.high) * self.q as usize + base as usize
    }

    pub fn checked_shift(&self, code: usize, base: u32) -> Result<usize> {
        if base >= self.q {
            return Err(invalid(format!(
                "base {base} out of range for q={}",
                self.q
            )));
        }
        if code >= self.n_states {
            return Err(Error::IndexOutOfRange {
                index: code,
                size: self.n_states,
            });
        }
        Ok(self.shift(code, base))
    }

    /// Last base of the tau-mer.
    #[inline]
    pub fn last_base(&self, code: usize) -> u32 {
        (code % self.q as usize) as u32
    }

    /// First base of the tau-mer.
    #[inline]
    pub fn first_base(&self, code: usize) -> u32 {
        (code / self.high) as u32
    }

    /// The constant tau-mer `b b ... b`.
    pub fn constant(&self, b: u32) -> usize {
        b as usize * ((self.n_states - 1) / (self.q as usize - 1))
    }

    pub fn is_constant(&self, code: usize) -> bool {
        let b = self.last_base(code);
        code == self.constant(b)
    }

    pub fn digits(&self, code: usize) -> Vec<u32> {
        let mut out = vec![0u32; self.tau as usize];
        let mut c = code;
        for d in out.iter_mut().rev() {
            *d = (c % self.q as usize) as u32;
            c /= self.q as usize;
        }
        out
    }

    pub fn encode(&self, digits: &[u32]) -> Result<usize> {
        if digits.len() != self.tau as usize {
            return Err(invalid(format!(
                "expected {} digits, got {}",
                self.tau,
                digits.len()
            )));
        }
        let mut c = 0usize;
        for &d in digits {
            if d >= self.q {
                return Err(invalid(format!("digit {d} out of range for q={}", self.q)));
            }
            c = c * self.q as usize + d as usize;
        }
        Ok(c)
    }

    /// The `len` trailing bases of `code`, as a code in `[0, q^len)`.
    #[inline]
    pub fn suffix(&self, code: usize, len: u32) -> usize {
        code % (self.q as usize).pow(len)
    }

    /// The `len` leading bases of `code`, as a code in `[0, q^len)`.
    #[inline]
    pub fn prefix(&self, code: usize, len: u32) -> usize {
        code / (self.q as usize).pow(self.tau - len)
    }
}

/// A single tau-mer with its geometry attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TauMer {
    pub code: usize,
    pub space: TauMerSpace,
}

impl TauMer {
    pub fn new(space: TauMerSpace, code: usize) -> Result<Self> {
        if code >= space.n_states() {
            return Err(Error::IndexOutOfRange {
                index: code,
                size: space.n_states(),
            });
        }
        Ok(TauMer { code, space })
    }

    pub fn from_bases(space: TauMerSpace, bases: &[u32]) -> Result<Self> {
        Ok(TauMer {
            code: space.encode(bases)?,
            space,
        })
    }

    pub fn bases(&self) -> Vec<u32> {
        self.space.digits(self.code)
    }
}

/// Drop the first base of `s` and append `new_base`.
pub fn taumer_shift(s: TauMer, new_base: u32) -> Result<TauMer> {
    Ok(TauMer {
        code: s.space.checked_shift(s.code, new_base)?,
        space: s.space,
    })
}

/// Symbols of maximal runs and their lengths, in order of appearance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunDecomposition<T> {
    pub symbols: Vec<T>,
    pub lengths: Vec<usize>,
}

impl<T: PartialEq + Clone> RunDecomposition<T> {
    /// Run lengths of the runs of `x` only.
    pub fn lengths_of(&self, x: &T) -> Vec<usize> {
        self.symbols
            .iter()
            .zip(&self.lengths)
            .filter(|(s, _)| *s == x)
            .map(|(_, &l)| l)
            .collect()
    }

    pub fn expand(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.lengths.iter().sum());
        for (s, &l) in self.symbols.iter().zip(&self.lengths) {
            out.extend(std::iter::repeat_n(s.clone(), l));
        }
        out
    }
}

pub fn run_decompose<T: PartialEq + Clone>(b: &[T]) -> Result<RunDecomposition<T>> {
    let first = b.first().ok_or(Error::EmptySequence)?;
    let mut symbols = vec![first.clone()];
    let mut lengths = vec![1usize];
    for x in &b[1..] {
        if x == symbols.last().unwrap() {
            *lengths.last_mut().unwrap() += 1;
        } else {
            symbols.push(x.clone());
            lengths.push(1);
        }
    }
    Ok(RunDecomposition { symbols, lengths })
}
