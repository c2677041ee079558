//! Rotation orbits of words of p-power length.
//!
//! A word of length `L` over an alphabet of size `b` is stored as its index
//! `sum_j w_j b^{L-1-j}`, first letter most significant, so numeric order is
//! lexicographic order. A [`WordShape`] fixes `L = p^len_exp` and a block
//! length `r = p^block_exp`; the acting group is rotation by multiples of
//! `r` letters, cyclic of order `p^(len_exp - block_exp)`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Maximal number of words in any shape.
pub const WORD_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WordShape {
    p: u32,
    b: u32,
    len_exp: u32,
    block_exp: u32,
}

/// An orbit, keyed by its period exponent and its primitive block.
///
/// `block` is the index of the first `p^i * r` letters of the lexicographically
/// least rotation; the full representative is that block repeated. The key
/// does not depend on the word length, so the same necklace names a
/// component at every truncation level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Necklace {
    pub i: u32,
    pub block: u32,
}

fn checked_pow(b: u64, e: u64) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..e {
        acc = acc.checked_mul(b)?;
        if acc > u32::MAX as u64 {
            return None;
        }
    }
    Some(acc)
}

impl WordShape {
    /// Words of length `p^m`, acted on by all rotations.
    pub fn new(p: u32, b: u32, m: u32) -> Result<Self> {
        WordShape::blocked(p, b, m, 0)
    }

    /// Words of length `p^len_exp`, acted on by rotations by multiples of
    /// `p^block_exp` letters.
    pub fn blocked(p: u32, b: u32, len_exp: u32, block_exp: u32) -> Result<Self> {
        ensure!(crate::field::is_prime(p), Range, "p = {p} is not prime");
        ensure!(block_exp <= len_exp, Range, "block exponent {block_exp} exceeds length exponent {len_exp}");
        let len = checked_pow(p as u64, len_exp as u64)
            .ok_or_else(|| Error::Cap(format!("word length {p}^{len_exp} too large")))?;
        let count = checked_pow(b as u64, len);
        ensure!(
            count.is_some_and(|c| c <= WORD_CAP),
            Cap,
            "{b}^({p}^{len_exp}) words exceed the cap of 2^20"
        );
        Ok(WordShape { p, b, len_exp, block_exp })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn len_exp(&self) -> u32 {
        self.len_exp
    }

    pub fn block_exp(&self) -> u32 {
        self.block_exp
    }

    /// Exponent of the acting group.
    pub fn group_exp(&self) -> u32 {
        self.len_exp - self.block_exp
    }

    pub fn group_order(&self) -> u32 {
        self.p.pow(self.group_exp())
    }

    /// Word length in letters.
    pub fn len(&self) -> u32 {
        self.p.pow(self.len_exp)
    }

    pub fn is_empty(&self) -> bool {
        self.num_words() == 0
    }

    pub fn block_len(&self) -> u32 {
        self.p.pow(self.block_exp)
    }

    pub fn num_words(&self) -> u32 {
        self.b.pow(self.len())
    }

    /// The same words with a different block length.
    pub fn with_block_exp(&self, block_exp: u32) -> Result<WordShape> {
        WordShape::blocked(self.p, self.b, self.len_exp, block_exp)
    }

    /// The same alphabet and grouping at a different length exponent.
    pub fn with_len_exp(&self, len_exp: u32) -> Result<WordShape> {
        WordShape::blocked(self.p, self.b, len_exp, self.block_exp)
    }

    pub fn letters(&self, w: u32) -> Vec<u32> {
        word_letters(self.b, self.len(), w)
    }

    pub fn from_letters(&self, letters: &[u32]) -> Result<u32> {
        ensure!(letters.len() == self.len() as usize, Input, "word of length {} but shape needs {}", letters.len(), self.len());
        word_from_letters(self.b, letters)
    }

    /// Rotate left by `k` letters: `(w_0, ..., w_{L-1}) -> (w_k, ..., w_{k-1})`.
    pub fn rotate(&self, w: u32, k: u32) -> u32 {
        rotate_word(self.b, self.len(), w, k)
    }

    /// Action of the group generator `j` times (rotation by `j` blocks).
    pub fn act(&self, w: u32, j: u32) -> u32 {
        self.rotate(w, (j % self.group_order()) * self.block_len())
    }

    /// Smallest `i` such that rotation by `p^i` blocks fixes `w`.
    pub fn period_exponent(&self, w: u32) -> u32 {
        (0..=self.group_exp()).find(|&i| self.act(w, self.p.pow(i)) == w).unwrap_or(self.group_exp())
    }

    /// Lexicographically least word in the orbit of `w`.
    pub fn canonical_word(&self, w: u32) -> u32 {
        let i = self.period_exponent(w);
        (0..self.p.pow(i)).map(|j| self.act(w, j)).min().unwrap_or(w)
    }

    pub fn necklace_of(&self, w: u32) -> Necklace {
        let i = self.period_exponent(w);
        let c = (0..self.p.pow(i)).map(|j| self.act(w, j)).min().unwrap_or(w);
        let blen = self.p.pow(i) * self.block_len();
        Necklace { i, block: c / self.b.pow(self.len() - blen) }
    }

    /// Number of letters in the primitive block of a necklace.
    pub fn necklace_block_len(&self, nu: &Necklace) -> u32 {
        self.p.pow(nu.i) * self.block_len()
    }

    /// Whether `nu` is a valid necklace key for this shape.
    pub fn contains(&self, nu: &Necklace) -> bool {
        nu.i <= self.group_exp()
            && nu.block < self.b.pow(self.necklace_block_len(nu))
            && self.necklace_of(self.expand(nu)) == *nu
    }

    /// The lexicographically least representative word.
    pub fn expand(&self, nu: &Necklace) -> u32 {
        let blen = self.necklace_block_len(nu);
        let unit = self.b.pow(blen);
        (0..self.len() / blen).fold(0u32, |acc, _| acc * unit + nu.block)
    }

    /// The `p^i` distinct words of the orbit, starting at the representative.
    pub fn orbit(&self, nu: &Necklace) -> Vec<u32> {
        let w = self.expand(nu);
        (0..self.p.pow(nu.i)).map(|j| self.act(w, j)).collect()
    }

    /// All necklaces, sorted by `(i, block)`. Memoized per shape.
    pub fn necklaces(&self) -> Arc<Vec<Necklace>> {
        type Cache = RwLock<HashMap<WordShape, Arc<Vec<Necklace>>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(v) = cache.read().expect("necklace cache poisoned").get(self) {
            return v.clone();
        }
        let mut out: Vec<Necklace> = (0..self.num_words())
            .filter(|&w| self.canonical_word(w) == w)
            .map(|w| self.necklace_of(w))
            .collect();
        out.sort();
        let out = Arc::new(out);
        cache.write().expect("necklace cache poisoned").entry(*self).or_insert(out).clone()
    }

    /// Letters of the primitive block of a necklace.
    pub fn block_letters(&self, nu: &Necklace) -> Vec<u32> {
        word_letters(self.b, self.necklace_block_len(nu), nu.block)
    }

    /// Necklace from the letters of its primitive block (any rotation).
    pub fn necklace_from_block(&self, letters: &[u32]) -> Result<Necklace> {
        let blen = letters.len() as u32;
        ensure!(
            blen >= self.block_len() && blen.is_multiple_of(self.block_len()) && self.len().is_multiple_of(blen),
            Input,
            "block of {blen} letters does not fit words of length {}",
            self.len()
        );
        let block = word_from_letters(self.b, letters)?;
        let unit = self.b.pow(blen);
        let w = (0..self.len() / blen).fold(0u32, |acc, _| acc * unit + block);
        let nu = self.necklace_of(w);
        ensure!(self.necklace_block_len(&nu) == blen, Input, "block {letters:?} is not primitive");
        Ok(nu)
    }
}

pub fn word_letters(b: u32, len: u32, w: u32) -> Vec<u32> {
    let mut out = vec![0; len as usize];
    let mut x = w;
    for j in (0..len as usize).rev() {
        out[j] = x % b.max(1);
        x /= b.max(1);
    }
    out
}

pub fn word_from_letters(b: u32, letters: &[u32]) -> Result<u32> {
    let mut acc: u64 = 0;
    for &l in letters {
        ensure!(l < b, Input, "letter {l} outside alphabet of size {b}");
        acc = acc * b as u64 + l as u64;
        ensure!(acc <= u32::MAX as u64, Cap, "word index overflow");
    }
    Ok(acc as u32)
}

pub fn rotate_word(b: u32, len: u32, w: u32, k: u32) -> u32 {
    let k = k % len.max(1);
    if k == 0 {
        return w;
    }
    let hi = b.pow(len - k);
    let lo = b.pow(k);
    (w % hi) * lo + w / hi
}

/// `#{aperiodic necklaces of length p^i over b letters}`.
pub fn aperiodic_count(b: u64, p: u64, i: u32) -> u64 {
    if i == 0 {
        return b;
    }
    let l = p.pow(i);
    (b.pow(l as u32) - b.pow((l / p) as u32)) / l
}

/// Total number of necklaces of length `p^m` (any period).
pub fn necklace_count(b: u64, p: u64, m: u32) -> u64 {
    (0..=m).map(|i| aperiodic_count(b, p, i)).sum()
}

/// Aperiodic necklaces of length `p^i`, sorted lexicographically.
///
/// Up to 16 letters this filters all words; beyond that it runs the
/// Duval generator for Lyndon words.
pub fn enumerate_aperiodic_necklaces(b: u32, p: u32, i: u32) -> Result<Vec<Necklace>> {
    let shape = WordShape::new(p, b, i)?;
    if shape.len() <= 16 {
        Ok(necklaces_by_filtering(&shape))
    } else {
        Ok(necklaces_by_lyndon(&shape))
    }
}

pub(crate) fn necklaces_by_filtering(shape: &WordShape) -> Vec<Necklace> {
    let top = shape.group_exp();
    shape.necklaces().iter().filter(|nu| nu.i == top).copied().collect()
}

pub(crate) fn necklaces_by_lyndon(shape: &WordShape) -> Vec<Necklace> {
    let n = shape.len() as usize;
    let b = shape.b() as i64;
    let mut out = Vec::new();
    if b == 0 {
        return out;
    }
    // Duval's generator: Lyndon words of length <= n in lexicographic order
    let mut w: Vec<i64> = vec![-1];
    while let Some(last) = w.last_mut() {
        *last += 1;
        let m = w.len();
        if m == n {
            let idx = w.iter().fold(0u32, |acc, &l| acc * b as u32 + l as u32);
            out.push(Necklace { i: shape.group_exp(), block: idx });
        }
        while w.len() < n {
            w.push(w[w.len() - m]);
        }
        while w.last() == Some(&(b - 1)) {
            w.pop();
        }
    }
    out
}

/// Partition all words of length `p^m` by period exponent.
pub fn decompose_words(b: u32, p: u32, m: u32) -> Result<Vec<Vec<u32>>> {
    let shape = WordShape::new(p, b, m)?;
    let mut parts = vec![Vec::new(); m as usize + 1];
    for w in 0..shape.num_words() {
        parts[shape.period_exponent(w) as usize].push(w);
    }
    Ok(parts)
}
