//! Universal addition cocycles.
//!
//! `c_n` is an integral combination of words of length `p^n` in two letters
//! `s0, s1` with
//! `(s0 + s1)^{(x) p^n} = s0^{(x) p^n} + s1^{(x) p^n}
//!     + sum_{1 <= i <= n} sum_{j < p^i} sigma^j (c_i^{(x) p^{n-i}})`.
//! Substituting vectors gives the defect of the Teichmuller map:
//! `T(e0 + e1) - T(e0) - T(e1) = sum_{1 <= i < m} V^i T(c_i(e0, e1))`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde_json::json;
use std::collections::BTreeMap;

use crate::error::{ensure, Error, Result};
use crate::field::FieldSpec;
use crate::functor::{BasedSpace, WittElement};
use crate::structure::{verschiebung_pow, SubgroupWittElement};

/// Words of length at most 2^16 letters are indexed by bit patterns, first
/// letter most significant.
const WORD_CAP: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalCocycle {
    p: u32,
    i: u32,
    terms: BTreeMap<u32, BigInt>,
}

fn word_len(p: u32, i: u32) -> Result<u32> {
    let len = p.checked_pow(i).filter(|&l| l <= WORD_CAP);
    len.ok_or_else(|| Error::Cap(format!("words of length {p}^{i} exceed {WORD_CAP} letters")))
}

fn rotate(w: u32, len: u32, k: u32) -> u32 {
    let k = k % len;
    if k == 0 {
        return w;
    }
    let mask = (1u32 << len) - 1;
    ((w << k) | (w >> (len - k))) & mask
}

fn letters(w: u32, len: u32) -> Vec<u32> {
    (0..len).map(|j| (w >> (len - 1 - j)) & 1).collect()
}

impl UniversalCocycle {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn i(&self) -> u32 {
        self.i
    }

    pub fn word_len(&self) -> u32 {
        self.p.pow(self.i)
    }

    /// Nonzero terms as (letters, coefficient).
    pub fn terms(&self) -> Vec<(Vec<u32>, BigInt)> {
        let len = self.word_len();
        self.terms.iter().map(|(&w, c)| (letters(w, len), c.clone())).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<_> = self
            .terms()
            .into_iter()
            .map(|(w, c)| json!({"word": w, "coeff": serde_json::Value::String(c.to_string())}))
            .collect();
        json!({"p": self.p, "i": self.i, "terms": terms})
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = |what: &str| Error::Input(format!("cocycle JSON: {what}"));
        let p = v["p"].as_u64().ok_or_else(|| bad("missing p"))? as u32;
        let i = v["i"].as_u64().ok_or_else(|| bad("missing i"))? as u32;
        ensure!(crate::field::is_prime(p), Input, "cocycle JSON: p = {p} is not prime");
        let len = word_len(p, i)?;
        let mut terms = BTreeMap::new();
        for t in v["terms"].as_array().ok_or_else(|| bad("missing terms"))? {
            let word = t["word"].as_array().ok_or_else(|| bad("term without word"))?;
            ensure!(word.len() == len as usize, Input, "cocycle JSON: word of length {} instead of {len}", word.len());
            let mut w = 0u32;
            for l in word {
                let l = l.as_u64().filter(|&l| l < 2).ok_or_else(|| bad("letters must be 0 or 1"))?;
                w = (w << 1) | l as u32;
            }
            let coeff: BigInt = match &t["coeff"] {
                serde_json::Value::String(s) => s.parse().map_err(|_| bad("unreadable coefficient"))?,
                serde_json::Value::Number(n) => n.as_i64().ok_or_else(|| bad("unreadable coefficient"))?.into(),
                _ => return Err(bad("unreadable coefficient")),
            };
            if !coeff.is_zero() {
                terms.insert(w, coeff);
            }
        }
        Ok(UniversalCocycle { p, i, terms })
    }

    /// `c_i(e0, e1)` in `E^{(x) p^i}`, coordinates indexed by words in the
    /// basis of `E` with the first letter most significant.
    pub fn evaluate(&self, field: FieldSpec, e0: &[u32], e1: &[u32]) -> Result<Vec<u32>> {
        ensure!(e0.len() == e1.len() && !e0.is_empty(), Mismatch, "cocycle arguments of different dimension");
        let len = self.word_len();
        let dim = e0.len() as u64;
        let size = dim.checked_pow(len).filter(|&s| s <= crate::functor::DENSE_CAP);
        let size = size.ok_or_else(|| Error::Cap(format!("E^(x){len} has more than 2^16 basis vectors")))? as usize;
        let p = BigInt::from(self.p);
        let coeffs: Vec<(Vec<u32>, u32)> = self
            .terms()
            .into_iter()
            .map(|(w, c)| (w, c.mod_floor(&p).to_u32().expect("reduced mod p")))
            .filter(|(_, c)| *c != 0)
            .collect();
        let mut out = vec![0u32; size];
        for (u, slot) in out.iter_mut().enumerate() {
            let basis = crate::orbits::word_letters(dim as u32, len, u as u32);
            for (w, c) in &coeffs {
                let mut prod = field.from_coeffs([*c, 0]);
                for (&s, &b) in w.iter().zip(&basis) {
                    let e = if s == 0 { e0 } else { e1 };
                    prod = field.mul(prod, e[b as usize]);
                }
                *slot = field.add(*slot, prod);
            }
        }
        Ok(out)
    }
}

/// Dense integer vectors on words of one length.
fn power_of(terms: &[(u32, BigInt)], len: u32, k: u32) -> Vec<BigInt> {
    let total = len * k;
    let mut cur: BTreeMap<u32, BigInt> = [(0u32, BigInt::from(1))].into();
    for _ in 0..k {
        let mut next = BTreeMap::new();
        for (w, c) in &cur {
            for (u, d) in terms {
                *next.entry((w << len) | u).or_insert_with(BigInt::zero) += c * d;
            }
        }
        cur = next;
    }
    let mut out = vec![BigInt::zero(); 1 << total];
    for (w, c) in cur {
        out[w as usize] += c;
    }
    out
}

/// Left side minus the two pure powers minus the contributions of the
/// given `c_1, ..., c_{n-1}`, on words of length `p^n`.
fn defect(p: u32, n: u32, prior: &[UniversalCocycle]) -> Result<Vec<BigInt>> {
    let len = word_len(p, n)?;
    let mut out = vec![BigInt::from(1); 1 << len];
    out[0] -= 1;
    out[(1 << len) - 1] -= 1;
    for c in prior.iter().filter(|c| c.i < n) {
        let terms: Vec<(u32, BigInt)> = c.terms.iter().map(|(&w, x)| (w, x.clone())).collect();
        let power = power_of(&terms, c.word_len(), p.pow(n - c.i));
        for (w, x) in power.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for j in 0..p.pow(c.i) {
                out[rotate(w as u32, len, j) as usize] -= x;
            }
        }
    }
    Ok(out)
}

/// Solve for `c_1, ..., c_depth`, each supported on the lexicographically
/// least representatives of rotation orbits.
pub fn solve_cocycles(p: u32, depth: u32) -> Result<Vec<UniversalCocycle>> {
    ensure!(crate::field::is_prime(p), Range, "p = {p} is not prime");
    let mut out: Vec<UniversalCocycle> = Vec::new();
    for n in 1..=depth {
        let len = word_len(p, n)?;
        let bar = defect(p, n, &out)?;
        let mut terms = BTreeMap::new();
        let mut seen = vec![false; bar.len()];
        for w in 0..bar.len() as u32 {
            if seen[w as usize] {
                continue;
            }
            let orbit: Vec<u32> = (0..len).map(|k| rotate(w, len, k)).collect();
            let size = (1..=len).find(|&k| rotate(w, len, k) == w).expect("rotation by len is the identity");
            for &x in &orbit {
                seen[x as usize] = true;
            }
            let c = &bar[w as usize];
            ensure!(
                orbit.iter().all(|&x| &bar[x as usize] == c),
                Invariant,
                "defect at level {n} is not rotation invariant"
            );
            if c.is_zero() {
                continue;
            }
            // every orbit element receives the coefficient p^n / size times
            let stab = BigInt::from(len / size);
            let (q, r) = c.div_rem(&stab);
            ensure!(r.is_zero(), Invariant, "defect {c} at level {n} not divisible by the stabilizer order {stab}");
            terms.insert(w, q);
        }
        out.push(UniversalCocycle { p, i: n, terms });
    }
    Ok(out)
}

/// Check the defining identity for `c_1, ..., c_n` as an exact integer
/// identity on words of length `p^n`.
pub fn check_identity(cocycles: &[UniversalCocycle], n: u32) -> Result<bool> {
    let p = cocycles.first().map(|c| c.p).ok_or_else(|| Error::Input("no cocycles given".into()))?;
    ensure!(cocycles.iter().all(|c| c.p == p), Mismatch, "cocycles for different primes");
    for i in 1..=n {
        ensure!(cocycles.iter().any(|c| c.i == i), Input, "c_{i} missing");
    }
    let mut all: Vec<UniversalCocycle> = cocycles.iter().filter(|c| c.i <= n).cloned().collect();
    all.sort_by_key(|c| c.i);
    // defect with every c_i, i <= n, subtracted
    let len = word_len(p, n)?;
    let mut rest = defect(p, n, &all[..all.len() - 1])?;
    let top = &all[all.len() - 1];
    for (&w, x) in &top.terms {
        for j in 0..len {
            rest[rotate(w, len, j) as usize] -= x;
        }
    }
    Ok(rest.iter().all(Zero::is_zero))
}

/// `sum_{i < m} V^i T(e_i)` with `e_i` in `E^{(x) p^i}`.
pub fn truncated_teichmuller_expansion(space: &BasedSpace, m: u32, components: &[Vec<u32>]) -> Result<WittElement> {
    ensure!(components.len() <= m as usize, Mismatch, "{} components for W_{m}", components.len());
    let mut total = WittElement::zero(space, m)?;
    for (i, e) in components.iter().enumerate() {
        let i = i as u32;
        if e.iter().all(|&x| x == 0) {
            continue;
        }
        let big = space.cyclic_power(i)?;
        let t = WittElement::teichmuller(&big, m - i, e)?;
        let y = SubgroupWittElement::from_cyclic_power(space, i, &t)?;
        total = total.add(&verschiebung_pow(&y, i)?.to_witt()?)?;
    }
    Ok(total)
}

/// The addition defect computed directly and through the universal
/// cocycles.
#[derive(Debug, Clone)]
pub struct AdditionDefect {
    pub direct: WittElement,
    pub universal: WittElement,
}

impl AdditionDefect {
    pub fn agree(&self) -> bool {
        self.direct == self.universal
    }
}

/// `T(e0 + e1) - T(e0) - T(e1)` and `sum_{1 <= i < m} V^i T(c_i(e0, e1))`.
pub fn addition_defect(space: &BasedSpace, m: u32, e0: &[u32], e1: &[u32], cocycles: &[UniversalCocycle]) -> Result<AdditionDefect> {
    let field = space.field();
    ensure!(e0.len() == space.dim() as usize && e1.len() == e0.len(), Mismatch, "vectors outside the space");
    let sum: Vec<u32> = e0.iter().zip(e1).map(|(&a, &b)| field.add(a, b)).collect();
    let direct = WittElement::teichmuller(space, m, &sum)?
        .sub(&WittElement::teichmuller(space, m, e0)?)?
        .sub(&WittElement::teichmuller(space, m, e1)?)?;
    let mut components = vec![vec![0; space.dim() as usize]];
    for i in 1..m {
        let c = cocycles
            .iter()
            .find(|c| c.i == i && c.p == field.p())
            .ok_or_else(|| Error::Input(format!("c_{i} for p = {} not supplied", field.p())))?;
        components.push(c.evaluate(field, e0, e1)?);
    }
    let universal = truncated_teichmuller_expansion(space, m, &components)?;
    Ok(AdditionDefect { direct, universal })
}
