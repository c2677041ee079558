//! Zeroth Tate cohomology of cyclic p-groups acting on free W_n(F_q)-modules
//! with a basis of words.
//!
//! For the rotation action of `G = Z/p^g` on words, an orbit with stabilizer
//! of order `p^(g-i)` contributes a copy of `W_{g-i}`: the invariant vectors
//! supported on it are multiples of the orbit sum, and the trace hits exactly
//! `p^(g-i)` times those. A [`TateClass`] stores one coefficient per orbit
//! in these canonical coordinates; free orbits (`i = g`) contribute nothing.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::json;

use crate::error::{ensure, Error, Result};
use crate::field::{element_from_json, element_to_json, FieldSpec};
use crate::orbits::{Necklace, WordShape};
use crate::scalar::{field_from_json, WittRing, WittScalar};

/// A finitely supported vector on words with coefficients in W_n(F_q).
///
/// `twist` records the Frobenius twist of the scalar action: a scalar `a`
/// acts through `F^twist(a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivariantVector {
    field: FieldSpec,
    shape: WordShape,
    n: u32,
    twist: u32,
    coeffs: BTreeMap<u32, u32>,
}

impl EquivariantVector {
    pub fn zero(field: FieldSpec, shape: WordShape, n: u32, twist: u32) -> Result<Self> {
        WittRing::get(field, n)?;
        Ok(EquivariantVector { field, shape, n, twist, coeffs: BTreeMap::new() })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn shape(&self) -> WordShape {
        self.shape
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn twist(&self) -> u32 {
        self.twist
    }

    pub fn ring(&self) -> Arc<WittRing> {
        WittRing::get(self.field, self.n).expect("validated at construction")
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, WittScalar)> + '_ {
        self.coeffs.iter().map(|(&w, &c)| (w, WittScalar::from_code(self.field, self.n, c)))
    }

    pub(crate) fn raw_terms(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.coeffs.iter().map(|(&w, &c)| (w, c))
    }

    pub fn get(&self, w: u32) -> WittScalar {
        WittScalar::from_code(self.field, self.n, self.get_code(w))
    }

    pub(crate) fn get_code(&self, w: u32) -> u32 {
        self.coeffs.get(&w).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub(crate) fn add_code(&mut self, ring: &WittRing, w: u32, c: u32) {
        if c == 0 {
            return;
        }
        let slot = self.coeffs.entry(w).or_insert(0);
        *slot = ring.add(*slot, c);
        if *slot == 0 {
            self.coeffs.remove(&w);
        }
    }

    /// Add `c` times the basis word `w`.
    pub fn add_term(&mut self, w: u32, c: &WittScalar) -> Result<()> {
        ensure!(c.field() == self.field && c.len() == self.n, Mismatch, "coefficient ring differs from the vector's");
        ensure!(w < self.shape.num_words(), Input, "word index {w} out of range");
        let ring = self.ring();
        self.add_code(&ring, w, c.code());
        Ok(())
    }

    pub fn add(&self, other: &EquivariantVector) -> Result<EquivariantVector> {
        ensure!(
            self.field == other.field && self.shape == other.shape && self.n == other.n,
            Mismatch,
            "vectors live in different modules"
        );
        let ring = self.ring();
        let mut out = self.clone();
        for (&w, &c) in &other.coeffs {
            out.add_code(&ring, w, c);
        }
        Ok(out)
    }

    /// Twisted scalar action `a . v = F^twist(a) v`.
    pub fn scale(&self, a: &WittScalar) -> Result<EquivariantVector> {
        ensure!(a.field() == self.field && a.len() == self.n, Mismatch, "scalar ring differs from the vector's");
        let ring = self.ring();
        let t = ring.frob_pow(a.code(), self.twist as i64);
        Ok(self.map_codes(|c| ring.mul(c, t)))
    }

    pub(crate) fn map_codes(&self, f: impl Fn(u32) -> u32) -> EquivariantVector {
        let coeffs = self.coeffs.iter().map(|(&w, &c)| (w, f(c))).filter(|&(_, c)| c != 0).collect();
        EquivariantVector { coeffs, ..self.clone() }
    }

    /// Apply the `j`-th power of the group generator.
    pub fn act(&self, j: u32) -> EquivariantVector {
        let coeffs = self.coeffs.iter().map(|(&w, &c)| (self.shape.act(w, j), c)).collect();
        EquivariantVector { coeffs, ..self.clone() }
    }

    /// Rotate every word by `k` letters (not necessarily a group element).
    pub fn rotate_letters(&self, k: u32) -> EquivariantVector {
        let coeffs = self.coeffs.iter().map(|(&w, &c)| (self.shape.rotate(w, k), c)).collect();
        EquivariantVector { coeffs, ..self.clone() }
    }

    pub fn is_invariant(&self) -> bool {
        self.coeffs.iter().all(|(&w, &c)| self.get_code(self.shape.act(w, 1)) == c)
    }

    /// `sum_{g in G} g v`.
    pub fn trace(&self) -> EquivariantVector {
        let ring = self.ring();
        let mut out = EquivariantVector { coeffs: BTreeMap::new(), ..self.clone() };
        for j in 0..self.shape.group_order() {
            for (&w, &c) in &self.coeffs {
                out.add_code(&ring, self.shape.act(w, j), c);
            }
        }
        out
    }

    /// Reinterpret the same words under a different grouping.
    pub fn with_shape(&self, shape: WordShape) -> Result<EquivariantVector> {
        ensure!(
            shape.b() == self.shape.b() && shape.len() == self.shape.len() && shape.p() == self.shape.p(),
            Mismatch,
            "regrouping must keep the words"
        );
        Ok(EquivariantVector { shape, ..self.clone() })
    }

    /// Zero-pad (or truncate) the coefficients to length `n`.
    pub fn with_length(&self, n: u32) -> Result<EquivariantVector> {
        let ring = WittRing::get(self.field, n)?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&w, &c)| (w, c % ring.size().max(1)))
            .filter(|&(_, c)| c != 0)
            .collect();
        Ok(EquivariantVector { n, coeffs, ..self.clone() })
    }

    /// Class in Tate cohomology of an invariant vector.
    pub fn project(&self) -> Result<TateClass> {
        let g = self.shape.group_exp();
        ensure!(self.n >= g, Range, "coefficient length {} is below the group exponent {g}", self.n);
        ensure!(self.is_invariant(), Invariant, "vector is not invariant under the group");
        let mut comps = BTreeMap::new();
        for (&w, &c) in &self.coeffs {
            if self.shape.canonical_word(w) != w {
                continue;
            }
            let nu = self.shape.necklace_of(w);
            let len = g - nu.i;
            let c = c % self.field.q().pow(len);
            if c != 0 {
                comps.insert(nu, c);
            }
        }
        Ok(TateClass { field: self.field, shape: self.shape, comps })
    }
}

/// An element of `H^0(G, W_n[words])` in canonical coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TateClass {
    field: FieldSpec,
    shape: WordShape,
    comps: BTreeMap<Necklace, u32>,
}

impl TateClass {
    pub fn zero(field: FieldSpec, shape: WordShape) -> Result<Self> {
        WittRing::get(field, shape.group_exp())?;
        Ok(TateClass { field, shape, comps: BTreeMap::new() })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn shape(&self) -> WordShape {
        self.shape
    }

    pub fn group_exp(&self) -> u32 {
        self.shape.group_exp()
    }

    /// Length of the coefficient ring of a component with period exponent `i`.
    pub fn coeff_len(&self, i: u32) -> u32 {
        self.shape.group_exp().saturating_sub(i)
    }

    pub fn ring_for(&self, i: u32) -> Arc<WittRing> {
        WittRing::get(self.field, self.coeff_len(i)).expect("lengths are bounded by the group exponent")
    }

    /// The necklaces indexing non-trivial components.
    pub fn basis(&self) -> Vec<Necklace> {
        self.shape.necklaces().iter().filter(|nu| nu.i < self.group_exp()).copied().collect()
    }

    /// One generator per component: the class with coefficient 1 there.
    pub fn generators(field: FieldSpec, shape: WordShape) -> Result<Vec<TateClass>> {
        let zero = TateClass::zero(field, shape)?;
        Ok(zero.basis().into_iter().map(|nu| zero.with_code(nu, 1)).collect())
    }

    /// Length of the whole module over W(F_q): `sum (g - i)` over components.
    pub fn module_length(shape: &WordShape) -> u64 {
        let g = shape.group_exp();
        shape.necklaces().iter().filter(|nu| nu.i < g).map(|nu| (g - nu.i) as u64).sum()
    }

    pub fn components(&self) -> impl Iterator<Item = (Necklace, WittScalar)> + '_ {
        self.comps.iter().map(|(nu, &c)| (*nu, WittScalar::from_code(self.field, self.coeff_len(nu.i), c)))
    }

    pub(crate) fn raw_components(&self) -> impl Iterator<Item = (Necklace, u32)> + '_ {
        self.comps.iter().map(|(nu, &c)| (*nu, c))
    }

    pub fn component(&self, nu: &Necklace) -> WittScalar {
        WittScalar::from_code(self.field, self.coeff_len(nu.i), self.code(nu))
    }

    pub(crate) fn code(&self, nu: &Necklace) -> u32 {
        self.comps.get(nu).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn num_components(&self) -> usize {
        self.comps.len()
    }

    pub(crate) fn with_code(&self, nu: Necklace, c: u32) -> TateClass {
        let mut out = self.clone();
        out.set_code(nu, c);
        out
    }

    pub(crate) fn set_code(&mut self, nu: Necklace, c: u32) {
        let len = self.coeff_len(nu.i);
        let c = c % self.field.q().pow(len);
        if c == 0 {
            self.comps.remove(&nu);
        } else {
            self.comps.insert(nu, c);
        }
    }

    pub(crate) fn add_code(&mut self, nu: Necklace, c: u32) {
        let len = self.coeff_len(nu.i);
        if len == 0 {
            return;
        }
        let ring = self.ring_for(nu.i);
        let cur = self.code(&nu);
        self.set_code(nu, ring.add(cur, c % ring.size()));
    }

    /// Set the coefficient of a component; the scalar is truncated to the
    /// component's length.
    pub fn set_component(&mut self, nu: Necklace, c: &WittScalar) -> Result<()> {
        ensure!(self.shape.contains(&nu), Input, "{nu:?} is not a necklace of this shape");
        ensure!(c.field() == self.field, Mismatch, "coefficient over a different field");
        let len = self.coeff_len(nu.i);
        ensure!(c.len() >= len, Mismatch, "coefficient of length {} too short for W_{len}", c.len());
        self.set_code(nu, c.code());
        Ok(())
    }

    fn check(&self, other: &TateClass) -> Result<()> {
        ensure!(self.field == other.field && self.shape == other.shape, Mismatch, "classes live in different modules");
        Ok(())
    }

    pub fn add(&self, other: &TateClass) -> Result<TateClass> {
        self.check(other)?;
        let mut out = self.clone();
        for (&nu, &c) in &other.comps {
            out.add_code(nu, c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> TateClass {
        self.map_components(|ring, _, c| ring.neg(c))
    }

    pub fn sub(&self, other: &TateClass) -> Result<TateClass> {
        self.add(&other.neg())
    }

    /// Apply a coefficientwise map; `f` receives the component ring.
    pub(crate) fn map_components(&self, f: impl Fn(&WittRing, &Necklace, u32) -> u32) -> TateClass {
        let mut out = TateClass { comps: BTreeMap::new(), ..self.clone() };
        for (&nu, &c) in &self.comps {
            let ring = self.ring_for(nu.i);
            out.set_code(nu, f(&ring, &nu, c));
        }
        out
    }

    /// Multiply every coefficient by an untwisted scalar of length >= g.
    pub fn scale_untwisted(&self, a: &WittScalar) -> Result<TateClass> {
        ensure!(a.field() == self.field && a.len() >= self.group_exp(), Mismatch, "scalar ring too short");
        Ok(self.map_components(|ring, _, c| ring.mul(c, ring.truncate(a.code(), ring.n()))))
    }

    pub fn times_p(&self) -> TateClass {
        self.map_components(|ring, _, c| ring.times_p(c))
    }

    pub fn times_int(&self, k: i64) -> TateClass {
        self.map_components(|ring, _, c| ring.mul(ring.from_int(k), c))
    }

    /// Canonical invariant representative with coefficients of length `n`.
    pub fn lift(&self, n: u32) -> Result<EquivariantVector> {
        ensure!(n >= self.group_exp(), Range, "lift length {n} below the group exponent {}", self.group_exp());
        let mut v = EquivariantVector::zero(self.field, self.shape, n, 0)?;
        for (nu, &c) in &self.comps {
            for w in self.shape.orbit(nu) {
                v.coeffs.insert(w, c);
            }
        }
        Ok(v)
    }

    /// Class restriction to the index-p subgroup (rotation by `p` blocks).
    pub fn restrict_to_subgroup(&self) -> Result<TateClass> {
        let g = self.group_exp();
        ensure!(g >= 1, Range, "the group is trivial");
        let sub = self.shape.with_block_exp(self.shape.block_exp() + 1)?;
        self.lift(g)?.with_shape(sub)?.project()
    }

    /// Transfer from this (subgroup) shape to the group generated by
    /// rotation by `p^(block_exp - 1)` letters.
    pub fn transfer_from_subgroup(&self) -> Result<TateClass> {
        ensure!(self.shape.block_exp() >= 1, Range, "no larger group to transfer to");
        let big = self.shape.with_block_exp(self.shape.block_exp() - 1)?;
        let v = self.lift(big.group_exp())?;
        let step = big.block_len();
        let mut acc = EquivariantVector { coeffs: BTreeMap::new(), ..v.clone() };
        for j in 0..self.shape.p() {
            acc = acc.add(&v.rotate_letters(j * step))?;
        }
        acc.with_shape(big)?.project()
    }

    /// Action of rotation by `k` letters, which commutes with the group and
    /// permutes the components.
    pub fn rotate_letters(&self, k: u32) -> TateClass {
        let mut out = TateClass { comps: BTreeMap::new(), ..self.clone() };
        for (nu, &c) in &self.comps {
            let w = self.shape.rotate(self.shape.expand(nu), k);
            out.comps.insert(self.shape.necklace_of(w), c);
        }
        out
    }

    /// The same class read in a shape with the same grouping but words of a
    /// different length (components keep their necklace and coefficient).
    pub(crate) fn reshape(&self, shape: WordShape, f: impl Fn(&WittRing, &Necklace, u32) -> u32) -> TateClass {
        let mut out = TateClass { field: self.field, shape, comps: BTreeMap::new() };
        for (&nu, &c) in &self.comps {
            if nu.i < shape.group_exp() {
                let ring = self.ring_for(nu.i);
                out.set_code(nu, f(&ring, &nu, c));
            }
        }
        out
    }

    /// The same components under a shape with the same necklace keys and
    /// group exponent (for example words over `E^{(x) p^n}` read as words
    /// over `E` in blocks of `p^n`).
    pub(crate) fn reinterpret(&self, shape: WordShape) -> TateClass {
        debug_assert_eq!(shape.group_exp(), self.shape.group_exp());
        TateClass { field: self.field, shape, comps: self.comps.clone() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let comps: Vec<serde_json::Value> = self
            .comps
            .iter()
            .map(|(nu, &c)| {
                let ring = self.ring_for(nu.i);
                json!({
                    "i": nu.i,
                    "necklace": self.shape.block_letters(nu),
                    "coeff": ring.coords(c).iter().map(|&x| element_to_json(&self.field, x)).collect::<Vec<_>>(),
                })
            })
            .collect();
        let mut v = json!({
            "p": self.field.p(),
            "m": self.group_exp(),
            "q": self.field.q(),
            "b": self.shape.b(),
            "components": comps,
        });
        if self.shape.block_exp() > 0 {
            v["block"] = json!(self.shape.block_exp());
        }
        if let Some(m) = self.field.modulus() {
            v["modulus"] = json!(m);
        }
        v
    }

    pub fn from_json(v: &serde_json::Value) -> Result<TateClass> {
        let field = field_from_json(v)?;
        let get = |k: &str| v.get(k).and_then(|x| x.as_u64()).map(|x| x as u32);
        let m = get("m").ok_or_else(|| Error::Input("missing m".into()))?;
        let b = get("b").ok_or_else(|| Error::Input("missing b".into()))?;
        let block = get("block").unwrap_or(0);
        let shape = WordShape::blocked(field.p(), b, m + block, block)?;
        let mut out = TateClass::zero(field, shape)?;
        let comps = v.get("components").and_then(|c| c.as_array()).ok_or_else(|| Error::Input("missing components".into()))?;
        for c in comps {
            let letters: Vec<u32> = c
                .get("necklace")
                .and_then(|n| serde_json::from_value(n.clone()).ok())
                .ok_or_else(|| Error::Input(format!("bad necklace in {c}")))?;
            let nu = shape.necklace_from_block(&letters)?;
            if let Some(i) = c.get("i").and_then(|x| x.as_u64()) {
                ensure!(i as u32 == nu.i, Input, "necklace {letters:?} has period exponent {}, not {i}", nu.i);
            }
            let coeff = c.get("coeff").and_then(|x| x.as_array()).ok_or_else(|| Error::Input(format!("bad coeff in {c}")))?;
            let coords: Vec<u32> = coeff.iter().map(|x| element_from_json(&field, x)).collect::<Result<_>>()?;
            let len = out.coeff_len(nu.i);
            ensure!(coords.len() as u32 == len, Input, "component {letters:?} needs {len} coordinates, got {}", coords.len());
            ensure!(!out.comps.contains_key(&nu), Input, "component {letters:?} listed twice");
            let ring = out.ring_for(nu.i);
            out.set_code(nu, ring.from_coords(&coords));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    fn word(shape: &WordShape, l: &[u32]) -> u32 {
        shape.from_letters(l).unwrap()
    }

    #[test]
    fn trace_examples() {
        let s = WordShape::new(2, 2, 1).unwrap();
        let one = WittScalar::one(f2(), 1).unwrap();
        let mut v = EquivariantVector::zero(f2(), s, 1, 1).unwrap();
        v.add_term(word(&s, &[0, 1]), &one).unwrap();
        let t = v.trace();
        assert_eq!(t.get(word(&s, &[0, 1])), one);
        assert_eq!(t.get(word(&s, &[1, 0])), one);
        assert_eq!(t.support_len(), 2);
        assert!(t.project().unwrap().is_zero());

        let s = WordShape::new(2, 2, 2).unwrap();
        let one = WittScalar::one(f2(), 2).unwrap();
        let two = WittScalar::from_int(f2(), 2, 2).unwrap();
        let mut v = EquivariantVector::zero(f2(), s, 2, 2).unwrap();
        v.add_term(word(&s, &[0, 1, 0, 1]), &one).unwrap();
        let t = v.trace();
        assert_eq!(t.get(word(&s, &[0, 1, 0, 1])), two);
        assert_eq!(t.get(word(&s, &[1, 0, 1, 0])), two);
        assert_eq!(t.support_len(), 2);
    }

    #[test]
    fn projection_examples() {
        let s = WordShape::new(2, 2, 1).unwrap();
        let one = WittScalar::one(f2(), 1).unwrap();
        let mut v = EquivariantVector::zero(f2(), s, 1, 1).unwrap();
        v.add_term(word(&s, &[0, 0]), &one).unwrap();
        let x = v.project().unwrap();
        assert_eq!(x.num_components(), 1);
        assert_eq!(x.component(&Necklace { i: 0, block: 0 }), one);

        let mut w = EquivariantVector::zero(f2(), s, 1, 1).unwrap();
        w.add_term(word(&s, &[0, 1]), &one).unwrap();
        assert!(matches!(w.project(), Err(Error::Invariant(_))));
    }

    #[test]
    fn lift_of_periodic_component() {
        let s = WordShape::new(2, 2, 2).unwrap();
        let nu = s.necklace_of(word(&s, &[0, 1, 0, 1]));
        let c = WittScalar::from_int(f2(), 1, 1).unwrap();
        let mut x = TateClass::zero(f2(), s).unwrap();
        x.set_component(nu, &c).unwrap();
        let v = x.lift(2).unwrap();
        assert_eq!(v.support_len(), 2);
        assert_eq!(v.get(word(&s, &[1, 0, 1, 0])), c.pad(2).unwrap());
        assert_eq!(v.project().unwrap(), x);
    }

    #[test]
    fn module_lengths() {
        assert_eq!(TateClass::module_length(&WordShape::new(2, 1, 3).unwrap()), 3);
        assert_eq!(TateClass::module_length(&WordShape::new(2, 2, 2).unwrap()), 5);
        assert_eq!(TateClass::module_length(&WordShape::new(2, 2, 1).unwrap()), 2);
    }

    #[test]
    fn restriction_of_diagonal_component() {
        let s = WordShape::new(2, 2, 2).unwrap();
        for a in 0..4 {
            let c = WittScalar::from_int(f2(), 2, a).unwrap();
            let mut x = TateClass::zero(f2(), s).unwrap();
            x.set_component(Necklace { i: 0, block: 0 }, &c).unwrap();
            let y = x.restrict_to_subgroup().unwrap();
            assert_eq!(y.shape().block_exp(), 1);
            let nu = y.shape().necklace_of(0);
            assert_eq!(y.component(&nu), c.truncate(1).unwrap());
            assert_eq!(y.num_components(), (a % 2) as usize);
        }
    }

    #[test]
    fn transfer_restrict_identities() {
        for (p, b, m) in [(2, 2, 2), (2, 3, 2), (3, 2, 2), (2, 2, 3)] {
            let f = FieldSpec::prime(p).unwrap();
            let s = WordShape::new(p, b, m).unwrap();
            for x in TateClass::generators(f, s).unwrap() {
                let y = x.restrict_to_subgroup().unwrap();
                assert_eq!(y.transfer_from_subgroup().unwrap(), x.times_int(p as i64));
                // restrict(transfer(y)) = sum_j sigma^j y
                let mut expect = TateClass::zero(f, y.shape()).unwrap();
                for j in 0..p {
                    expect = expect.add(&y.rotate_letters(j)).unwrap();
                }
                assert_eq!(y.transfer_from_subgroup().unwrap().restrict_to_subgroup().unwrap(), expect);
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let f = FieldSpec::quadratic(2, 1, 1).unwrap();
        let s = WordShape::blocked(2, 2, 2, 1).unwrap();
        let mut x = TateClass::zero(f, s).unwrap();
        for (k, nu) in x.basis().into_iter().enumerate() {
            x.set_component(nu, &WittScalar::from_coords(f, &[(k % 4) as u32]).unwrap()).unwrap();
        }
        let back = TateClass::from_json(&x.to_json()).unwrap();
        assert_eq!(back, x);
    }
}
