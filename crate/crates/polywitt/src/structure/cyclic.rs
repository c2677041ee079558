//! Cyclic powers `C_(m)(E)` (coinvariants) and `C^(m)(E)` (invariants) of
//! `E^{(x) p^m}`, and the maps `l`, `r` relating them to `W_m`.
//!
//! Both have a basis indexed by the necklaces of length `p^m`: the class of
//! the representative word for coinvariants, the orbit sum for invariants.
//! A scalar `a` acts by `a^{p^m}`.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{ensure, Result};
use crate::field::FieldSpec;
use crate::functor::{BasedSpace, WittElement};
use crate::orbits::{Necklace, WordShape};
use crate::scalar::WittRing;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CyclicVariant {
    Coinvariants,
    Invariants,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicPowerElement {
    variant: CyclicVariant,
    m: u32,
    space: BasedSpace,
    coords: BTreeMap<Necklace, u32>,
}

impl CyclicPowerElement {
    pub fn zero(variant: CyclicVariant, space: &BasedSpace, m: u32) -> Result<Self> {
        WordShape::new(space.field().p(), space.dim(), m)?;
        Ok(CyclicPowerElement { variant, m, space: space.clone(), coords: BTreeMap::new() })
    }

    pub fn shape(&self) -> WordShape {
        WordShape::new(self.space.field().p(), self.space.dim(), self.m).expect("validated at construction")
    }

    /// All necklaces of length `p^m`, in order.
    pub fn basis(space: &BasedSpace, m: u32) -> Result<Vec<Necklace>> {
        Ok(WordShape::new(space.field().p(), space.dim(), m)?.necklaces().to_vec())
    }

    pub fn dim(space: &BasedSpace, m: u32) -> Result<usize> {
        Ok(WordShape::new(space.field().p(), space.dim(), m)?.necklaces().len())
    }

    pub fn variant(&self) -> CyclicVariant {
        self.variant
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn space(&self) -> &BasedSpace {
        &self.space
    }

    pub fn field(&self) -> FieldSpec {
        self.space.field()
    }

    pub fn get(&self, nu: &Necklace) -> u32 {
        self.coords.get(nu).copied().unwrap_or(0)
    }

    pub fn coords(&self) -> impl Iterator<Item = (Necklace, u32)> + '_ {
        self.coords.iter().map(|(nu, &c)| (*nu, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn set(&mut self, nu: Necklace, c: u32) -> Result<()> {
        ensure!(self.shape().contains(&nu), Input, "{nu:?} is not a necklace of length p^{}", self.m);
        ensure!(c < self.field().q(), Input, "{c} is not an element of F_{}", self.field().q());
        self.set_raw(nu, c);
        Ok(())
    }

    fn set_raw(&mut self, nu: Necklace, c: u32) {
        if c == 0 {
            self.coords.remove(&nu);
        } else {
            self.coords.insert(nu, c);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        ensure!(
            self.variant == other.variant && self.m == other.m && self.space == other.space,
            Mismatch,
            "elements of different cyclic powers"
        );
        let f = self.field();
        let mut out = self.clone();
        for (&nu, &c) in &other.coords {
            out.set_raw(nu, f.add(self.get(&nu), c));
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let f = self.field();
        let coords = self.coords.iter().map(|(&nu, &c)| (nu, f.neg(c))).collect();
        CyclicPowerElement { coords, ..self.clone() }
    }

    /// `a . x`, multiplying coordinates by `a^{p^m}`.
    pub fn scale(&self, a: u32) -> Self {
        let f = self.field();
        let t = f.frob_pow(a, self.m as i64);
        let mut out = CyclicPowerElement { coords: BTreeMap::new(), ..self.clone() };
        for (&nu, &c) in &self.coords {
            out.set_raw(nu, f.mul(t, c));
        }
        out
    }

    pub fn random(variant: CyclicVariant, space: &BasedSpace, m: u32, rng: &mut impl Rng) -> Result<Self> {
        let mut out = CyclicPowerElement::zero(variant, space, m)?;
        for nu in CyclicPowerElement::basis(space, m)? {
            let c = rng.gen_range(0..space.field().q());
            out.set_raw(nu, c);
        }
        Ok(out)
    }

    /// Coordinates over [`CyclicPowerElement::basis`].
    pub fn to_vec(&self) -> Vec<u32> {
        self.shape().necklaces().iter().map(|nu| self.get(nu)).collect()
    }

    pub fn from_vec(variant: CyclicVariant, space: &BasedSpace, m: u32, v: &[u32]) -> Result<Self> {
        let basis = CyclicPowerElement::basis(space, m)?;
        ensure!(v.len() == basis.len(), Mismatch, "expected {} coordinates, got {}", basis.len(), v.len());
        let mut out = CyclicPowerElement::zero(variant, space, m)?;
        for (nu, &c) in basis.into_iter().zip(v) {
            out.set(nu, c)?;
        }
        Ok(out)
    }
}

fn expect_variant(x: &CyclicPowerElement, variant: CyclicVariant) -> Result<()> {
    ensure!(x.variant == variant, Mismatch, "expected {variant:?}, got {:?}", x.variant);
    Ok(())
}

/// `C: C_(m) -> C_(m+1)`, `e -> e^{(x) p}`.
pub fn cyclic_c(x: &CyclicPowerElement) -> Result<CyclicPowerElement> {
    expect_variant(x, CyclicVariant::Coinvariants)?;
    let f = x.field();
    let mut out = CyclicPowerElement::zero(CyclicVariant::Coinvariants, &x.space, x.m + 1)?;
    for (nu, c) in x.coords() {
        out.set_raw(nu, f.frob(c));
    }
    Ok(out)
}

/// `R: C^(m+1) -> C^(m)`, dual to [`cyclic_c`]: free orbits vanish, the
/// others keep their necklace with coordinate `a^{1/p}`.
pub fn cyclic_r(x: &CyclicPowerElement) -> Result<CyclicPowerElement> {
    expect_variant(x, CyclicVariant::Invariants)?;
    ensure!(x.m >= 1, Range, "C^(0) has no restriction");
    let f = x.field();
    let mut out = CyclicPowerElement::zero(CyclicVariant::Invariants, &x.space, x.m - 1)?;
    for (nu, c) in x.coords() {
        if nu.i < x.m {
            out.set_raw(nu, f.frob_inv(c));
        }
    }
    Ok(out)
}

/// The trace `C_(m) -> C^(m)`: `p^{m-i}` times the orbit sum, so only free
/// orbits survive.
pub fn cyclic_trace(x: &CyclicPowerElement) -> Result<CyclicPowerElement> {
    expect_variant(x, CyclicVariant::Coinvariants)?;
    let mut out = CyclicPowerElement::zero(CyclicVariant::Invariants, &x.space, x.m)?;
    for (nu, c) in x.coords() {
        if nu.i == x.m {
            out.set_raw(nu, c);
        }
    }
    Ok(out)
}

/// Basis of `Phi_m(E)`, the image of the trace: orbit sums of the aperiodic
/// necklaces of length `p^m`.
pub fn phi_basis(space: &BasedSpace, m: u32) -> Result<Vec<Necklace>> {
    Ok(CyclicPowerElement::basis(space, m)?.into_iter().filter(|nu| nu.i == m).collect())
}

/// `l: C_(m)(E) -> W_{m+1}(E)`: a necklace of period `p^i` with coordinate
/// `c` goes to the component with coefficient `p^{m-i} w(c^p)`.
pub fn l_map(x: &CyclicPowerElement) -> Result<WittElement> {
    expect_variant(x, CyclicVariant::Coinvariants)?;
    let m = x.m;
    let zero = WittElement::zero(&x.space, m + 1)?;
    let mut class = zero.class().clone();
    let f = x.field();
    for (nu, c) in x.coords() {
        let ring = WittRing::get(f, m + 1 - nu.i)?;
        class.set_code(nu, ring.times_p_pow(f.frob(c), m - nu.i));
    }
    WittElement::from_class(&x.space, m + 1, class)
}

/// `r: W_{m+1}(E) -> C^(m)(E)`: restrict to rotation by `p^m` letters and
/// read the class of `u^{(x) p}` as `u`; the coordinate of a necklace is the
/// first Witt coordinate of `F^{-1}` of its coefficient.
pub fn r_map(x: &WittElement) -> Result<CyclicPowerElement> {
    ensure!(x.m() >= 1, Range, "r is defined on W_m with m >= 1");
    let m = x.m() - 1;
    let f = x.field();
    let mut out = CyclicPowerElement::zero(CyclicVariant::Invariants, x.space(), m)?;
    for (nu, c) in x.class().raw_components() {
        out.set_raw(nu, f.frob_inv(c % f.q()));
    }
    Ok(out)
}
