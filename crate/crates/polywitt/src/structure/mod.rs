//! Structure maps between the functors `W_m`, their values `W^n_m` at the
//! subgroups of the cyclic group, and the cyclic powers `C_(m)`, `C^(m)`.
//!
//! `W^n_m(E)` is the Tate cohomology of rotation by `p^n` letters on words of
//! length `p^m`, a group of order `p^(m-n)`. Rotation by one letter commutes
//! with it and gives the residual action of `Z/p^n`. `V` is the transfer
//! and `F` the restriction between consecutive levels.

mod coords;
mod cyclic;
mod exactness;
mod product;

pub use coords::ModuleCoords;
pub use cyclic::{cyclic_c, cyclic_r, cyclic_trace, l_map, phi_basis, r_map, CyclicPowerElement, CyclicVariant};
pub use exactness::{
    census_check, cyclo_check, filtration_table, lr_rc_check, phi_sequences_check, residual_action_report,
    vr_sequences_check, FiltrationTable, ResidualActionReport,
};
pub use product::{apply_permutation, gram_matrix, multiply, multiply_witt, pairing, pairing_witt, tau, unit};

use rand::Rng;

use crate::error::{ensure, Error, Result};
use crate::field::FieldSpec;
use crate::functor::{BasedSpace, WittElement};
use crate::orbits::WordShape;
use crate::scalar::WittRing;
use crate::tate::TateClass;

pub(crate) fn subgroup_shape(space: &BasedSpace, m: u32, n: u32) -> Result<WordShape> {
    ensure!(n <= m, Range, "subgroup level {n} exceeds m = {m}");
    WordShape::blocked(space.field().p(), space.dim(), m, n)
}

/// An element of `W^n_m(E)`; `n = 0` is `W_m(E)` itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupWittElement {
    n: u32,
    space: BasedSpace,
    class: TateClass,
}

impl SubgroupWittElement {
    pub fn zero(space: &BasedSpace, m: u32, n: u32) -> Result<Self> {
        let shape = subgroup_shape(space, m, n)?;
        Ok(SubgroupWittElement { n, space: space.clone(), class: TateClass::zero(space.field(), shape)? })
    }

    pub fn from_class(space: &BasedSpace, class: TateClass) -> Result<Self> {
        let s = class.shape();
        ensure!(
            class.field() == space.field() && s.b() == space.dim(),
            Mismatch,
            "class does not live over this space"
        );
        Ok(SubgroupWittElement { n: s.block_exp(), space: space.clone(), class })
    }

    pub fn generators(space: &BasedSpace, m: u32, n: u32) -> Result<Vec<Self>> {
        let shape = subgroup_shape(space, m, n)?;
        TateClass::generators(space.field(), shape)?
            .into_iter()
            .map(|c| SubgroupWittElement::from_class(space, c))
            .collect()
    }

    pub fn random(space: &BasedSpace, m: u32, n: u32, rng: &mut impl Rng) -> Result<Self> {
        let mut y = SubgroupWittElement::zero(space, m, n)?;
        for nu in y.class.basis() {
            let size = y.class.ring_for(nu.i).size();
            y.class.set_code(nu, rng.gen_range(0..size));
        }
        Ok(y)
    }

    pub fn m(&self) -> u32 {
        self.class.shape().len_exp()
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn space(&self) -> &BasedSpace {
        &self.space
    }

    pub fn class(&self) -> &TateClass {
        &self.class
    }

    pub fn field(&self) -> FieldSpec {
        self.space.field()
    }

    pub fn shape(&self) -> WordShape {
        self.class.shape()
    }

    pub fn is_zero(&self) -> bool {
        self.class.is_zero()
    }

    fn with_class(&self, class: TateClass) -> Self {
        SubgroupWittElement { n: class.shape().block_exp(), space: self.space.clone(), class }
    }

    fn check(&self, other: &Self) -> Result<()> {
        ensure!(self.space == other.space, Mismatch, "elements over different spaces");
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with_class(self.class.add(&other.class)?))
    }

    pub fn neg(&self) -> Self {
        self.with_class(self.class.neg())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn times_p(&self) -> Self {
        self.with_class(self.class.times_p())
    }

    pub fn times_int(&self, k: i64) -> Self {
        self.with_class(self.class.times_int(k))
    }

    /// The generator of the residual `Z/p^n`: rotation by one letter.
    pub fn residual_action(&self) -> Self {
        self.with_class(self.class.rotate_letters(1))
    }

    /// Rotation by `k` letters.
    pub fn rotate(&self, k: u32) -> Self {
        self.with_class(self.class.rotate_letters(k))
    }

    /// `sum_{j < p^n} sigma^j`.
    pub fn residual_trace(&self) -> Self {
        let order = self.field().p().pow(self.n);
        let mut acc = self.with_class(TateClass::zero(self.field(), self.shape()).expect("shape already validated"));
        for j in 0..order {
            acc = acc.add(&self.rotate(j)).expect("same module");
        }
        acc
    }

    pub fn to_witt(&self) -> Result<WittElement> {
        ensure!(self.n == 0, Mismatch, "element of W^{}_{} is not in W_m", self.n, self.m());
        WittElement::from_class(&self.space, self.m(), self.class.clone())
    }

    /// The same data read as an element of `W_{m-n}(E^{(x) p^n})`.
    pub fn as_cyclic_power(&self) -> Result<WittElement> {
        let big = self.space.cyclic_power(self.n)?;
        let shape = WordShape::new(self.field().p(), big.dim(), self.m() - self.n)?;
        WittElement::from_class(&big, self.m() - self.n, self.class.reinterpret(shape))
    }

    /// Inverse of [`SubgroupWittElement::as_cyclic_power`].
    pub fn from_cyclic_power(space: &BasedSpace, n: u32, x: &WittElement) -> Result<Self> {
        let big = space.cyclic_power(n)?;
        ensure!(x.space().dim() == big.dim(), Mismatch, "element is not over E^(x)p^{n}");
        let shape = subgroup_shape(space, x.m() + n, n)?;
        SubgroupWittElement::from_class(space, x.class().reinterpret(shape))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.class.to_json();
        v["m"] = serde_json::json!(self.m());
        v["n"] = serde_json::json!(self.n);
        v["space"] = self.space.to_json();
        v
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let n = v.get("n").and_then(|x| x.as_u64()).unwrap_or(0) as u32;
        let m = v.get("m").and_then(|x| x.as_u64()).ok_or_else(|| Error::Input("missing m".into()))? as u32;
        ensure!(n <= m, Input, "n = {n} exceeds m = {m}");
        let mut adjusted = v.clone();
        adjusted["m"] = serde_json::json!(m - n);
        adjusted["block"] = serde_json::json!(n);
        let class = TateClass::from_json(&adjusted)?;
        let space_json = v.get("space").ok_or_else(|| Error::Input("missing space".into()))?;
        let space = BasedSpace::from_json(class.field(), space_json)?;
        SubgroupWittElement::from_class(&space, class)
    }
}

impl From<&WittElement> for SubgroupWittElement {
    fn from(x: &WittElement) -> Self {
        SubgroupWittElement { n: 0, space: x.space().clone(), class: x.class().clone() }
    }
}

/// `V: W^n_m(E) -> W^{n-1}_m(E)`, the transfer along rotation by `p^n`
/// letters inside rotation by `p^{n-1}` letters.
pub fn verschiebung(y: &SubgroupWittElement) -> Result<SubgroupWittElement> {
    ensure!(y.n >= 1, Range, "V needs a subgroup level n >= 1");
    Ok(y.with_class(y.class.transfer_from_subgroup()?))
}

/// `F: W^n_m(E) -> W^{n+1}_m(E)`, class restriction to the index-p subgroup.
pub fn frobenius_map(x: &SubgroupWittElement) -> Result<SubgroupWittElement> {
    ensure!(x.n < x.m(), Range, "F needs n < m");
    Ok(x.with_class(x.class.restrict_to_subgroup()?))
}

/// `V^k`.
pub fn verschiebung_pow(y: &SubgroupWittElement, k: u32) -> Result<SubgroupWittElement> {
    (0..k).try_fold(y.clone(), |acc, _| verschiebung(&acc))
}

/// `F^k`.
pub fn frobenius_pow(x: &SubgroupWittElement, k: u32) -> Result<SubgroupWittElement> {
    (0..k).try_fold(x.clone(), |acc, _| frobenius_map(&acc))
}

/// `C: W_m(E) -> W_{m+1}(E)`: a coefficient `a` of `W_{m-i}` becomes
/// `p F(a~)` in `W_{m+1-i}`. The Frobenius keeps `C` linear for the twisted
/// module structures; `C R` and `R C` are multiplication by `p`.
pub fn c_map(x: &WittElement) -> Result<WittElement> {
    let m = x.m() + 1;
    let mut out = WittElement::zero(x.space(), m)?;
    let mut class = out.class().clone();
    for (nu, c) in x.class().raw_components() {
        let ring = WittRing::get(x.field(), m - nu.i)?;
        class.set_code(nu, ring.times_p(ring.frob(c)));
    }
    out = WittElement::from_class(x.space(), m, class)?;
    Ok(out)
}

/// `C^k`.
pub fn c_pow(x: &WittElement, k: u32) -> Result<WittElement> {
    (0..k).try_fold(x.clone(), |acc, _| c_map(&acc))
}
