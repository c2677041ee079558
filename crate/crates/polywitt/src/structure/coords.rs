//! Tate classes over a prime field as vectors in `(+) Z/p^{e_a}`, so that
//! kernels, images and exactness can be decided with Smith forms.

use crate::error::{ensure, Result};
use crate::field::FieldSpec;
use crate::linalg::AbelianGroup;
use crate::orbits::{Necklace, WordShape};
use crate::scalar::WittScalar;
use crate::tate::TateClass;

/// Coordinates on the components of one module of Tate classes.
#[derive(Debug, Clone)]
pub struct ModuleCoords {
    field: FieldSpec,
    shape: WordShape,
    basis: Vec<Necklace>,
    group: AbelianGroup,
}

impl ModuleCoords {
    pub fn new(field: FieldSpec, shape: WordShape) -> Result<Self> {
        ensure!(field.is_prime_field(), Range, "module coordinates need q = p");
        let zero = TateClass::zero(field, shape)?;
        let basis = zero.basis();
        let exps = basis.iter().map(|nu| zero.coeff_len(nu.i)).collect();
        Ok(ModuleCoords { field, shape, basis, group: AbelianGroup::new(field.p() as u64, exps) })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn basis(&self) -> &[Necklace] {
        &self.basis
    }

    pub fn to_vec(&self, c: &TateClass) -> Result<Vec<u64>> {
        ensure!(c.shape() == self.shape && c.field() == self.field, Mismatch, "class outside this module");
        self.basis.iter().map(|nu| c.component(nu).to_zpn()).collect()
    }

    pub fn from_vec(&self, v: &[u64]) -> Result<TateClass> {
        ensure!(v.len() == self.basis.len(), Mismatch, "vector of the wrong length");
        let mut out = TateClass::zero(self.field, self.shape)?;
        for (nu, &x) in self.basis.iter().zip(v) {
            let len = out.coeff_len(nu.i);
            out.set_component(*nu, &WittScalar::from_zpn(self.field, len, x)?)?;
        }
        Ok(out)
    }

    /// Generators: coefficient 1 on one component.
    pub fn generators(&self) -> Result<Vec<TateClass>> {
        TateClass::generators(self.field, self.shape)
    }

    /// Matrix (rows = images of generators) of an additive map into `target`.
    pub fn matrix(&self, target: &ModuleCoords, f: impl Fn(&TateClass) -> Result<TateClass>) -> Result<Vec<Vec<u64>>> {
        self.generators()?.iter().map(|g| target.to_vec(&f(g)?)).collect()
    }
}

/// Generators of `span(a) /\ span(b)` inside `g`.
pub(crate) fn intersect(g: &AbelianGroup, a: &[Vec<u64>], b: &[Vec<u64>]) -> Result<Vec<Vec<u64>>> {
    if a.is_empty() || b.is_empty() {
        return Ok(Vec::new());
    }
    let prec = g.exps().iter().copied().max().unwrap_or(1).max(1);
    let modulus = g.p().pow(prec);
    let free = AbelianGroup::new(g.p(), vec![prec; a.len() + b.len()]);
    let mut images: Vec<Vec<u64>> = a.to_vec();
    images.extend(b.iter().map(|v| v.iter().map(|&x| (modulus - x % modulus) % modulus).collect::<Vec<_>>()));
    let images: Vec<Vec<u64>> = images.iter().map(|v| g.reduce(v)).collect();
    let kernel = free.kernel(g, &images)?;
    let mut a_images = a.to_vec();
    a_images.extend(std::iter::repeat_n(vec![0; g.rank()], b.len()));
    Ok(free.apply(g, &a_images, &kernel))
}

/// Generators of `span(a) + span(b)`.
pub(crate) fn sum(a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut out = a.to_vec();
    out.extend_from_slice(b);
    out
}

/// `p` times every generator.
pub(crate) fn times_p(g: &AbelianGroup, a: &[Vec<u64>]) -> Vec<Vec<u64>> {
    a.iter().map(|v| g.reduce(&v.iter().map(|&x| x * g.p()).collect::<Vec<_>>())).collect()
}
