//! Multiplication `W_m(M) x W_m(N) -> W_m(M (x) N)`, the pairing with the
//! dual, and the trace isomorphism `tau: W_m(M (x) N) -> W_m(N (x) M)`.

use crate::error::{ensure, Result};
use crate::field::FieldSpec;
use crate::functor::{apply_lifted_class, BasedSpace, LinearMap, WittElement};
use crate::linalg::determinant;
use crate::orbits::WordShape;
use crate::scalar::{WittRing, WittScalar};
use crate::tate::TateClass;

use super::SubgroupWittElement;

/// Interleave canonical representatives slot by slot and project.
///
/// For orbits of period exponents `ix`, `iy` the product of the orbit sums
/// is the sum of the orbit sums of `u (x) sigma^k v` for `k < p^min(ix, iy)`,
/// each of period exponent `max(ix, iy)`.
pub(crate) fn multiply_classes(x: &TateClass, y: &TateClass) -> Result<TateClass> {
    let (sx, sy) = (x.shape(), y.shape());
    ensure!(x.field() == y.field(), Mismatch, "factors over different fields");
    ensure!(
        sx.len_exp() == sy.len_exp() && sx.block_exp() == sy.block_exp(),
        Mismatch,
        "factors at different levels"
    );
    let field = x.field();
    let p = field.p();
    let shape = WordShape::blocked(p, sx.b() * sy.b(), sx.len_exp(), sx.block_exp())?;
    let ring = WittRing::get(field, shape.group_exp())?;
    let mut out = TateClass::zero(field, shape)?;
    let ys: Vec<_> = y.raw_components().map(|(ny, cy)| (ny, sy.expand(&ny), cy)).collect();
    for (nx, cx) in x.raw_components() {
        let ux = sx.letters(sx.expand(&nx));
        for &(ny, vy0, cy) in &ys {
            let prod = ring.mul(cx, cy);
            if prod == 0 {
                continue;
            }
            for k in 0..p.pow(nx.i.min(ny.i)) {
                let vy = sy.letters(sy.act(vy0, k));
                let letters: Vec<u32> = ux.iter().zip(&vy).map(|(a, b)| a * sy.b() + b).collect();
                let w = shape.from_letters(&letters)?;
                out.add_code(shape.necklace_of(w), prod);
            }
        }
    }
    Ok(out)
}

/// `mu(x (x) y)` in `W^n_m(M (x) N)`.
pub fn multiply(x: &SubgroupWittElement, y: &SubgroupWittElement) -> Result<SubgroupWittElement> {
    let space = x.space().tensor(y.space())?;
    SubgroupWittElement::from_class(&space, multiply_classes(x.class(), y.class())?)
}

pub fn multiply_witt(x: &WittElement, y: &WittElement) -> Result<WittElement> {
    ensure!(x.m() == y.m(), Mismatch, "factors at different levels");
    multiply(&x.into(), &y.into())?.to_witt()
}

/// The unit `T(1)` in `W_m(k)`.
pub fn unit(field: FieldSpec, m: u32) -> Result<WittElement> {
    WittElement::teichmuller(&BasedSpace::standard(field, 1), m, &[1])
}

/// Relabel letters by a permutation of the basis, `perm[a]` being the new
/// letter of `a`. Equals `W(f)` for the permutation matrix `f`.
pub fn apply_permutation(x: &SubgroupWittElement, perm: &[u32], target: &BasedSpace) -> Result<SubgroupWittElement> {
    let shape = x.shape();
    ensure!(perm.len() == shape.b() as usize && target.dim() == shape.b(), Mismatch, "permutation has the wrong size");
    let mut seen = vec![false; perm.len()];
    for &a in perm {
        ensure!((a as usize) < perm.len() && !seen[a as usize], Input, "not a permutation");
        seen[a as usize] = true;
    }
    let mut out = TateClass::zero(x.field(), shape)?;
    for (nu, c) in x.class().raw_components() {
        let letters: Vec<u32> = shape.letters(shape.expand(&nu)).iter().map(|&a| perm[a as usize]).collect();
        out.set_code(shape.necklace_of(shape.from_letters(&letters)?), c);
    }
    SubgroupWittElement::from_class(target, out)
}

fn evaluation(field: FieldSpec, dim: u32) -> LinearMap {
    let row = (0..dim * dim).map(|w| u32::from(w / dim == w % dim)).collect();
    LinearMap::new(field, vec![row], dim * dim).expect("0/1 entries")
}

/// `<x, y>` for `x` over `E` and `y` over the dual basis: evaluate
/// `mu(x (x) y)` along `E (x) E* -> k`. The value lies in `W^n_m(k)`, read
/// as `W_{m-n}(F_q)` through `F^{-(m-n)}`.
pub fn pairing(x: &SubgroupWittElement, y: &SubgroupWittElement) -> Result<WittScalar> {
    let dim = x.space().dim();
    ensure!(y.space().dim() == dim, Mismatch, "pairing needs spaces of equal dimension");
    ensure!(x.n() == y.n() && x.m() == y.m(), Mismatch, "factors at different levels");
    let prod = multiply_classes(x.class(), y.class())?;
    let g = prod.group_exp();
    let ev = evaluation(x.field(), dim).teichmuller_lift(g)?;
    let value = apply_lifted_class(&prod, &ev)?;
    let key = value.shape().necklace_of(0);
    let c = value.component(&key);
    let ring = c.ring();
    Ok(WittScalar::from_code(c.field(), g, ring.frob_pow(c.code(), -(g as i64))))
}

pub fn pairing_witt(x: &WittElement, y: &WittElement) -> Result<WittScalar> {
    pairing(&x.into(), &y.into())
}

/// Normalized Gram matrix `<g_a, h_b> / p^{i_a}` of the component
/// generators of `W_m(E)` and `W_m(E*)`, as elements of `W_m`, and its
/// determinant.
pub fn gram_matrix(space: &BasedSpace, m: u32) -> Result<(Vec<Vec<WittScalar>>, WittScalar)> {
    let field = space.field();
    let dual = space.dual();
    let gs = WittElement::generators(space, m)?;
    let hs = WittElement::generators(&dual, m)?;
    let ring = WittRing::get(field, m)?;
    let mut rows = Vec::with_capacity(gs.len());
    for g in &gs {
        let i = g.components().next().map(|(nu, _)| nu.i).unwrap_or(0);
        let mut row = Vec::with_capacity(hs.len());
        for h in &hs {
            let v = pairing_witt(g, h)?;
            let q = ring.div_p_pow(v.code(), i)?;
            row.push(WittScalar::from_code(field, m, q));
        }
        rows.push(row);
    }
    let codes: Vec<Vec<u32>> = rows.iter().map(|r| r.iter().map(|c| c.code()).collect()).collect();
    let det = determinant(&codes, 0, ring.one(), |a, b| ring.add(a, b), |a, b| ring.mul(a, b), |a| ring.neg(a));
    Ok((rows, WittScalar::from_code(field, m, det)))
}

/// `tau_{M,N}` where `M` is the product of the first `split` tensor factors
/// of the space of `x`. On words, `((a_j, b_j))_j` goes to
/// `((b_j, a_{j+1}))_j`: the one-slot shift of the interleaved sequence.
pub fn tau(x: &WittElement, split: usize) -> Result<WittElement> {
    let (left, right) = x.space().split(split)?;
    let target = right.tensor(&left)?;
    let (dm, dn) = (left.dim(), right.dim());
    let shape = x.shape();
    let len = shape.len() as usize;
    let mut out = TateClass::zero(x.field(), shape)?;
    for (nu, c) in x.class().raw_components() {
        let letters = shape.letters(shape.expand(&nu));
        let shifted: Vec<u32> = (0..len)
            .map(|j| {
                let b = letters[j] % dn;
                let a_next = letters[(j + 1) % len] / dn;
                b * dm + a_next
            })
            .collect();
        out.set_code(shape.necklace_of(shape.from_letters(&shifted)?), c);
    }
    WittElement::from_class(&target, x.m(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{frobenius_map, verschiebung};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    fn swap_perm(dm: u32, dn: u32) -> Vec<u32> {
        (0..dm * dn).map(|l| (l % dn) * dm + l / dn).collect()
    }

    #[test]
    fn teichmuller_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for field in [f2(), FieldSpec::prime(3).unwrap(), FieldSpec::quadratic(2, 1, 1).unwrap()] {
            let (a, b) = (BasedSpace::standard(field, 2), BasedSpace::standard(field, 2));
            for _ in 0..10 {
                let e: Vec<u32> = (0..2).map(|_| rng.gen_range(0..field.q())).collect();
                let f: Vec<u32> = (0..2).map(|_| rng.gen_range(0..field.q())).collect();
                let ef: Vec<u32> = (0..4).map(|w| field.mul(e[w / 2], f[w % 2])).collect();
                let lhs = multiply_witt(&WittElement::teichmuller(&a, 2, &e).unwrap(), &WittElement::teichmuller(&b, 2, &f).unwrap()).unwrap();
                assert_eq!(lhs, WittElement::teichmuller(&a.tensor(&b).unwrap(), 2, &ef).unwrap());
            }
        }
    }

    #[test]
    fn unit_symmetry_and_associativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let e = BasedSpace::standard(f2(), 2);
        let k = BasedSpace::standard(f2(), 1);
        for _ in 0..10 {
            let x = WittElement::random(&e, 2, &mut rng).unwrap();
            let y = WittElement::random(&e, 2, &mut rng).unwrap();
            let z = WittElement::random(&k.tensor(&k).unwrap(), 2, &mut rng).unwrap();
            let ex = multiply_witt(&unit(f2(), 2).unwrap(), &x).unwrap();
            assert_eq!(ex.class(), x.class());
            let xy = multiply_witt(&x, &y).unwrap();
            let yx = multiply_witt(&y, &x).unwrap();
            let swapped = apply_permutation(&(&xy).into(), &swap_perm(2, 2), yx.space()).unwrap();
            assert_eq!(swapped.to_witt().unwrap(), yx);
            let via_map = xy.apply_map(&LinearMap::permutation(f2(), &swap_perm(2, 2)), yx.space()).unwrap();
            assert_eq!(via_map, yx);
            let l = multiply_witt(&multiply_witt(&x, &y).unwrap(), &z).unwrap();
            let r = multiply_witt(&x, &multiply_witt(&y, &z).unwrap()).unwrap();
            assert_eq!(l, r);
            assert_eq!(
                multiply_witt(&x.restriction().unwrap(), &y.restriction().unwrap()).unwrap(),
                xy.restriction().unwrap()
            );
        }
    }

    #[test]
    fn projection_formula_and_adjunction() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let e = BasedSpace::standard(f2(), 2);
        let d = e.dual();
        for _ in 0..10 {
            let a = SubgroupWittElement::random(&e, 2, 1, &mut rng).unwrap();
            let b = SubgroupWittElement::random(&d, 2, 0, &mut rng).unwrap();
            let lhs = multiply(&verschiebung(&a).unwrap(), &b).unwrap();
            let rhs = verschiebung(&multiply(&a, &frobenius_map(&b).unwrap()).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            let pl = pairing(&verschiebung(&a).unwrap(), &b).unwrap();
            let pr = pairing(&a, &frobenius_map(&b).unwrap()).unwrap().verschiebung().unwrap();
            assert_eq!(pl, pr);
        }
    }

    #[test]
    fn pairing_examples() {
        let k = BasedSpace::standard(f2(), 1);
        let t = WittElement::teichmuller(&k, 2, &[1]).unwrap();
        let ts = WittElement::teichmuller(&k.dual(), 2, &[1]).unwrap();
        assert_eq!(pairing_witt(&t, &ts).unwrap(), WittScalar::one(f2(), 2).unwrap());
        for (field, m) in [(f2(), 1), (f2(), 2), (f2(), 3), (FieldSpec::prime(3).unwrap(), 2), (FieldSpec::quadratic(2, 1, 1).unwrap(), 2)] {
            let e = BasedSpace::standard(field, 2);
            let (_, det) = gram_matrix(&e, m).unwrap();
            assert!(det.is_unit(), "q={} m={m}", field.q());
        }
    }

    #[test]
    fn tau_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let (a, b, c) = (BasedSpace::standard(f2(), 2), BasedSpace::standard(f2(), 1), BasedSpace::standard(f2(), 2));
        let abc = a.tensor(&b).unwrap().tensor(&c).unwrap();
        let k = BasedSpace::standard(f2(), 1);
        for _ in 0..10 {
            let x = WittElement::random(&abc, 2, &mut rng).unwrap();
            let y = tau(&tau(&tau(&x, 1).unwrap(), 1).unwrap(), 1).unwrap();
            assert_eq!(y, x);
            let z = WittElement::random(&a, 2, &mut rng).unwrap();
            let kz = WittElement::from_class(&k.tensor(&a).unwrap(), 2, z.class().clone()).unwrap();
            assert_eq!(tau(&kz, 1).unwrap().class(), z.class());
            let zk = WittElement::from_class(&a.tensor(&k).unwrap(), 2, z.class().clone()).unwrap();
            assert_eq!(tau(&zk, 1).unwrap().class(), z.class());
        }
        let e: Vec<u32> = vec![1, 1];
        let f: Vec<u32> = vec![0, 1];
        let ac = a.tensor(&c).unwrap();
        let ef: Vec<u32> = (0..4).map(|w| e[w / 2] * f[w % 2]).collect();
        let fe: Vec<u32> = (0..4).map(|w| f[w / 2] * e[w % 2]).collect();
        let t = tau(&WittElement::teichmuller(&ac, 2, &ef).unwrap(), 1).unwrap();
        assert_eq!(t, WittElement::teichmuller(&c.tensor(&a).unwrap(), 2, &fe).unwrap());
    }
}
