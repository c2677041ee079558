//! Small values worked out by hand, frozen.

use num_bigint::BigInt;
use num_rational::Ratio;
use polywitt::cocycle::{addition_defect, check_identity, solve_cocycles};
use polywitt::orbits::{aperiodic_count, decompose_words, enumerate_aperiodic_necklaces, Necklace, WordShape};
use polywitt::structure::{
    filtration_table, gram_matrix, phi_basis, r_map, residual_action_report, tau, vr_sequences_check,
    CyclicPowerElement, CyclicVariant,
};
use polywitt::tate::{EquivariantVector, TateClass};
use polywitt::{compute_witt_polynomials, BasedSpace, FieldSpec, WittElement, WittScalar};

fn f(p: u32) -> FieldSpec {
    FieldSpec::prime(p).unwrap()
}

fn scalar(p: u32, coords: &[u32]) -> WittScalar {
    WittScalar::from_coords(f(p), coords).unwrap()
}

fn words(shape: &WordShape, list: &[Necklace]) -> Vec<String> {
    list.iter()
        .map(|nu| shape.letters(shape.expand(nu)).iter().map(u32::to_string).collect())
        .collect()
}

#[test]
fn first_sum_and_product_polynomials_p2() {
    // variables X0, X1, Y0, Y1
    let s = compute_witt_polynomials(2, 2).unwrap();
    let s1 = &s.sum_polys[1];
    assert_eq!(s1.num_terms(), 3);
    assert_eq!(s1.coeff(&[0, 1, 0, 0]), BigInt::from(1));
    assert_eq!(s1.coeff(&[0, 0, 0, 1]), BigInt::from(1));
    assert_eq!(s1.coeff(&[1, 0, 1, 0]), BigInt::from(-1));
    let p1 = &s.prod_polys[1];
    assert_eq!(p1.num_terms(), 3);
    assert_eq!(p1.coeff(&[2, 0, 0, 1]), BigInt::from(1));
    assert_eq!(p1.coeff(&[0, 1, 2, 0]), BigInt::from(1));
    assert_eq!(p1.coeff(&[0, 1, 0, 1]), BigInt::from(2));
}

#[test]
fn small_witt_scalars() {
    assert_eq!(scalar(2, &[1, 0]).add(&scalar(2, &[1, 0])).unwrap().coords(), vec![0, 1]);
    assert_eq!(scalar(3, &[1, 0]).add(&scalar(3, &[1, 0])).unwrap().coords(), vec![2, 1]);
    let v = WittScalar::one(f(2), 1).unwrap().verschiebung().unwrap();
    assert_eq!((v.coords(), v.to_zpn().unwrap()), (vec![0, 1], 2));
    let t = WittScalar::teichmuller(f(3).element(2).unwrap(), 2).unwrap();
    assert_eq!(t.to_zpn().unwrap(), 8);
    assert_eq!(scalar(2, &[1, 1]).to_zpn().unwrap(), 3);
    assert_eq!(WittScalar::from_zpn(f(2), 2, 3).unwrap().coords(), vec![1, 1]);
}

#[test]
fn periods_and_canonical_words() {
    let s1 = WordShape::new(2, 2, 1).unwrap();
    assert_eq!(s1.period_exponent(s1.from_letters(&[0, 1]).unwrap()), 1);
    let s2 = WordShape::new(2, 2, 2).unwrap();
    let w = s2.from_letters(&[0, 1, 0, 1]).unwrap();
    assert_eq!(s2.period_exponent(w), 1);
    let rep = s2.canonical_word(s2.from_letters(&[1, 0, 1, 0]).unwrap());
    assert_eq!(s2.letters(rep), vec![0, 1, 0, 1]);
    assert_eq!(s2.necklace_of(rep).i, 1);
}

#[test]
fn aperiodic_necklaces_binary() {
    let s1 = WordShape::new(2, 2, 1).unwrap();
    assert_eq!(words(&s1, &enumerate_aperiodic_necklaces(2, 2, 1).unwrap()), ["01"]);
    let s2 = WordShape::new(2, 2, 2).unwrap();
    assert_eq!(words(&s2, &enumerate_aperiodic_necklaces(2, 2, 2).unwrap()), ["0001", "0011", "0111"]);
    assert_eq!(aperiodic_count(2, 2, 2), 3);
    let sizes = |m| decompose_words(2, 2, m).unwrap().iter().map(Vec::len).collect::<Vec<_>>();
    assert_eq!(sizes(1), [2, 2]);
    assert_eq!(sizes(2), [2, 2, 12]);
}

#[test]
fn traces_and_projection() {
    let k = f(2);
    let s1 = WordShape::new(2, 2, 1).unwrap();
    let one = WittScalar::one(k, 1).unwrap();
    let (w01, w10, w00) = (s1.from_letters(&[0, 1]).unwrap(), s1.from_letters(&[1, 0]).unwrap(), 0);

    let mut x = EquivariantVector::zero(k, s1, 1, 0).unwrap();
    x.add_term(w01, &one).unwrap();
    let t = x.trace();
    assert_eq!((t.get(w01).coords(), t.get(w10).coords(), t.support_len()), (vec![1], vec![1], 2));
    assert!(t.project().unwrap().is_zero());

    let mut d = EquivariantVector::zero(k, s1, 1, 0).unwrap();
    d.add_term(w00, &one).unwrap();
    let c = d.project().unwrap();
    assert_eq!(c.num_components(), 1);
    assert_eq!(c.component(&s1.necklace_of(w00)).coords(), vec![1]);

    // stabilizer of order 2 doubles the orbit sum
    let s2 = WordShape::new(2, 2, 2).unwrap();
    let w = s2.from_letters(&[0, 1, 0, 1]).unwrap();
    let mut y = EquivariantVector::zero(k, s2, 2, 0).unwrap();
    y.add_term(w, &WittScalar::one(k, 2).unwrap()).unwrap();
    let t = y.trace();
    assert_eq!(t.get(w).to_zpn().unwrap(), 2);
    assert_eq!(t.get(s2.rotate(w, 1)).to_zpn().unwrap(), 2);
    assert_eq!(t.support_len(), 2);

    assert_eq!(TateClass::module_length(&s2), 5);
    assert_eq!(TateClass::module_length(&s1), 2);
}

#[test]
fn teichmuller_of_sum_of_basis_vectors() {
    let e = BasedSpace::standard(f(2), 2);
    let t = WittElement::teichmuller(&e, 2, &[1, 1]).unwrap();
    let comps: Vec<(u32, Vec<u32>, Vec<u32>)> =
        t.components().map(|(nu, c)| (nu.i, t.shape().block_letters(&nu), c.coords())).collect();
    assert_eq!(comps, vec![(0, vec![0], vec![1, 0]), (0, vec![1], vec![1, 0]), (1, vec![0, 1], vec![1])]);
    let r: Vec<(u32, Vec<u32>)> = t.restriction().unwrap().components().map(|(nu, c)| (nu.i, c.coords())).collect();
    assert_eq!(r, vec![(0, vec![1]), (0, vec![1])]);

    let basis = WittElement::teichmuller(&e, 2, &[0, 1]).unwrap();
    assert_eq!(basis.components().count(), 1);
}

#[test]
fn addition_is_not_additive_on_teichmuller() {
    let e = BasedSpace::standard(f(2), 2);
    let (a, b) = ([1, 0], [0, 1]);
    let sum = WittElement::teichmuller(&e, 2, &[1, 1]).unwrap();
    let parts = WittElement::teichmuller(&e, 2, &a).unwrap().add(&WittElement::teichmuller(&e, 2, &b).unwrap()).unwrap();
    assert_ne!(sum, parts);
}

#[test]
fn degree_of_a_mixed_necklace() {
    let e = BasedSpace::standard(f(2), 2).with_grading(vec![0, 1]).unwrap();
    let nu = WordShape::new(2, 2, 1).unwrap().necklace_from_block(&[0, 1]).unwrap();
    assert_eq!(WittElement::component_degree(&e, &nu).unwrap(), Ratio::new(1, 2));
}

#[test]
fn restriction_kernel_and_cyclic_dimensions() {
    let e = BasedSpace::standard(f(2), 2);
    assert_eq!(phi_basis(&e, 1).unwrap().len(), 1);
    assert_eq!(phi_basis(&e, 2).unwrap().len(), 3);
    assert_eq!(CyclicPowerElement::dim(&e, 2).unwrap(), 6);
    assert_eq!(CyclicPowerElement::dim(&e, 1).unwrap(), 3);
    // a pure top component dies under R
    let top = WittElement::zero(&e, 2).unwrap().with_component(&[0, 1], &WittScalar::one(f(2), 1).unwrap()).unwrap();
    assert!(top.restriction().unwrap().is_zero());
    let x = r_map(&WittElement::teichmuller(&e, 1, &[1, 1]).unwrap()).unwrap();
    assert_eq!(x.variant(), CyclicVariant::Invariants);
}

#[test]
fn filtration_pieces_binary() {
    let e = BasedSpace::standard(f(2), 2);
    let t = filtration_table(&e, 2).unwrap();
    assert_eq!(t.standard, vec![2, 3]);
    assert!(t.checks.iter().all(|c| c.passed));
}

#[test]
fn gram_determinant_is_a_unit() {
    let e = BasedSpace::standard(f(2), 2);
    let (_, det) = gram_matrix(&e, 2).unwrap();
    assert!(det.is_unit());
}

#[test]
fn tau_swaps_teichmuller_tensors() {
    let e = BasedSpace::standard(f(2), 2);
    let ee = e.tensor(&e).unwrap();
    // (1, 0) (x) (1, 1) and its swap
    let t = WittElement::teichmuller(&ee, 2, &[1, 1, 0, 0]).unwrap();
    let swapped = WittElement::teichmuller(&ee, 2, &[1, 0, 1, 0]).unwrap();
    assert_eq!(tau(&t, 1).unwrap(), swapped);
}

#[test]
fn v_and_r_sequences_for_m2_n1() {
    let e = BasedSpace::standard(f(2), 2);
    assert!(vr_sequences_check(&e, 2, 1).unwrap().iter().all(|c| c.passed));
}

#[test]
fn residual_action_dimensions() {
    let e = BasedSpace::standard(f(2), 2);
    let r = residual_action_report(&e, 1, 2).unwrap();
    assert_eq!((r.dim, r.residual_invariants, r.residual_coinvariants), (10, 6, 6));
    assert_eq!((r.naive_invariants, r.naive_coinvariants), (7, 7));
    // basis change of E does not move the dimensions
    let swapped = BasedSpace::new(f(2), vec!["s1".into(), "s0".into()]).unwrap();
    let s = residual_action_report(&swapped, 1, 2).unwrap();
    assert_eq!((s.residual_invariants, s.naive_invariants), (6, 7));
}

#[test]
fn first_cocycles() {
    let c = solve_cocycles(2, 1).unwrap();
    assert_eq!(c[0].terms(), vec![(vec![0, 1], BigInt::from(1))]);
    let c = solve_cocycles(3, 1).unwrap();
    assert_eq!(c[0].terms(), vec![(vec![0, 0, 1], BigInt::from(1)), (vec![0, 1, 1], BigInt::from(1))]);
    let c = solve_cocycles(2, 2).unwrap();
    assert!(check_identity(&c, 1).unwrap() && check_identity(&c, 2).unwrap());
}

#[test]
fn defect_on_the_line() {
    for (p, want) in [(2, 2), (3, 6)] {
        let e = BasedSpace::standard(f(p), 1);
        let cs = solve_cocycles(p, 1).unwrap();
        let d = addition_defect(&e, 2, &[1], &[1], &cs).unwrap();
        assert!(d.agree());
        assert_eq!(d.direct.to_classical().unwrap().to_zpn().unwrap(), want);
    }
}

#[test]
fn verschiebung_and_frobenius_on_the_line() {
    use polywitt::structure::{frobenius_pow, verschiebung_pow, SubgroupWittElement};
    for (p, m) in [(2u32, 3u32), (3, 2)] {
        let k = f(p);
        let e = BasedSpace::standard(k, 1);
        let pm = (p as u64).pow(m);
        for n in 1..m {
            // image of V^n is p^n W_m
            let g = &SubgroupWittElement::generators(&e, m, n).unwrap()[0];
            let mut image: Vec<u64> = (0..(p as i64).pow(m - n))
                .map(|t| verschiebung_pow(&g.times_int(t), n).unwrap().to_witt().unwrap().to_classical().unwrap().to_zpn().unwrap())
                .collect();
            image.sort();
            let want: Vec<u64> = (0..pm).filter(|v| v % (p as u64).pow(n) == 0).collect();
            assert_eq!(image, want);
            // kernel of F^n is p^(m-n) W_m
            let kernel: Vec<u64> = (0..pm)
                .filter(|&v| {
                    let x = WittElement::from_classical(&e, &WittScalar::from_zpn(k, m, v).unwrap()).unwrap();
                    frobenius_pow(&(&x).into(), n).unwrap().is_zero()
                })
                .collect();
            let want: Vec<u64> = (0..pm).filter(|v| v % (p as u64).pow(m - n) == 0).collect();
            assert_eq!(kernel, want);
        }
    }
}
