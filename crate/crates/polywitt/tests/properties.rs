use polywitt::cocycle::{addition_defect, solve_cocycles};
use polywitt::orbits::{aperiodic_count, enumerate_aperiodic_necklaces, necklace_count, WordShape};
use polywitt::structure::{c_map, frobenius_map, multiply_witt, unit, verschiebung, SubgroupWittElement};
use polywitt::{BasedSpace, FieldSpec, LinearMap, WittElement, WittScalar};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn prime_and_len() -> impl Strategy<Value = (u32, u32)> {
    prop_oneof![(Just(2u32), 1u32..=4), (Just(3u32), 1u32..=3), (Just(5u32), 1u32..=2)]
}

fn scalar(p: u32, n: u32, v: u64) -> WittScalar {
    let f = FieldSpec::prime(p).unwrap();
    WittScalar::from_zpn(f, n, v % (p as u64).pow(n)).unwrap()
}

/// `(field, m, dim)` small enough for dense maps.
fn small_case() -> impl Strategy<Value = (FieldSpec, u32, u32)> {
    prop_oneof![
        (1u32..=2, 1u32..=2).prop_map(|(m, d)| (FieldSpec::prime(2).unwrap(), m, d)),
        (1u32..=3).prop_map(|d| (FieldSpec::prime(3).unwrap(), 1, d)),
        (1u32..=2).prop_map(|d| (FieldSpec::quadratic(2, 1, 1).unwrap(), 1, d)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_ring_axioms((p, n) in prime_and_len(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (x, y, z) = (scalar(p, n, a), scalar(p, n, b), scalar(p, n, c));
        prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
        prop_assert_eq!(x.add(&y).unwrap().add(&z).unwrap(), x.add(&y.add(&z).unwrap()).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
        prop_assert_eq!(x.mul(&y.add(&z).unwrap()).unwrap(), x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap());
        prop_assert!(x.add(&x.neg()).unwrap().is_zero());
        let modulus = (p as u64).pow(n);
        prop_assert_eq!(x.mul(&y).unwrap().to_zpn().unwrap(), x.to_zpn().unwrap() * y.to_zpn().unwrap() % modulus);
    }

    #[test]
    fn frobenius_and_verschiebung_on_scalars(q in prop_oneof![Just(4u32), Just(9)], n in 1u32..=3, a in any::<u32>(), b in any::<u32>()) {
        let f = polywitt::verify::standard_field(q).unwrap();
        let size = q.pow(n);
        let x = WittScalar::from_coords(f, &polywitt::WittRing::get(f, n).unwrap().coords(a % size)).unwrap();
        let y = WittScalar::from_coords(f, &polywitt::WittRing::get(f, n).unwrap().coords(b % size)).unwrap();
        prop_assert_eq!(x.add(&y).unwrap().frobenius(), x.frobenius().add(&y.frobenius()).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap().frobenius(), x.frobenius().mul(&y.frobenius()).unwrap());
        prop_assert_eq!(x.frobenius().frobenius_inv(), x);
        let p = f.p() as i64;
        let px = x.pad(n + 1).unwrap().mul(&WittScalar::from_int(f, n + 1, p).unwrap()).unwrap();
        prop_assert_eq!(x.verschiebung().unwrap().frobenius(), px);
        if n >= 2 {
            prop_assert_eq!(x.verschiebung().unwrap().restrict().unwrap(), x.restrict().unwrap().verschiebung().unwrap());
        }
    }

    #[test]
    fn scalar_json_round_trip((p, n) in prime_and_len(), a in any::<u64>()) {
        let x = scalar(p, n, a);
        prop_assert_eq!(WittScalar::from_json(&x.to_json()).unwrap(), x);
    }

    #[test]
    fn necklace_enumeration_matches_counts(b in 1u32..=4, p in prop_oneof![Just(2u32), Just(3)], i in 0u32..=2) {
        prop_assume!((b as u64).pow(p.pow(i)) <= 1 << 16);
        let list = enumerate_aperiodic_necklaces(b, p, i).unwrap();
        prop_assert_eq!(list.len() as u64, aperiodic_count(b as u64, p as u64, i));
        let shape = WordShape::new(p, b, i).unwrap();
        prop_assert_eq!(shape.necklaces().len() as u64, necklace_count(b as u64, p as u64, i));
        for nu in &list {
            let w = shape.expand(nu);
            prop_assert_eq!(shape.period_exponent(w), i);
            prop_assert_eq!(shape.canonical_word(shape.rotate(w, 1)), w);
        }
    }

    #[test]
    fn functor_laws((field, m, dim) in small_case(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = BasedSpace::standard(field, dim);
        let x = WittElement::random(&e, m, &mut rng).unwrap();
        prop_assert_eq!(x.apply_map(&LinearMap::identity(field, dim), &e).unwrap(), x.clone());
        let f = LinearMap::random(field, dim, dim, &mut rng);
        let g = LinearMap::random(field, dim, dim, &mut rng);
        let gf = g.compose(&f).unwrap();
        prop_assert_eq!(
            x.apply_map(&gf, &e).unwrap(),
            x.apply_map(&f, &e).unwrap().apply_map(&g, &e).unwrap()
        );
        let lifted = f.random_lift(m, &mut rng).unwrap();
        prop_assert_eq!(x.apply_lifted(&lifted, &e).unwrap(), x.apply_map(&f, &e).unwrap());
        let v: Vec<u32> = (0..dim).map(|k| (seed >> (4 * k)) as u32 % field.q()).collect();
        prop_assert_eq!(
            WittElement::teichmuller(&e, m, &v).unwrap().apply_map(&f, &e).unwrap(),
            WittElement::teichmuller(&e, m, &f.apply(&v)).unwrap()
        );
    }

    #[test]
    fn module_structure((field, m, dim) in small_case(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = BasedSpace::standard(field, dim);
        let x = WittElement::random(&e, m, &mut rng).unwrap();
        let y = WittElement::random(&e, m, &mut rng).unwrap();
        prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
        prop_assert!(x.sub(&x).unwrap().is_zero());
        prop_assert_eq!(x.times_int(field.p() as i64), x.times_p());
        prop_assert_eq!(WittElement::from_json(&x.to_json()).unwrap(), x.clone());
        // R after C is multiplication by p, and so is V after F
        prop_assert_eq!(c_map(&x).unwrap().restriction().unwrap(), x.times_p());
        let s: SubgroupWittElement = (&x).into();
        prop_assert_eq!(verschiebung(&frobenius_map(&s).unwrap()).unwrap(), s.times_p());
    }

    #[test]
    fn multiplication_laws(seed in any::<u64>(), m in 1u32..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let field = FieldSpec::prime(2).unwrap();
        let e = BasedSpace::standard(field, 1);
        let x = WittElement::random(&e, m, &mut rng).unwrap();
        let y = WittElement::random(&e, m, &mut rng).unwrap();
        let z = WittElement::random(&e, m, &mut rng).unwrap();
        let one = unit(field, m).unwrap();
        prop_assert_eq!(multiply_witt(&one, &x).unwrap().to_classical().unwrap(), x.to_classical().unwrap());
        let lhs = multiply_witt(&multiply_witt(&x, &y).unwrap(), &z).unwrap();
        let rhs = multiply_witt(&x, &multiply_witt(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(lhs.to_classical().unwrap(), rhs.to_classical().unwrap());
        // on the line, W_m(k) is the classical ring
        let xy = multiply_witt(&x, &y).unwrap().to_classical().unwrap();
        prop_assert_eq!(xy, x.to_classical().unwrap().mul(&y.to_classical().unwrap()).unwrap());
    }

    #[test]
    fn cocycles_are_symmetric(a in 0u32..4, b in 0u32..4, m in 1u32..=3) {
        let field = FieldSpec::prime(2).unwrap();
        let e = BasedSpace::standard(field, 2);
        let cs = solve_cocycles(2, 2).unwrap();
        let (u, v) = ([a & 1, a >> 1], [b & 1, b >> 1]);
        let uv = addition_defect(&e, m, &u, &v, &cs).unwrap();
        let vu = addition_defect(&e, m, &v, &u, &cs).unwrap();
        prop_assert!(uv.agree());
        prop_assert_eq!(uv.universal, vu.universal);
        for c in &cs {
            prop_assert!(c.evaluate(field, &u, &[0, 0]).unwrap().iter().all(|&t| t == 0));
        }
    }
}
