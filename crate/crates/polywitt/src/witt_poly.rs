//! Universal Witt addition and multiplication polynomials over the integers.
//!
//! Variables are ordered `X_0..X_{n-1}, Y_0..Y_{n-1}`. The polynomials are
//! produced by the ghost recursion and every division by `p^i` is checked to
//! be exact.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{ensure, Error, Result};
use crate::field::{is_prime, FieldSpec};

/// Sparse multivariate polynomial with big-integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(vec![0; nvars], c.into());
        p
    }

    pub fn var(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; nvars];
        e[k] = 1;
        let mut p = Poly::zero(nvars);
        p.add_term(e, BigInt::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigInt)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> Poly {
        let mut out = Poly::zero(self.nvars);
        if k.is_zero() {
            return out;
        }
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), c * k);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut acc: HashMap<Vec<u32>, BigInt> = HashMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_default() += c1 * c2;
            }
        }
        Poly { nvars: self.nvars, terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::constant(self.nvars, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Divide every coefficient by `d`, failing unless the division is exact.
    pub fn div_exact(&self, d: &BigInt) -> Result<Poly> {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            ensure!(r.is_zero(), Invariant, "coefficient {c} not divisible by {d}");
            out.terms.insert(e.clone(), q);
        }
        Ok(out)
    }

    /// Evaluate with coefficients reduced mod p at points of F_q.
    pub fn eval_mod_p(&self, field: &FieldSpec, point: &[u32]) -> u32 {
        let p = BigInt::from(field.p());
        let mut acc = 0;
        for (e, c) in &self.terms {
            let c = c.mod_floor(&p).to_u32().unwrap_or(0);
            if c == 0 {
                continue;
            }
            let mut t = c;
            for (k, &ek) in e.iter().enumerate() {
                if ek > 0 {
                    t = field.mul(t, field.pow(point[k], ek as u64));
                }
            }
            acc = field.add(acc, t);
        }
        acc
    }

    /// Evaluate over the integers.
    pub fn eval_int(&self, point: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (k, &ek) in e.iter().enumerate() {
                if ek > 0 {
                    t *= num_traits::pow(point[k].clone(), ek as usize);
                }
            }
            acc += t;
        }
        acc
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let half = self.nvars / 2;
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if k == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(v, &x)| {
                    let name = if v < half { format!("X{v}") } else { format!("Y{}", v - half) };
                    if x == 1 {
                        name
                    } else {
                        format!("{name}^{x}")
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{mag}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// The polynomials `S_0..S_{n-1}` and `P_0..P_{n-1}` for a prime `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalWittPolynomials {
    pub p: u32,
    pub n: u32,
    pub sum_polys: Vec<Poly>,
    pub prod_polys: Vec<Poly>,
}

/// Ghost component `w_i = sum_{j<=i} p^j V_j^{p^{i-j}}` of the variables
/// starting at `offset`.
pub fn ghost_component(p: u32, i: u32, nvars: usize, offset: usize) -> Poly {
    let mut acc = Poly::zero(nvars);
    for j in 0..=i {
        let v = Poly::var(nvars, offset + j as usize).pow((p as u64).pow(i - j));
        acc = acc.add(&v.scale(&BigInt::from(p).pow(j)));
    }
    acc
}

fn ghost_of(p: u32, polys: &[Poly], i: u32) -> Poly {
    let nvars = polys[0].nvars();
    let mut acc = Poly::zero(nvars);
    for j in 0..=i {
        let t = polys[j as usize].pow((p as u64).pow(i - j));
        acc = acc.add(&t.scale(&BigInt::from(p).pow(j)));
    }
    acc
}

fn build(p: u32, n: u32) -> Result<UniversalWittPolynomials> {
    let nv = 2 * n as usize;
    let mut sums: Vec<Poly> = Vec::new();
    let mut prods: Vec<Poly> = Vec::new();
    for i in 0..n {
        let wx = ghost_component(p, i, nv, 0);
        let wy = ghost_component(p, i, nv, n as usize);
        let pi = BigInt::from(p).pow(i);
        let mut s = wx.add(&wy);
        let mut m = wx.mul(&wy);
        for j in 0..i {
            let e = (p as u64).pow(i - j);
            let pj = BigInt::from(p).pow(j);
            s = s.sub(&sums[j as usize].pow(e).scale(&pj));
            m = m.sub(&prods[j as usize].pow(e).scale(&pj));
        }
        sums.push(s.div_exact(&pi)?);
        prods.push(m.div_exact(&pi)?);
    }
    Ok(UniversalWittPolynomials { p, n, sum_polys: sums, prod_polys: prods })
}

type PolyCache = Mutex<HashMap<(u32, u32), Arc<OnceLock<Result<Arc<UniversalWittPolynomials>>>>>>;

/// Compute (or fetch the memoized) universal polynomials for `(p, n)`.
pub fn compute_witt_polynomials(p: u32, n: u32) -> Result<Arc<UniversalWittPolynomials>> {
    ensure!(is_prime(p), Range, "p = {p} is not prime");
    ensure!(n >= 1, Range, "length must be at least 1");
    ensure!(n <= 5, Range, "length n = {n} exceeds the supported bound 5");
    static CACHE: OnceLock<PolyCache> = OnceLock::new();
    let cell = {
        let mut map = CACHE.get_or_init(Default::default).lock().expect("poly cache poisoned");
        map.entry((p, n)).or_default().clone()
    };
    cell.get_or_init(|| build(p, n).map(Arc::new)).clone()
}

impl UniversalWittPolynomials {
    /// Check the ghost identities `w_i(S) = w_i(X) + w_i(Y)` and
    /// `w_i(P) = w_i(X) w_i(Y)` exactly.
    pub fn check_ghost_identities(&self) -> Result<()> {
        let n = self.n;
        let nv = 2 * n as usize;
        ensure!(
            self.sum_polys.len() == n as usize && self.prod_polys.len() == n as usize,
            Invariant,
            "expected {n} polynomials of each kind"
        );
        for i in 0..n {
            let wx = ghost_component(self.p, i, nv, 0);
            let wy = ghost_component(self.p, i, nv, n as usize);
            let ws = ghost_of(self.p, &self.sum_polys, i);
            if ws != wx.add(&wy) {
                return Err(Error::Invariant(format!("ghost identity fails for S_{i}")));
            }
            let wp = ghost_of(self.p, &self.prod_polys, i);
            if wp != wx.mul(&wy) {
                return Err(Error::Invariant(format!("ghost identity fails for P_{i}")));
            }
        }
        Ok(())
    }

    /// Evaluate the sum coordinates at `x, y` in F_q.
    pub fn eval_sum(&self, field: &FieldSpec, x: &[u32], y: &[u32]) -> Vec<u32> {
        let pt: Vec<u32> = x.iter().chain(y).copied().collect();
        self.sum_polys.iter().map(|s| s.eval_mod_p(field, &pt)).collect()
    }

    pub fn eval_prod(&self, field: &FieldSpec, x: &[u32], y: &[u32]) -> Vec<u32> {
        let pt: Vec<u32> = x.iter().chain(y).copied().collect();
        self.prod_polys.iter().map(|s| s.eval_mod_p(field, &pt)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(nv: usize, e: &[(usize, u32)]) -> Vec<u32> {
        let mut v = vec![0; nv];
        for &(k, x) in e {
            v[k] = x;
        }
        v
    }

    #[test]
    fn low_degree_polynomials_p2() {
        let w = compute_witt_polynomials(2, 2).unwrap();
        assert_eq!(w.sum_polys[0], Poly::var(4, 0).add(&Poly::var(4, 2)));
        // S_1 = X_1 + Y_1 - X_0 Y_0
        let s1 = &w.sum_polys[1];
        assert_eq!(s1.num_terms(), 3);
        assert_eq!(s1.coeff(&mono(4, &[(1, 1)])), BigInt::from(1));
        assert_eq!(s1.coeff(&mono(4, &[(3, 1)])), BigInt::from(1));
        assert_eq!(s1.coeff(&mono(4, &[(0, 1), (2, 1)])), BigInt::from(-1));
        // P_1 = X_0^2 Y_1 + X_1 Y_0^2 + 2 X_1 Y_1
        let p1 = &w.prod_polys[1];
        assert_eq!(p1.num_terms(), 3);
        assert_eq!(p1.coeff(&mono(4, &[(0, 2), (3, 1)])), BigInt::from(1));
        assert_eq!(p1.coeff(&mono(4, &[(1, 1), (2, 2)])), BigInt::from(1));
        assert_eq!(p1.coeff(&mono(4, &[(1, 1), (3, 1)])), BigInt::from(2));
    }

    #[test]
    fn p3_first_sum_polynomial() {
        // S_1 = X_1 + Y_1 - (X_0^2 Y_0 + X_0 Y_0^2)
        let w = compute_witt_polynomials(3, 2).unwrap();
        let s1 = &w.sum_polys[1];
        assert_eq!(s1.num_terms(), 4);
        assert_eq!(s1.coeff(&mono(4, &[(0, 2), (2, 1)])), BigInt::from(-1));
        assert_eq!(s1.coeff(&mono(4, &[(0, 1), (2, 2)])), BigInt::from(-1));
    }

    #[test]
    fn ghost_identities_hold() {
        for (p, n) in [(2, 4), (3, 3), (5, 2)] {
            compute_witt_polynomials(p, n).unwrap().check_ghost_identities().unwrap();
        }
    }

    #[test]
    fn corrupted_polynomial_is_detected() {
        let mut w = (*compute_witt_polynomials(2, 2).unwrap()).clone();
        w.sum_polys[1] = w.sum_polys[1].add(&Poly::var(4, 0));
        assert!(w.check_ghost_identities().is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(compute_witt_polynomials(4, 2).is_err());
        assert!(compute_witt_polynomials(2, 0).is_err());
        assert!(compute_witt_polynomials(2, 6).is_err());
    }

    #[test]
    fn display_is_readable() {
        let w = compute_witt_polynomials(2, 2).unwrap();
        assert_eq!(w.sum_polys[1].to_string(), "Y1 + X1 - X0*Y0");
    }
}
