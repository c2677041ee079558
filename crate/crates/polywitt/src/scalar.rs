//! Truncated Witt vectors W_n(F_q) in Witt coordinates.
//!
//! A scalar is stored as the code `sum_i a_i q^i` of its Witt coordinates.
//! In this encoding restriction is `code % q^l`, Verschiebung is `code * q`
//! and the Teichmuller lift of `c` is `c` itself.
//!
//! Sums and products are computed coordinatewise by running the ghost
//! recursion on lifts of the coordinates to the Galois ring
//! `Z/p^n[x]/(f)`; that is literally evaluating `S_i`, `P_i` at a point.
//! The isomorphism with the Galois ring (`Z/p^n` when q = p) is kept as an
//! independent oracle.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use serde_json::json;

use crate::error::{ensure, Error, Result};
use crate::field::{element_from_json, element_to_json, FieldSpec, FqElement};

pub const MAX_LENGTH: u32 = 5;
const TABLE_LIMIT: u32 = 256;

/// The Galois ring `Z/p^N[x]/(f)` with `f` the integer lift of the field
/// modulus (or `Z/p^N` for prime fields). Elements are coefficient pairs.
#[derive(Debug, Clone, Copy)]
pub struct GaloisRing {
    field: FieldSpec,
    prec: u32,
    modulus: u64,
}

pub type GrElem = [u64; 2];

impl GaloisRing {
    pub fn new(field: FieldSpec, prec: u32) -> Self {
        GaloisRing { field, prec, modulus: (field.p() as u64).pow(prec) }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn lift(&self, c: u32) -> GrElem {
        let [a, b] = self.field.coeffs(c);
        [a as u64, b as u64]
    }

    pub fn reduce(&self, g: GrElem) -> u32 {
        let p = self.field.p() as u64;
        self.field.from_coeffs([(g[0] % p) as u32, (g[1] % p) as u32])
    }

    pub fn add(&self, a: GrElem, b: GrElem) -> GrElem {
        [(a[0] + b[0]) % self.modulus, (a[1] + b[1]) % self.modulus]
    }

    pub fn sub(&self, a: GrElem, b: GrElem) -> GrElem {
        let m = self.modulus;
        [(a[0] + m - b[0] % m) % m, (a[1] + m - b[1] % m) % m]
    }

    pub fn mul(&self, a: GrElem, b: GrElem) -> GrElem {
        let m = self.modulus;
        let c0 = a[0] * b[0] % m;
        let c1 = (a[0] * b[1] + a[1] * b[0]) % m;
        let c2 = a[1] * b[1] % m;
        match self.field.modulus() {
            None => [c0, 0],
            Some([m0, m1]) => {
                // x^2 = -m1 x - m0
                let r0 = (c0 + m - c2 * m0 as u64 % m) % m;
                let r1 = (c1 + m - c2 * m1 as u64 % m) % m;
                [r0, r1]
            }
        }
    }

    pub fn scale(&self, a: GrElem, k: u64) -> GrElem {
        [a[0] * (k % self.modulus) % self.modulus, a[1] * (k % self.modulus) % self.modulus]
    }

    pub fn pow(&self, a: GrElem, mut e: u64) -> GrElem {
        let mut base = a;
        let mut acc = [1 % self.modulus, 0];
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Exact division by `p^k`; fails unless every coefficient is divisible.
    pub fn div_p_pow(&self, a: GrElem, k: u32) -> Result<GrElem> {
        let pk = (self.field.p() as u64).pow(k);
        ensure!(a[0].is_multiple_of(pk) && a[1].is_multiple_of(pk), Invariant, "ghost recursion: {a:?} not divisible by p^{k}");
        Ok([a[0] / pk, a[1] / pk])
    }

    /// Teichmuller representative of `c`: the unique lift fixed by `x -> x^q`.
    pub fn teichmuller(&self, c: u32) -> GrElem {
        let q = self.field.q() as u64;
        self.pow(self.lift(c), q.pow(self.prec.saturating_sub(1)))
    }
}

/// Arithmetic context for W_n(F_q), memoized per `(field, n)`.
#[derive(Debug)]
pub struct WittRing {
    field: FieldSpec,
    n: u32,
    q: u32,
    size: u32,
    gr: GaloisRing,
    minus_one: u32,
    add_table: Option<Vec<u32>>,
    mul_table: Option<Vec<u32>>,
}

impl WittRing {
    /// Fetch the shared ring for `(field, n)`.
    pub fn get(field: FieldSpec, n: u32) -> Result<Arc<WittRing>> {
        ensure!(n <= MAX_LENGTH, Range, "Witt length n = {n} exceeds the supported bound {MAX_LENGTH}");
        type Cache = RwLock<HashMap<(FieldSpec, u32), Arc<WittRing>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(r) = cache.read().expect("ring cache poisoned").get(&(field, n)) {
            return Ok(r.clone());
        }
        let ring = Arc::new(WittRing::build(field, n)?);
        let mut w = cache.write().expect("ring cache poisoned");
        Ok(w.entry((field, n)).or_insert(ring).clone())
    }

    fn build(field: FieldSpec, n: u32) -> Result<WittRing> {
        let q = field.q();
        let size = q.pow(n);
        let mut ring = WittRing {
            field,
            n,
            q,
            size,
            gr: GaloisRing::new(field, n.max(1)),
            minus_one: 0,
            add_table: None,
            mul_table: None,
        };
        if n > 0 {
            ring.minus_one = if field.p() == 2 {
                // -1 = (1, 1, ..., 1) in characteristic 2
                (0..n).map(|i| q.pow(i)).sum()
            } else {
                field.neg(1)
            };
        }
        if size <= TABLE_LIMIT {
            let mut add = vec![0; (size * size) as usize];
            let mut mul = vec![0; (size * size) as usize];
            for a in 0..size {
                for b in 0..size {
                    add[(a * size + b) as usize] = ring.add_direct(a, b)?;
                    mul[(a * size + b) as usize] = ring.mul_direct(a, b)?;
                }
            }
            ring.add_table = Some(add);
            ring.mul_table = Some(mul);
        }
        Ok(ring)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Number of elements, `q^n`.
    pub fn size(&self) -> u32 {
        self.size
    }

    pub fn coords(&self, code: u32) -> Vec<u32> {
        (0..self.n).map(|i| code / self.q.pow(i) % self.q).collect()
    }

    pub fn from_coords(&self, coords: &[u32]) -> u32 {
        coords.iter().rev().fold(0, |acc, &c| acc * self.q + c)
    }

    fn ghost_coords(&self, a: u32, b: u32, product: bool) -> Result<u32> {
        let n = self.n;
        if n == 0 {
            return Ok(0);
        }
        let gr = &self.gr;
        let p = self.field.p() as u64;
        let xa: Vec<GrElem> = self.coords(a).into_iter().map(|c| gr.lift(c)).collect();
        let xb: Vec<GrElem> = self.coords(b).into_iter().map(|c| gr.lift(c)).collect();
        let ghost = |x: &[GrElem], i: u32| {
            (0..=i).fold([0, 0], |acc, j| {
                let t = gr.pow(x[j as usize], p.pow(i - j));
                gr.add(acc, gr.scale(t, p.pow(j)))
            })
        };
        let mut out: Vec<GrElem> = Vec::with_capacity(n as usize);
        for i in 0..n {
            let target = if product {
                gr.mul(ghost(&xa, i), ghost(&xb, i))
            } else {
                gr.add(ghost(&xa, i), ghost(&xb, i))
            };
            let lower = (0..i).fold([0, 0], |acc, j| {
                let t = gr.pow(out[j as usize], p.pow(i - j));
                gr.add(acc, gr.scale(t, p.pow(j)))
            });
            out.push(gr.div_p_pow(gr.sub(target, lower), i)?);
        }
        Ok(self.from_coords(&out.iter().map(|&g| gr.reduce(g)).collect::<Vec<_>>()))
    }

    fn add_direct(&self, a: u32, b: u32) -> Result<u32> {
        self.ghost_coords(a, b, false)
    }

    fn mul_direct(&self, a: u32, b: u32) -> Result<u32> {
        self.ghost_coords(a, b, true)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        match &self.add_table {
            Some(t) => t[(a * self.size + b) as usize],
            None => self.add_direct(a, b).expect("ghost recursion is exact"),
        }
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.mul_table {
            Some(t) => t[(a * self.size + b) as usize],
            None => self.mul_direct(a, b).expect("ghost recursion is exact"),
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.n == 0 {
            return 0;
        }
        if self.field.p() == 2 {
            self.mul(self.minus_one, a)
        } else {
            // -1 is a Teichmuller unit of odd order, so negation is coordinatewise
            let c: Vec<u32> = self.coords(a).into_iter().map(|x| self.field.neg(x)).collect();
            self.from_coords(&c)
        }
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn one(&self) -> u32 {
        u32::from(self.n > 0)
    }

    /// `k * 1` for an integer `k`.
    pub fn from_int(&self, k: i64) -> u32 {
        let mut acc = 0;
        let mut base = self.one();
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            e >>= 1;
        }
        if k < 0 {
            self.neg(acc)
        } else {
            acc
        }
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Frobenius, coordinatewise `a_i -> a_i^p`.
    pub fn frob(&self, a: u32) -> u32 {
        self.map_coords(a, |c| self.field.frob(c))
    }

    pub fn frob_inv(&self, a: u32) -> u32 {
        self.map_coords(a, |c| self.field.frob_inv(c))
    }

    /// Frobenius iterated `k` times (negative `k` for the inverse).
    pub fn frob_pow(&self, a: u32, k: i64) -> u32 {
        if self.field.d() == 1 {
            return a;
        }
        self.map_coords(a, |c| self.field.frob_pow(c, k))
    }

    fn map_coords(&self, a: u32, f: impl Fn(u32) -> u32) -> u32 {
        let c: Vec<u32> = self.coords(a).into_iter().map(f).collect();
        self.from_coords(&c)
    }

    /// `p * a = V(F(a))` truncated to length n.
    pub fn times_p(&self, a: u32) -> u32 {
        if self.n == 0 {
            return 0;
        }
        self.frob(a) * self.q % self.size
    }

    pub fn times_p_pow(&self, a: u32, k: u32) -> u32 {
        (0..k).fold(a, |x, _| self.times_p(x))
    }

    /// Restriction to length `l <= n`.
    pub fn truncate(&self, a: u32, l: u32) -> u32 {
        a % self.q.pow(l.min(self.n))
    }

    /// p-adic valuation (n for zero).
    pub fn valuation(&self, a: u32) -> u32 {
        self.coords(a).iter().position(|&c| c != 0).map_or(self.n, |i| i as u32)
    }

    pub fn is_unit(&self, a: u32) -> bool {
        self.n > 0 && !a.is_multiple_of(self.q)
    }

    /// Divide by `p^k`, returning a representative of length `n - k`.
    pub fn div_p_pow(&self, a: u32, k: u32) -> Result<u32> {
        ensure!(self.valuation(a) >= k, Invariant, "{:?} is not divisible by p^{k}", self.coords(a));
        // a = V^k(F^k(b)) so b = F^{-k}(a shifted down)
        let shifted = a / self.q.pow(k);
        let mut b = shifted;
        for _ in 0..k {
            b = self.map_coords(b, |c| self.field.frob_inv(c));
        }
        Ok(b % self.q.pow(self.n - k))
    }

    /// Image in the Galois ring `Z/p^n[x]/(f)`.
    pub fn to_galois(&self, a: u32) -> GrElem {
        let gr = &self.gr;
        let p = self.field.p() as u64;
        let mut acc = [0, 0];
        for (i, c) in self.coords(a).into_iter().enumerate() {
            let c = self.field.frob_pow(c, -(i as i64));
            acc = gr.add(acc, gr.scale(gr.teichmuller(c), p.pow(i as u32)));
        }
        acc
    }

    pub fn from_galois(&self, g: GrElem) -> Result<u32> {
        let gr = &self.gr;
        let mut g = [g[0] % gr.modulus(), g[1] % gr.modulus()];
        let mut coords = Vec::with_capacity(self.n as usize);
        for i in 0..self.n {
            let c = gr.reduce(g);
            coords.push(self.field.frob_pow(c, i as i64));
            g = gr.div_p_pow(gr.sub(g, gr.teichmuller(c)), 1)?;
        }
        Ok(self.from_coords(&coords))
    }
}

/// An element of W_n(F_q).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct WittScalar {
    field: FieldSpec,
    n: u32,
    code: u32,
}

impl fmt::Debug for WittScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{}({:?})", self.n, self.coords())
    }
}

impl WittScalar {
    pub fn zero(field: FieldSpec, n: u32) -> Result<Self> {
        WittRing::get(field, n)?;
        Ok(WittScalar { field, n, code: 0 })
    }

    pub fn one(field: FieldSpec, n: u32) -> Result<Self> {
        let r = WittRing::get(field, n)?;
        Ok(WittScalar { field, n, code: r.one() })
    }

    pub fn from_int(field: FieldSpec, n: u32, k: i64) -> Result<Self> {
        let r = WittRing::get(field, n)?;
        Ok(WittScalar { field, n, code: r.from_int(k) })
    }

    pub fn from_coords(field: FieldSpec, coords: &[u32]) -> Result<Self> {
        let n = coords.len() as u32;
        let r = WittRing::get(field, n)?;
        for &c in coords {
            ensure!(c < field.q(), Input, "coordinate {c} is not an element of F_{}", field.q());
        }
        Ok(WittScalar { field, n, code: r.from_coords(coords) })
    }

    pub(crate) fn from_code(field: FieldSpec, n: u32, code: u32) -> Self {
        WittScalar { field, n, code }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn len(&self) -> u32 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn code(&self) -> u32 {
        self.code
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn ring(&self) -> Arc<WittRing> {
        WittRing::get(self.field, self.n).expect("ring parameters were validated at construction")
    }

    pub fn coords(&self) -> Vec<u32> {
        (0..self.n).map(|i| self.code / self.field.q().pow(i) % self.field.q()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }

    fn check(&self, other: &WittScalar) -> Result<()> {
        ensure!(
            self.field == other.field && self.n == other.n,
            Mismatch,
            "scalars over W_{}(F_{}) and W_{}(F_{})",
            self.n,
            self.field.q(),
            other.n,
            other.field.q()
        );
        Ok(())
    }

    pub fn add(&self, other: &WittScalar) -> Result<WittScalar> {
        self.check(other)?;
        Ok(WittScalar { code: self.ring().add(self.code, other.code), ..*self })
    }

    pub fn sub(&self, other: &WittScalar) -> Result<WittScalar> {
        self.check(other)?;
        Ok(WittScalar { code: self.ring().sub(self.code, other.code), ..*self })
    }

    pub fn mul(&self, other: &WittScalar) -> Result<WittScalar> {
        self.check(other)?;
        Ok(WittScalar { code: self.ring().mul(self.code, other.code), ..*self })
    }

    pub fn neg(&self) -> WittScalar {
        WittScalar { code: self.ring().neg(self.code), ..*self }
    }

    pub fn frobenius(&self) -> WittScalar {
        WittScalar { code: self.ring().frob(self.code), ..*self }
    }

    pub fn frobenius_inv(&self) -> WittScalar {
        WittScalar { code: self.ring().frob_inv(self.code), ..*self }
    }

    /// Shift `(a_0, ..., a_{n-1}) -> (0, a_0, ..., a_{n-1})`.
    pub fn verschiebung(&self) -> Result<WittScalar> {
        let n = self.n + 1;
        WittRing::get(self.field, n)?;
        Ok(WittScalar { field: self.field, n, code: self.code * self.field.q() })
    }

    /// Drop the last coordinate.
    pub fn restrict(&self) -> Result<WittScalar> {
        ensure!(self.n >= 1, Range, "cannot restrict W_0");
        self.truncate(self.n - 1)
    }

    pub fn truncate(&self, l: u32) -> Result<WittScalar> {
        ensure!(l <= self.n, Range, "cannot truncate length {} to {l}", self.n);
        Ok(WittScalar { field: self.field, n: l, code: self.code % self.field.q().pow(l) })
    }

    /// Zero-pad to a longer length (a set-theoretic section of restriction).
    pub fn pad(&self, l: u32) -> Result<WittScalar> {
        ensure!(l >= self.n, Range, "cannot pad length {} to {l}", self.n);
        WittRing::get(self.field, l)?;
        Ok(WittScalar { field: self.field, n: l, code: self.code })
    }

    pub fn is_unit(&self) -> bool {
        self.ring().is_unit(self.code)
    }

    /// Teichmuller lift `(c, 0, ..., 0)`.
    pub fn teichmuller(c: FqElement, n: u32) -> Result<WittScalar> {
        let field = c.field();
        WittRing::get(field, n)?;
        let code = if n == 0 { 0 } else { c.value() };
        Ok(WittScalar { field, n, code })
    }

    /// Value in `Z/p^n` (prime fields only).
    pub fn to_zpn(&self) -> Result<u64> {
        ensure!(self.field.is_prime_field(), Range, "to_zpn needs q = p");
        Ok(self.ring().to_galois(self.code)[0])
    }

    pub fn from_zpn(field: FieldSpec, n: u32, value: u64) -> Result<WittScalar> {
        ensure!(field.is_prime_field(), Range, "from_zpn needs q = p");
        let r = WittRing::get(field, n)?;
        let pn = (field.p() as u64).pow(n);
        Ok(WittScalar { field, n, code: r.from_galois([value % pn.max(1), 0])? })
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "p": self.field.p(),
            "n": self.n,
            "q": self.field.q(),
            "modulus": self.field.modulus(),
            "coords": self.coords().iter().map(|&c| element_to_json(&self.field, c)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<WittScalar> {
        let field = field_from_json(v)?;
        let coords = v
            .get("coords")
            .and_then(|c| c.as_array())
            .ok_or_else(|| Error::Input("scalar needs a coords array".into()))?;
        let coords: Vec<u32> = coords.iter().map(|c| element_from_json(&field, c)).collect::<Result<_>>()?;
        if let Some(n) = v.get("n").and_then(|n| n.as_u64()) {
            ensure!(n as usize == coords.len(), Input, "n = {n} but {} coordinates given", coords.len());
        }
        WittScalar::from_coords(field, &coords)
    }
}

/// Read `p`, `q` and an optional modulus from a JSON object.
pub(crate) fn field_from_json(v: &serde_json::Value) -> Result<FieldSpec> {
    let get = |k: &str| v.get(k).and_then(|x| x.as_u64()).map(|x| x as u32);
    let p = get("p").ok_or_else(|| Error::Input("missing p".into()))?;
    let q = get("q").unwrap_or(p);
    let modulus: Option<Vec<u32>> = match v.get("modulus") {
        None | Some(serde_json::Value::Null) => None,
        Some(m) => Some(
            serde_json::from_value(m.clone()).map_err(|e| Error::Input(format!("bad modulus: {e}")))?,
        ),
    };
    let field = FieldSpec::from_q(q, modulus.as_deref())?;
    ensure!(field.p() == p, Input, "q = {q} is not a power of p = {p}");
    Ok(field)
}
