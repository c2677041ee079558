//! Finite fields F_q with q = p or q = p^2.
//!
//! An element is stored as the index `a0 + p*a1` of its coefficient vector
//! in the basis `1, x` of F_p[x]/(f), where `f = x^2 + c1 x + c0` is the
//! user-supplied modulus. For d = 1 the index is just the residue.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

pub const SUPPORTED_PRIMES: [u32; 3] = [2, 3, 5];

/// Parameters of a finite field: characteristic, degree and modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldSpec {
    p: u32,
    d: u32,
    /// `[c0, c1]` for the modulus `x^2 + c1 x + c0`; zero when d = 1.
    modulus: [u32; 2],
}

impl FieldSpec {
    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<Self> {
        ensure!(is_prime(p), Range, "p = {p} is not prime");
        ensure!(SUPPORTED_PRIMES.contains(&p), Range, "p = {p} outside the supported set {{2, 3, 5}}");
        Ok(FieldSpec { p, d: 1, modulus: [0, 0] })
    }

    /// F_{p^2} as F_p[x]/(x^2 + c1 x + c0). The modulus must be irreducible.
    pub fn quadratic(p: u32, c0: u32, c1: u32) -> Result<Self> {
        FieldSpec::prime(p)?;
        ensure!(c0 < p && c1 < p, Range, "modulus coefficients must lie in [0, {p})");
        let has_root = (0..p).any(|x| (x * x + c1 * x + c0).is_multiple_of(p));
        ensure!(!has_root, Range, "x^2 + {c1}x + {c0} is reducible over F_{p}");
        Ok(FieldSpec { p, d: 2, modulus: [c0, c1] })
    }

    /// Build from a degree and an optional modulus given low coefficient first.
    pub fn new(p: u32, d: u32, modulus: Option<&[u32]>) -> Result<Self> {
        match (d, modulus) {
            (1, None) => FieldSpec::prime(p),
            (1, Some(m)) => {
                ensure!(m.len() == 1 || m.is_empty(), Range, "degree-1 field takes no modulus");
                FieldSpec::prime(p)
            }
            (2, Some(m)) => {
                ensure!(m.len() == 2, Range, "modulus must be [c0, c1] for x^2 + c1 x + c0");
                FieldSpec::quadratic(p, m[0], m[1])
            }
            (2, None) => Err(Error::Range("a degree-2 field needs an explicit irreducible modulus".into())),
            _ => Err(Error::Range(format!("field degree d = {d} unsupported (d <= 2)"))),
        }
    }

    /// Parse `q` into a field; for q = p^2 a modulus is required.
    pub fn from_q(q: u32, modulus: Option<&[u32]>) -> Result<Self> {
        for &p in &SUPPORTED_PRIMES {
            if q == p {
                return FieldSpec::new(p, 1, modulus);
            }
            if q == p * p {
                return FieldSpec::new(p, 2, modulus);
            }
        }
        Err(Error::Range(format!("q = {q} is not p or p^2 for p in {{2, 3, 5}}")))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn q(&self) -> u32 {
        self.p.pow(self.d)
    }

    pub fn modulus(&self) -> Option<[u32; 2]> {
        (self.d == 2).then_some(self.modulus)
    }

    pub fn is_prime_field(&self) -> bool {
        self.d == 1
    }

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        1
    }

    /// Coefficient vector of an element (length d).
    pub fn coeffs(&self, a: u32) -> [u32; 2] {
        [a % self.p, a / self.p]
    }

    pub fn from_coeffs(&self, c: [u32; 2]) -> u32 {
        (c[0] % self.p) + self.p * (c[1] % self.p)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.coeffs(a), self.coeffs(b));
        self.from_coeffs([x[0] + y[0], x[1] + y[1]])
    }

    pub fn neg(&self, a: u32) -> u32 {
        let x = self.coeffs(a);
        self.from_coeffs([(self.p - x[0]) % self.p, (self.p - x[1]) % self.p])
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        let (x, y) = (self.coeffs(a), self.coeffs(b));
        let c0 = x[0] * y[0];
        let c1 = x[0] * y[1] + x[1] * y[0];
        let c2 = x[1] * y[1] % p;
        // x^2 = -c1 x - c0
        let [m0, m1] = self.modulus;
        let r0 = (c0 + c2 * (p - m0)) % p;
        let r1 = (c1 + c2 * (p - m1)) % p;
        self.from_coeffs([r0, r1])
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        ensure!(a != 0, Invariant, "zero is not invertible");
        Ok(self.pow(a, self.q() as u64 - 2))
    }

    /// The absolute Frobenius x -> x^p.
    pub fn frob(&self, a: u32) -> u32 {
        self.pow(a, self.p as u64)
    }

    /// Inverse Frobenius x -> x^{q/p}.
    pub fn frob_inv(&self, a: u32) -> u32 {
        self.pow(a, (self.q() / self.p) as u64)
    }

    /// Apply Frobenius `k` times; negative `k` applies the inverse.
    pub fn frob_pow(&self, a: u32, k: i64) -> u32 {
        let k = k.rem_euclid(self.d as i64);
        (0..k).fold(a, |x, _| self.frob(x))
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q()
    }

    pub fn element(&self, value: u32) -> Result<FqElement> {
        ensure!(value < self.q(), Input, "{value} is not an element index of F_{}", self.q());
        Ok(FqElement { field: *self, value })
    }
}

/// An element of a finite field together with its field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FqElement {
    field: FieldSpec,
    value: u32,
}

impl FqElement {
    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn add(self, other: FqElement) -> Result<FqElement> {
        self.check(&other)?;
        Ok(FqElement { field: self.field, value: self.field.add(self.value, other.value) })
    }

    pub fn mul(self, other: FqElement) -> Result<FqElement> {
        self.check(&other)?;
        Ok(FqElement { field: self.field, value: self.field.mul(self.value, other.value) })
    }

    pub fn neg(self) -> FqElement {
        FqElement { field: self.field, value: self.field.neg(self.value) }
    }

    pub fn pow(self, e: u64) -> FqElement {
        FqElement { field: self.field, value: self.field.pow(self.value, e) }
    }

    pub fn inv(self) -> Result<FqElement> {
        Ok(FqElement { field: self.field, value: self.field.inv(self.value)? })
    }

    /// JSON form: an integer for d = 1, a coefficient array for d = 2.
    pub fn to_json(&self) -> serde_json::Value {
        element_to_json(&self.field, self.value)
    }

    fn check(&self, other: &FqElement) -> Result<()> {
        ensure!(self.field == other.field, Mismatch, "elements of different fields");
        Ok(())
    }
}

pub(crate) fn element_to_json(field: &FieldSpec, v: u32) -> serde_json::Value {
    if field.d() == 1 {
        serde_json::json!(v)
    } else {
        serde_json::json!(field.coeffs(v))
    }
}

pub(crate) fn element_from_json(field: &FieldSpec, v: &serde_json::Value) -> Result<u32> {
    let bad = || Error::Input(format!("bad field element {v}"));
    let value = match v {
        serde_json::Value::Number(n) => {
            let x = n.as_u64().ok_or_else(bad)?;
            if field.d() == 1 {
                x
            } else {
                return Err(Error::Input(format!("field of degree 2 expects [c0, c1], got {v}")));
            }
        }
        serde_json::Value::Array(a) => {
            ensure!(a.len() == field.d() as usize, Input, "expected {} coefficients, got {v}", field.d());
            let mut c = [0u32; 2];
            for (k, x) in a.iter().enumerate() {
                let x = x.as_u64().ok_or_else(bad)?;
                ensure!(x < field.p() as u64, Input, "coefficient {x} not reduced mod {}", field.p());
                c[k] = x as u32;
            }
            field.from_coeffs(c) as u64
        }
        _ => return Err(bad()),
    };
    ensure!(value < field.q() as u64, Input, "{value} is not an element of F_{}", field.q());
    Ok(value as u32)
}

pub(crate) fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}
