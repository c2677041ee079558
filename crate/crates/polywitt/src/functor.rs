//! The functors `W_m` on based vector spaces.
//!
//! `W_m(E)` is the zeroth Tate cohomology of `Z/p^m` acting on the
//! `p^m`-fold tensor power of a lift of `E` to `W_m(F_q)`. With a basis of
//! `E` this is a [`TateClass`] over words in the basis letters; the
//! component of a necklace of period `p^i` is a coefficient in `W_{m-i}`.
//!
//! The coefficient of an orbit is the actual tensor coefficient, so the
//! `W_m(F_q)`-module structure is the Frobenius-twisted one: a scalar `a`
//! multiplies coefficients by `F^m(a)`. For `E = F_q` the element with
//! coefficient `c` corresponds to the classical Witt vector `F^{-m}(c)`.
//! For q = p none of the twists are visible.

use std::sync::Arc;

use num_rational::Ratio;
use rand::Rng;
use serde_json::json;

use crate::error::{ensure, Error, Result};
use crate::field::{element_from_json, FieldSpec};
use crate::orbits::{Necklace, WordShape};
use crate::scalar::{WittRing, WittScalar};
use crate::tate::{EquivariantVector, TateClass};

/// Largest dense tensor used by Teichmuller expansion and `apply_map`.
const SPARSE_CAP: u64 = 1 << 20;

pub const DENSE_CAP: u64 = 1 << 16;

/// One factor of an ordered tensor decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Factor {
    labels: Vec<String>,
    grading: Option<Vec<i64>>,
}

/// A finite-dimensional F_q-vector space with a chosen basis.
///
/// A space built by [`BasedSpace::tensor`] remembers its ordered factors.
/// The basis letter of a pure tensor is read in mixed radix, first factor
/// most significant, and its label joins the factor labels with `*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasedSpace {
    field: FieldSpec,
    labels: Vec<String>,
    grading: Option<Vec<i64>>,
    factors: Vec<Factor>,
}

impl BasedSpace {
    pub fn new(field: FieldSpec, labels: Vec<String>) -> Result<Self> {
        let mut sorted = labels.clone();
        sorted.sort();
        sorted.dedup();
        ensure!(sorted.len() == labels.len(), Input, "basis labels must be distinct");
        Ok(BasedSpace::from_factors(field, vec![Factor { labels, grading: None }]))
    }

    /// `F_q^dim` with labels `s0, s1, ...`.
    pub fn standard(field: FieldSpec, dim: u32) -> Self {
        let labels = (0..dim).map(|k| format!("s{k}")).collect();
        BasedSpace::from_factors(field, vec![Factor { labels, grading: None }])
    }

    fn from_factors(field: FieldSpec, factors: Vec<Factor>) -> Self {
        let mut labels = vec![String::new()];
        let mut grading = Some(vec![0i64]);
        for (k, f) in factors.iter().enumerate() {
            labels = labels
                .iter()
                .flat_map(|a| f.labels.iter().map(move |b| if k == 0 { b.clone() } else { format!("{a}*{b}") }))
                .collect();
            grading = match (grading, &f.grading) {
                (Some(g), Some(h)) => Some(g.iter().flat_map(|x| h.iter().map(move |y| x + y)).collect()),
                _ => None,
            };
        }
        if factors.is_empty() {
            grading = None;
        }
        BasedSpace { field, labels, grading, factors }
    }

    /// The dual basis of `E*`, labelled `s'`.
    pub fn dual(&self) -> Self {
        let labels = self.labels.iter().map(|l| format!("{l}'")).collect();
        let grading = self.grading.as_ref().map(|g| g.iter().map(|d| -d).collect());
        BasedSpace::from_factors(self.field, vec![Factor { labels, grading }])
    }

    /// Attach degrees to the basis. This forgets any tensor decomposition.
    pub fn with_grading(self, grading: Vec<i64>) -> Result<Self> {
        ensure!(grading.len() == self.labels.len(), Input, "grading needs one degree per basis vector");
        Ok(BasedSpace::from_factors(self.field, vec![Factor { labels: self.labels, grading: Some(grading) }]))
    }

    /// `self (x) other` with basis of pure tensors.
    pub fn tensor(&self, other: &BasedSpace) -> Result<Self> {
        ensure!(self.field == other.field, Mismatch, "tensor product of spaces over different fields");
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Ok(BasedSpace::from_factors(self.field, factors))
    }

    /// `E^{(x) p^n}` with basis the words of length `p^n`.
    pub fn cyclic_power(&self, n: u32) -> Result<Self> {
        let len = self.field.p().pow(n);
        let dim = (self.dim() as u64).checked_pow(len).filter(|&d| d <= DENSE_CAP);
        ensure!(dim.is_some(), Cap, "E^(x){len} has more than 2^16 basis vectors");
        let mut out = self.flatten();
        for _ in 1..len {
            out = out.tensor(&self.flatten())?;
        }
        Ok(out.flatten())
    }

    /// Split off the first `k` factors: `self = left (x) right`.
    pub fn split(&self, k: usize) -> Result<(BasedSpace, BasedSpace)> {
        ensure!(
            k >= 1 && k < self.factors.len(),
            Input,
            "space with {} tensor factors cannot be split after factor {k}",
            self.factors.len()
        );
        Ok((
            BasedSpace::from_factors(self.field, self.factors[..k].to_vec()),
            BasedSpace::from_factors(self.field, self.factors[k..].to_vec()),
        ))
    }

    /// Forget the tensor decomposition.
    pub fn flatten(&self) -> Self {
        let f = Factor { labels: self.labels.clone(), grading: self.grading.clone() };
        BasedSpace::from_factors(self.field, vec![f])
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dim(&self) -> u32 {
        self.labels.len() as u32
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn grading(&self) -> Option<&[i64]> {
        self.grading.as_deref()
    }

    /// Dimensions of the tensor factors.
    pub fn factor_dims(&self) -> Vec<u32> {
        self.factors.iter().map(|f| f.labels.len() as u32).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({ "q": self.field.q(), "labels": self.labels });
        if let Some(g) = &self.grading {
            v["grading"] = json!(g);
        }
        if self.factors.len() > 1 {
            let fs: Vec<serde_json::Value> = self
                .factors
                .iter()
                .map(|f| {
                    let mut o = json!({ "labels": f.labels });
                    if let Some(g) = &f.grading {
                        o["grading"] = json!(g);
                    }
                    o
                })
                .collect();
            v["factors"] = json!(fs);
        }
        v
    }

    pub fn from_json(field: FieldSpec, v: &serde_json::Value) -> Result<Self> {
        if let Some(q) = v.get("q").and_then(|q| q.as_u64()) {
            ensure!(q as u32 == field.q(), Input, "space over F_{q} but element over F_{}", field.q());
        }
        let parse = |v: &serde_json::Value| -> Result<Factor> {
            let labels: Vec<String> = v
                .get("labels")
                .and_then(|l| serde_json::from_value(l.clone()).ok())
                .ok_or_else(|| Error::Input("space needs a labels array".into()))?;
            let grading = match v.get("grading") {
                Some(g) if !g.is_null() => {
                    let g: Vec<i64> =
                        serde_json::from_value(g.clone()).map_err(|e| Error::Input(format!("bad grading: {e}")))?;
                    ensure!(g.len() == labels.len(), Input, "grading needs one degree per basis vector");
                    Some(g)
                }
                _ => None,
            };
            Ok(Factor { labels, grading })
        };
        let top = parse(v)?;
        let space = match v.get("factors").and_then(|f| f.as_array()) {
            Some(fs) => {
                let factors = fs.iter().map(parse).collect::<Result<Vec<_>>>()?;
                let space = BasedSpace::from_factors(field, factors);
                ensure!(space.labels == top.labels, Input, "labels do not match the tensor factors");
                space
            }
            None => BasedSpace::from_factors(field, vec![top]),
        };
        let mut sorted = space.labels.clone();
        sorted.sort();
        sorted.dedup();
        ensure!(sorted.len() == space.labels.len(), Input, "basis labels must be distinct");
        Ok(space)
    }
}

/// A linear map as a matrix over F_q (rows index the target basis).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMap {
    field: FieldSpec,
    rows: u32,
    cols: u32,
    entries: Vec<Vec<u32>>,
}

impl LinearMap {
    pub fn new(field: FieldSpec, entries: Vec<Vec<u32>>, cols: u32) -> Result<Self> {
        for r in &entries {
            ensure!(r.len() == cols as usize, Input, "ragged matrix");
            for &x in r {
                ensure!(x < field.q(), Input, "entry {x} not in F_{}", field.q());
            }
        }
        Ok(LinearMap { field, rows: entries.len() as u32, cols, entries })
    }

    pub fn identity(field: FieldSpec, dim: u32) -> Self {
        let entries = (0..dim).map(|i| (0..dim).map(|j| u32::from(i == j)).collect()).collect();
        LinearMap { field, rows: dim, cols: dim, entries }
    }

    pub fn zero(field: FieldSpec, rows: u32, cols: u32) -> Self {
        LinearMap { field, rows, cols, entries: vec![vec![0; cols as usize]; rows as usize] }
    }

    /// Permutation matrix sending basis vector `j` to `perm[j]`.
    pub fn permutation(field: FieldSpec, perm: &[u32]) -> Self {
        let n = perm.len();
        let mut entries = vec![vec![0; n]; n];
        for (j, &i) in perm.iter().enumerate() {
            entries[i as usize][j] = 1;
        }
        LinearMap { field, rows: n as u32, cols: n as u32, entries }
    }

    pub fn random(field: FieldSpec, rows: u32, cols: u32, rng: &mut impl Rng) -> Self {
        let entries = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(0..field.q())).collect()).collect();
        LinearMap { field, rows, cols, entries }
    }

    /// A random invertible square matrix.
    pub fn random_invertible(field: FieldSpec, dim: u32, rng: &mut impl Rng) -> Self {
        loop {
            let m = LinearMap::random(field, dim, dim, rng);
            if m.rank() == dim {
                return m;
            }
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn entry(&self, i: u32, j: u32) -> u32 {
        self.entries[i as usize][j as usize]
    }

    pub fn entries(&self) -> &[Vec<u32>] {
        &self.entries
    }

    /// `self o other`.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        ensure!(self.cols == other.rows, Mismatch, "cannot compose {}x{} after {}x{}", self.rows, self.cols, other.rows, other.cols);
        let f = self.field;
        let entries = (0..self.rows as usize)
            .map(|i| {
                (0..other.cols as usize)
                    .map(|j| (0..self.cols as usize).fold(0, |acc, k| f.add(acc, f.mul(self.entries[i][k], other.entries[k][j]))))
                    .collect()
            })
            .collect();
        Ok(LinearMap { field: f, rows: self.rows, cols: other.cols, entries })
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        let f = self.field;
        self.entries.iter().map(|row| row.iter().zip(v).fold(0, |acc, (&a, &x)| f.add(acc, f.mul(a, x)))).collect()
    }

    /// Kronecker product, first factor most significant.
    pub fn kron(&self, other: &LinearMap) -> LinearMap {
        let f = self.field;
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut entries = vec![vec![0; cols as usize]; rows as usize];
        for (i1, r1) in self.entries.iter().enumerate() {
            for (j1, &a) in r1.iter().enumerate() {
                for (i2, r2) in other.entries.iter().enumerate() {
                    for (j2, &b) in r2.iter().enumerate() {
                        entries[i1 * other.rows as usize + i2][j1 * other.cols as usize + j2] = f.mul(a, b);
                    }
                }
            }
        }
        LinearMap { field: f, rows, cols, entries }
    }

    pub fn rank(&self) -> u32 {
        let f = self.field;
        let mut m = self.entries.clone();
        let mut rank = 0usize;
        for col in 0..self.cols as usize {
            let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else { continue };
            m.swap(rank, piv);
            let inv = f.inv(m[rank][col]).expect("nonzero pivot");
            let prow: Vec<u32> = m[rank].iter().map(|&x| f.mul(x, inv)).collect();
            for (r, row) in m.iter_mut().enumerate() {
                if r != rank && row[col] != 0 {
                    let t = row[col];
                    for (x, &y) in row.iter_mut().zip(&prow) {
                        *x = f.sub(*x, f.mul(t, y));
                    }
                }
            }
            m[rank] = prow;
            rank += 1;
        }
        rank as u32
    }

    /// Teichmuller lift of every entry to `W_n`.
    pub fn teichmuller_lift(&self, n: u32) -> Result<LiftedMap> {
        let ring = WittRing::get(self.field, n)?;
        let entries = self.entries.iter().map(|r| r.iter().map(|&x| if n == 0 { 0 } else { x }).collect()).collect();
        Ok(LiftedMap { ring, rows: self.rows, cols: self.cols, entries })
    }

    /// A lift whose entries differ from the Teichmuller lift by random
    /// multiples of p.
    pub fn random_lift(&self, n: u32, rng: &mut impl Rng) -> Result<LiftedMap> {
        let mut l = self.teichmuller_lift(n)?;
        let ring = l.ring.clone();
        for row in l.entries.iter_mut() {
            for x in row.iter_mut() {
                let noise = ring.times_p(rng.gen_range(0..ring.size().max(1)));
                *x = ring.add(*x, noise);
            }
        }
        Ok(l)
    }
}

/// A matrix over `W_n(F_q)` reducing to a [`LinearMap`].
#[derive(Debug, Clone)]
pub struct LiftedMap {
    ring: Arc<WittRing>,
    rows: u32,
    cols: u32,
    entries: Vec<Vec<u32>>,
}

impl LiftedMap {
    /// The row of the nonzero entry of each column, if every column has at
    /// most one.
    fn monomial_targets(&self) -> Option<Vec<Option<u32>>> {
        (0..self.cols as usize)
            .map(|s| {
                let mut rows = (0..self.rows).filter(|&t| self.entries[t as usize][s] != 0);
                let first = rows.next();
                rows.next().is_none().then_some(first)
            })
            .collect()
    }

    pub fn reduction(&self) -> LinearMap {
        let q = self.ring.q();
        let entries = self.entries.iter().map(|r| r.iter().map(|&x| x % q).collect()).collect();
        LinearMap { field: self.ring.field(), rows: self.rows, cols: self.cols, entries }
    }

    pub fn entry(&self, i: u32, j: u32) -> WittScalar {
        WittScalar::from_code(self.ring.field(), self.ring.n(), self.entries[i as usize][j as usize])
    }
}

/// Apply `f^{(x) L}` to a dense tensor indexed by words of length `L`.
fn dense_apply(ring: &WittRing, f: &LiftedMap, src: &[u32], len: u32) -> Vec<u32> {
    let (bs, bt) = (f.cols as usize, f.rows as usize);
    let mut cur = src.to_vec();
    for j in 0..len as usize {
        let left = bt.pow(j as u32);
        let right = bs.pow(len - 1 - j as u32);
        let mut next = vec![0u32; left * bt * right];
        for l in 0..left {
            for s in 0..bs {
                let base = (l * bs + s) * right;
                let block = &cur[base..base + right];
                if block.iter().all(|&x| x == 0) {
                    continue;
                }
                for t in 0..bt {
                    let a = f.entries[t][s];
                    if a == 0 {
                        continue;
                    }
                    let out = (l * bt + t) * right;
                    for (r, &x) in block.iter().enumerate() {
                        if x != 0 {
                            next[out + r] = ring.add(next[out + r], ring.mul(a, x));
                        }
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

/// Apply a lifted map letterwise to the canonical representative of a class
/// and project. The lift must have length equal to the group exponent.
pub(crate) fn apply_lifted_class(class: &TateClass, f: &LiftedMap) -> Result<TateClass> {
    let field = class.field();
    let src_shape = class.shape();
    let g = src_shape.group_exp();
    ensure!(f.cols == src_shape.b(), Mismatch, "map has {} columns but the alphabet has {} letters", f.cols, src_shape.b());
    ensure!(f.ring.field() == field, Mismatch, "map over a different field");
    ensure!(f.ring.n() == g, Mismatch, "map lifted to W_{} but coefficients live in W_{g}", f.ring.n());
    let len = src_shape.len();
    if let Some(targets) = f.monomial_targets() {
        return monomial_apply(class, f, &targets);
    }
    let big = src_shape.b().max(f.rows) as f64;
    ensure!(big.powi(len as i32) <= DENSE_CAP as f64, Cap, "dense tensor power {big}^{len} exceeds 2^16 entries");
    let tgt_shape = WordShape::blocked(src_shape.p(), f.rows, src_shape.len_exp(), src_shape.block_exp())?;
    let ring = WittRing::get(field, g)?;
    let v = class.lift(g)?;
    let mut dense = vec![0u32; src_shape.num_words() as usize];
    for (w, c) in v.raw_terms() {
        dense[w as usize] = c;
    }
    let out = dense_apply(&ring, f, &dense, len);
    let mut image = EquivariantVector::zero(field, tgt_shape, g, g)?;
    for (w, &c) in out.iter().enumerate() {
        image.add_code(&ring, w as u32, c);
    }
    image.project()
}

/// Maps with at most one nonzero entry per column send words to single
/// words, so the image is computed on the support of the lift.
fn monomial_apply(class: &TateClass, f: &LiftedMap, targets: &[Option<u32>]) -> Result<TateClass> {
    let src_shape = class.shape();
    let g = src_shape.group_exp();
    let support: u64 = class.raw_components().map(|(nu, _)| src_shape.orbit(&nu).len() as u64).sum();
    ensure!(support <= SPARSE_CAP, Cap, "lift has {support} terms, above 2^20");
    let tgt_shape = WordShape::blocked(src_shape.p(), f.rows, src_shape.len_exp(), src_shape.block_exp())?;
    let ring = WittRing::get(class.field(), g)?;
    let v = class.lift(g)?;
    let mut image = EquivariantVector::zero(class.field(), tgt_shape, g, g)?;
    'terms: for (w, c) in v.raw_terms() {
        let mut coeff = c;
        let mut out = Vec::with_capacity(src_shape.len() as usize);
        for s in src_shape.letters(w) {
            let Some(t) = targets[s as usize] else { continue 'terms };
            coeff = ring.mul(coeff, f.entries[t as usize][s as usize]);
            out.push(t);
        }
        image.add_code(&ring, tgt_shape.from_letters(&out)?, coeff);
    }
    image.project()
}

/// An element of `W_m(E)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WittElement {
    m: u32,
    space: BasedSpace,
    class: TateClass,
}

pub(crate) fn shape_for(space: &BasedSpace, m: u32) -> Result<WordShape> {
    WordShape::new(space.field().p(), space.dim(), m)
}

impl WittElement {
    pub fn zero(space: &BasedSpace, m: u32) -> Result<Self> {
        let shape = shape_for(space, m)?;
        Ok(WittElement { m, space: space.clone(), class: TateClass::zero(space.field(), shape)? })
    }

    pub fn from_class(space: &BasedSpace, m: u32, class: TateClass) -> Result<Self> {
        let shape = shape_for(space, m)?;
        ensure!(class.shape() == shape && class.field() == space.field(), Mismatch, "class does not live over W_{m} of this space");
        Ok(WittElement { m, space: space.clone(), class })
    }

    pub fn m(&self) -> u32 {
        self.m
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

    pub fn component(&self, nu: &Necklace) -> WittScalar {
        self.class.component(nu)
    }

    pub fn components(&self) -> impl Iterator<Item = (Necklace, WittScalar)> + '_ {
        self.class.components()
    }

    /// Set a component from letters of its primitive block.
    pub fn with_component(mut self, block: &[u32], c: &WittScalar) -> Result<Self> {
        let nu = self.shape().necklace_from_block(block)?;
        self.class.set_component(nu, c)?;
        Ok(self)
    }

    /// One generator per component, in necklace order.
    pub fn generators(space: &BasedSpace, m: u32) -> Result<Vec<WittElement>> {
        let shape = shape_for(space, m)?;
        TateClass::generators(space.field(), shape)?
            .into_iter()
            .map(|c| WittElement::from_class(space, m, c))
            .collect()
    }

    pub fn random(space: &BasedSpace, m: u32, rng: &mut impl Rng) -> Result<Self> {
        let mut x = WittElement::zero(space, m)?;
        for nu in x.class.basis() {
            let size = x.class.ring_for(nu.i).size();
            x.class.set_code(nu, rng.gen_range(0..size));
        }
        Ok(x)
    }

    fn check(&self, other: &WittElement) -> Result<()> {
        ensure!(self.m == other.m && self.space == other.space, Mismatch, "elements of different W_m(E)");
        Ok(())
    }

    pub fn add(&self, other: &WittElement) -> Result<WittElement> {
        self.check(other)?;
        Ok(WittElement { class: self.class.add(&other.class)?, ..self.clone() })
    }

    pub fn neg(&self) -> WittElement {
        WittElement { class: self.class.neg(), ..self.clone() }
    }

    pub fn sub(&self, other: &WittElement) -> Result<WittElement> {
        self.add(&other.neg())
    }

    pub fn times_int(&self, k: i64) -> WittElement {
        WittElement { class: self.class.times_int(k), ..self.clone() }
    }

    pub fn times_p(&self) -> WittElement {
        WittElement { class: self.class.times_p(), ..self.clone() }
    }

    /// `a . x`, multiplying coefficients by `F^m(a)`.
    pub fn scalar_action(&self, a: &WittScalar) -> Result<WittElement> {
        ensure!(a.field() == self.field() && a.len() == self.m, Mismatch, "scalar must lie in W_{}(F_{})", self.m, self.field().q());
        let twisted = WittScalar::from_code(a.field(), a.len(), a.ring().frob_pow(a.code(), self.m as i64));
        Ok(WittElement { class: self.class.scale_untwisted(&twisted)?, ..self.clone() })
    }

    /// Teichmuller map `T(e)`: the class of the `p^m`-th tensor power of the
    /// Teichmuller lift of `e`.
    pub fn teichmuller(space: &BasedSpace, m: u32, e: &[u32]) -> Result<WittElement> {
        ensure!(e.len() == space.dim() as usize, Mismatch, "vector of length {} in a space of dimension {}", e.len(), space.dim());
        let field = space.field();
        let mut x = WittElement::zero(space, m)?;
        let shape = x.shape();
        for nu in x.class.basis() {
            let word = shape.letters(shape.expand(&nu));
            let prod = word.iter().fold(1, |acc, &l| field.mul(acc, e[l as usize]));
            x.class.set_code(nu, prod);
        }
        Ok(x)
    }

    /// `T(e)` computed by expanding `(sum_s lift_s s)^{(x) p^m}` densely for
    /// an arbitrary lift of `e` to `W_m`.
    pub fn teichmuller_expanded(space: &BasedSpace, m: u32, lift: &[WittScalar]) -> Result<WittElement> {
        ensure!(lift.len() == space.dim() as usize, Mismatch, "lift has the wrong length");
        let field = space.field();
        let shape = shape_for(space, m)?;
        ensure!((shape.num_words() as u64) <= DENSE_CAP, Cap, "{} words exceed the dense cap", shape.num_words());
        let ring = WittRing::get(field, m)?;
        for l in lift {
            ensure!(l.field() == field && l.len() == m, Mismatch, "lift entries must lie in W_{m}");
        }
        let mut v = EquivariantVector::zero(field, shape, m, m)?;
        for w in 0..shape.num_words() {
            let c = shape.letters(w).iter().fold(ring.one(), |acc, &l| ring.mul(acc, lift[l as usize].code()));
            v.add_code(&ring, w, c);
        }
        WittElement::from_class(space, m, v.project()?)
    }

    /// `W_m(f)` using Teichmuller lifts of the matrix entries.
    pub fn apply_map(&self, f: &LinearMap, target: &BasedSpace) -> Result<WittElement> {
        let lift = f.teichmuller_lift(self.m)?;
        self.apply_lifted(&lift, target)
    }

    /// `W_m(f)` for an explicit lift of `f` to `W_m`.
    pub fn apply_lifted(&self, f: &LiftedMap, target: &BasedSpace) -> Result<WittElement> {
        ensure!(f.cols == self.space.dim() && f.rows == target.dim(), Mismatch, "map shape does not match the spaces");
        ensure!(target.field() == self.field(), Mismatch, "map over a different field");
        WittElement::from_class(target, self.m, apply_lifted_class(&self.class, f)?)
    }

    /// `R: W_m(E) -> W_{m-1}(E)`: a component `(i, nu)` with `i < m - 1`
    /// keeps its necklace and gets coefficient `F^{-1}(c)` truncated to
    /// `W_{m-1-i}`; components with `i = m - 1` vanish.
    pub fn restriction(&self) -> Result<WittElement> {
        ensure!(self.m >= 1, Range, "W_0 has no restriction");
        let shape = shape_for(&self.space, self.m - 1)?;
        let class = self.class.reshape(shape, |ring, nu, c| {
            let len = shape.group_exp() - nu.i;
            ring.truncate(ring.frob_inv(c), len)
        });
        Ok(WittElement { m: self.m - 1, space: self.space.clone(), class })
    }

    /// Iterate [`WittElement::restriction`] down to level `l`.
    pub fn restrict_to(&self, l: u32) -> Result<WittElement> {
        ensure!(l <= self.m, Range, "cannot restrict W_{} to W_{l}", self.m);
        let mut x = self.clone();
        while x.m > l {
            x = x.restriction()?;
        }
        Ok(x)
    }

    /// Degree of a component in a graded space: letter degrees summed over
    /// the primitive block, divided by its length `p^i`.
    pub fn component_degree(space: &BasedSpace, nu: &Necklace) -> Result<Ratio<i64>> {
        let grading = space.grading().ok_or_else(|| Error::Input("space is not graded".into()))?;
        let p = space.field().p();
        let blen = p.pow(nu.i);
        let letters = crate::orbits::word_letters(space.dim(), blen, nu.block);
        let total: i64 = letters.iter().map(|&l| grading[l as usize]).sum();
        Ok(Ratio::new(total, blen as i64))
    }

    /// The common degree of all nonzero components, if there is one.
    pub fn homogeneous_degree(&self) -> Result<Option<Ratio<i64>>> {
        let mut deg = None;
        for (nu, _) in self.components() {
            let d = WittElement::component_degree(&self.space, &nu)?;
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return Ok(None),
                _ => {}
            }
        }
        Ok(deg.or(Some(Ratio::from_integer(0))))
    }

    /// For a one-dimensional space: the classical Witt vector `F^{-m}(c)`.
    pub fn to_classical(&self) -> Result<WittScalar> {
        ensure!(self.space.dim() == 1, Range, "only W_m of a line is identified with W_m(F_q)");
        let c = self.class.component(&Necklace { i: 0, block: 0 });
        let ring = c.ring();
        Ok(WittScalar::from_code(c.field(), c.len(), ring.frob_pow(c.code(), -(self.m as i64))))
    }

    pub fn from_classical(space: &BasedSpace, a: &WittScalar) -> Result<WittElement> {
        ensure!(space.dim() == 1, Range, "only W_m of a line is identified with W_m(F_q)");
        let m = a.len();
        let mut x = WittElement::zero(space, m)?;
        let code = a.ring().frob_pow(a.code(), m as i64);
        if m > 0 {
            x.class.set_code(Necklace { i: 0, block: 0 }, code);
        }
        Ok(x)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.class.to_json();
        v["m"] = json!(self.m);
        v["space"] = self.space.to_json();
        v
    }

    pub fn from_json(v: &serde_json::Value) -> Result<WittElement> {
        let class = TateClass::from_json(v)?;
        ensure!(class.shape().block_exp() == 0, Input, "expected an element of W_m, found a subgroup class");
        let space_json = v.get("space").ok_or_else(|| Error::Input("missing space".into()))?;
        let space = BasedSpace::from_json(class.field(), space_json)?;
        ensure!(space.dim() == class.shape().b(), Input, "space of dimension {} but b = {}", space.dim(), class.shape().b());
        WittElement::from_class(&space, class.group_exp(), class)
    }
}

/// Elements of `W_1(E), ..., W_M(E)` compatible under restriction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WittTower {
    levels: Vec<WittElement>,
}

impl WittTower {
    /// Levels must be `W_1, ..., W_M` with `R(level m+1) = level m`.
    pub fn new(levels: Vec<WittElement>) -> Result<Self> {
        for (k, x) in levels.iter().enumerate() {
            ensure!(x.m() == k as u32 + 1, Input, "tower level {k} has m = {}", x.m());
            if k > 0 {
                ensure!(x.space() == levels[0].space(), Mismatch, "tower levels over different spaces");
                ensure!(x.restriction()? == levels[k - 1], Invariant, "levels {} and {} are not compatible", k, k + 1);
            }
        }
        Ok(WittTower { levels })
    }

    /// The tower determined by its top level.
    pub fn from_top(top: &WittElement) -> Result<Self> {
        let mut levels = vec![top.clone()];
        while levels.last().map(|x| x.m()).unwrap_or(0) > 1 {
            let next = levels.last().expect("nonempty").restriction()?;
            levels.push(next);
        }
        levels.reverse();
        WittTower::new(levels)
    }

    pub fn teichmuller(space: &BasedSpace, top: u32, e: &[u32]) -> Result<Self> {
        WittTower::new((1..=top).map(|m| WittElement::teichmuller(space, m, e)).collect::<Result<_>>()?)
    }

    pub fn zero(space: &BasedSpace, top: u32) -> Result<Self> {
        WittTower::new((1..=top).map(|m| WittElement::zero(space, m)).collect::<Result<_>>()?)
    }

    pub fn levels(&self) -> &[WittElement] {
        &self.levels
    }

    pub fn add(&self, other: &WittTower) -> Result<WittTower> {
        ensure!(self.levels.len() == other.levels.len(), Mismatch, "towers of different heights");
        WittTower::new(self.levels.iter().zip(&other.levels).map(|(a, b)| a.add(b)).collect::<Result<_>>()?)
    }

    pub fn apply_map(&self, f: &LinearMap, target: &BasedSpace) -> Result<WittTower> {
        WittTower::new(self.levels.iter().map(|x| x.apply_map(f, target)).collect::<Result<_>>()?)
    }
}

/// A vector of field elements in the JSON element format.
pub fn vector_from_json(field: &FieldSpec, v: &serde_json::Value) -> Result<Vec<u32>> {
    let arr = v.as_array().ok_or_else(|| Error::Input(format!("expected a vector, got {v}")))?;
    arr.iter().map(|x| element_from_json(field, x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    #[test]
    fn teichmuller_of_sum_of_basis_vectors() {
        let e = BasedSpace::standard(f2(), 2);
        let t = WittElement::teichmuller(&e, 2, &[1, 1]).unwrap();
        let got: Vec<(Vec<u32>, Vec<u32>)> =
            t.components().map(|(nu, c)| (t.shape().block_letters(&nu), c.coords())).collect();
        assert_eq!(got, vec![(vec![0], vec![1, 0]), (vec![1], vec![1, 0]), (vec![0, 1], vec![1])]);
        let s = WittElement::teichmuller(&e, 2, &[1, 0]).unwrap();
        assert_eq!(s.components().count(), 1);
        assert!(WittElement::teichmuller(&e, 2, &[0, 0]).unwrap().is_zero());
    }

    #[test]
    fn expanded_teichmuller_is_lift_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for field in [f2(), FieldSpec::prime(3).unwrap(), FieldSpec::quadratic(2, 1, 1).unwrap()] {
            let e = BasedSpace::standard(field, 2);
            for m in 1..=2 {
                let ring = WittRing::get(field, m).unwrap();
                for _ in 0..10 {
                    let v: Vec<u32> = (0..2).map(|_| rng.gen_range(0..field.q())).collect();
                    let lift: Vec<WittScalar> = v
                        .iter()
                        .map(|&c| {
                            let noise = ring.times_p(rng.gen_range(0..ring.size()));
                            WittScalar::from_code(field, m, ring.add(c, noise))
                        })
                        .collect();
                    let a = WittElement::teichmuller_expanded(&e, m, &lift).unwrap();
                    assert_eq!(a, WittElement::teichmuller(&e, m, &v).unwrap());
                }
            }
        }
    }

    #[test]
    fn identity_lifted_by_three_is_identity() {
        let e = BasedSpace::standard(f2(), 2);
        let ring = WittRing::get(f2(), 2).unwrap();
        let id = LinearMap::identity(f2(), 2);
        let mut lift = id.teichmuller_lift(2).unwrap();
        lift.entries[0][0] = ring.from_int(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x = WittElement::random(&e, 2, &mut rng).unwrap();
            assert_eq!(x.apply_lifted(&lift, &e).unwrap(), x);
            assert!(x.apply_map(&LinearMap::zero(f2(), 2, 2), &e).unwrap().is_zero());
        }
    }

    #[test]
    fn restriction_examples() {
        let e = BasedSpace::standard(f2(), 2);
        let t = WittElement::teichmuller(&e, 3, &[1, 1]).unwrap();
        assert_eq!(t.restriction().unwrap(), WittElement::teichmuller(&e, 2, &[1, 1]).unwrap());
        let x = WittElement::zero(&e, 2).unwrap().with_component(&[0, 1], &WittScalar::one(f2(), 1).unwrap()).unwrap();
        assert!(x.restriction().unwrap().is_zero());
    }

    #[test]
    fn line_is_classical() {
        for field in [f2(), FieldSpec::quadratic(2, 1, 1).unwrap()] {
            let k = BasedSpace::standard(field, 1);
            for m in 1..=3 {
                let ring = WittRing::get(field, m).unwrap();
                for a in 0..ring.size() {
                    let s = WittScalar::from_code(field, m, a);
                    let x = WittElement::from_classical(&k, &s).unwrap();
                    assert_eq!(x.to_classical().unwrap(), s);
                    assert_eq!(x.restriction().unwrap().to_classical().unwrap(), s.restrict().unwrap());
                }
                for c in field.elements() {
                    let t = WittElement::teichmuller(&k, m, &[c]).unwrap();
                    assert_eq!(t.to_classical().unwrap(), WittScalar::teichmuller(field.element(c).unwrap(), m).unwrap());
                }
            }
        }
    }

    #[test]
    fn degrees() {
        let e = BasedSpace::standard(f2(), 2).with_grading(vec![0, 1]).unwrap();
        let nu = Necklace { i: 1, block: 0b01 };
        assert_eq!(WittElement::component_degree(&e, &nu).unwrap(), Ratio::new(1, 2));
        let flat = BasedSpace::standard(f2(), 2).with_grading(vec![0, 0]).unwrap();
        assert_eq!(WittElement::component_degree(&flat, &nu).unwrap(), Ratio::from_integer(0));
        assert!(WittElement::component_degree(&BasedSpace::standard(f2(), 2), &nu).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let e = BasedSpace::standard(f2(), 2).with_grading(vec![1, 2]).unwrap();
        let t = WittElement::teichmuller(&e, 2, &[1, 1]).unwrap();
        assert_eq!(WittElement::from_json(&t.to_json()).unwrap(), t);
    }
}
