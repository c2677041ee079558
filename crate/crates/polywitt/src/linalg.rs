//! Finite abelian p-groups `G = (+)_a Z/p^{e_a}` and their subgroups.
//!
//! Everything is computed over the local ring `R = Z/p^N` with
//! `N = max e_a`: a subgroup of `G` is represented by its preimage in
//! `R^r`, which is generated by its own generators together with the
//! relations `p^{e_a} eps_a`. Sizes, kernels and inclusions come from a
//! Smith normal form over `R`, where the pivot of least valuation always
//! divides everything else.

use crate::error::{ensure, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    p: u64,
    exps: Vec<u32>,
}

/// Diagonal of a Smith form together with the accumulated row operations.
struct Smith {
    /// Valuations of the nonzero pivots, in order.
    pivots: Vec<u32>,
    /// `E` with `E * M` column-equivalent to the diagonal form.
    row_ops: Vec<Vec<u64>>,
}

fn valuation(x: u64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    let mut y = x;
    while y.is_multiple_of(p) {
        y /= p;
        v += 1;
    }
    v
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "{a} is not a unit mod {m}");
    t.rem_euclid(m as i128) as u64
}

/// Smith normal form over `Z/p^N`, tracking row operations when asked.
fn smith(mut m: Vec<Vec<u64>>, ncols: usize, p: u64, prec: u32, track: bool) -> Smith {
    let modulus = p.pow(prec);
    let nrows = m.len();
    let mut e: Vec<Vec<u64>> = if track {
        (0..nrows).map(|i| (0..nrows).map(|j| u64::from(i == j)).collect()).collect()
    } else {
        Vec::new()
    };
    let mut pivots = Vec::new();
    let sub_scaled = |row: &mut Vec<u64>, src: &[u64], t: u64| {
        for (x, &s) in row.iter_mut().zip(src) {
            *x = (*x + modulus - t * s % modulus) % modulus;
        }
    };
    for k in 0..nrows.min(ncols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(k) {
            for (j, &x) in row.iter().enumerate().skip(k) {
                if x != 0 {
                    let v = valuation(x, p, prec);
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, i, j));
                    }
                }
            }
            if best.is_some_and(|(bv, _, _)| bv == 0) {
                break;
            }
        }
        let Some((v, bi, bj)) = best else { break };
        m.swap(k, bi);
        if track {
            e.swap(k, bi);
        }
        for row in m.iter_mut() {
            row.swap(k, bj);
        }
        let pv = p.pow(v);
        let unit = m[k][k] / pv;
        let uinv = inv_mod(unit, modulus);
        for x in m[k].iter_mut() {
            *x = *x * uinv % modulus;
        }
        if track {
            for x in e[k].iter_mut() {
                *x = *x * uinv % modulus;
            }
        }
        let pivot_row = m[k].clone();
        let pivot_ops = if track { e[k].clone() } else { Vec::new() };
        for i in k + 1..nrows {
            let t = m[i][k] / pv;
            if t != 0 {
                sub_scaled(&mut m[i], &pivot_row, t);
                if track {
                    sub_scaled(&mut e[i], &pivot_ops, t);
                }
            }
        }
        // column operations do not affect the row space bookkeeping
        for j in k + 1..ncols {
            let t = m[k][j] / pv;
            if t != 0 {
                for row in m.iter_mut() {
                    let s = row[k];
                    row[j] = (row[j] + modulus - t * s % modulus) % modulus;
                }
            }
        }
        pivots.push(v);
    }
    Smith { pivots, row_ops: e }
}

impl AbelianGroup {
    pub fn new(p: u64, exps: Vec<u32>) -> Self {
        AbelianGroup { p, exps }
    }

    /// `(Z/p)^r`.
    pub fn elementary(p: u64, r: usize) -> Self {
        AbelianGroup { p, exps: vec![1; r] }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn rank(&self) -> usize {
        self.exps.len()
    }

    /// `log_p |G|`.
    pub fn length(&self) -> u64 {
        self.exps.iter().map(|&e| e as u64).sum()
    }

    fn prec(&self) -> u32 {
        self.exps.iter().copied().max().unwrap_or(1).max(1)
    }

    pub fn reduce(&self, x: &[u64]) -> Vec<u64> {
        x.iter().zip(&self.exps).map(|(&v, &e)| v % self.p.pow(e)).collect()
    }

    fn check_rows(&self, rows: &[Vec<u64>]) -> Result<()> {
        for r in rows {
            ensure!(r.len() == self.rank(), Mismatch, "vector of length {} in a group of rank {}", r.len(), self.rank());
        }
        Ok(())
    }

    /// Generators of the preimage in `(Z/p^N)^r` of the span of `gens`.
    fn preimage_rows(&self, gens: &[Vec<u64>]) -> Vec<Vec<u64>> {
        let n = self.prec();
        let modulus = self.p.pow(n);
        let mut rows: Vec<Vec<u64>> = gens.iter().map(|g| g.iter().map(|&x| x % modulus).collect()).collect();
        for (a, &e) in self.exps.iter().enumerate() {
            if e < n {
                let mut r = vec![0; self.rank()];
                r[a] = self.p.pow(e);
                rows.push(r);
            }
        }
        rows
    }

    /// `log_p` of the order of the subgroup spanned by `gens`.
    pub fn span_length(&self, gens: &[Vec<u64>]) -> Result<u64> {
        self.check_rows(gens)?;
        let n = self.prec();
        let rows = self.preimage_rows(gens);
        let s = smith(rows, self.rank(), self.p, n, false);
        let pre: u64 = s.pivots.iter().map(|&v| (n - v) as u64).sum();
        let rel: u64 = self.exps.iter().map(|&e| (n - e) as u64).sum();
        Ok(pre - rel)
    }

    /// Whether `span(a)` is contained in `span(b)`.
    pub fn contains(&self, b: &[Vec<u64>], a: &[Vec<u64>]) -> Result<bool> {
        let mut both = b.to_vec();
        both.extend_from_slice(a);
        Ok(self.span_length(&both)? == self.span_length(b)?)
    }

    pub fn same_span(&self, a: &[Vec<u64>], b: &[Vec<u64>]) -> Result<bool> {
        Ok(self.contains(a, b)? && self.contains(b, a)?)
    }

    /// Generators of the kernel of the homomorphism `G -> target` sending
    /// the `a`-th basis vector to `images[a]`.
    pub fn kernel(&self, target: &AbelianGroup, images: &[Vec<u64>]) -> Result<Vec<Vec<u64>>> {
        ensure!(images.len() == self.rank(), Mismatch, "need one image per generator");
        target.check_rows(images)?;
        ensure!(self.p == target.p, Mismatch, "groups for different primes");
        let n = self.prec().max(target.prec());
        let modulus = self.p.pow(n);
        // left kernel of [images; p^{f_b} eps_b] over Z/p^N, projected to the first r coordinates
        let r = self.rank();
        let s_cols = target.rank();
        let mut m: Vec<Vec<u64>> = images.iter().map(|row| row.iter().map(|&x| x % modulus).collect()).collect();
        for (b, &f) in target.exps.iter().enumerate() {
            let mut row = vec![0; s_cols];
            row[b] = self.p.pow(f) % modulus;
            m.push(row);
        }
        let total = m.len();
        let sm = smith(m, s_cols, self.p, n, true);
        let mut gens = Vec::new();
        for i in 0..total {
            let scale = match sm.pivots.get(i) {
                Some(&v) => self.p.pow(n - v),
                None => 1,
            };
            if scale % modulus == 0 {
                continue;
            }
            let g: Vec<u64> = sm.row_ops[i][..r].iter().map(|&x| x * scale % modulus).collect();
            let g = self.reduce(&g);
            if g.iter().any(|&x| x != 0) {
                gens.push(g);
            }
        }
        Ok(gens)
    }

    /// Images of `gens` under the homomorphism given by `images`.
    pub fn apply(&self, target: &AbelianGroup, images: &[Vec<u64>], gens: &[Vec<u64>]) -> Vec<Vec<u64>> {
        let modulus = self.p.pow(self.prec().max(target.prec()));
        gens.iter()
            .map(|x| {
                let mut out = vec![0u64; target.rank()];
                for (a, &xa) in x.iter().enumerate() {
                    if xa == 0 {
                        continue;
                    }
                    for (o, &y) in out.iter_mut().zip(&images[a]) {
                        *o = (*o + xa % modulus * (y % modulus)) % modulus;
                    }
                }
                target.reduce(&out)
            })
            .collect()
    }

    /// Standard basis vectors.
    pub fn basis(&self) -> Vec<Vec<u64>> {
        (0..self.rank())
            .map(|a| {
                let mut v = vec![0; self.rank()];
                v[a] = 1 % self.p.pow(self.exps[a]).max(1);
                v
            })
            .filter(|v: &Vec<u64>| v.iter().any(|&x| x != 0))
            .collect()
    }
}

/// Determinant of a square matrix over a commutative ring by cofactor
/// expansion over column subsets (bitmask dynamic programming).
pub fn determinant<T: Copy>(
    m: &[Vec<T>],
    zero: T,
    one: T,
    add: impl Fn(T, T) -> T,
    mul: impl Fn(T, T) -> T,
    neg: impl Fn(T) -> T,
) -> T {
    let n = m.len();
    if n == 0 {
        return one;
    }
    assert!(n <= 20, "determinant by subset expansion limited to 20x20");
    // dp[mask] = signed sum over bijections rows[0..|mask|) -> mask
    let mut dp = vec![zero; 1 << n];
    dp[0] = one;
    for mask in 0usize..(1 << n) {
        let row = mask.count_ones() as usize;
        if row >= n {
            continue;
        }
        let cur = dp[mask];
        for (col, &entry) in m[row].iter().enumerate() {
            if mask & (1 << col) != 0 {
                continue;
            }
            // sign: number of chosen columns greater than col
            let above = (mask >> (col + 1)).count_ones();
            let term = mul(cur, entry);
            let term = if above % 2 == 1 { neg(term) } else { term };
            dp[mask | (1 << col)] = add(dp[mask | (1 << col)], term);
        }
    }
    dp[(1 << n) - 1]
}
