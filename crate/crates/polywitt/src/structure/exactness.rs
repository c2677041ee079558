//! Exact sequences, filtrations and residual actions, decided by Smith forms
//! over `Z/p^N` (prime fields only).

use crate::error::{ensure, Result};
use crate::field::FieldSpec;
use crate::functor::{BasedSpace, LinearMap, WittElement};
use crate::linalg::AbelianGroup;
use crate::orbits::{aperiodic_count, necklace_count, WordShape};
use crate::tate::TateClass;
use crate::verify::Check;

use super::coords::{intersect, sum, times_p, ModuleCoords};
use super::cyclic::{cyclic_c, cyclic_r, cyclic_trace, l_map, r_map, CyclicPowerElement, CyclicVariant};
use super::{c_pow, frobenius_pow, subgroup_shape, verschiebung_pow, SubgroupWittElement};

fn witt_coords(space: &BasedSpace, m: u32) -> Result<ModuleCoords> {
    ModuleCoords::new(space.field(), WordShape::new(space.field().p(), space.dim(), m)?)
}

fn as_witt(space: &BasedSpace, m: u32, c: &TateClass) -> Result<WittElement> {
    WittElement::from_class(space, m, c.clone())
}

fn cyclic_vec(x: &CyclicPowerElement) -> Vec<u64> {
    x.to_vec().into_iter().map(u64::from).collect()
}

fn cyclic_unit_vectors(variant: CyclicVariant, space: &BasedSpace, m: u32) -> Result<Vec<CyclicPowerElement>> {
    let dim = CyclicPowerElement::dim(space, m)?;
    (0..dim)
        .map(|a| {
            let mut v = vec![0; dim];
            v[a] = 1;
            CyclicPowerElement::from_vec(variant, space, m, &v)
        })
        .collect()
}

fn prime_field(space: &BasedSpace) -> Result<FieldSpec> {
    let f = space.field();
    ensure!(f.is_prime_field(), Range, "exactness checks need q = p");
    Ok(f)
}

/// `0 -> C_(m) -l-> W_{m+1} -R-> W_m -> 0` and
/// `0 -> W_m -C-> W_{m+1} -r-> C^(m) -> 0`.
pub fn lr_rc_check(space: &BasedSpace, m: u32) -> Result<Vec<Check>> {
    let f = prime_field(space)?;
    let p = f.p() as u64;
    let tag = format!("b={} p={} m={m}", space.dim(), f.p());
    let top = witt_coords(space, m + 1)?;
    let low = witt_coords(space, m)?;
    let dim_c = CyclicPowerElement::dim(space, m)?;
    let cgroup = AbelianGroup::elementary(p, dim_c);

    let r_mat = top.matrix(&low, |c| Ok(as_witt(space, m + 1, c)?.restriction()?.class().clone()))?;
    let l_mat: Vec<Vec<u64>> = cyclic_unit_vectors(CyclicVariant::Coinvariants, space, m)?
        .iter()
        .map(|e| top.to_vec(l_map(e)?.class()))
        .collect::<Result<_>>()?;
    let ker_r = top.group().kernel(low.group(), &r_mat)?;
    let c_mat = low.matrix(&top, |c| Ok(super::c_map(&as_witt(space, m, c)?)?.class().clone()))?;
    let small_r: Vec<Vec<u64>> =
        top.generators()?.iter().map(|g| Ok(cyclic_vec(&r_map(&as_witt(space, m + 1, g)?)?))).collect::<Result<_>>()?;
    let ker_small_r = top.group().kernel(&cgroup, &small_r)?;

    let mut checks = vec![
        Check::new(format!("l injective [{tag}]"), cgroup.kernel(top.group(), &l_mat)?.is_empty()),
        Check::new(format!("im l = ker R [{tag}]"), top.group().same_span(&l_mat, &ker_r)?),
        Check::new(format!("R surjective [{tag}]"), low.group().span_length(&r_mat)? == low.group().length()),
        Check::new(format!("C injective [{tag}]"), low.group().kernel(top.group(), &c_mat)?.is_empty()),
        Check::new(format!("im C = ker r [{tag}]"), top.group().same_span(&c_mat, &ker_small_r)?),
        Check::new(
            format!("r surjective [{tag}]"),
            cgroup.span_length(&small_r)? == dim_c as u64,
        ),
    ];
    let lhs = top.group().length();
    let rhs = low.group().length() + dim_c as u64;
    checks.push(Check::with_detail(
        format!("length W_(m+1) = length W_m + dim C_(m) [{tag}]"),
        lhs == rhs,
        format!("{lhs} vs {rhs}"),
    ));
    Ok(checks)
}

/// `0 -> C_(m) -> C_(m+1) -> Phi_{m+1} -> 0` and
/// `0 -> Phi_{m+1} -> C^(m+1) -> C^(m) -> 0`, with `Phi` the image of the
/// trace.
pub fn phi_sequences_check(space: &BasedSpace, m: u32) -> Result<Vec<Check>> {
    let f = prime_field(space)?;
    let p = f.p() as u64;
    let tag = format!("b={} p={} m={m}", space.dim(), f.p());
    let (d0, d1) = (CyclicPowerElement::dim(space, m)?, CyclicPowerElement::dim(space, m + 1)?);
    let (g0, g1) = (AbelianGroup::elementary(p, d0), AbelianGroup::elementary(p, d1));
    let c_mat: Vec<Vec<u64>> = cyclic_unit_vectors(CyclicVariant::Coinvariants, space, m)?
        .iter()
        .map(|e| Ok(cyclic_vec(&cyclic_c(e)?)))
        .collect::<Result<_>>()?;
    let tr_mat: Vec<Vec<u64>> = cyclic_unit_vectors(CyclicVariant::Coinvariants, space, m + 1)?
        .iter()
        .map(|e| Ok(cyclic_vec(&cyclic_trace(e)?)))
        .collect::<Result<_>>()?;
    let r_mat: Vec<Vec<u64>> = cyclic_unit_vectors(CyclicVariant::Invariants, space, m + 1)?
        .iter()
        .map(|e| Ok(cyclic_vec(&cyclic_r(e)?)))
        .collect::<Result<_>>()?;
    let phi = g1.span_length(&tr_mat)?;
    let aper = aperiodic_count(space.dim() as u64, p, m + 1);
    Ok(vec![
        Check::new(format!("C: C_(m) -> C_(m+1) injective [{tag}]"), g0.kernel(&g1, &c_mat)?.is_empty()),
        Check::new(format!("im C = ker tr [{tag}]"), g1.same_span(&c_mat, &g1.kernel(&g1, &tr_mat)?)?),
        Check::with_detail(format!("dim Phi_(m+1) = #aperiodic [{tag}]"), phi == aper, format!("{phi} vs {aper}")),
        Check::new(format!("im tr = ker R [{tag}]"), g1.same_span(&tr_mat, &g1.kernel(&g0, &r_mat)?)?),
        Check::new(format!("R: C^(m+1) -> C^(m) surjective [{tag}]"), g0.span_length(&r_mat)? == d0 as u64),
        Check::with_detail(
            format!("dim C_(m+1) = dim C_(m) + dim Phi_(m+1) [{tag}]"),
            d1 as u64 == d0 as u64 + aper,
            format!("{d1} vs {d0} + {aper}"),
        ),
    ])
}

/// Lengths of the graded pieces of the standard filtration
/// `F^j = ker R^{m-j}` and the co-standard filtration `F_i = im C^{m-1-i}`.
#[derive(Debug, Clone)]
pub struct FiltrationTable {
    pub standard: Vec<u64>,
    pub costandard: Vec<u64>,
    /// `bigraded[j][i]` is the length of `gr^j_i`.
    pub bigraded: Vec<Vec<u64>>,
    pub checks: Vec<Check>,
}

pub fn filtration_table(space: &BasedSpace, m: u32) -> Result<FiltrationTable> {
    let f = prime_field(space)?;
    ensure!(m >= 1, Range, "filtrations need m >= 1");
    let (b, p) = (space.dim() as u64, f.p() as u64);
    let tag = format!("b={b} p={p} m={m}");
    let w = witt_coords(space, m)?;
    let g = w.group().clone();
    let mu = m as usize;

    // standard[j] generates F^j for j = 0..=m
    let mut standard = Vec::with_capacity(mu + 1);
    for j in 0..=m {
        let gens = if j == 0 {
            g.basis()
        } else if j == m {
            Vec::new()
        } else {
            let low = witt_coords(space, j)?;
            let mat = w.matrix(&low, |c| Ok(as_witt(space, m, c)?.restrict_to(j)?.class().clone()))?;
            g.kernel(low.group(), &mat)?
        };
        standard.push(gens);
    }
    // costandard[i + 1] generates F_i for i = -1..=m-1
    let mut costandard = vec![Vec::new()];
    for i in 0..m {
        let src = witt_coords(space, i + 1)?;
        costandard.push(src.matrix(&w, |c| Ok(c_pow(&as_witt(space, i + 1, c)?, m - 1 - i)?.class().clone()))?);
    }
    let len = |v: &[Vec<u64>]| g.span_length(v);
    let mut checks = Vec::new();

    let gr_std: Vec<u64> = (0..mu).map(|j| Ok(len(&standard[j])? - len(&standard[j + 1])?)).collect::<Result<_>>()?;
    let gr_co: Vec<u64> = (0..mu).map(|i| Ok(len(&costandard[i + 1])? - len(&costandard[i])?)).collect::<Result<_>>()?;
    for j in 0..m {
        let want = necklace_count(b, p, j);
        let got = gr_std[j as usize];
        checks.push(Check::with_detail(format!("gr^{j} = C_({j}) [{tag}]"), got == want, format!("{got} vs {want}")));
        let got = gr_co[j as usize];
        checks.push(Check::with_detail(format!("gr_{j} = C^({j}) [{tag}]"), got == want, format!("{got} vs {want}")));
    }
    let l_images: Vec<Vec<u64>> = cyclic_unit_vectors(CyclicVariant::Coinvariants, space, m - 1)?
        .iter()
        .map(|e| w.to_vec(l_map(e)?.class()))
        .collect::<Result<_>>()?;
    checks.push(Check::new(format!("F^(m-1) = im l [{tag}]"), g.same_span(&standard[mu - 1], &l_images)?));

    // a[j][i + 1] = F^j /\ F_i
    let mut a = vec![vec![Vec::new(); mu + 1]; mu + 1];
    for j in 0..=mu {
        for i in 0..=mu {
            a[j][i] = intersect(&g, &standard[j], &costandard[i])?;
        }
    }
    let at = |j: i64, i: i64| -> &[Vec<u64>] {
        // F^j is everything for j <= 0 and F_i is everything for i >= m - 1
        if j > m as i64 || i < -1 {
            &[]
        } else {
            &a[j.max(0) as usize][(i.min(m as i64 - 1) + 1) as usize]
        }
    };
    let mut bigraded = vec![vec![0u64; mu]; mu];
    for j in 0..m as i64 {
        for i in 0..m as i64 {
            let top = len(at(j, i))?;
            let below = len(&sum(at(j + 1, i), at(j, i - 1)))?;
            let d = top - below;
            bigraded[j as usize][i as usize] = d;
            let k = i + j + 1 - m as i64;
            let want = if k >= 0 { aperiodic_count(b, p, k as u32) } else { 0 };
            checks.push(Check::with_detail(format!("dim gr^{j}_{i} = #aperiodic [{tag}]"), d == want, format!("{d} vs {want}")));

            let pa = times_p(&g, at(j, i));
            let sharp = g.contains(at(j + 1, i - 1), &pa)?;
            let loose = g.contains(at(j - 1, i + 1), &pa)?;
            checks.push(Check::new(format!("p F^{j}_{i} in F^{}_{} [{tag}]", j + 1, i - 1), sharp));
            checks.push(Check::new(format!("p F^{j}_{i} in F^{}_{} [{tag}]", j - 1, i + 1), loose));
            if j + 1 < m as i64 && i >= 1 {
                let d_below = sum(at(j + 2, i - 1), at(j + 1, i - 2));
                let image = len(&sum(&pa, &d_below))? - len(&d_below)?;
                checks.push(Check::with_detail(
                    format!("p: gr^{j}_{i} -> gr^{}_{} bijective [{tag}]", j + 1, i - 1),
                    image == d,
                    format!("rank {image} vs {d}"),
                ));
            }
        }
    }
    Ok(FiltrationTable { standard: gr_std, costandard: gr_co, bigraded, checks })
}

fn subgroup_coords(space: &BasedSpace, m: u32, n: u32) -> Result<ModuleCoords> {
    ModuleCoords::new(space.field(), subgroup_shape(space, m, n)?)
}

/// Both sequences relating `W^n_m` to `W_m`:
/// `0 -> (W^n_m)_{G_n} -V^n-> W_m -R^{m-n}-> W_n -> 0` and
/// `0 -> W_n -C^{m-n}-> W_m -F^n-> (W^n_m)^{G_n} -> 0`.
pub fn vr_sequences_check(space: &BasedSpace, m: u32, n: u32) -> Result<Vec<Check>> {
    let f = prime_field(space)?;
    ensure!(n >= 1 && n <= m, Range, "need m >= n >= 1");
    let tag = format!("b={} p={} m={m} n={n}", space.dim(), f.p());
    let sub = subgroup_coords(space, m, n)?;
    let w = witt_coords(space, m)?;
    let wn = witt_coords(space, n)?;
    let (gs, gw, gn) = (sub.group(), w.group(), wn.group());
    let to_sub = |c: &TateClass| SubgroupWittElement::from_class(space, c.clone());

    let sigma_minus_one: Vec<Vec<u64>> = sub
        .generators()?
        .iter()
        .map(|c| {
            let y = to_sub(c)?;
            sub.to_vec(y.residual_action().sub(&y)?.class())
        })
        .collect::<Result<_>>()?;
    let v_mat = sub.matrix(&w, |c| Ok(verschiebung_pow(&to_sub(c)?, n)?.class().clone()))?;
    let r_mat = w.matrix(&wn, |c| Ok(as_witt(space, m, c)?.restrict_to(n)?.class().clone()))?;
    let c_mat = wn.matrix(&w, |c| Ok(c_pow(&as_witt(space, n, c)?, m - n)?.class().clone()))?;
    let f_mat = w.matrix(&sub, |c| {
        let x = SubgroupWittElement::from(&as_witt(space, m, c)?);
        Ok(frobenius_pow(&x, n)?.class().clone())
    })?;

    let ker_v = gs.kernel(gw, &v_mat)?;
    let ker_r = gw.kernel(gn, &r_mat)?;
    let ker_f = gw.kernel(gs, &f_mat)?;
    let invariants = gs.kernel(gs, &sigma_minus_one)?;
    let coinv_len = gs.length() - gs.span_length(&sigma_minus_one)?;

    let mut checks = vec![
        Check::new(format!("ker V^n = im(sigma - 1) [{tag}]"), gs.same_span(&ker_v, &sigma_minus_one)?),
        Check::new(format!("im V^n = ker R^(m-n) [{tag}]"), gw.same_span(&v_mat, &ker_r)?),
        Check::new(format!("R^(m-n) surjective [{tag}]"), gn.span_length(&r_mat)? == gn.length()),
        Check::new(format!("C^(m-n) injective [{tag}]"), gn.kernel(gw, &c_mat)?.is_empty()),
        Check::new(format!("im C^(m-n) = ker F^n [{tag}]"), gw.same_span(&c_mat, &ker_f)?),
        Check::new(format!("im F^n = invariants [{tag}]"), gs.same_span(&f_mat, &invariants)?),
        Check::with_detail(
            format!("length W_m = length coinvariants + length W_n [{tag}]"),
            gw.length() == coinv_len + gn.length(),
            format!("{} vs {coinv_len} + {}", gw.length(), gn.length()),
        ),
    ];
    for i in n..m {
        let rep = residual_action_report(space, n, i)?;
        let want = necklace_count(space.dim() as u64, f.p() as u64, i) as usize;
        checks.push(Check::with_detail(
            format!("residual coinvariants of gr^{i} = C_({i}) [{tag}]"),
            rep.residual_coinvariants == want,
            format!("{} vs {want}", rep.residual_coinvariants),
        ));
        checks.push(Check::with_detail(
            format!("residual invariants of gr_{i} = C^({i}) [{tag}]"),
            rep.residual_invariants == want,
            format!("{} vs {want}", rep.residual_invariants),
        ));
    }
    if m == n + 1 {
        checks.extend(cyclo_check(space, n)?);
    }
    Ok(checks)
}

/// `W^n_{n+1}(E) = E^{(x) p^n}`, compatibly with the residual action and
/// the rotation of words.
pub fn cyclo_check(space: &BasedSpace, n: u32) -> Result<Vec<Check>> {
    let f = space.field();
    let tag = format!("b={} q={} n={n}", space.dim(), f.q());
    let shape = subgroup_shape(space, n + 1, n)?;
    let words = WordShape::new(f.p(), space.dim(), n)?;
    let gens = SubgroupWittElement::generators(space, n + 1, n)?;
    let read = |y: &SubgroupWittElement| -> Vec<u32> {
        let mut v = vec![0; words.num_words() as usize];
        for (nu, c) in y.class().raw_components() {
            v[nu.block as usize] = f.frob_inv(c);
        }
        v
    };
    let mut injective = true;
    let mut seen = std::collections::HashSet::new();
    let mut equivariant = true;
    for y in &gens {
        let v = read(y);
        injective &= seen.insert(v.clone());
        let mut rotated = vec![0; v.len()];
        for (u, &c) in v.iter().enumerate() {
            rotated[words.rotate(u as u32, 1) as usize] = c;
        }
        equivariant &= read(&y.residual_action()) == rotated;
    }
    let length = TateClass::module_length(&shape);
    Ok(vec![
        Check::with_detail(
            format!("length W^n_(n+1) = dim E^(x)p^n [{tag}]"),
            length == words.num_words() as u64 && gens.len() as u64 == length,
            format!("{length} vs {}", words.num_words()),
        ),
        Check::new(format!("W^n_(n+1) -> E^(x)p^n injective on generators [{tag}]"), injective),
        Check::new(format!("W^n_(n+1) = E^(x)p^n equivariant [{tag}]"), equivariant),
    ])
}

/// Invariant and coinvariant dimensions of two actions of `Z/p^n` on
/// `C_(i-n)(E^{(x) p^n})`: the residual one (rotation of words by one
/// letter) and the naive one (rotation inside every block of `p^n`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualActionReport {
    pub dim: usize,
    pub residual_invariants: usize,
    pub residual_coinvariants: usize,
    pub naive_invariants: usize,
    pub naive_coinvariants: usize,
}

impl ResidualActionReport {
    pub fn differ(&self) -> bool {
        (self.residual_invariants, self.residual_coinvariants) != (self.naive_invariants, self.naive_coinvariants)
    }
}

pub fn residual_action_report(space: &BasedSpace, n: u32, i: u32) -> Result<ResidualActionReport> {
    ensure!(i >= n, Range, "need i >= n");
    let f = space.field();
    let shape = subgroup_shape(space, i, n)?;
    let basis = shape.necklaces();
    let index: std::collections::HashMap<_, _> = basis.iter().enumerate().map(|(a, nu)| (*nu, a as u32)).collect();
    let blen = shape.block_len() as usize;
    let naive_word = |w: u32| -> Result<u32> {
        let letters = shape.letters(w);
        let out: Vec<u32> = letters.chunks(blen).flat_map(|blk| blk.iter().cycle().skip(1).take(blen).copied()).collect();
        shape.from_letters(&out)
    };
    let mut residual = Vec::with_capacity(basis.len());
    let mut naive = Vec::with_capacity(basis.len());
    for nu in basis.iter() {
        let w = shape.expand(nu);
        residual.push(index[&shape.necklace_of(shape.rotate(w, 1))]);
        naive.push(index[&shape.necklace_of(naive_word(w)?)]);
    }
    let dims = |perm: &[u32]| -> (usize, usize) {
        let d = perm.len() as u32;
        let p_mat = LinearMap::permutation(f, perm);
        let minus_one: Vec<Vec<u32>> = (0..d)
            .map(|r| (0..d).map(|c| f.sub(p_mat.entry(r, c), u32::from(r == c))).collect())
            .collect();
        let a = LinearMap::new(f, minus_one.clone(), d).expect("square matrix");
        let transposed: Vec<Vec<u32>> = (0..d as usize).map(|c| minus_one.iter().map(|row| row[c]).collect()).collect();
        let at = LinearMap::new(f, transposed, d).expect("square matrix");
        // invariants: kernel of P - 1; coinvariants: cokernel of P - 1
        ((d - a.rank()) as usize, (d - at.rank()) as usize)
    };
    let (ri, rc) = dims(&residual);
    let (ni, nc) = dims(&naive);
    Ok(ResidualActionReport {
        dim: basis.len(),
        residual_invariants: ri,
        residual_coinvariants: rc,
        naive_invariants: ni,
        naive_coinvariants: nc,
    })
}

/// Length of `H^0(Z/p^m, W_n(F_p)[words of length p^m over b letters])`
/// from per-orbit Smith forms, against `sum_i (m - i) #aperiodic(b, i)`.
pub fn census_check(b: u32, p: u32, m: u32, n: u32) -> Result<Check> {
    ensure!(n >= m, Range, "the census formula needs n >= m");
    let shape = WordShape::new(p, b, m)?;
    let total = shape.num_words() as usize;
    let len = shape.len();
    let mut seen = vec![false; total];
    let mut by_size: std::collections::BTreeMap<u32, u64> = Default::default();
    for w in 0..total as u32 {
        if seen[w as usize] {
            continue;
        }
        let mut size = 0;
        let mut x = w;
        loop {
            seen[x as usize] = true;
            size += 1;
            x = crate::orbits::rotate_word(b, len, x, 1);
            if x == w {
                break;
            }
        }
        *by_size.entry(size).or_default() += 1;
    }
    let mut got = 0u64;
    for (&size, &count) in &by_size {
        let g = AbelianGroup::new(p as u64, vec![n; size as usize]);
        let modulus = (p as u64).pow(n);
        let s = size as usize;
        let sigma_minus_one: Vec<Vec<u64>> = (0..s)
            .map(|a| {
                let mut v = vec![0u64; s];
                v[(a + 1) % s] += 1;
                v[a] = (v[a] + modulus - 1) % modulus;
                v
            })
            .collect();
        let invariants = g.kernel(&g, &sigma_minus_one)?;
        let mult = (len / size) as u64 % modulus;
        let traces: Vec<Vec<u64>> = (0..s).map(|_| vec![mult; s]).collect();
        ensure!(g.contains(&invariants, &traces)?, Invariant, "trace image outside the invariants");
        let piece = g.span_length(&invariants)? - g.span_length(&traces)?;
        got += piece * count;
    }
    let want: u64 = (0..m).map(|i| (m - i) as u64 * aperiodic_count(b as u64, p as u64, i)).sum();
    let stored = TateClass::module_length(&shape);
    Ok(Check::with_detail(
        format!("length H^0(G_{m}, W_{n}[S^p^{m}]) [b={b} p={p}]"),
        got == want && stored == want,
        format!("smith {got}, formula {want}, components {stored}"),
    ))
}
