//! Executable invariants bundled into suites.
//!
//! A suite expands into cases keyed by their parameters. Every case draws
//! from its own generator, seeded from the run seed and the case key, so the
//! report does not depend on the order in which cases run; cases are sorted
//! by key before emission.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use crate::cocycle::{addition_defect, check_identity, solve_cocycles, truncated_teichmuller_expansion, UniversalCocycle};
use crate::error::{ensure, ErrorClass, Result};
use crate::field::FieldSpec;
use crate::functor::{BasedSpace, LinearMap, WittElement};
use crate::orbits::{aperiodic_count, necklace_count, necklaces_by_filtering, necklaces_by_lyndon, WordShape};
use crate::scalar::{WittRing, WittScalar};
use crate::structure::{
    c_map, census_check, cyclic_c, cyclic_r, cyclic_trace, filtration_table, frobenius_map, gram_matrix, l_map,
    lr_rc_check, multiply, multiply_witt, pairing, pairing_witt, phi_sequences_check, r_map, residual_action_report,
    tau, unit, verschiebung, vr_sequences_check, CyclicPowerElement, CyclicVariant, SubgroupWittElement,
};
use crate::tate::TateClass;
use crate::witt_poly::{compute_witt_polynomials, UniversalWittPolynomials};

/// One checked identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Check { name: name.into(), passed, detail: String::new() }
    }

    pub fn with_detail(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({"name": self.name, "passed": self.passed, "detail": self.detail})
    }
}

pub const SUITES: [&str; 10] =
    ["scalars", "tate", "functor", "sequences", "filtrations", "mult", "pairing", "tau", "cocycle", "mackey"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    /// One of [`SUITES`] or `all`.
    pub suite: String,
    /// Restrict the grid to one prime, one field size, one level, one
    /// dimension.
    pub p: Option<u32>,
    pub q: Option<u32>,
    pub m: Option<u32>,
    pub dim: Option<u32>,
    pub seed: u64,
    /// Random samples per case (scalars draw ten times as many, the functor
    /// suite twice as many).
    pub cases: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { suite: "all".into(), p: None, q: None, m: None, dim: None, seed: 1, cases: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseReport {
    pub key: String,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub cases: Vec<CaseReport>,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.cases.iter().flat_map(|c| &c.checks).filter(|c| !c.passed).count()
    }

    pub fn num_checks(&self) -> usize {
        self.cases.iter().map(|c| c.checks.len()).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cases: Vec<_> = self
            .cases
            .iter()
            .map(|c| json!({"key": c.key, "checks": c.checks.iter().map(Check::to_json).collect::<Vec<_>>()}))
            .collect();
        json!({"suite": self.suite, "seed": self.seed, "cases": cases, "failures": self.failures()})
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("suite {} seed {}\n", self.suite, self.seed);
        for case in &self.cases {
            for c in &case.checks {
                let status = if c.passed { "ok  " } else { "FAIL" };
                if c.detail.is_empty() {
                    s.push_str(&format!("{status} {} :: {}\n", case.key, c.name));
                } else {
                    s.push_str(&format!("{status} {} :: {} ({})\n", case.key, c.name, c.detail));
                }
            }
        }
        s.push_str(&format!("checks {} failures {}\n", self.num_checks(), self.failures()));
        s
    }
}

type CaseFn = Box<dyn Fn(&mut ChaCha8Rng) -> Result<Vec<Check>> + Send + Sync>;

struct Case {
    key: String,
    run: CaseFn,
}

fn case(key: String, run: impl Fn(&mut ChaCha8Rng) -> Result<Vec<Check>> + Send + Sync + 'static) -> Case {
    Case { key, run: Box::new(run) }
}

fn case_seed(seed: u64, key: &str) -> u64 {
    // FNV-1a, stable across platforms and releases
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for b in key.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Count the samples for which `f` holds.
fn tally(name: impl Into<String>, n: usize, mut f: impl FnMut(usize) -> Result<bool>) -> Result<Check> {
    let mut bad = 0;
    for k in 0..n {
        if !f(k)? {
            bad += 1;
        }
    }
    Ok(Check::with_detail(name, bad == 0, format!("{bad}/{n} mismatches")))
}

fn rand_vec(field: FieldSpec, dim: u32, rng: &mut impl Rng) -> Vec<u32> {
    (0..dim).map(|_| rng.gen_range(0..field.q())).collect()
}

/// Grid points `(field, m, dim)` after applying the restrictions of the
/// configuration.
fn grid(cfg: &SuiteConfig, fields: &[FieldSpec], levels: impl Fn(&FieldSpec) -> Vec<u32>, dims: &[u32]) -> Result<Vec<(FieldSpec, u32, u32)>> {
    let fields: Vec<FieldSpec> = match cfg.q {
        Some(q) => {
            let f = standard_field(q)?;
            ensure!(cfg.p.is_none_or(|p| p == f.p()), Input, "--q {q} is not a power of --p");
            vec![f]
        }
        None => match cfg.p {
            Some(p) => vec![FieldSpec::prime(p)?],
            None => fields.to_vec(),
        },
    };
    let mut out = Vec::new();
    for f in fields {
        let ms = cfg.m.map_or_else(|| levels(&f), |m| vec![m]);
        let ds = cfg.dim.map_or_else(|| dims.to_vec(), |d| vec![d]);
        for &m in &ms {
            for &d in &ds {
                out.push((f, m, d));
            }
        }
    }
    Ok(out)
}

/// `F_q`, with the least irreducible `x^2 + c1 x + c0` (ordered by `(c1, c0)`)
/// when `q = p^2`.
pub fn standard_field(q: u32) -> Result<FieldSpec> {
    if let Ok(f) = FieldSpec::from_q(q, None) {
        return Ok(f);
    }
    let p = (2..q).find(|p| p * p == q).ok_or_else(|| crate::error::Error::Range(format!("q = {q} is not p or p^2")))?;
    for c1 in 0..p {
        for c0 in 0..p {
            if let Ok(f) = FieldSpec::quadratic(p, c0, c1) {
                return Ok(f);
            }
        }
    }
    FieldSpec::from_q(q, None)
}

fn primes(ps: &[u32]) -> Vec<FieldSpec> {
    ps.iter().map(|&p| FieldSpec::prime(p).expect("prime")).collect()
}

fn default_levels(f: &FieldSpec) -> Vec<u32> {
    if f.p() == 2 {
        vec![1, 2, 3]
    } else {
        vec![1, 2]
    }
}

fn tag(f: &FieldSpec, m: u32, dim: u32) -> String {
    format!("q={} m={m} dim={dim}", f.q())
}

/// Run a suite (or `all`).
pub fn run_suite(cfg: &SuiteConfig) -> Result<Report> {
    run_with_polynomials(cfg, &[])
}

/// As [`run_suite`], with the scalar suite checking Witt coordinates
/// against the given polynomial sets instead of freshly computed ones.
pub fn run_with_polynomials(cfg: &SuiteConfig, polys: &[UniversalWittPolynomials]) -> Result<Report> {
    ensure!(cfg.cases >= 1, Input, "--cases must be positive");
    let names: Vec<&str> = if cfg.suite == "all" {
        SUITES.to_vec()
    } else {
        ensure!(SUITES.contains(&cfg.suite.as_str()), Input, "unknown suite {:?}", cfg.suite);
        vec![cfg.suite.as_str()]
    };
    let mut cases = Vec::new();
    for name in names {
        let mut found = match name {
            "scalars" => scalar_cases(cfg, polys)?,
            "tate" => tate_cases(cfg)?,
            "functor" => functor_cases(cfg)?,
            "sequences" => sequence_cases(cfg)?,
            "filtrations" => filtration_cases(cfg)?,
            "mult" => mult_cases(cfg)?,
            "pairing" => pairing_cases(cfg)?,
            "tau" => tau_cases(cfg)?,
            "cocycle" => cocycle_cases(cfg)?,
            "mackey" => mackey_cases(cfg)?,
            _ => unreachable!(),
        };
        for c in &mut found {
            c.key = format!("{name} {}", c.key);
        }
        cases.extend(found);
    }
    let cases = run_cases(cfg.seed, cases)?;
    Ok(Report { suite: cfg.suite.clone(), seed: cfg.seed, cases })
}

fn run_cases(seed: u64, cases: Vec<Case>) -> Result<Vec<CaseReport>> {
    let next = AtomicUsize::new(0);
    let out = Mutex::new(Vec::with_capacity(cases.len()));
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(cases.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(c) = cases.get(k) else { break };
                let mut rng = ChaCha8Rng::seed_from_u64(case_seed(seed, &c.key));
                let res = (c.run)(&mut rng);
                out.lock().expect("report lock").push((c.key.clone(), res));
            });
        }
    });
    let mut results = out.into_inner().expect("report lock");
    results.sort_by(|a, b| a.0.cmp(&b.0));
    let mut reports = Vec::with_capacity(results.len());
    for (key, res) in results {
        let checks = match res {
            Ok(checks) => checks,
            Err(e) if e.class() == ErrorClass::Cap => return Err(e),
            Err(e) => vec![Check::with_detail("case completed", false, e.to_string())],
        };
        reports.push(CaseReport { key, checks });
    }
    Ok(reports)
}

// ---------------------------------------------------------------- scalars

fn scalar_cases(cfg: &SuiteConfig, polys: &[UniversalWittPolynomials]) -> Result<Vec<Case>> {
    let mut fields = primes(&[2, 3, 5]);
    fields.push(standard_field(4)?);
    fields.push(standard_field(9)?);
    let points = grid(cfg, &fields, |f| if f.d() == 1 { vec![1, 2, 3, 4] } else { vec![1, 2, 3] }, &[1])?;
    let samples = cfg.cases * 10;
    let mut out = Vec::new();
    for (field, n, _) in points {
        let given = polys.iter().find(|s| s.p == field.p() && s.n >= n).map(|s| Arc::new(s.clone()));
        out.push(case(format!("q={} n={n}", field.q()), move |rng| scalar_checks(field, n, samples, given.clone(), rng)));
    }
    Ok(out)
}

/// `sum_i p^i teich(a_i)` in `Z/p^n`, with `teich(a) = a^{p^{n-1}}`.
fn zpn_from_coords(p: u64, n: u32, coords: &[u32]) -> u64 {
    let modulus = p.pow(n);
    let pow_mod = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= modulus;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % modulus;
            }
            b = b * b % modulus;
            e >>= 1;
        }
        acc
    };
    coords
        .iter()
        .enumerate()
        .map(|(i, &a)| p.pow(i as u32) * pow_mod(a as u64, p.pow(n - 1)) % modulus)
        .fold(0, |acc, x| (acc + x) % modulus)
}

fn scalar_checks(
    field: FieldSpec,
    n: u32,
    samples: usize,
    polys: Option<Arc<UniversalWittPolynomials>>,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Check>> {
    let ring = WittRing::get(field, n)?;
    let size = ring.size() as u64;
    let pairs: Vec<(u32, u32)> = if size * size <= 81 * 81 && size <= 81 {
        (0..size as u32).flat_map(|a| (0..size as u32).map(move |b| (a, b))).collect()
    } else {
        (0..samples).map(|_| (rng.gen_range(0..size as u32), rng.gen_range(0..size as u32))).collect()
    };
    let sc = |c: u32| WittScalar::from_coords(field, &ring.coords(c));
    let mut checks = Vec::new();
    let p = field.p() as u64;
    if field.is_prime_field() {
        let modulus = p.pow(n);
        let z = |x: &WittScalar| x.to_zpn();
        checks.push(tally("to_zpn = sum p^i teich(a_i)", size as usize, |c| {
            Ok(z(&sc(c as u32)?)? == zpn_from_coords(p, n, &ring.coords(c as u32)))
        })?);
        checks.push(tally("to_zpn(x + y) = to_zpn x + to_zpn y", pairs.len(), |k| {
            let (x, y) = (sc(pairs[k].0)?, sc(pairs[k].1)?);
            Ok(z(&x.add(&y)?)? == (z(&x)? + z(&y)?) % modulus)
        })?);
        checks.push(tally("to_zpn(x y) = to_zpn x to_zpn y", pairs.len(), |k| {
            let (x, y) = (sc(pairs[k].0)?, sc(pairs[k].1)?);
            Ok(z(&x.mul(&y)?)? == z(&x)? * z(&y)? % modulus)
        })?);
        checks.push(tally("to_zpn(x - y) = to_zpn x - to_zpn y", pairs.len(), |k| {
            let (x, y) = (sc(pairs[k].0)?, sc(pairs[k].1)?);
            Ok(z(&x.sub(&y)?)? == (z(&x)? + modulus - z(&y)?) % modulus)
        })?);
        checks.push(tally("V x = p x in Z/p^(n+1)", size as usize, |c| {
            let x = sc(c as u32)?;
            Ok(z(&x.verschiebung()?)? == z(&x)? * p)
        })?);
        checks.push(tally("F = id on W_n(F_p)", size as usize, |c| {
            let x = sc(c as u32)?;
            Ok(x.frobenius() == x)
        })?);
        if n >= 2 {
            checks.push(tally("restriction = reduction mod p^(n-1)", size as usize, |c| {
                let x = sc(c as u32)?;
                Ok(z(&x.restrict()?)? == z(&x)? % p.pow(n - 1))
            })?);
        }
        checks.push(tally("teichmuller(c) = c^(p^(n-1)) mod p^n", field.q() as usize, |c| {
            let t = WittScalar::teichmuller(field.element(c as u32)?, n)?;
            Ok(z(&t)? == zpn_from_coords(p, n, &[c as u32]))
        })?);
    }
    checks.push(tally("F V = p", size as usize, |c| {
        let x = sc(c as u32)?;
        let px = x.pad(n + 1)?.mul(&WittScalar::from_int(field, n + 1, p as i64)?)?;
        Ok(x.verschiebung()?.frobenius() == px)
    })?);
    checks.push(tally("teichmuller multiplicative", (field.q() * field.q()) as usize, |k| {
        let (a, b) = (k as u32 / field.q(), k as u32 % field.q());
        let ta = WittScalar::teichmuller(field.element(a)?, n)?;
        let tb = WittScalar::teichmuller(field.element(b)?, n)?;
        Ok(ta.mul(&tb)? == WittScalar::teichmuller(field.element(field.mul(a, b))?, n)?)
    })?);
    // the universal polynomials get too large to evaluate quickly at p = 5, n = 4
    let use_polys = polys.is_some() || !(field.p() == 5 && n >= 4);
    if use_polys {
        let polys = match polys {
            Some(s) => s,
            None => compute_witt_polynomials(field.p(), n)?,
        };
        let cut = |v: Vec<u32>| v.into_iter().take(n as usize).collect::<Vec<u32>>();
        let pairs = &pairs[..pairs.len().min(samples)];
        checks.push(tally("coordinates of x + y = S(x, y)", pairs.len(), |k| {
            let (x, y) = (ring.coords(pairs[k].0), ring.coords(pairs[k].1));
            Ok(cut(polys.eval_sum(&field, &pad(&x, polys.n), &pad(&y, polys.n))) == ring.coords(ring.add(pairs[k].0, pairs[k].1)))
        })?);
        checks.push(tally("coordinates of x y = P(x, y)", pairs.len(), |k| {
            let (x, y) = (ring.coords(pairs[k].0), ring.coords(pairs[k].1));
            Ok(cut(polys.eval_prod(&field, &pad(&x, polys.n), &pad(&y, polys.n))) == ring.coords(ring.mul(pairs[k].0, pairs[k].1)))
        })?);
    }
    Ok(checks)
}

fn pad(x: &[u32], n: u32) -> Vec<u32> {
    let mut v = x.to_vec();
    v.resize(n as usize, 0);
    v
}

// ---------------------------------------------------------------- tate

fn tate_cases(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let points = grid(cfg, &primes(&[2, 3]), default_levels, &[1, 2, 3])?;
    let samples = cfg.cases;
    let mut out = Vec::new();
    for (field, m, b) in points {
        let p = field.p();
        out.push(case(format!("b={b} p={p} m={m}"), move |rng| {
            let mut checks = Vec::new();
            if field.is_prime_field() {
                checks.push(census_check(b, p, m, m)?);
                checks.push(census_check(b, p, m, m + 1)?);
            }
            for i in 0..=m {
                let shape = WordShape::new(p, b, i)?;
                let (a, l) = (necklaces_by_filtering(&shape), necklaces_by_lyndon(&shape));
                let want = aperiodic_count(b as u64, p as u64, i);
                checks.push(Check::with_detail(
                    format!("aperiodic necklaces of length p^{i} by filtering and by Duval agree"),
                    a == l && a.len() as u64 == want,
                    format!("{} and {} vs {want}", a.len(), l.len()),
                ));
                let all = shape.necklaces().len() as u64;
                let want = necklace_count(b as u64, p as u64, i);
                checks.push(Check::with_detail(format!("necklaces of length p^{i}"), all == want, format!("{all} vs {want}")));
            }
            let shape = WordShape::new(p, b, m)?;
            let e = BasedSpace::standard(field, b);
            checks.push(tally("project(lift x) = x", samples, |_| {
                let x = WittElement::random(&e, m, rng)?;
                Ok(x.class().lift(m)?.project()? == *x.class())
            })?);
            checks.push(tally("lift x is invariant", samples, |_| {
                let x = WittElement::random(&e, m, rng)?;
                Ok(x.class().lift(m)?.is_invariant())
            })?);
            checks.push(tally("transfer(restrict x) = p x", samples, |_| {
                let x = WittElement::random(&e, m, rng)?;
                Ok(x.class().restrict_to_subgroup()?.transfer_from_subgroup()? == x.class().times_p())
            })?);
            let length = TateClass::module_length(&shape);
            let want: u64 = (0..m).map(|i| (m - i) as u64 * aperiodic_count(b as u64, p as u64, i)).sum();
            checks.push(Check::with_detail("module length", length == want, format!("{length} vs {want}")));
            Ok(checks)
        }));
    }
    Ok(out)
}

// ---------------------------------------------------------------- functor

fn functor_cases(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let mut fields = primes(&[2, 3]);
    fields.push(standard_field(4)?);
    let points = grid(cfg, &fields, |f| if f.d() == 1 { default_levels(f) } else { vec![1, 2] }, &[1, 2, 3])?;
    let samples = cfg.cases * 2;
    let mut out = Vec::new();
    for (field, m, dim) in points {
        if (dim as f64).powi(field.p().pow(m) as i32) > crate::functor::DENSE_CAP as f64 {
            continue;
        }
        out.push(case(tag(&field, m, dim), move |rng| functor_checks(field, m, dim, samples, rng)));
    }
    Ok(out)
}

fn functor_checks(field: FieldSpec, m: u32, dim: u32, samples: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let e = BasedSpace::standard(field, dim);
    let mut checks = Vec::new();
    checks.push(tally("W(f) independent of the lift of f", samples, |_| {
        let rows = rng.gen_range(1..=dim);
        let t = BasedSpace::standard(field, rows);
        let f = LinearMap::random(field, rows, dim, rng);
        let x = WittElement::random(&e, m, rng)?;
        let (l1, l2) = (f.random_lift(m, rng)?, f.random_lift(m, rng)?);
        let a = x.apply_lifted(&l1, &t)?;
        Ok(a == x.apply_lifted(&l2, &t)? && a == x.apply_map(&f, &t)?)
    })?);
    checks.push(tally("W(id) = id", samples.min(20), |_| {
        let x = WittElement::random(&e, m, rng)?;
        Ok(x.apply_map(&LinearMap::identity(field, dim), &e)? == x)
    })?);
    checks.push(tally("W(g f) = W(g) W(f)", samples, |_| {
        let (r1, r2) = (rng.gen_range(1..=dim), rng.gen_range(1..=dim));
        let (t1, t2) = (BasedSpace::standard(field, r1), BasedSpace::standard(field, r2));
        let f = LinearMap::random(field, r1, dim, rng);
        let g = LinearMap::random(field, r2, r1, rng);
        let x = WittElement::random(&e, m, rng)?;
        Ok(x.apply_map(&g.compose(&f)?, &t2)? == x.apply_map(&f, &t1)?.apply_map(&g, &t2)?)
    })?);
    checks.push(tally("W(f) T(e) = T(f e)", samples, |_| {
        let rows = rng.gen_range(1..=dim);
        let t = BasedSpace::standard(field, rows);
        let f = LinearMap::random(field, rows, dim, rng);
        let v = rand_vec(field, dim, rng);
        Ok(WittElement::teichmuller(&e, m, &v)?.apply_map(&f, &t)? == WittElement::teichmuller(&t, m, &f.apply(&v))?)
    })?);
    checks.push(tally("T independent of the lift of e", samples.min(20), |_| {
        let v = rand_vec(field, dim, rng);
        let ring = WittRing::get(field, m)?;
        let lift: Vec<WittScalar> = v
            .iter()
            .map(|&c| {
                let noise = ring.times_p(rng.gen_range(0..ring.size()));
                WittScalar::from_coords(field, &ring.coords(ring.add(c, noise)))
            })
            .collect::<Result<_>>()?;
        Ok(WittElement::teichmuller_expanded(&e, m, &lift)? == WittElement::teichmuller(&e, m, &v)?)
    })?);
    checks.push(tally("R W(f) = W(f) R", samples.min(50), |_| {
        let f = LinearMap::random(field, dim, dim, rng);
        let x = WittElement::random(&e, m, rng)?;
        Ok(x.apply_map(&f, &e)?.restriction()? == x.restriction()?.apply_map(&f, &e)?)
    })?);
    Ok(checks)
}

// ---------------------------------------------------------------- sequences

fn sequence_cases(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let points = grid(cfg, &primes(&[2]), |_| vec![1, 2], &[1, 2])?;
    let samples = cfg.cases;
    let mut out = Vec::new();
    for (field, m, dim) in points {
        out.push(case(format!("{} short", tag(&field, m, dim)), move |rng| {
            let e = BasedSpace::standard(field, dim);
            let mut checks = lr_rc_check(&e, m)?;
            checks.extend(phi_sequences_check(&e, m)?);
            if m == 1 {
                checks.extend(phi_sequences_check(&e, 0)?);
            }
            checks.push(tally("r R = R r", samples, |_| {
                let x = WittElement::random(&e, m + 1, rng)?;
                Ok(cyclic_r(&r_map(&x)?)? == r_map(&x.restriction()?)?)
            })?);
            checks.push(tally("C l = l C", samples, |_| {
                let c = CyclicPowerElement::random(CyclicVariant::Coinvariants, &e, m - 1, rng)?;
                Ok(c_map(&l_map(&c)?)? == l_map(&cyclic_c(&c)?)?)
            })?);
            checks.push(tally("r l = trace", samples, |_| {
                let c = CyclicPowerElement::random(CyclicVariant::Coinvariants, &e, m - 1, rng)?;
                Ok(r_map(&l_map(&c)?)? == cyclic_trace(&c)?)
            })?);
            checks.push(tally("C R = p and R C = p", samples, |_| {
                let x = WittElement::random(&e, m + 1, rng)?;
                let y = WittElement::random(&e, m, rng)?;
                Ok(c_map(&x.restriction()?)? == x.times_p() && c_map(&y)?.restriction()? == y.times_p())
            })?);
            Ok(checks)
        }));
    }
    for (field, _, dim) in grid(cfg, &primes(&[2]), |_| vec![0], &[1, 2])? {
        for (m, n) in [(2, 1), (3, 1), (3, 2), (2, 2)] {
            if cfg.m.is_some_and(|x| x != m) {
                continue;
            }
            out.push(case(format!("{} n={n} long", tag(&field, m, dim)), move |_| {
                vr_sequences_check(&BasedSpace::standard(field, dim), m, n)
            }));
        }
    }
    if cfg.p.is_none_or(|p| p == 2) && cfg.q.is_none_or(|q| q == 2) {
        out.push(case("residual action q=2 n=1 i=2 dim=2".into(), |_| {
            let r = residual_action_report(&BasedSpace::standard(FieldSpec::prime(2)?, 2), 1, 2)?;
            Ok(vec![
                Check::with_detail(
                    "residual and naive rotations differ",
                    r.differ(),
                    format!("residual {}/{}, naive {}/{}", r.residual_invariants, r.residual_coinvariants, r.naive_invariants, r.naive_coinvariants),
                ),
                Check::with_detail("residual coinvariants = C_(2)", r.residual_coinvariants == 6, r.residual_coinvariants.to_string()),
            ])
        }));
    }
    Ok(out)
}

// ---------------------------------------------------------------- filtrations

fn filtration_cases(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let points = grid(cfg, &primes(&[2, 3]), default_levels, &[1, 2, 3])?;
    Ok(points
        .into_iter()
        .map(|(field, m, dim)| {
            case(tag(&field, m, dim), move |_| {
                let t = filtration_table(&BasedSpace::standard(field, dim), m)?;
                let mut checks = t.checks;
                checks.push(Check::with_detail("bigraded table", true, format!("{:?}", t.bigraded)));
                Ok(checks)
            })
        })
        .collect())
}

// ---------------------------------------------------------------- mult

fn swap_perm(dm: u32, dn: u32) -> Vec<u32> {
    (0..dm * dn).map(|l| (l % dn) * dm + l / dn).collect()
}

fn mult_cases(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let mut fields = primes(&[2, 3]);
    fields.push(standard_field(4)?);
    let points = grid(cfg, &fields, |f| if f.d() == 1 { default_levels(f) } else { vec![1, 2] }, &[1, 2])?;
    let samples = cfg.cases;
    Ok(points
        .into_iter()
        .map(|(field, m, dim)| case(tag(&field, m, dim), move |rng| mult_checks(field, m, dim, samples, rng)))
        .collect())
}

fn mult_checks(field: FieldSpec, m: u32, dim: u32, samples: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let e = BasedSpace::standard(field, dim);
    let k = BasedSpace::standard(field, 1);
    let ee = e.tensor(&e)?;
    let mut checks = Vec::new();
    checks.push(tally("mu(mu(x, y), z) = mu(x, mu(y, z))", samples, |_| {
        let (x, y, z) = (WittElement::random(&e, m, rng)?, WittElement::random(&k, m, rng)?, WittElement::random(&e, m, rng)?);
        Ok(multiply_witt(&multiply_witt(&x, &y)?, &z)? == multiply_witt(&x, &multiply_witt(&y, &z)?)?)
    })?);
    checks.push(tally("mu(1, x) = x = mu(x, 1)", samples, |_| {
        let x = WittElement::random(&e, m, rng)?;
        let one = unit(field, m)?;
        Ok(multiply_witt(&one, &x)?.class() == x.class() && multiply_witt(&x, &one)?.class() == x.class())
    })?);
    checks.push(tally("W(swap) mu(x, y) = mu(y, x)", samples, |_| {
        let f = BasedSpace::standard(field, rng.gen_range(1..=2));
        let (x, y) = (WittElement::random(&e, m, rng)?, WittElement::random(&f, m, rng)?);
        let yx = multiply_witt(&y, &x)?;
        let swap = LinearMap::permutation(field, &swap_perm(e.dim(), f.dim()));
        Ok(multiply_witt(&x, &y)?.apply_map(&swap, yx.space())? == yx)
    })?);
    checks.push(tally("R mu = mu (R x R)", samples, |_| {
        let (x, y) = (WittElement::random(&e, m, rng)?, WittElement::random(&e, m, rng)?);
        Ok(multiply_witt(&x, &y)?.restriction()? == multiply_witt(&x.restriction()?, &y.restriction()?)?)
    })?);
    checks.push(tally("mu(T e, T f) = T(e (x) f)", samples, |_| {
        let (u, v) = (rand_vec(field, dim, rng), rand_vec(field, dim, rng));
        let uv: Vec<u32> = (0..dim * dim).map(|w| field.mul(u[(w / dim) as usize], v[(w % dim) as usize])).collect();
        let lhs = multiply_witt(&WittElement::teichmuller(&e, m, &u)?, &WittElement::teichmuller(&e, m, &v)?)?;
        Ok(lhs == WittElement::teichmuller(&ee, m, &uv)?)
    })?);
    if m >= 2 {
        checks.push(tally("mu(V a, b) = V mu(a, F b)", samples, |_| {
            let n = rng.gen_range(1..m);
            let a = SubgroupWittElement::random(&e, m, n, rng)?;
            let b = SubgroupWittElement::random(&e, m, n - 1, rng)?;
            Ok(multiply(&verschiebung(&a)?, &b)? == verschiebung(&multiply(&a, &frobenius_map(&b)?)?)?)
        })?);
        checks.push(tally("F mu(a, b) = mu(F a, F b)", samples, |_| {
            let (a, b) = (WittElement::random(&e, m, rng)?, WittElement::random(&e, m, rng)?);
            let lhs = frobenius_map(&(&multiply_witt(&a, &b)?).into())?;
            Ok(lhs == multiply(&frobenius_map(&(&a).into())?, &frobenius_map(&(&b).into())?)?)
        })?);
    }
    Ok(checks)
}

// ---------------------------------------------------------------- pairing

fn pairing_cases(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let mut fields = primes(&[2, 3]);
    fields.push(standard_field(4)?);
    let points = grid(cfg, &fields, |f| if f.d() == 1 { default_levels(f) } else { vec![1, 2] }, &[1, 2])?;
    let samples = cfg.cases;
    Ok(points
        .into_iter()
        .map(|(field, m, dim)| {
            case(tag(&field, m, dim), move |rng| {
                let e = BasedSpace::standard(field, dim);
                let d = e.dual();
                let (_, det) = gram_matrix(&e, m)?;
                let mut checks = vec![Check::with_detail("Gram determinant is a unit", det.is_unit(), format!("det {:?}", det.coords()))];
                checks.push(tally("<T e, T phi> = teichmuller(phi(e))", samples, |_| {
                    let (u, v) = (rand_vec(field, dim, rng), rand_vec(field, dim, rng));
                    let dot = u.iter().zip(&v).fold(0, |acc, (&a, &b)| field.add(acc, field.mul(a, b)));
                    let lhs = pairing_witt(&WittElement::teichmuller(&e, m, &u)?, &WittElement::teichmuller(&d, m, &v)?)?;
                    Ok(lhs == WittScalar::teichmuller(field.element(dot)?, m)?)
                })?);
                checks.push(tally("<x + y, z> = <x, z> + <y, z>", samples, |_| {
                    let (x, y, z) = (WittElement::random(&e, m, rng)?, WittElement::random(&e, m, rng)?, WittElement::random(&d, m, rng)?);
                    Ok(pairing_witt(&x.add(&y)?, &z)? == pairing_witt(&x, &z)?.add(&pairing_witt(&y, &z)?)?)
                })?);
                if m >= 2 {
                    checks.push(tally("<V a, b> = V <a, F b>", samples, |_| {
                        let a = SubgroupWittElement::random(&e, m, 1, rng)?;
                        let b = SubgroupWittElement::random(&d, m, 0, rng)?;
                        Ok(pairing(&verschiebung(&a)?, &b)? == pairing(&a, &frobenius_map(&b)?)?.verschiebung()?)
                    })?);
                }
                Ok(checks)
            })
        })
        .collect())
}

// ---------------------------------------------------------------- tau

fn tau_cases(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let mut fields = primes(&[2, 3]);
    fields.push(standard_field(4)?);
    let points = grid(cfg, &fields, |f| if f.p() == 2 && f.d() == 1 { vec![1, 2] } else { vec![1] }, &[1, 2])?;
    let samples = cfg.cases;
    Ok(points
        .into_iter()
        .map(|(field, m, dim)| case(tag(&field, m, dim), move |rng| tau_checks(field, m, dim, samples, rng)))
        .collect())
}

fn tau_checks(field: FieldSpec, m: u32, dim: u32, samples: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let k = BasedSpace::standard(field, 1);
    let a = BasedSpace::standard(field, dim);
    let spaces = |rng: &mut ChaCha8Rng| BasedSpace::standard(field, rng.gen_range(1..=2));
    let mut checks = Vec::new();
    checks.push(tally("hexagon: tau tau tau = id on M (x) N (x) L", samples, |_| {
        let mnl = a.tensor(&spaces(rng))?.tensor(&spaces(rng))?;
        let x = WittElement::random(&mnl, m, rng)?;
        Ok(tau(&tau(&tau(&x, 1)?, 1)?, 1)? == x)
    })?);
    checks.push(tally("tau_(N,M) tau_(M,N) = id on pure tensors", samples, |_| {
        let n = spaces(rng);
        let (u, v) = (rand_vec(field, dim, rng), rand_vec(field, n.dim(), rng));
        let x = multiply_witt(&WittElement::teichmuller(&a, m, &u)?, &WittElement::teichmuller(&n, m, &v)?)?;
        Ok(tau(&tau(&x, 1)?, 1)? == x)
    })?);
    checks.push(tally("unit laws", samples, |_| {
        let z = WittElement::random(&a, m, rng)?;
        let kz = WittElement::from_class(&k.tensor(&a)?, m, z.class().clone())?;
        let zk = WittElement::from_class(&a.tensor(&k)?, m, z.class().clone())?;
        Ok(tau(&kz, 1)?.class() == z.class() && tau(&zk, 1)?.class() == z.class())
    })?);
    checks.push(tally("tau T(e (x) f) = T(f (x) e)", samples, |_| {
        let n = spaces(rng);
        let (u, v) = (rand_vec(field, dim, rng), rand_vec(field, n.dim(), rng));
        let mn = a.tensor(&n)?;
        let nm = n.tensor(&a)?;
        let uv: Vec<u32> = (0..dim * n.dim()).map(|w| field.mul(u[(w / n.dim()) as usize], v[(w % n.dim()) as usize])).collect();
        let vu: Vec<u32> = (0..dim * n.dim()).map(|w| field.mul(v[(w / dim) as usize], u[(w % dim) as usize])).collect();
        Ok(tau(&WittElement::teichmuller(&mn, m, &uv)?, 1)? == WittElement::teichmuller(&nm, m, &vu)?)
    })?);
    checks.push(tally("tau mu(x, y) = mu(y, x)", samples, |_| {
        let n = spaces(rng);
        let (x, y) = (WittElement::random(&a, m, rng)?, WittElement::random(&n, m, rng)?);
        Ok(tau(&multiply_witt(&x, &y)?, 1)? == multiply_witt(&y, &x)?)
    })?);
    checks.push(tally("tau_(M (x) N, L) mu(x, y) = mu(y, x)", samples, |_| {
        let (n, l) = (spaces(rng), spaces(rng));
        let x = WittElement::random(&a.tensor(&n)?, m, rng)?;
        let y = WittElement::random(&l, m, rng)?;
        Ok(tau(&multiply_witt(&x, &y)?, 2)? == multiply_witt(&y, &x)?)
    })?);
    checks.push(tally("R tau = tau R", samples, |_| {
        let n = spaces(rng);
        let x = WittElement::random(&a.tensor(&n)?, m, rng)?;
        Ok(tau(&x, 1)?.restriction()? == tau(&x.restriction()?, 1)?)
    })?);
    Ok(checks)
}

// ---------------------------------------------------------------- cocycle

fn cocycle_cases(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let mut out = Vec::new();
    for (p, depth) in [(2u32, 3u32), (3, 2)] {
        if cfg.p.is_some_and(|x| x != p) || cfg.q.is_some_and(|q| q != p) {
            continue;
        }
        out.push(case(format!("identities p={p} depth={depth}"), move |_| {
            let cs = solve_cocycles(p, depth)?;
            let mut checks = Vec::new();
            for n in 1..=depth {
                checks.push(Check::new(format!("(s0 + s1)^(x)p^{n} expansion exact over Z"), check_identity(&cs, n)?));
            }
            let roundtrip = cs.iter().all(|c| UniversalCocycle::from_json(&c.to_json()).ok().as_ref() == Some(c));
            checks.push(Check::new("cocycle JSON round trip", roundtrip));
            Ok(checks)
        }));
    }
    let mut fields = primes(&[2, 3]);
    fields.push(standard_field(4)?);
    let points = grid(cfg, &fields, |f| if f.p() == 2 && f.d() == 1 { vec![1, 2, 3] } else { vec![1, 2] }, &[1, 2])?;
    let samples = cfg.cases;
    for (field, m, dim) in points {
        out.push(case(format!("defect {}", tag(&field, m, dim)), move |rng| {
            let cs = solve_cocycles(field.p(), m.saturating_sub(1))?;
            let e = BasedSpace::standard(field, dim);
            let direct = |a: &[u32], b: &[u32]| -> Result<WittElement> {
                let s: Vec<u32> = a.iter().zip(b).map(|(&x, &y)| field.add(x, y)).collect();
                WittElement::teichmuller(&e, m, &s)?.sub(&WittElement::teichmuller(&e, m, a)?)?.sub(&WittElement::teichmuller(&e, m, b)?)
            };
            let mut checks = Vec::new();
            checks.push(tally("T(a + b) - T(a) - T(b) = sum V^i T(c_i(a, b))", samples, |_| {
                let (a, b) = (rand_vec(field, dim, rng), rand_vec(field, dim, rng));
                Ok(addition_defect(&e, m, &a, &b, &cs)?.agree())
            })?);
            checks.push(tally("c(a, b) = c(b, a)", samples, |_| {
                let (a, b) = (rand_vec(field, dim, rng), rand_vec(field, dim, rng));
                Ok(addition_defect(&e, m, &a, &b, &cs)?.universal == addition_defect(&e, m, &b, &a, &cs)?.universal)
            })?);
            checks.push(tally("c(a, b) + c(a + b, d) = c(b, d) + c(a, b + d)", samples, |_| {
                let (a, b, d) = (rand_vec(field, dim, rng), rand_vec(field, dim, rng), rand_vec(field, dim, rng));
                let ab: Vec<u32> = a.iter().zip(&b).map(|(&x, &y)| field.add(x, y)).collect();
                let bd: Vec<u32> = b.iter().zip(&d).map(|(&x, &y)| field.add(x, y)).collect();
                Ok(direct(&a, &b)?.add(&direct(&ab, &d)?)? == direct(&b, &d)?.add(&direct(&a, &bd)?)?)
            })?);
            checks.push(tally("c(a, 0) = 0", samples.min(20), |_| {
                let a = rand_vec(field, dim, rng);
                Ok(addition_defect(&e, m, &a, &vec![0; dim as usize], &cs)?.direct.is_zero())
            })?);
            if field.p() == 2 && field.d() == 1 && m <= 2 {
                checks.push(expansion_surjective(&e, m)?);
            }
            Ok(checks)
        }));
    }
    Ok(out)
}

/// Enumerate `sum V^i T(e_i)` over all inputs.
fn expansion_surjective(e: &BasedSpace, m: u32) -> Result<Check> {
    let field = e.field();
    let sizes: Vec<u32> = (0..m).map(|i| e.dim().pow(field.p().pow(i))).collect();
    let total: u32 = sizes.iter().sum();
    ensure!(total <= 20, Cap, "enumeration over {total} coordinates");
    let mut seen = std::collections::HashSet::new();
    for bits in 0u64..(1 << total) {
        let mut comps = Vec::new();
        let mut off = 0;
        for &s in &sizes {
            comps.push((0..s).map(|j| ((bits >> (off + j)) & 1) as u32).collect::<Vec<_>>());
            off += s;
        }
        seen.insert(truncated_teichmuller_expansion(e, m, &comps)?.class().clone());
    }
    let shape = WordShape::new(field.p(), e.dim(), m)?;
    let want = 1u64 << TateClass::module_length(&shape);
    Ok(Check::with_detail("sum V^i T(e_i) is surjective", seen.len() as u64 == want, format!("{} of {want}", seen.len())))
}

// ---------------------------------------------------------------- mackey

fn mackey_cases(cfg: &SuiteConfig) -> Result<Vec<Case>> {
    let mut fields = primes(&[2, 3]);
    fields.push(standard_field(4)?);
    let points = grid(cfg, &fields, |f| if f.d() == 1 { default_levels(f) } else { vec![1, 2] }, &[1, 2])?;
    let samples = cfg.cases;
    Ok(points
        .into_iter()
        .map(|(field, m, dim)| case(tag(&field, m, dim), move |rng| mackey_checks(field, m, dim, samples, rng)))
        .collect())
}

fn mackey_checks(field: FieldSpec, m: u32, dim: u32, samples: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let e = BasedSpace::standard(field, dim);
    let p = field.p();
    let mut checks = Vec::new();
    for n in 0..m {
        let vf = |x: &SubgroupWittElement| -> Result<bool> { Ok(verschiebung(&frobenius_map(x)?)? == x.times_p()) };
        let fv = |y: &SubgroupWittElement| -> Result<bool> {
            let mut sum = SubgroupWittElement::zero(&e, m, n + 1)?;
            for j in 0..p {
                sum = sum.add(&y.rotate(j * p.pow(n)))?;
            }
            Ok(frobenius_map(&verschiebung(y)?)? == sum)
        };
        let gens = SubgroupWittElement::generators(&e, m, n)?;
        checks.push(tally(format!("V F = p on generators of level {n}"), gens.len(), |k| vf(&gens[k]))?);
        checks.push(tally(format!("V F = p on random elements of level {n}"), samples, |_| vf(&SubgroupWittElement::random(&e, m, n, rng)?))?);
        let gens = SubgroupWittElement::generators(&e, m, n + 1)?;
        checks.push(tally(format!("F V = sum of residual rotations on generators of level {}", n + 1), gens.len(), |k| fv(&gens[k]))?);
        checks.push(tally(format!("F V = sum of residual rotations on random elements of level {}", n + 1), samples, |_| {
            fv(&SubgroupWittElement::random(&e, m, n + 1, rng)?)
        })?);
        checks.push(tally(format!("F commutes with the residual action at level {n}"), samples, |_| {
            let x = SubgroupWittElement::random(&e, m, n, rng)?;
            Ok(frobenius_map(&x.residual_action())? == frobenius_map(&x)?.residual_action())
        })?);
    }
    Ok(checks)
}
