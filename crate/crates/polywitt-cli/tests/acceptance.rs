//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Each criterion runs the relevant verification suite, requires every
//! expected check to be present (so an empty grid cannot pass) and passing,
//! and enforces the time limit where one is stated.

use std::process::Command;
use std::time::{Duration, Instant};

use polywitt::verify::{run_suite, Check, Report, SuiteConfig};

struct Outcome {
    passed: bool,
    detail: String,
}

fn suite(name: &str) -> Report {
    run_suite(&SuiteConfig { suite: name.into(), ..SuiteConfig::default() }).expect("suite runs")
}

/// All checks of cases whose key ends with `key`.
fn checks<'a>(r: &'a Report, key: &str) -> Vec<&'a Check> {
    r.cases.iter().filter(|c| c.key.ends_with(key)).flat_map(|c| &c.checks).collect()
}

/// `(key, name prefix)` pairs that must be present and pass.  Returns the
/// number of checks matched.
fn require(r: &Report, wanted: &[(String, String)], errors: &mut Vec<String>) -> usize {
    let mut matched = 0;
    for (key, name) in wanted {
        let found: Vec<&Check> = checks(r, key).into_iter().filter(|c| c.name.starts_with(name.as_str())).collect();
        if found.is_empty() {
            errors.push(format!("missing {key} :: {name}"));
        }
        for c in found {
            matched += 1;
            if !c.passed {
                errors.push(format!("failed {key} :: {} ({})", c.name, c.detail));
            }
        }
    }
    matched
}

/// Sample count out of a "k/n mismatches" detail.
fn sample_count(c: &Check) -> Option<usize> {
    c.detail.split('/').nth(1)?.split(' ').next()?.parse().ok()
}

fn finish(errors: Vec<String>, matched: usize, elapsed: Duration, limit: Option<Duration>) -> Outcome {
    let mut errors = errors;
    if let Some(limit) = limit {
        if elapsed > limit {
            errors.push(format!("took {elapsed:.1?}, limit {limit:?}"));
        }
    }
    let passed = errors.is_empty();
    let mut detail = format!("{matched} checks in {elapsed:.2?}");
    if !passed {
        detail = format!("{detail}; {}", errors.iter().take(5).cloned().collect::<Vec<_>>().join("; "));
    }
    Outcome { passed, detail }
}

fn pairs(keys: impl IntoIterator<Item = String>, names: &[&str]) -> Vec<(String, String)> {
    keys.into_iter().flat_map(|k| names.iter().map(move |n| (k.clone(), n.to_string()))).collect()
}

/// `q=p m=.. dim=..` keys on the default grid, restricted to `dims` and the
/// given level bound per prime.
fn grid(ps: &[u32], dims: &[u32], max_m: impl Fn(u32) -> u32) -> Vec<String> {
    let mut out = Vec::new();
    for &p in ps {
        for m in 1..=max_m(p) {
            for &d in dims {
                out.push(format!("q={p} m={m} dim={d}"));
            }
        }
    }
    out
}

fn default_m(p: u32) -> u32 {
    if p == 2 {
        3
    } else {
        2
    }
}

fn scalar_oracle() -> Outcome {
    let t = Instant::now();
    let r = suite("scalars");
    let elapsed = t.elapsed();
    let mut errors = Vec::new();
    let mut keys = Vec::new();
    for p in [2u64, 3, 5] {
        for n in 1..=4u32 {
            keys.push(format!("q={p} n={n}"));
        }
    }
    let names = ["to_zpn = sum", "to_zpn(x + y)", "to_zpn(x y)", "to_zpn(x - y)", "V x = p x", "F V = p"];
    let matched = require(&r, &pairs(keys, &names), &mut errors);
    for p in [2u64, 3, 5] {
        for n in 1..=4u32 {
            let size = p.pow(n) as usize;
            let want = if size <= 81 { size * size } else { 1000 };
            for c in checks(&r, &format!("q={p} n={n}")).into_iter().filter(|c| c.name.starts_with("to_zpn(x")) {
                if sample_count(c) != Some(want) {
                    errors.push(format!("q={p} n={n} {}: {} samples, want {want}", c.name, c.detail));
                }
            }
        }
    }
    finish(errors, matched, elapsed, Some(Duration::from_secs(5)))
}

fn census() -> Outcome {
    let t = Instant::now();
    let r = suite("tate");
    let elapsed = t.elapsed();
    let mut wanted = Vec::new();
    for p in [2u32, 3] {
        for m in 1..=default_m(p) {
            for b in 1..=3 {
                wanted.push((format!("b={b} p={p} m={m}"), format!("length H^0(G_{m}, W_{m}[")));
                wanted.push((format!("b={b} p={p} m={m}"), format!("length H^0(G_{m}, W_{}[", m + 1)));
                wanted.push((format!("b={b} p={p} m={m}"), "module length".to_string()));
            }
        }
    }
    let mut errors = Vec::new();
    let matched = require(&r, &wanted, &mut errors);
    finish(errors, matched, elapsed, Some(Duration::from_secs(30)))
}

fn sampled(r: &Report, elapsed: Duration, keys: Vec<String>, names: &[&str], min_samples: usize) -> Outcome {
    let mut errors = Vec::new();
    let wanted = pairs(keys, names);
    let matched = require(r, &wanted, &mut errors);
    for (key, name) in &wanted {
        for c in checks(r, key).into_iter().filter(|c| c.name.starts_with(name.as_str())) {
            if sample_count(c).is_none_or(|n| n < min_samples) {
                errors.push(format!("{key} :: {} has {}, want at least {min_samples}", c.name, c.detail));
            }
        }
    }
    finish(errors, matched, elapsed, None)
}

fn main() {
    let mut outcomes: Vec<(u32, &str, Outcome)> = Vec::new();

    outcomes.push((1, "scalar oracle: to_zpn intertwines Witt and Z/p^n arithmetic", scalar_oracle()));
    outcomes.push((2, "Tate census: lengths equal sum (m-i) #aperiodic(b,i)", census()));

    let t = Instant::now();
    let functor = suite("functor");
    let elapsed = t.elapsed();
    let keys = grid(&[2, 3], &[1, 2, 3], default_m);
    outcomes.push((3, "W(f) independent of the lift of f", sampled(&functor, elapsed, keys.clone(), &["W(f) independent of the lift of f"], 200)));
    let mut laws = sampled(&functor, elapsed, keys.clone(), &["W(g f) = W(g) W(f)"], 100);
    let id = sampled(&functor, elapsed, keys, &["W(id) = id"], 1);
    if !id.passed {
        laws = Outcome { passed: false, detail: format!("{}; {}", laws.detail, id.detail) };
    }
    outcomes.push((4, "functor laws: W(id) = id and W(g f) = W(g) W(f)", laws));

    let t = Instant::now();
    let seq = suite("sequences");
    let seq_elapsed = t.elapsed();
    let elapsed = seq_elapsed;
    let short: Vec<String> = grid(&[2], &[1, 2], |_| 2).into_iter().map(|k| format!("{k} short")).collect();
    let names = [
        "l injective",
        "im l = ker R",
        "R surjective",
        "C injective",
        "im C = ker r",
        "r surjective",
        "length W_(m+1) = length W_m + dim C_(m)",
        "im C = ker tr",
        "im tr = ker R",
        "dim C_(m+1) = dim C_(m) + dim Phi_(m+1)",
        "dim Phi_(m+1) = #aperiodic",
    ];
    let mut errors = Vec::new();
    let matched = require(&seq, &pairs(short, &names), &mut errors);
    outcomes.push((5, "exact sequences for l, R and C, r", finish(errors, matched, elapsed, Some(Duration::from_secs(60)))));

    let t = Instant::now();
    let mackey = suite("mackey");
    let elapsed = t.elapsed();
    let mut wanted = Vec::new();
    for key in grid(&[2, 3], &[1, 2], default_m) {
        let m: u32 = key.split("m=").nth(1).unwrap().split(' ').next().unwrap().parse().unwrap();
        for n in 0..m {
            wanted.push((key.clone(), format!("V F = p on generators of level {n}")));
            wanted.push((key.clone(), format!("V F = p on random elements of level {n}")));
            if n + 1 < m {
                wanted.push((key.clone(), format!("F V = sum of residual rotations on generators of level {}", n + 1)));
                wanted.push((key.clone(), format!("F V = sum of residual rotations on random elements of level {}", n + 1)));
            }
        }
    }
    let mut errors = Vec::new();
    let matched = require(&mackey, &wanted, &mut errors);
    for (key, name) in &wanted {
        for c in checks(&mackey, key).into_iter().filter(|c| c.name.starts_with(name.as_str()) && name.contains("random")) {
            if sample_count(c) != Some(100) {
                errors.push(format!("{key} :: {} has {}", c.name, c.detail));
            }
        }
    }
    outcomes.push((6, "V F = p and F V = sum of rotations", finish(errors, matched, elapsed, None)));

    let t = Instant::now();
    let mult = suite("mult");
    let elapsed = t.elapsed();
    let names = [
        "mu(mu(x, y), z) = mu(x, mu(y, z))",
        "mu(1, x) = x = mu(x, 1)",
        "W(swap) mu(x, y) = mu(y, x)",
        "R mu = mu (R x R)",
        "mu(T e, T f) = T(e (x) f)",
    ];
    let mut out = sampled(&mult, elapsed, grid(&[2, 3], &[1, 2], default_m), &names, 100);
    let proj = sampled(&mult, elapsed, grid(&[2, 3], &[1, 2], |p| default_m(p).min(2)).into_iter().filter(|k| !k.contains("m=1")).collect(), &["mu(V a, b) = V mu(a, F b)"], 100);
    if !proj.passed {
        out = Outcome { passed: false, detail: format!("{}; {}", out.detail, proj.detail) };
    }
    outcomes.push((7, "multiplication: associative, unital, symmetric, R and T compatible, projection formula", out));

    let t = Instant::now();
    let pairing = suite("pairing");
    let elapsed = t.elapsed();
    let mut errors = Vec::new();
    let matched = require(&pairing, &pairs(grid(&[2], &[1, 2], |_| 3), &["Gram determinant is a unit"]), &mut errors);
    outcomes.push((8, "pairing perfect: Gram determinant a unit", finish(errors, matched, elapsed, None)));

    let t = Instant::now();
    let cocycle = suite("cocycle");
    let elapsed = t.elapsed();
    let mut wanted = Vec::new();
    for (p, depth) in [(2u32, 3u32), (3, 2)] {
        for n in 1..=depth {
            wanted.push((format!("identities p={p} depth={depth}"), format!("(s0 + s1)^(x)p^{n} expansion exact over Z")));
        }
    }
    let mut errors = Vec::new();
    let mut matched = require(&cocycle, &wanted, &mut errors);
    let defect_keys: Vec<String> = grid(&[2, 3], &[1, 2], default_m).into_iter().map(|k| format!("defect {k}")).collect();
    let names = ["T(a + b) - T(a) - T(b) = sum V^i T(c_i(a, b))", "c(a, b) = c(b, a)", "c(a, b) + c(a + b, d)"];
    let sub = sampled(&cocycle, elapsed, defect_keys, &names, 100);
    if !sub.passed {
        errors.push(sub.detail.clone());
    }
    matched += sub.detail.split(' ').next().and_then(|s| s.parse::<usize>().ok()).unwrap_or(0);
    outcomes.push((9, "addition cocycles: identities, defect agreement, symmetry, 2-cocycle", finish(errors, matched, elapsed, Some(Duration::from_secs(120)))));

    let t = Instant::now();
    let tau = suite("tau");
    let elapsed = t.elapsed();
    let names = ["hexagon", "unit laws", "tau T(e (x) f) = T(f (x) e)", "tau mu(x, y) = mu(y, x)", "tau_(M (x) N, L) mu(x, y) = mu(y, x)"];
    outcomes.push((10, "trace functor: hexagon, units, Teichmuller tensors, mu compatibility", sampled(&tau, elapsed, grid(&[2], &[1, 2], |_| 2), &names, 100)));

    let t = Instant::now();
    let filt = suite("filtrations");
    let elapsed = t.elapsed();
    let mut wanted = Vec::new();
    for p in [2u32, 3] {
        for m in 1..=default_m(p) {
            for b in 1..=3 {
                let key = format!("q={p} m={m} dim={b}");
                for j in 0..m {
                    wanted.push((key.clone(), format!("gr^{j} = C_({j})")));
                    wanted.push((key.clone(), format!("gr_{j} = C^({j})")));
                    for i in 0..m {
                        wanted.push((key.clone(), format!("dim gr^{j}_{i} = #aperiodic")));
                        wanted.push((key.clone(), format!("p F^{j}_{i} in F^{}_{}", j as i64 - 1, i + 1)));
                    }
                }
            }
        }
    }
    let mut errors = Vec::new();
    let matched = require(&filt, &wanted, &mut errors);
    outcomes.push((11, "filtration table: bigraded dimensions and p-action", finish(errors, matched, elapsed, None)));

    let mut wanted = Vec::new();
    for (m, n) in [(2u32, 1u32), (3, 1), (3, 2)] {
        for d in [1, 2] {
            let key = format!("q=2 m={m} dim={d} n={n} long");
            for name in ["ker V^n = im(sigma - 1)", "im V^n = ker R^(m-n)", "R^(m-n) surjective", "C^(m-n) injective", "im C^(m-n) = ker F^n", "im F^n = invariants"] {
                wanted.push((key.clone(), name.to_string()));
            }
        }
    }
    let mut errors = Vec::new();
    let matched = require(&seq, &wanted, &mut errors);
    outcomes.push((12, "V and R sequences exact", finish(errors, matched, seq_elapsed, None)));

    outcomes.push((13, "end to end: verify --suite all, exit 0, deterministic, time and memory", end_to_end()));

    let mut failed = 0;
    for (n, title, o) in &outcomes {
        println!("{} criterion {n:>2}: {title} [{}]", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn child_max_rss_kb() -> i64 {
    let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
    // SAFETY: getrusage writes into the struct we own.
    unsafe { libc::getrusage(libc::RUSAGE_CHILDREN, &mut usage) };
    usage.ru_maxrss
}

fn end_to_end() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_polywitt");
    let t = Instant::now();
    let mut errors = Vec::new();
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let out = Command::new(bin).args(["verify", "--suite", "all", "--seed", "1"]).output().expect("binary runs");
        if !out.status.success() {
            errors.push(format!("exit status {:?}", out.status.code()));
        }
        outputs.push(out.stdout);
    }
    let elapsed = t.elapsed() / 2;
    if outputs[0] != outputs[1] {
        errors.push("reruns differ".into());
    }
    let rss_mb = child_max_rss_kb() / 1024;
    if rss_mb >= 2048 {
        errors.push(format!("peak RSS {rss_mb} MB"));
    }
    let lines = String::from_utf8_lossy(&outputs[0]).lines().filter(|l| l.starts_with("ok") || l.starts_with("FAIL")).count();
    let mut o = finish(errors, lines, elapsed, Some(Duration::from_secs(300)));
    o.detail = format!("{} per run, peak RSS {rss_mb} MB", o.detail);
    o
}
