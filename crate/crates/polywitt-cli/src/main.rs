//! `polywitt`: compute, serialize and verify polynomial Witt vectors.
//!
//! Exit codes: 0 success, 1 invariant failure, 2 usage or configuration,
//! 3 size cap exceeded.

mod expr;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use polywitt::cocycle::{check_identity, solve_cocycles, UniversalCocycle};
use polywitt::functor::vector_from_json;
use polywitt::orbits::{enumerate_aperiodic_necklaces, WordShape};
use polywitt::structure::{frobenius_map, multiply, pairing, tau, verschiebung, SubgroupWittElement};
use polywitt::verify::{run_suite, standard_field, SuiteConfig};
use polywitt::{BasedSpace, ErrorClass, FieldSpec, LinearMap, WittElement, WittScalar};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "polywitt", version, about = "Polynomial Witt vectors of based vector spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Characteristic (2, 3 or 5).
    #[arg(long)]
    p: Option<u32>,
    /// Field size p or p^2.
    #[arg(long)]
    q: Option<u32>,
    /// Modulus `c0,c1` of x^2 + c1 x + c0 for q = p^2 (default: least
    /// irreducible).
    #[arg(long)]
    modulus: Option<String>,
}

impl FieldArgs {
    fn field(&self) -> anyhow::Result<FieldSpec> {
        let f = match (self.q, &self.modulus) {
            (Some(q), Some(m)) => FieldSpec::from_q(q, Some(&parse_list(m)?))?,
            (Some(q), None) => standard_field(q)?,
            (None, Some(_)) => bail!(polywitt::Error::Input("--modulus needs --q".into())),
            (None, None) => FieldSpec::prime(self.p.unwrap_or(2))?,
        };
        if let Some(p) = self.p {
            if p != f.p() {
                bail!(polywitt::Error::Input(format!("--q {} is not a power of --p {p}", f.q())));
            }
        }
        Ok(f)
    }
}

#[derive(Args)]
struct Output {
    /// Write the JSON result here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an expression in W_n(F_q): integers, + - *, F(.), V(.),
    /// R(.) (restriction), T(c) (Teichmuller of the field element c).
    Classical {
        #[command(flatten)]
        field: FieldArgs,
        /// Length of integer literals.
        #[arg(long)]
        n: u32,
        expr: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// T(e) in W_m(E) for E = F_q^dim.
    Teichmuller {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        dim: u32,
        /// Coordinates of e, comma separated.
        #[arg(long)]
        vector: String,
        #[command(flatten)]
        output: Output,
    },
    /// Sum of two elements.
    Add {
        #[arg(long = "in", num_args = 2, required = true)]
        inputs: Vec<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Negative of an element.
    Neg {
        #[arg(long = "in")]
        input: String,
        #[command(flatten)]
        output: Output,
    },
    /// Product in W(M (x) N).
    Mul {
        #[arg(long = "in", num_args = 2, required = true)]
        inputs: Vec<String>,
        #[command(flatten)]
        output: Output,
    },
    /// W(f) for a matrix given row by row, `1,0;1,1`.
    Apply {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        matrix: String,
        #[command(flatten)]
        output: Output,
    },
    /// Restriction W_m -> W_l (default l = m - 1).
    Restrict {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        to: Option<u32>,
        #[command(flatten)]
        output: Output,
    },
    /// Verschiebung, from level n to level n - 1.
    #[command(name = "V", alias = "verschiebung")]
    Verschiebung {
        #[arg(long = "in")]
        input: String,
        #[command(flatten)]
        output: Output,
    },
    /// Frobenius, from level n to level n + 1.
    #[command(name = "F", alias = "frobenius")]
    Frobenius {
        #[arg(long = "in")]
        input: String,
        #[command(flatten)]
        output: Output,
    },
    /// tau: W(M (x) N) -> W(N (x) M), M the first `split` tensor factors.
    Tau {
        #[arg(long = "in")]
        input: String,
        #[arg(long, default_value_t = 1)]
        split: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Pairing of an element over E with one over the dual of E.
    Pair {
        #[arg(long = "in", num_args = 2, required = true)]
        inputs: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run an invariant suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        dim: Option<u32>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Necklaces of length p^i over b letters (aperiodic ones unless --all).
    Necklaces {
        #[arg(long)]
        b: u32,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Solve the universal addition cocycles c_1..c_depth.
    Cocycle {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        depth: u32,
        /// Directory for c_<i>.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the defining identity for cocycle files c_1..c_n.
    CocycleCheck {
        #[arg(long = "in", num_args = 1.., required = true)]
        inputs: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let class = e.chain().find_map(|c| c.downcast_ref::<polywitt::Error>()).map(|e| e.class());
            ExitCode::from(match class {
                Some(ErrorClass::Invariant) => 1,
                Some(ErrorClass::Cap) => 3,
                _ => 2,
            })
        }
    }
}

fn parse_list(s: &str) -> anyhow::Result<Vec<u32>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|_| anyhow!(polywitt::Error::Input(format!("not a number: {t:?}")))))
        .collect()
}

/// A path, or inline JSON when the argument starts with `{`.
fn read_json(arg: &str) -> anyhow::Result<Value> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?
    };
    serde_json::from_str(&text).map_err(|e| anyhow!(polywitt::Error::Input(format!("{arg}: {e}"))))
}

fn load(arg: &str) -> anyhow::Result<SubgroupWittElement> {
    let v = read_json(arg)?;
    Ok(if v.get("n").is_some() { SubgroupWittElement::from_json(&v)? } else { (&WittElement::from_json(&v)?).into() })
}

fn load_witt(arg: &str) -> anyhow::Result<WittElement> {
    let x = load(arg)?;
    Ok(x.to_witt()?)
}

fn element_json(x: &SubgroupWittElement) -> anyhow::Result<Value> {
    Ok(if x.n() == 0 { x.to_witt()?.to_json() } else { x.to_json() })
}

fn coords_text(field: &FieldSpec, coords: &[u32]) -> String {
    let parts: Vec<String> = coords
        .iter()
        .map(|&c| if field.d() == 1 { c.to_string() } else { format!("{:?}", field.coeffs(c)) })
        .collect();
    format!("({})", parts.join(", "))
}

fn table(x: &SubgroupWittElement) -> String {
    let labels = x.space().labels();
    let shape = x.shape();
    let mut s = format!("W^{}_{} over dim {} q={}", x.n(), x.m(), x.space().dim(), x.field().q());
    if x.is_zero() {
        s.push_str("\n  0");
    }
    for (nu, c) in x.class().components() {
        let word: Vec<&str> = shape.block_letters(&nu).iter().map(|&a| labels[a as usize].as_str()).collect();
        s.push_str(&format!("\n  ({}, [{}]) : {}", nu.i, word.join(" "), coords_text(&x.field(), &c.coords())));
    }
    s
}

fn write_out(path: &Path, v: &Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(x: &SubgroupWittElement, output: &Output) -> anyhow::Result<ExitCode> {
    let v = element_json(x)?;
    if let Some(path) = &output.out {
        write_out(path, &v)?;
    }
    match output.format {
        Format::Text => println!("{}", table(x)),
        Format::Json => println!("{}", serde_json::to_string_pretty(&v)?),
    }
    Ok(ExitCode::SUCCESS)
}

fn scalar_report(x: &WittScalar, format: Format) -> anyhow::Result<()> {
    let value = if x.field().is_prime_field() { Some(x.to_zpn()?) } else { None };
    match format {
        Format::Text => {
            println!("coords {}", coords_text(&x.field(), &x.coords()));
            if let Some(v) = value {
                println!("value {v}");
            }
        }
        Format::Json => {
            let mut v = x.to_json();
            if let Some(z) = value {
                v["value"] = json!(z);
            }
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
    }
    Ok(())
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Classical { field, n, expr, format } => {
            let value = expr::evaluate(field.field()?, n, &expr)?;
            scalar_report(&value, format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Teichmuller { field, m, dim, vector, output } => {
            let f = field.field()?;
            let space = BasedSpace::standard(f, dim);
            let e = vector_from_json(&f, &serde_json::from_str(&format!("[{vector}]")).map_err(|e| anyhow!(polywitt::Error::Input(e.to_string())))?)?;
            emit(&(&WittElement::teichmuller(&space, m, &e)?).into(), &output)
        }
        Command::Add { inputs, output } => emit(&load(&inputs[0])?.add(&load(&inputs[1])?)?, &output),
        Command::Neg { input, output } => emit(&load(&input)?.neg(), &output),
        Command::Mul { inputs, output } => emit(&multiply(&load(&inputs[0])?, &load(&inputs[1])?)?, &output),
        Command::Apply { input, matrix, output } => {
            let x = load_witt(&input)?;
            let f = x.field();
            let rows: Vec<Vec<u32>> = matrix.split(';').map(parse_list).collect::<anyhow::Result<_>>()?;
            let map = LinearMap::new(f, rows.clone(), x.space().dim())?;
            let target = BasedSpace::standard(f, rows.len() as u32);
            emit(&(&x.apply_map(&map, &target)?).into(), &output)
        }
        Command::Restrict { input, to, output } => {
            let x = load_witt(&input)?;
            let y = match to {
                Some(l) => x.restrict_to(l)?,
                None => x.restriction()?,
            };
            emit(&(&y).into(), &output)
        }
        Command::Verschiebung { input, output } => emit(&verschiebung(&load(&input)?)?, &output),
        Command::Frobenius { input, output } => emit(&frobenius_map(&load(&input)?)?, &output),
        Command::Tau { input, split, output } => emit(&(&tau(&load_witt(&input)?, split)?).into(), &output),
        Command::Pair { inputs, format } => {
            scalar_report(&pairing(&load(&inputs[0])?, &load(&inputs[1])?)?, format)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, p, q, m, dim, seed, cases, output } => {
            let cfg = SuiteConfig { suite, p, q, m, dim, seed, cases };
            let report = run_suite(&cfg)?;
            if let Some(path) = &output.out {
                write_out(path, &report.to_json())?;
            }
            match output.format {
                Format::Text => print!("{}", report.to_text()),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.to_json())?),
            }
            Ok(if report.failures() == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Necklaces { b, p, i, all, format } => {
            let shape = WordShape::new(p, b, i)?;
            let list = if all { shape.necklaces().to_vec() } else { enumerate_aperiodic_necklaces(b, p, i)? };
            let words: Vec<Vec<u32>> = list.iter().map(|nu| shape.letters(shape.expand(nu))).collect();
            match format {
                Format::Text => {
                    println!("{} necklaces of length {} over {b} letters", words.len(), shape.len());
                    for w in &words {
                        println!("  {}", w.iter().map(u32::to_string).collect::<Vec<_>>().join(""));
                    }
                }
                Format::Json => println!("{}", json!({"b": b, "p": p, "i": i, "count": words.len(), "necklaces": words})),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Cocycle { p, depth, out } => {
            let cs = solve_cocycles(p, depth)?;
            for c in &cs {
                println!("c_{}: {} terms", c.i(), c.terms().len());
                if let Some(dir) = &out {
                    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                    write_out(&dir.join(format!("c_{}.json", c.i())), &c.to_json())?;
                }
            }
            if out.is_none() {
                println!("{}", serde_json::to_string_pretty(&Value::Array(cs.iter().map(UniversalCocycle::to_json).collect()))?);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CocycleCheck { inputs } => {
            let cs: Vec<UniversalCocycle> =
                inputs.iter().map(|a| Ok(UniversalCocycle::from_json(&read_json(a)?)?)).collect::<anyhow::Result<_>>()?;
            let top = cs.iter().map(UniversalCocycle::i).max().unwrap_or(0);
            let mut ok = true;
            for n in 1..=top {
                let holds = check_identity(&cs, n)?;
                println!("{} level {n}", if holds { "ok  " } else { "FAIL" });
                ok &= holds;
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}
