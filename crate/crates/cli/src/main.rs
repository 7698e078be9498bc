//! `drf`: build, verify and bound d-restriction objects.
//!
//! Exit codes: 0 ok, 1 property violated, 2 invalid input, 3 budget exhausted.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;

use drf_core::bounds::{self, BoundReport};
use drf_core::drf::{self, DrfDocument};
use drf_core::families;
use drf_core::gvcode;
use drf_core::hitter;
use drf_core::oracle;
use drf_core::verdict::{ConstraintBudget, Verdict, DEFAULT_BUDGET};
use drf_core::Error;

#[derive(Parser, Debug)]
#[command(name = "drf", version, about = "Deterministic d-restriction constructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an object and write it in DRF format.
    Construct {
        #[command(subcommand)]
        what: Construct,
    },
    /// Exhaustively check the property a DRF file claims.
    Verify {
        file: PathBuf,
        /// Maximum number of constraint-row checks.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Also run the independent brute-force checker and require agreement.
        #[arg(long)]
        oracle: bool,
    },
    /// Evaluate bound formulas.
    Bounds {
        #[command(subcommand)]
        what: Bounds,
    },
}

#[derive(Args, Debug)]
struct Output {
    /// Write the DRF document here; without it the document goes to stdout
    /// and the report to stderr.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Construct {
    /// Linear code with relative distance 1 - 1/h and at least n nonzero codewords.
    Code {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        h: u32,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Hitting set for difference products of degree at most d.
    Hitting {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        q: u32,
        /// Density: every constraint is hit by more than (1-eps)m rows.
        #[arg(long, value_parser = parse_ratio)]
        eps: Option<Ratio<u64>>,
        #[command(flatten)]
        out: Output,
    },
    /// Perfect hash family [n] -> [q] for d-subsets.
    Phf {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        d: usize,
        /// Build a (1-eps)-dense family.
        #[arg(long, value_parser = parse_ratio, conflicts_with = "small_d")]
        dense: Option<Ratio<u64>>,
        /// Compose with a greedy inner family when q <= d^2.
        #[arg(long)]
        small_d: bool,
        #[command(flatten)]
        out: Output,
    },
    /// (w,r) cover-free family.
    Cff {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        w: usize,
        #[arg(long)]
        r: usize,
        /// Alphabet multiplier c in q = next prime power >= c max(wr, w+r).
        #[arg(long, value_parser = parse_ratio, default_value = "2")]
        qmult: Ratio<u64>,
        #[command(flatten)]
        out: Output,
    },
    /// Separating hash family for classes of sizes ds.
    Shf {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u32,
        #[arg(long, value_parser = parse_list, value_delimiter = ',', required = true)]
        ds: Vec<u64>,
        /// Use exactly |ds| symbols (q is ignored).
        #[arg(long)]
        small_alphabet: bool,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand, Debug)]
enum Bounds {
    Phf {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: u64,
    },
    DensePhf {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: u64,
        #[arg(long, value_parser = parse_ratio)]
        eps: Ratio<u64>,
        #[arg(long)]
        n: Option<u64>,
    },
    Cff {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        w: u64,
        #[arg(long)]
        r: u64,
    },
    Shf {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, value_parser = parse_list, value_delimiter = ',', required = true)]
        ds: Vec<u64>,
    },
    /// q-ary entropy H_q(p).
    Entropy {
        #[arg(long)]
        q: u64,
        #[arg(long, value_parser = parse_ratio)]
        p: Ratio<u64>,
    },
    /// g(q,d) = (1 - 1/q)(1 - 2/q)...(1 - (d-1)/q).
    G {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: u64,
    },
}

fn parse_ratio(s: &str) -> Result<Ratio<u64>, String> {
    let (a, b) = s.split_once('/').unwrap_or((s, "1"));
    let a: u64 = a.parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let b: u64 = b.parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    if b == 0 {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Ratio::new(a, b))
}

fn parse_list(s: &str) -> Result<u64, String> {
    s.parse().map_err(|_| format!("expected a positive integer, found {s:?}"))
}

/// A failure and the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_budget() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

/// What a construction produced, before it is written out.
struct Built {
    doc: DrfDocument,
    size: usize,
    formula: Option<usize>,
    detail: String,
}

fn construct(what: Construct) -> Result<(Built, Output), Failure> {
    Ok(match what {
        Construct::Code { q, h, n, out } => {
            let params = gvcode::code_params(q, h, n)?;
            let (code, report) = gvcode::construct_code_traced(&params)?;
            let detail = format!(
                "q={q} h={h} k={} delta={} required_weight={}{}",
                code.params.k,
                code.params.delta,
                code.params.required_weight(),
                if report.forced_increase() {
                    format!(" forced_from={}", report.closed_form_m)
                } else {
                    String::new()
                }
            );
            let built = Built {
                size: code.params.m,
                formula: Some(report.closed_form_m),
                doc: DrfDocument::from_code(&code),
                detail,
            };
            (built, out)
        }
        Construct::Hitting { n, d, q, eps, out } => {
            let hs = match eps {
                Some(e) => hitter::build_dense_hitting(n, d, q, e)?,
                None => hitter::build_hitting(n, d, q)?,
            };
            let built = Built {
                size: hs.m(),
                formula: Some(hs.closed_form_m),
                detail: format!("h={} field={}", hs.h, hs.q()),
                doc: DrfDocument::from_hitting(&hs),
            };
            (built, out)
        }
        Construct::Phf {
            n,
            q,
            d,
            dense,
            small_d,
            out,
        } => {
            let f = match (dense, small_d) {
                (Some(e), _) => families::build_dense_phf(n, q, d, e)?,
                (None, true) => families::build_phf_small_d(n, q, d)?,
                (None, false) => families::build_phf(n, q, d)?,
            };
            let built = Built {
                size: f.size(),
                formula: f.closed_form_size,
                detail: format!("degree={} field={}", d * d.saturating_sub(1) / 2, f.field_order),
                doc: DrfDocument::from_phf(&f),
            };
            (built, out)
        }
        Construct::Cff { n, w, r, qmult, out } => {
            let f = families::build_cff(n, w, r, qmult)?;
            let built = Built {
                size: f.size(),
                formula: f.closed_form_size,
                detail: format!("field={}", f.field_order.unwrap_or(0)),
                doc: DrfDocument::from_cff(&f),
            };
            (built, out)
        }
        Construct::Shf {
            n,
            q,
            ds,
            small_alphabet,
            out,
        } => {
            let ds: Vec<usize> = ds.iter().map(|&d| d as usize).collect();
            let f = if small_alphabet {
                families::build_shf_small_alphabet(n, &ds, families::DEFAULT_COLORING_CAP)?
            } else {
                families::build_shf(n, q, &ds)?
            };
            let built = Built {
                size: f.size(),
                formula: f.closed_form_size,
                detail: format!("D1={} D2={} field={}", f.d1(), f.d2(), f.field_order.unwrap_or(0)),
                doc: DrfDocument::from_shf(&f),
            };
            (built, out)
        }
    })
}

fn run_construct(what: Construct) -> Result<(), Failure> {
    let (built, out) = construct(what)?;
    let text = built.doc.to_string();
    let mut report = format!("SIZE {}\n", built.size);
    match built.formula {
        Some(f) => report.push_str(&format!("FORMULA {f} {}\n", built.detail)),
        None => report.push_str(&format!("FORMULA n/a {}\n", built.detail)),
    }
    match out.output {
        Some(path) => {
            fs::write(&path, &text)?;
            print!("{report}");
        }
        None => {
            io::stdout().write_all(text.as_bytes())?;
            eprint!("{report}");
        }
    }
    Ok(())
}

fn run_verify(file: PathBuf, budget: u64, with_oracle: bool) -> Result<(), Failure> {
    let text = fs::read_to_string(&file)?;
    let doc = drf::parse(&text)?;
    let mut b = ConstraintBudget::new(budget);
    let verdict = drf::verify_document(&doc, &mut b)?;
    let mut failure = None;
    match &verdict {
        Verdict::Holds { checks } => println!("VERIFIED kind={} checks={checks}", doc.kind),
        Verdict::Violated { witness, checks } => {
            println!("VIOLATED kind={} checks={checks}", doc.kind);
            println!("WITNESS {witness}");
            failure = Some(Failure {
                code: 1,
                message: format!("{} property violated", doc.kind),
            });
        }
    }
    if with_oracle {
        let out = oracle::oracle_check_document(&doc, budget)?;
        println!(
            "ORACLE holds={} constraints={}{}",
            out.holds,
            out.constraints,
            out.counterexample.map(|c| format!(" counterexample={c}")).unwrap_or_default()
        );
        if out.holds != verdict.holds() && failure.is_none() {
            failure = Some(Failure {
                code: 1,
                message: "oracle disagrees with the verifier".into(),
            });
        }
    }
    failure.map_or(Ok(()), Err)
}

fn run_bounds(what: Bounds) -> Result<(), Failure> {
    let report: BoundReport = match what {
        Bounds::Phf { n, q, d } => bounds::phf_lower_bound(n, q, d),
        Bounds::DensePhf { q, d, eps, n } => bounds::dense_phf_report(q, d, eps, n),
        Bounds::Cff { n, w, r } => bounds::cff_bounds(n, w, r)?,
        Bounds::Shf { n, q, ds } => bounds::shf_report(n, q, &ds)?,
        Bounds::Entropy { q, p } => {
            let h = bounds::entropy_q(q, *p.numer() as f64 / *p.denom() as f64)?;
            println!("PARAMS q={q} p={p}");
            println!("BOUND entropy = {h:.6} [exact]");
            return Ok(());
        }
        Bounds::G { q, d } => {
            let g = bounds::g_factor(q, d);
            println!("PARAMS q={q} d={d}");
            println!("BOUND g = {g} [exact]");
            return Ok(());
        }
    };
    print!("{}", report.render());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct { what } => run_construct(what),
        Command::Verify {
            file,
            budget,
            oracle,
        } => run_verify(file, budget, oracle),
        Command::Bounds { what } => run_bounds(what),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let label = match f.code {
                1 => "violation",
                3 => "budget",
                _ => "error",
            };
            eprintln!("{label}: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
