use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pillai_fib::contfrac::expand;
use pillai_fib::pipeline::{
    run_proof, tau_source, verify_report_detailed, Config, FamilyOutcome, Pass, Prover,
};
use pillai_fib::realball::Round;
use pillai_fib::reduction::{Bounded, ReductionResult};
use pillai_fib::search::enumerate;
use pillai_fib::Error;

#[derive(Parser)]
#[command(
    name = "pillai-fib",
    version,
    about = "Certified classification of c = F_n - 2^m with two representations"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the whole proof and write the report
    Prove {
        /// working precision in bits (default: $PILLAI_PREC or 768)
        #[arg(long)]
        prec: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 400)]
        nmax: u32,
        #[arg(long, default_value_t = 300)]
        mmax: u32,
    },
    /// Exhaustive search on 2 ≤ n ≤ NMAX, 1 ≤ m ≤ MMAX
    Search {
        #[arg(long)]
        nmax: u32,
        #[arg(long)]
        mmax: u32,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run one reduction family and print its ε lower bounds
    Reduce {
        family: FamilyName,
        #[arg(long)]
        prec: Option<u32>,
    },
    /// Print partial quotients and convergent denominators of log α / log 2
    Cf {
        #[arg(long, default_value_t = 200)]
        depth: usize,
        #[arg(long)]
        prec: Option<u32>,
    },
    /// Recheck a report
    Verify {
        path: PathBuf,
        /// skip rerunning the reductions
        #[arg(long)]
        shallow: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Gamma,
    Gamma1,
    Gamma2,
    Gamma3,
}

fn config(prec: Option<u32>) -> pillai_fib::Result<Config> {
    let mut c = Config::from_env()?;
    if let Some(p) = prec {
        c.prec = p;
    }
    Ok(c)
}

fn exit_for(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config(_) => ExitCode::from(3),
        _ => ExitCode::from(2),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => exit_for(&e),
    }
}

fn lb(b: &Bounded) -> String {
    b.epsilon_lb.to_sci(6, Round::Floor)
}

fn print_family<I: std::fmt::Debug + PartialEq>(out: &FamilyOutcome<I>) {
    for (idx, r) in &out.family.records {
        match r {
            ReductionResult::Bounded(b) => {
                println!("{idx:?}\teps >= {}\tk_max = {}", lb(b), b.k_max)
            }
            ReductionResult::Degenerate { special, .. } => {
                println!("{idx:?}\tdegenerate {special:?}")
            }
        }
    }
    for (idx, f) in &out.fallbacks {
        println!(
            "fallback {idx:?} (s, t) = {:?}: bound {}",
            f.special, f.bound
        );
    }
    println!(
        "{}: k_max = {} at {:?}, min eps >= {} at {:?}, bound = {}",
        out.family.label,
        out.family.k_max,
        out.family.k_max_at,
        lb(out.family.min_epsilon()),
        out.family.min_epsilon_at,
        out.bound
    );
}

fn run(cmd: Cmd) -> pillai_fib::Result<ExitCode> {
    match cmd {
        Cmd::Prove {
            prec,
            out,
            nmax,
            mmax,
        } => {
            let mut c = config(prec)?;
            c.n_max = nmax;
            c.m_max = mmax;
            let report = run_proof(&c)?;
            for s in &report.stages {
                if let pillai_fib::pipeline::report::StageRecord::Reduction(r) = s {
                    println!(
                        "{:5} {:3} bounds {:7} ≤ {:4}  (k_max {}, min eps >= {})",
                        r.id, r.label, r.bounds, r.bound, r.k_max.k_max, r.min_epsilon.epsilon.mid
                    );
                }
            }
            println!("N0 = {}", report.constants.m);
            println!("{}", report.verdict);
            if let Some(path) = out {
                report.write(&path)?;
                println!("report written to {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Search { nmax, mmax, json } => {
            let t = enumerate(nmax, mmax);
            for (c, reps) in t.iter() {
                let rs: Vec<String> = reps
                    .iter()
                    .map(|r| format!("F_{} - 2^{}", r.n, r.m))
                    .collect();
                println!("{c:>6} = {}", rs.join(" = "));
            }
            if let Some(path) = json {
                std::fs::write(&path, serde_json::to_string_pretty(&t.to_json())? + "\n")?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Reduce { family, prec } => {
            let p = Prover::new(config(prec)?)?;
            let gn = p.gamma(Pass::GammaN)?;
            let gm = p.gamma(Pass::GammaM)?;
            match family {
                FamilyName::Gamma => {
                    println!(
                        "(A, B) = ({}, alpha): eps >= {}, n - n1 <= {}",
                        p.constants.gamma,
                        lb(&gn),
                        gn.k_max
                    );
                    println!(
                        "(A, B) = ({}, 2): eps >= {}, m - m1 <= {}",
                        p.constants.gamma1,
                        lb(&gm),
                        gm.k_max
                    );
                }
                FamilyName::Gamma1 => print_family(&p.gamma1(gn.k_max as u64)?),
                FamilyName::Gamma2 => print_family(&p.gamma2(gm.k_max as u64)?),
                FamilyName::Gamma3 => {
                    let s3 = p.gamma1(gn.k_max as u64)?;
                    let s4 = p.gamma2(gm.k_max as u64)?;
                    print_family(
                        &p.gamma3(gn.k_max.max(s4.bound) as u64, s3.bound.max(gm.k_max) as u64)?,
                    )
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Cf { depth, prec } => {
            let c = config(prec)?;
            let cf = expand(&tau_source, depth, c.prec)?;
            for (k, a) in cf.partial_quotients().iter().enumerate() {
                println!("{k}\t{a}\t{}", cf.q(k));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify { path, shallow } => {
            let fails = verify_report_detailed(&path, !shallow)?;
            if fails.is_empty() {
                println!("ok");
                Ok(ExitCode::SUCCESS)
            } else {
                for f in &fails {
                    println!("FAIL {f}");
                }
                Ok(ExitCode::from(2))
            }
        }
    }
}
