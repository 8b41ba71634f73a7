//! `qduality`: batch driver for the duality verification engine.
//!
//! Exit codes: 0 all checks passed, 1 some check failed, 2 invalid input.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use qduality_core::report::{all_ok, VerificationReport};
use qduality_core::runner::{self, RunConfig};
use qduality_core::FieldSpec;

#[derive(Parser, Debug)]
#[command(name = "qduality", version, about = "Exact verification of q-series duality identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check one (n, r, d, l) case with the checker for its level regime.
    Verify(CaseArgs),
    /// Check every case with n <= n_max, d <= d_max and -r <= l <= n - r.
    Sweep(SweepArgs),
    /// Compare residue assembly with the closed sums, optionally by quadrature.
    Residue(ResidueArgs),
    /// Check the n = 3 unity sum at degree d.
    Unity(UnityArgs),
    /// Check the level correspondence at every torus fixed point of Gr(r, n).
    Ifunction(CaseArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// Sample points per case.
    #[arg(long, env = "QDUALITY_TRIALS", default_value_t = 10)]
    trials: usize,
    /// rational, fp61 or fp:<prime>.
    #[arg(long, env = "QDUALITY_FIELD", default_value = "fp61")]
    field: FieldSpec,
    #[arg(long, env = "QDUALITY_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads: 1 runs sequentially, 0 uses every core.
    #[arg(long, env = "QDUALITY_JOBS", default_value_t = 0)]
    jobs: usize,
    /// Write the JSON reports (an array) to this path.
    #[arg(long, env = "QDUALITY_JSON")]
    json: Option<PathBuf>,
    /// Leave `elapsed_ms` out of the reports so reruns are byte-identical.
    #[arg(long, env = "QDUALITY_OMIT_TIMING")]
    omit_timing: bool,
}

#[derive(Args, Debug)]
struct CaseArgs {
    #[arg(long, env = "QDUALITY_N", default_value_t = 3)]
    n: usize,
    #[arg(long, env = "QDUALITY_R", default_value_t = 2)]
    r: usize,
    #[arg(long, env = "QDUALITY_D", default_value_t = 1)]
    d: u32,
    #[arg(long, env = "QDUALITY_L", default_value_t = 0, allow_negative_numbers = true)]
    l: i64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, env = "QDUALITY_N_MAX", default_value_t = 5)]
    n_max: usize,
    #[arg(long, env = "QDUALITY_D_MAX", default_value_t = 3)]
    d_max: u32,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ResidueArgs {
    #[command(flatten)]
    case: CaseArgs,
    /// Also integrate numerically over |w| = rho.
    #[arg(long, env = "QDUALITY_NUMERIC")]
    numeric: bool,
    /// Quadrature points per circle.
    #[arg(long, env = "QDUALITY_GRID", default_value_t = 512)]
    grid: usize,
}

#[derive(Args, Debug)]
struct UnityArgs {
    #[arg(long, env = "QDUALITY_D", default_value_t = 2)]
    d: u32,
    #[command(flatten)]
    common: Common,
}

fn base_config(c: &Common) -> RunConfig {
    RunConfig {
        trials: c.trials,
        field: c.field,
        seed: c.seed,
        jobs: c.jobs,
        timing: !c.omit_timing,
        ..RunConfig::default()
    }
}

fn case_config(a: &CaseArgs) -> RunConfig {
    RunConfig {
        n: a.n,
        r: a.r,
        d: a.d,
        l: a.l,
        ..base_config(&a.common)
    }
}

fn summary(command: &str, rep: &VerificationReport) -> String {
    let c = &rep.case;
    let mut line = format!(
        "{} {command} n={} r={} d={} l={} ({}) field={} passed {}/{}",
        if rep.ok() { "PASS" } else { "FAIL" },
        c.n,
        c.r,
        c.d,
        c.l,
        c.regime,
        rep.field,
        rep.passed,
        rep.trials
    );
    if let Some(num) = &rep.numeric {
        line.push_str(&format!(
            "; quadrature N={} rho={:.4} relative error {:.3e}",
            num.grid, num.rho, num.relative_error
        ));
    }
    line
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let (name, common, reports) = match &cli.command {
        Command::Verify(a) => ("verify", &a.common, vec![runner::run_verify(&case_config(a))?]),
        Command::Sweep(a) => {
            let cfg = RunConfig {
                n_max: a.n_max,
                d_max: a.d_max,
                ..base_config(&a.common)
            };
            ("sweep", &a.common, runner::run_sweep(&cfg)?)
        }
        Command::Residue(a) => {
            let cfg = RunConfig {
                numeric_grid: a.numeric.then_some(a.grid),
                ..case_config(&a.case)
            };
            ("residue", &a.case.common, vec![runner::run_residue(&cfg)?])
        }
        Command::Unity(a) => {
            let cfg = RunConfig {
                d: a.d,
                ..base_config(&a.common)
            };
            ("unity", &a.common, vec![runner::run_unity(&cfg)?])
        }
        Command::Ifunction(a) => ("ifunction", &a.common, vec![runner::run_ifunction(&case_config(a))?]),
    };
    for rep in &reports {
        println!("{}", summary(name, rep));
        for f in &rep.failures {
            let label = f.check.as_deref().map(|c| format!(" [{c}]")).unwrap_or_default();
            println!(
                "  witness{label}: q = {}, x = ({}); lhs = {}; rhs = {}",
                f.point.q,
                f.point.x.join(", "),
                f.lhs,
                f.rhs
            );
        }
    }
    if let Some(path) = &common.json {
        let text = serde_json::to_string_pretty(&reports)?;
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(all_ok(&reports))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
