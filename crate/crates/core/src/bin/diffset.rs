use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use diffset::driver::{
    compute, run_verify, search, write_rows, ComputeInputs, DensityRange, Objective, QList, Quantity,
    SearchConfig, Suite, VerifyConfig, DEFAULT_SAMPLES,
};

#[derive(Parser)]
#[command(
    name = "diffset",
    version,
    about = "Exact difference-set, covering and character-sum checks over Z_q"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and stream one JSON report per line.
    Verify {
        suite: Suite,
        /// Moduli, e.g. `11,13` or `2..100` (inclusive).
        #[arg(long)]
        q: Option<QList>,
        /// Enumerate every nonempty subset instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "DIFFSET_JOBS", default_value_t = 1)]
        jobs: usize,
        /// Density `d` or range `lo..hi` of sampled sets.
        #[arg(long)]
        density: Option<DensityRange>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        m: Option<f64>,
        /// Emit CSV instead of JSON lines.
        #[arg(long)]
        csv: bool,
        /// Record wall-clock time per instance in `runtime_ms`.
        #[arg(long)]
        timing: bool,
    },
    /// Compute one quantity and print it as a JSON object.
    Compute {
        quantity: Quantity,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long = "A")]
        a: Option<String>,
        #[arg(long = "B")]
        b: Option<String>,
        #[arg(long = "S")]
        s: Option<String>,
        /// `plus` or `times`.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        lam: Option<u64>,
        #[arg(long)]
        r: Option<u64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        m: Option<f64>,
        /// Frequencies, e.g. `1,2`.
        #[arg(long)]
        gamma: Option<String>,
        /// `product` or `squarediff`.
        #[arg(long)]
        form: Option<String>,
        /// `units` or `full`.
        #[arg(long)]
        mode: Option<String>,
    },
    /// Hill-climb for extremal instances.
    Search {
        objective: Objective,
        #[arg(long)]
        q: u64,
        /// Density of `A` for `max_covx`.
        #[arg(long)]
        alpha: Option<f64>,
        /// Density of `A` and `B` for `max_d`.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<bool, Box<dyn std::error::Error>> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Verify {
            suite,
            q,
            exhaustive,
            samples,
            seed,
            jobs,
            density,
            eps,
            m,
            csv,
            timing,
        } => {
            let cfg = VerifyConfig {
                suite,
                moduli: q.map(|q| q.0),
                exhaustive,
                samples,
                seed,
                jobs,
                density,
                epsilon: eps,
                m,
                timing,
            };
            let rows = run_verify(&cfg)?;
            write_rows(&rows, csv, &mut out)?;
            out.flush()?;
            Ok(rows.iter().all(|r| !r.report.failed()))
        }
        Command::Compute {
            quantity,
            q,
            a,
            b,
            s,
            kind,
            lam,
            r,
            eps,
            m,
            gamma,
            form,
            mode,
        } => {
            let inputs = ComputeInputs {
                q,
                a,
                b,
                s,
                kind,
                lambda: lam,
                r,
                epsilon: eps,
                m,
                gamma,
                form,
                mode,
            };
            writeln!(out, "{}", compute(quantity, &inputs)?)?;
            out.flush()?;
            Ok(true)
        }
        Command::Search {
            objective,
            q,
            alpha,
            beta,
            budget,
            seed,
        } => {
            let density = match objective {
                Objective::MaxCovx => alpha.or(beta),
                Objective::MaxD => beta.or(alpha),
            }
            .unwrap_or(0.25);
            let cfg = SearchConfig {
                objective,
                q,
                density,
                budget,
                seed,
            };
            writeln!(out, "{}", search(&cfg)?)?;
            out.flush()?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
