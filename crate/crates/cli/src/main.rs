use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use treentropy_cli::acceptance::{self, Options};
use treentropy_cli::config::*;
use treentropy_cli::experiments::{execute, parse_exponent};
use treentropy_cli::output::{output_dir, write_run, Timing};
use treentropy_core::asymptotics::{envelope, EnvelopeParams};
use treentropy_core::entropy::norm_upper_bound;
use treentropy_core::partition::{partition_balanced, partition_to_text, verify_partition_lemma};
use treentropy_core::slow::SlowFactor;
use treentropy_core::sumop::{norm_estimate, norm_exact, SummationOperator, DEFAULT_RESTARTS};
use treentropy_core::tree::{verify_hset_condition, HSetProfile, RootedTree};
use treentropy_core::{Error, Exponent};

const EXIT_PASS: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_FAIL: u8 = 2;

#[derive(Parser)]
#[command(name = "treentropy", version, about = "Entropy numbers of weighted summation operators on trees")]
struct Cli {
    /// Worker threads for independent experiment cells.
    #[arg(long, global = true, default_value_t = default_jobs())]
    jobs: usize,
    /// Overrides the seed of the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config.
    Run { config: PathBuf },
    /// Run the acceptance criteria: `all`, or names/numbers separated by commas.
    Acceptance {
        #[arg(default_value = "all")]
        suite: String,
        /// Band for the schutt-band criterion.
        #[arg(long, default_value_t = 16.0)]
        schutt_band: f64,
    },
    #[command(subcommand)]
    Tree(TreeCommand),
    #[command(subcommand)]
    Sumop(SumopCommand),
    #[command(subcommand)]
    Envelope(EnvelopeCommand),
    #[command(subcommand)]
    Entropy(EntropyCommand),
}

#[derive(Args, Clone)]
struct ProfileArgs {
    #[arg(long)]
    theta: f64,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    /// Exponent of `tau = log(. + 2)^nu`.
    #[arg(long, default_value_t = 0.0)]
    nu: f64,
    #[arg(long, default_value_t = 1)]
    m_star: usize,
    #[arg(long, default_value_t = 2.0)]
    c_star: f64,
    #[arg(long, default_value_t = 0.25)]
    t_floor: f64,
}

impl ProfileArgs {
    fn profile(&self) -> Result<HSetProfile> {
        Ok(HSetProfile::new(
            self.theta,
            self.gamma,
            SlowFactor::log_power(self.nu),
            self.m_star,
            self.c_star,
            self.t_floor,
        )?)
    }
}

#[derive(Subcommand)]
enum TreeCommand {
    /// Generate an h-set tree and check its branching condition.
    Gen {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 4096)]
        sample: usize,
    },
    /// Check the branching condition of a tree given as a parent list.
    Verify {
        tree: PathBuf,
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long, default_value_t = 4096)]
        sample: usize,
    },
    /// Balanced partition of a tree; weights default to one per vertex.
    Partition {
        tree: PathBuf,
        #[arg(long)]
        n: usize,
        /// Whitespace-separated vertex weights.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SumopCommand {
    /// Norms of a summation operator given as a dump file.
    Norm {
        dump: PathBuf,
        #[arg(long, value_parser = parse_exponent)]
        p: Exponent,
        #[arg(long, value_parser = parse_exponent)]
        q: Exponent,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
    },
    /// Band experiment from a JSON file holding the cj-band parameter block.
    Band { params: PathBuf },
}

#[derive(Subcommand)]
enum EnvelopeCommand {
    /// Evaluate an envelope from a JSON parameter file at the given n.
    Eval {
        params: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        n: Vec<f64>,
    },
}

#[derive(Subcommand)]
enum EntropyCommand {
    /// Entropy brackets of a small explicit operator.
    Oracle {
        /// Identity of this dimension.
        #[arg(long, conflicts_with = "rows")]
        identity: Option<usize>,
        /// Rows separated by `;`, entries by `,`.
        #[arg(long)]
        rows: Option<String>,
        #[arg(long, value_parser = parse_exponent)]
        p: Exponent,
        #[arg(long, value_parser = parse_exponent)]
        q: Exponent,
        #[arg(long, default_value_t = 1)]
        k_min: usize,
        #[arg(long)]
        k_max: usize,
        #[arg(long, default_value_t = 0.05)]
        mesh: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(true) => ExitCode::from(EXIT_PASS),
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

/// Runs a configuration and writes its artifacts.
fn run_config(cli: &Cli, mut config: ExperimentConfig) -> Result<bool> {
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    let started = SystemTime::now();
    let clock = Instant::now();
    let outcome = execute(&config, cli.jobs)?;
    let timing = Timing {
        started,
        elapsed: clock.elapsed(),
    };
    let dir = output_dir(cli.out.as_deref(), &config);
    write_run(&dir, &config, &outcome, cli.jobs, timing)?;
    println!(
        "{} {}: {} ({})",
        if outcome.pass { "PASS" } else { "FAIL" },
        outcome.kind,
        outcome.summary,
        dir.display()
    );
    Ok(outcome.pass)
}

fn dispatch(cli: Cli) -> Result<bool> {
    match &cli.command {
        Command::Run { config } => {
            let config = ExperimentConfig::load(config)?;
            run_config(&cli, config)
        }
        Command::Acceptance { suite, schutt_band } => {
            let opts = Options {
                jobs: cli.jobs,
                schutt_band: *schutt_band,
            };
            let report = acceptance::run_suite(suite, &opts)?;
            if let Some(w) = &report.warning {
                eprintln!("warning: {w}");
            }
            for r in &report.reports {
                println!("{}", r.line());
            }
            let passed = report.reports.iter().filter(|r| r.pass).count();
            println!("{passed}/{} criteria passed", report.reports.len());
            Ok(report.pass())
        }
        Command::Tree(TreeCommand::Gen { profile, depth, sample }) => {
            let config = ExperimentConfig::new(
                0,
                Experiment::TreeGen(TreeGenParams {
                    profile: profile.profile()?,
                    depth: *depth,
                    sample: *sample,
                }),
            );
            run_config(&cli, config)
        }
        Command::Tree(TreeCommand::Verify { tree, profile, sample }) => {
            let t = RootedTree::parse(&read(tree)?)?;
            let report = verify_hset_condition(&t, &profile.profile()?, *sample)?;
            print_json(&json!({ "vertices": t.len(), "depth": t.depth(), "condition": report }))?;
            Ok(report.pass)
        }
        Command::Tree(TreeCommand::Partition { tree, n, weights }) => {
            let t = RootedTree::parse(&read(tree)?)?;
            let phi = match weights {
                Some(w) => read(w)?
                    .split_whitespace()
                    .map(|s| s.parse::<f64>().with_context(|| format!("weight {s:?}")))
                    .collect::<Result<Vec<_>>>()?,
                None => vec![1.0; t.len()],
            };
            let r = partition_balanced(&t, &phi, *n)?;
            let check = verify_partition_lemma(&t, &r.parts, &phi, *n, t.max_branching().max(1));
            if let Some(dir) = &cli.out {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("partition.txt"), partition_to_text(&r.part_of))?;
            }
            print_json(&json!({
                "parts_count": r.parts_count,
                "max_nonsingleton_phi": r.max_nonsingleton_phi,
                "phi_total": r.phi_total,
                "check": check,
            }))?;
            Ok(check.pass)
        }
        Command::Sumop(SumopCommand::Norm { dump, p, q, restarts }) => {
            let s = SummationOperator::parse_dump(&read(dump)?, *p, *q)?;
            let exact = match norm_exact(&s) {
                Ok(x) => Some(x),
                Err(Error::UnsupportedRegime(_)) => None,
                Err(e) => return Err(e.into()),
            };
            let estimate = norm_estimate(&s, *restarts, cli.seed.unwrap_or(0));
            let upper = norm_upper_bound(&s.to_matrix()?);
            print_json(&json!({
                "p": p,
                "q": q,
                "exact": exact,
                "estimate": estimate.value,
                "upper_bound": upper,
            }))?;
            Ok(estimate.value <= upper * (1.0 + 1e-12))
        }
        Command::Sumop(SumopCommand::Band { params }) => {
            let block: CjBandParams =
                serde_json::from_str(&read(params)?).context("invalid cj-band parameter block")?;
            run_config(&cli, ExperimentConfig::new(0, Experiment::CjBand(block)))
        }
        Command::Envelope(EnvelopeCommand::Eval { params, n }) => {
            let params: EnvelopeParams =
                serde_json::from_str(&read(params)?).context("invalid envelope parameters")?;
            let values = n
                .iter()
                .map(|&n| envelope(&params, n).map(|v| json!({ "n": n, "value": v })))
                .collect::<treentropy_core::Result<Vec<_>>>()?;
            print_json(&serde_json::Value::Array(values))?;
            Ok(true)
        }
        Command::Entropy(EntropyCommand::Oracle {
            identity,
            rows,
            p,
            q,
            k_min,
            k_max,
            mesh,
        }) => {
            let operator = match (identity, rows) {
                (Some(nu), None) => OperatorSpec::Identity(*nu),
                (None, Some(r)) => OperatorSpec::Rows(parse_rows(r)?),
                _ => bail!("give exactly one of --identity and --rows"),
            };
            let config = ExperimentConfig::new(
                0,
                Experiment::EntropyOracle(EntropyOracleParams {
                    operator,
                    p: *p,
                    q: *q,
                    k_min: *k_min,
                    k_max: *k_max,
                    mesh: *mesh,
                    expected: None,
                    max_width: None,
                }),
            );
            run_config(&cli, config)
        }
    }
}

fn parse_rows(s: &str) -> Result<Vec<Vec<f64>>> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<f64>().with_context(|| format!("matrix entry {x:?}")))
                .collect()
        })
        .collect()
}
