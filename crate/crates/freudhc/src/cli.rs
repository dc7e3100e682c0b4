//! The `freudhc` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use freudhc_core::analysis::{NormOptions, ProbeKind, ProbeSpec};
use freudhc_core::WeightParams;

use crate::acceptance::{run_suite, Suite};
use crate::config::{parse_list, parse_usize_list, ExperimentConfig, Family, Grid, Lp, OutputConfig, Tolerances, WeightConfig};
use crate::corpus::Corpus;
use crate::error::{HarnessError, Result};
use crate::experiments::{
    approx_table, probe_table, quadrature_table, rates_from_table, recurrence_table, run_experiment, widths_table,
    ApproxRequest,
};
use crate::output::{write_file, Table};

#[derive(Debug, Parser)]
#[command(name = "freudhc", version, about = "Hyperbolic-cross approximation experiments for Freud weights")]
pub struct Cli {
    /// Upper bound on worker threads (default: all cores).
    #[arg(long, global = true, env = "FREUDHC_JOBS")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct WeightArgs {
    #[arg(long, env = "FREUDHC_LAMBDA")]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.5, env = "FREUDHC_A")]
    pub a: f64,
    #[arg(long, default_value_t = 0.0, env = "FREUDHC_B", allow_hyphen_values = true)]
    pub b: f64,
}

impl WeightArgs {
    fn config(&self, d: usize, r: u32, p: Lp, q: Lp) -> WeightConfig {
        WeightConfig { lambda: self.lambda, a: self.a, b: self.b, d, r, p, q }
    }

    fn univariate(&self) -> Result<WeightParams> {
        self.config(1, 1, Lp(freudhc_core::LpIndex::Finite(2.0)), Lp(freudhc_core::LpIndex::Finite(2.0))).params()
    }
}

fn lp_arg(s: &str) -> std::result::Result<Lp, String> {
    Lp::parse(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProbeKindArg {
    Bernstein,
    Nikolskii,
    LqLpSum,
}

impl From<ProbeKindArg> for ProbeKind {
    fn from(k: ProbeKindArg) -> Self {
        match k {
            ProbeKindArg::Bernstein => ProbeKind::Bernstein,
            ProbeKindArg::Nikolskii => ProbeKind::Nikolskii,
            ProbeKindArg::LqLpSum => ProbeKind::LqLpSum,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recurrence coefficients `beta_k` of the orthonormal polynomials.
    Recurrence {
        #[command(flatten)]
        weight: WeightArgs,
        /// Highest index `N`.
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nodes and weights of the `n`-point Gauss rule for `w^2 dx`.
    Quadrature {
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Approximation errors over the corpus for a grid of `xi`.
    Approx {
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, default_value_t = 1, env = "FREUDHC_D")]
        dim: usize,
        #[arg(long, default_value_t = 1, env = "FREUDHC_R")]
        r: u32,
        #[arg(long, default_value = "2", value_parser = lp_arg, env = "FREUDHC_P")]
        p: Lp,
        #[arg(long, default_value = "2", value_parser = lp_arg, env = "FREUDHC_Q")]
        q: Lp,
        #[arg(long, value_enum)]
        family: Family,
        /// `2..10`, `1,2,5` or `8,16,...,256`.
        #[arg(long, conflicts_with = "n_list", required_unless_present = "n_list")]
        xi_list: Option<String>,
        /// Target ranks; each becomes the largest `xi` with rank at most `n`.
        #[arg(long)]
        n_list: Option<String>,
        /// Corpus JSON (default: the built-in corpus).
        #[arg(long, env = "FREUDHC_CORPUS")]
        corpus: Option<PathBuf>,
        /// Comma-separated function ids.
        #[arg(long, value_delimiter = ',')]
        functions: Option<Vec<String>>,
        #[arg(long, default_value_t = 0, env = "FREUDHC_SEED")]
        seed: u64,
        /// Record wall-clock time per row.
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fits `e ~ n^alpha (ln n)^gamma` to an `approx` CSV and prints JSON.
    Rates {
        input: PathBuf,
        #[arg(long)]
        function: Option<String>,
        /// Ignore rows whose abscissa is below this.
        #[arg(long, default_value_t = 1.0)]
        min_n: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact Kolmogorov widths of the coefficient ellipsoid.
    Widths {
        #[arg(long, env = "FREUDHC_D")]
        dim: usize,
        #[arg(long)]
        r_lambda: f64,
        #[arg(long)]
        n_max: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Observed constants of the Bernstein and Nikolskii inequalities.
    Probe {
        #[arg(long, value_enum)]
        kind: ProbeKindArg,
        #[command(flatten)]
        weight: WeightArgs,
        /// Dimension (used by `lq-lp-sum`).
        #[arg(long, default_value_t = 1, env = "FREUDHC_D")]
        dim: usize,
        #[arg(long, default_value = "2", value_parser = lp_arg)]
        p: Lp,
        #[arg(long, default_value = "inf", value_parser = lp_arg)]
        q: Lp,
        #[arg(long, default_value = "8,16,...,256")]
        degrees: String,
        #[arg(long, default_value_t = 16)]
        trials: usize,
        #[arg(long, default_value_t = 0, env = "FREUDHC_SEED")]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs an experiment config and/or an acceptance suite.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config's output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Acceptance suite JSON; exit 1 if any criterion fails.
        #[arg(long)]
        check: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    let jobs = cli.jobs;
    if jobs == Some(0) {
        return Err(HarnessError::config("--jobs must be at least 1"));
    }
    match cli.command {
        Command::Recurrence { weight, n, out } => recurrence_table(&weight.univariate()?, n)?.emit(out.as_deref()),
        Command::Quadrature { weight, n, out } => quadrature_table(&weight.univariate()?, n)?.emit(out.as_deref()),
        Command::Approx { weight, dim, r, p, q, family, xi_list, n_list, corpus, functions, seed, timing, out } => {
            let grid = match (xi_list, n_list) {
                (Some(x), _) => Grid::Xi(parse_list(&x)?),
                (None, Some(n)) => Grid::N(parse_usize_list(&n)?.into_iter().map(|v| v as u64).collect()),
                (None, None) => return Err(HarnessError::config("give --xi-list or --n-list")),
            };
            let cfg = ExperimentConfig {
                weight: weight.config(dim, r, p, q),
                family,
                grid,
                corpus,
                functions,
                seed,
                output: OutputConfig::default(),
                tolerances: Tolerances::default(),
                timing,
            };
            let req = ApproxRequest::from_config(&cfg, jobs)?;
            let corpus = Corpus::load(cfg.corpus.as_deref(), cfg.seed)?;
            approx_table(&req, &corpus, Some(&cfg.header_json()))?.emit(out.as_deref())
        }
        Command::Rates { input, function, min_n, out } => {
            let table = Table::read(&input)?;
            let reports = rates_from_table(&table, function.as_deref(), min_n)?;
            let mut text = if reports.len() == 1 {
                serde_json::to_string_pretty(&reports[0])
            } else {
                serde_json::to_string_pretty(&reports)
            }
            .expect("reports serialize");
            text.push('\n');
            emit_text(out, &text)
        }
        Command::Widths { dim, r_lambda, n_max, out } => widths_table(dim, r_lambda, n_max)?.emit(out.as_deref()),
        Command::Probe { kind, weight, dim, p, q, degrees, trials, seed, out } => {
            let params = weight.config(dim, 1, p, q).params()?;
            let spec = ProbeSpec { kind: kind.into(), p: p.0, q: q.0, degrees: parse_usize_list(&degrees)?, trials, seed };
            probe_table(&params, &spec, &NormOptions::default())?.emit(out.as_deref())
        }
        Command::Run { config, out_dir, check } => {
            if config.is_none() && check.is_none() {
                return Err(HarnessError::config("run needs --config and/or --check"));
            }
            if let Some(path) = config {
                let mut cfg = ExperimentConfig::load(&path)?;
                cfg.apply_overrides(|k| std::env::var(k).ok())?;
                let art = run_experiment(&cfg, out_dir.as_deref(), jobs)?;
                println!("wrote {}", art.approx_csv.display());
                println!("wrote {}", art.rates_json.display());
            }
            if let Some(path) = check {
                let suite = Suite::load(&path)?;
                let outcomes = run_suite(&suite, |o| {
                    println!("{}", o.line());
                    let _ = std::io::stdout().flush();
                });
                let failed = outcomes.iter().filter(|o| !o.passed).count();
                if failed > 0 {
                    return Err(HarnessError::CheckFailed { failed, total: outcomes.len() });
                }
            }
            Ok(())
        }
    }
}

fn emit_text(out: Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_file(&p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
