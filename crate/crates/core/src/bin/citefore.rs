//! Command-line front end for the citation-impact prediction pipeline.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use citefore::cli::{
    cmd_errors, cmd_fit, cmd_strata, cmd_summarize, cmd_synth, cmd_uncited, CommandOutput,
};
use citefore::config::{PartialConfig, RunConfig, SynthSection};
use citefore::error::Result;

const RESULT_COLUMNS: &str = "Result CSV columns:\n  subset,variant,t,n,b0,se0,p0,stars0,b1,se1,p1,stars1,b2,se2,p2,stars2,r2,bp_stat,bp_p,skip_reason\nSkipped fits leave the numeric cells empty and state the reason in skip_reason.";

#[derive(Parser)]
#[command(
    name = "citefore",
    version,
    about = "Predicts long-term citation impact from early citations and journal impact factor",
    after_help = "Exit codes: 0 success, 2 validation failure, 3 computation degeneracy.\nErrors print one machine-parsable line: error: kind=<kind> exit=<code> msg=<message>"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the impact model per subject category and citation window
    #[command(after_help = format!("{RESULT_COLUMNS}\n\nWrites results.csv, results.txt and baselines.csv\n(baselines.csv columns: year,sc,t,cbar,n_cited,ifbar,n_journals)."))]
    Fit(CommonArgs),
    /// Macro-area summary of a results CSV produced by fit
    #[command(
        after_help = "Input: results.csv from 'fit', restricted to one time window (use --t-min/--t-max to select it).\nWrites macro_summary.csv with columns:\n  variant,t,area,n_scs,n_if_significant,if_min,if_max,if_mean,if_sd,ec_min,ec_max,ec_mean,ec_sd,r2_mean,r2_sd\nIF statistics cover only SCs with IF p-value < 0.1; '-' marks an empty qualifying set, 'n.a.' a standard deviation over fewer than two values."
    )]
    Summarize(CommonArgs),
    /// IF-only regressions for publications uncited at each window
    #[command(after_help = format!("{RESULT_COLUMNS}\n\nRows: one ALL row per (variant, window) plus one row per SC whose uncited subset\nstrictly exceeds --uncited-threshold. b2 columns stay empty (no early-citation regressor).\nWrites uncited.csv and uncited.txt."))]
    Uncited(CommonArgs),
    /// Citedness-quantile regressions (Q1..Qq plus ALL) per window
    #[command(after_help = format!("{RESULT_COLUMNS}\n\nCited observations are split into --quantiles rank bins (default 4) per window;\nthe ALL row fits the entire observation set including uncited ones.\nWrites strata.csv and strata.txt."))]
    Strata(CommonArgs),
    /// Median relative prediction-error curves per citedness bin
    #[command(
        after_help = "Writes error_curves.csv with columns: variant,t,bin,n,median_E.\nbin is 1..q (1 = least cited) or ALL for the overall median; --quantiles overrides\nthe default bin count (10 for rescaled, 5 for log). For the log variant at windows\n0 and 1 only the ALL row is emitted."
    )]
    Errors(CommonArgs),
    /// Generate a deterministic synthetic corpus
    #[command(
        after_help = "Writes corpus.csv in the corpus schema:\n  pub_id,year,journal_id,if,sc,c0,c1,c2,c3,c4,c5,c6,c7,c8,c9\nPreset, SC count and size come from --preset/--n-scs/--n-pubs or the [synth] config section."
    )]
    Synth(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Input file (corpus CSV; for summarize: a results CSV from fit)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Model variant: rescaled, log or both
    #[arg(long)]
    variant: Option<String>,
    /// First citation time window
    #[arg(long)]
    t_min: Option<usize>,
    /// Last citation time window
    #[arg(long)]
    t_max: Option<usize>,
    /// Index of the long-term response window (default 9)
    #[arg(long)]
    long_window: Option<usize>,
    /// Keep only SCs with strictly more observations than this
    #[arg(long)]
    sc_threshold: Option<usize>,
    /// Minimum uncited-subset size (strict) for uncited regressions
    #[arg(long)]
    uncited_threshold: Option<usize>,
    /// Quantile count for strata/errors
    #[arg(long)]
    quantiles: Option<usize>,
    /// SC -> macro-area CSV (header: sc,macro_area); default: built-in approximate map
    #[arg(long)]
    area_map: Option<PathBuf>,
    /// Output directory (default: current directory)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for synthetic generation
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = automatic)
    #[arg(long)]
    workers: Option<usize>,
    /// Round numeric output to this many digits (default: full precision)
    #[arg(long)]
    digits: Option<usize>,
    /// Use the raw (unrescaled) IF regressor in the log variant
    #[arg(long)]
    log_x_raw: bool,
    /// TOML config file; command-line flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Synth preset: fast-peak or slow
    #[arg(long)]
    preset: Option<String>,
    /// Number of synthetic SCs
    #[arg(long)]
    n_scs: Option<usize>,
    /// Publications per synthetic SC
    #[arg(long)]
    n_pubs: Option<usize>,
    /// Publication year stamped on synthetic records
    #[arg(long)]
    year: Option<i32>,
}

impl CommonArgs {
    fn to_partial(&self) -> PartialConfig {
        let synth = if self.preset.is_some()
            || self.n_scs.is_some()
            || self.n_pubs.is_some()
            || self.year.is_some()
        {
            Some(SynthSection {
                preset: self.preset.clone(),
                n_scs: self.n_scs,
                n_pubs: self.n_pubs,
                year: self.year,
            })
        } else {
            None
        };
        PartialConfig {
            input: self.input.clone(),
            variant: self.variant.clone(),
            t_min: self.t_min,
            t_max: self.t_max,
            long_window: self.long_window,
            sc_threshold: self.sc_threshold,
            uncited_threshold: self.uncited_threshold,
            quantiles: self.quantiles,
            area_map: self.area_map.clone(),
            out: self.out.clone(),
            seed: self.seed,
            workers: self.workers,
            digits: self.digits,
            log_x_raw: if self.log_x_raw { Some(true) } else { None },
            synth,
        }
    }

    fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => PartialConfig::from_file(path)?,
            None => PartialConfig::default(),
        };
        RunConfig::resolve(self.to_partial().over(file))
    }
}

fn run(cli: &Cli) -> Result<CommandOutput> {
    match &cli.command {
        Command::Fit(args) => cmd_fit(&args.resolve()?),
        Command::Summarize(args) => cmd_summarize(&args.resolve()?),
        Command::Uncited(args) => cmd_uncited(&args.resolve()?),
        Command::Strata(args) => cmd_strata(&args.resolve()?),
        Command::Errors(args) => cmd_errors(&args.resolve()?),
        Command::Synth(args) => cmd_synth(&args.resolve()?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(output) => {
            println!("{}", output.summary);
            for f in &output.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: kind={} exit={} msg={e}", e.kind(), e.exit_code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
