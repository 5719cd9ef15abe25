//! Command implementations behind the `citefore` binary. Each command
//! takes a resolved configuration, writes its report files into the
//! output directory and returns the written paths plus a one-line
//! summary. All outputs are deterministic for fixed inputs and seed.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::analysis::{
    assign_citedness_quantiles, default_error_bins, median_error_curves, run_sc_sweep,
    sort_results, stratified_regressions, summarize_macro_areas, uncited_regression, AreaMap,
    ErrorSummary, FitResult, MacroAreaSummary, ModelContext,
};
use crate::config::{with_pool, RunConfig};
use crate::corpus::{
    expand_by_sc, filter_sc_min_count, group_by_sc, parse_publications, write_publications,
    IngestReport, Observation, Publication,
};
use crate::error::{Error, Result};
use crate::report::{
    inference_metadata, read_results_csv, render_macro_text, render_results_text,
    write_baselines_csv, write_error_curves_csv, write_macro_csv, write_results_csv, Metadata,
};
use crate::transforms::{compute_baselines, BaselineTable, IfScaling, Variant};

/// Default macro-area mapping shipped with the tool; approximate and
/// meant for quick looks only.
pub const DEFAULT_AREA_MAP: &str = include_str!("../assets/macro_areas_default.csv");

/// Text-rendering precision when `--digits` is not given.
const TEXT_DIGITS: usize = 3;

#[derive(Debug)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

struct Ingested {
    corpus: Vec<Publication>,
    obs: Vec<Observation>,
    table: BaselineTable,
    report: IngestReport,
}

fn read_input(cfg: &RunConfig) -> Result<Ingested> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::Config("--input is required for this command".into()))?;
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let (corpus, report) = parse_publications(std::io::BufReader::new(file))?;
    let obs = expand_by_sc(&corpus);
    let table = compute_baselines(&corpus, &obs);
    Ok(Ingested {
        corpus,
        obs,
        table,
        report,
    })
}

fn model_context<'a>(cfg: &RunConfig, ing: &'a Ingested) -> ModelContext<'a> {
    ModelContext {
        corpus: &ing.corpus,
        table: &ing.table,
        long_window: cfg.long_window,
        if_scaling: if cfg.log_x_raw {
            IfScaling::Raw
        } else {
            IfScaling::Rescaled
        },
    }
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

fn base_metadata(cfg: &RunConfig, command: &str) -> Metadata {
    let mut meta = Metadata::new(command, &cfg.hash());
    meta.push("variant", {
        let labels: Vec<&str> = cfg
            .variant_selection
            .variants()
            .iter()
            .map(|v| v.label())
            .collect();
        labels.join("+")
    });
    meta.push("t_range", format!("{}..{}", cfg.t_min, cfg.t_max));
    meta.push("long_window", cfg.long_window);
    meta
}

fn ingest_metadata(meta: &mut Metadata, ing: &Ingested) {
    meta.push("publications", ing.report.publications);
    meta.push("observations", ing.obs.len());
    meta.push("missing_impact_factor", ing.report.missing_impact_factor);
    meta.push(
        "ifbar_scope",
        "distinct journals present in the corpus cell (year, SC)",
    );
}

/// `fit`: per-SC regression sweep over both variants and all windows.
pub fn cmd_fit(cfg: &RunConfig) -> Result<CommandOutput> {
    let ing = read_input(cfg)?;
    let groups = filter_sc_min_count(&ing.corpus, &ing.obs, cfg.sc_threshold);
    let all_groups = group_by_sc(&ing.corpus, &ing.obs);
    let ctx = model_context(cfg, &ing);
    let variants = cfg.variant_selection.variants();

    let mut results: Vec<FitResult> = Vec::new();
    for &variant in &variants {
        for (sc, obs) in &all_groups {
            if !groups.contains_key(sc) {
                results.push(FitResult::skipped(
                    sc.clone(),
                    variant,
                    None,
                    obs.len(),
                    format!(
                        "below SC threshold (n={} <= {})",
                        obs.len(),
                        cfg.sc_threshold
                    ),
                ));
            }
        }
    }
    let fitted: Vec<Vec<FitResult>> = with_pool(cfg.workers, || {
        variants
            .iter()
            .map(|&variant| run_sc_sweep(&ctx, &groups, variant, cfg.t_min..=cfg.t_max))
            .collect()
    })?;
    results.extend(fitted.into_iter().flatten());
    sort_results(&mut results);

    let mut meta = base_metadata(cfg, "fit");
    meta.push("sc_threshold", cfg.sc_threshold);
    meta.push(
        "if_scaling",
        if cfg.log_x_raw {
            "raw (log variant)"
        } else {
            "rescaled"
        },
    );
    inference_metadata(&mut meta);
    ingest_metadata(&mut meta, &ing);
    meta.push("scs_fitted", groups.len());
    meta.push("scs_below_threshold", all_groups.len() - groups.len());

    let mut csv_buf = Vec::new();
    write_results_csv(&mut csv_buf, &results, &meta, cfg.digits)?;
    let text = render_results_text(&results, cfg.digits.unwrap_or(TEXT_DIGITS));
    let mut baselines_buf = Vec::new();
    write_baselines_csv(&mut baselines_buf, &ing.table, &meta, cfg.digits)?;

    let files = vec![
        write_file(&cfg.out_dir, "results.csv", &csv_buf)?,
        write_file(&cfg.out_dir, "results.txt", text.as_bytes())?,
        write_file(&cfg.out_dir, "baselines.csv", &baselines_buf)?,
    ];
    let summary = format!(
        "fit: {} publications, {} observations ({} without IF), {} SCs fitted, {} below threshold, {} result rows",
        ing.report.publications,
        ing.obs.len(),
        ing.report.missing_impact_factor,
        groups.len(),
        all_groups.len() - groups.len(),
        results.len()
    );
    Ok(CommandOutput { files, summary })
}

/// `summarize`: macro-area statistics over a results CSV from `fit`.
pub fn cmd_summarize(cfg: &RunConfig) -> Result<CommandOutput> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::Config("--input must name a results CSV from 'fit'".into()))?;
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let results = read_results_csv(std::io::BufReader::new(file))?;

    let in_range: Vec<FitResult> = results
        .into_iter()
        .filter(|r| {
            r.stats.is_some()
                && r.t
                    .map(|t| t >= cfg.t_min && t <= cfg.t_max)
                    .unwrap_or(false)
        })
        .collect();
    if in_range.is_empty() {
        return Err(Error::Validation(
            "no fitted rows in the selected time-window range".into(),
        ));
    }
    let first_t = in_range[0].t;
    if in_range.iter().any(|r| r.t != first_t) {
        return Err(Error::MixedWindows);
    }

    let area_map = match &cfg.area_map {
        Some(p) => {
            let file = fs::File::open(p).map_err(|source| Error::Io {
                path: p.display().to_string(),
                source,
            })?;
            AreaMap::from_reader(std::io::BufReader::new(file))?
        }
        None => AreaMap::from_reader(DEFAULT_AREA_MAP.as_bytes())?,
    };

    let mut by_variant: BTreeMap<Variant, Vec<FitResult>> = BTreeMap::new();
    for r in in_range {
        by_variant.entry(r.variant).or_default().push(r);
    }
    let mut rows: Vec<MacroAreaSummary> = Vec::new();
    for fits in by_variant.values() {
        rows.extend(summarize_macro_areas(fits, &area_map)?);
    }

    let mut meta = base_metadata(cfg, "summarize");
    meta.push(
        "area_map",
        cfg.area_map
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "built-in default (approximate)".into()),
    );
    meta.push("if_filter", "SCs with IF coefficient p-value < 0.1");
    meta.push("sd_unavailable_marker", "n.a. (fewer than two qualifying SCs)");

    let mut csv_buf = Vec::new();
    write_macro_csv(&mut csv_buf, &rows, &meta, cfg.digits)?;
    let text = render_macro_text(&rows, cfg.digits.unwrap_or(TEXT_DIGITS));
    let files = vec![
        write_file(&cfg.out_dir, "macro_summary.csv", &csv_buf)?,
        write_file(&cfg.out_dir, "macro_summary.txt", text.as_bytes())?,
    ];
    let summary = format!("summarize: {} macro-area rows at t={}", rows.len(), first_t.unwrap());
    Ok(CommandOutput { files, summary })
}

/// `uncited`: IF-only regressions for publications uncited at each
/// window, pooled (ALL) and per SC.
pub fn cmd_uncited(cfg: &RunConfig) -> Result<CommandOutput> {
    let ing = read_input(cfg)?;
    let ctx = model_context(cfg, &ing);
    let groups = group_by_sc(&ing.corpus, &ing.obs);
    let variants = cfg.variant_selection.variants();

    let mut tasks: Vec<(String, &[Observation], Variant, usize)> = Vec::new();
    for &variant in &variants {
        for t in cfg.t_min..=cfg.t_max {
            tasks.push(("ALL".into(), &ing.obs, variant, t));
            for (sc, obs) in &groups {
                tasks.push((sc.clone(), obs, variant, t));
            }
        }
    }
    let mut results: Vec<FitResult> = with_pool(cfg.workers, || {
        tasks
            .par_iter()
            .map(|(label, obs, variant, t)| {
                uncited_regression(&ctx, obs, label, *variant, *t, cfg.uncited_threshold)
            })
            .collect()
    })?;
    sort_results(&mut results);

    let mut meta = base_metadata(cfg, "uncited");
    meta.push("uncited_threshold", cfg.uncited_threshold);
    meta.push("model", "y_long = b0 + b1 * x (IF only)");
    inference_metadata(&mut meta);
    ingest_metadata(&mut meta, &ing);

    let mut csv_buf = Vec::new();
    write_results_csv(&mut csv_buf, &results, &meta, cfg.digits)?;
    let text = render_results_text(&results, cfg.digits.unwrap_or(TEXT_DIGITS));
    let files = vec![
        write_file(&cfg.out_dir, "uncited.csv", &csv_buf)?,
        write_file(&cfg.out_dir, "uncited.txt", text.as_bytes())?,
    ];
    let fitted = results.iter().filter(|r| r.stats.is_some()).count();
    let summary = format!(
        "uncited: {} rows ({} fitted, {} skipped)",
        results.len(),
        fitted,
        results.len() - fitted
    );
    Ok(CommandOutput { files, summary })
}

/// `strata`: citedness-quantile regressions (Q1..Qq + ALL) per window.
pub fn cmd_strata(cfg: &RunConfig) -> Result<CommandOutput> {
    let ing = read_input(cfg)?;
    let ctx = model_context(cfg, &ing);
    let q = cfg.quantiles.unwrap_or(4);
    let variants = cfg.variant_selection.variants();

    let tasks: Vec<(Variant, usize)> = variants
        .iter()
        .flat_map(|&v| (cfg.t_min..=cfg.t_max).map(move |t| (v, t)))
        .collect();
    let per_task: Vec<Result<Vec<FitResult>>> = with_pool(cfg.workers, || {
        tasks
            .par_iter()
            .map(|&(variant, t)| {
                let assignment = assign_citedness_quantiles(&ing.corpus, &ing.obs, t, q)?;
                Ok(stratified_regressions(&ctx, &assignment, &ing.obs, variant))
            })
            .collect()
    })?;
    let mut results = Vec::new();
    for r in per_task {
        results.extend(r?);
    }
    sort_results(&mut results);

    let mut meta = base_metadata(cfg, "strata");
    meta.push("quantiles", q);
    meta.push("all_row", "entire observation set, cited and uncited");
    meta.push("baselines", "global (not within-stratum)");
    inference_metadata(&mut meta);
    ingest_metadata(&mut meta, &ing);

    let mut csv_buf = Vec::new();
    write_results_csv(&mut csv_buf, &results, &meta, cfg.digits)?;
    let text = render_results_text(&results, cfg.digits.unwrap_or(TEXT_DIGITS));
    let files = vec![
        write_file(&cfg.out_dir, "strata.csv", &csv_buf)?,
        write_file(&cfg.out_dir, "strata.txt", text.as_bytes())?,
    ];
    let summary = format!("strata: {} rows (q={q})", results.len());
    Ok(CommandOutput { files, summary })
}

/// `errors`: median relative prediction error per citedness bin.
pub fn cmd_errors(cfg: &RunConfig) -> Result<CommandOutput> {
    let ing = read_input(cfg)?;
    let ctx = model_context(cfg, &ing);
    let variants = cfg.variant_selection.variants();

    let summaries: Vec<Result<ErrorSummary>> = with_pool(cfg.workers, || {
        variants
            .par_iter()
            .map(|&variant| {
                let q = cfg.quantiles.unwrap_or_else(|| default_error_bins(variant));
                median_error_curves(&ctx, &ing.obs, variant, cfg.t_min..=cfg.t_max, q)
            })
            .collect()
    })?;
    let summaries: Result<Vec<ErrorSummary>> = summaries.into_iter().collect();
    let summaries = summaries?;

    let mut meta = base_metadata(cfg, "errors");
    for s in &summaries {
        meta.push(
            &format!("bins_{}", s.variant.label()),
            format!("{} (log windows 0-1 fall back to the overall median)", s.q),
        );
    }
    meta.push("prediction", "pooled ALL fit per window");
    inference_metadata(&mut meta);
    ingest_metadata(&mut meta, &ing);

    let mut csv_buf = Vec::new();
    write_error_curves_csv(&mut csv_buf, &summaries, &meta, cfg.digits)?;
    let files = vec![write_file(&cfg.out_dir, "error_curves.csv", &csv_buf)?];
    let rows: usize = summaries.iter().map(|s| s.rows.len()).sum();
    let summary = format!("errors: {rows} rows");
    Ok(CommandOutput { files, summary })
}

/// `synth`: deterministic synthetic corpus in the corpus CSV schema.
pub fn cmd_synth(cfg: &RunConfig) -> Result<CommandOutput> {
    let mut gen_cfg = match cfg.synth.preset.as_str() {
        "fast-peak" => {
            crate::synth::GeneratorConfig::fast_peak(cfg.seed, cfg.synth.n_scs, cfg.synth.n_pubs)
        }
        "slow" => crate::synth::GeneratorConfig::slow(cfg.seed, cfg.synth.n_scs, cfg.synth.n_pubs),
        other => return Err(Error::Config(format!("unknown synth preset '{other}'"))),
    };
    gen_cfg.year = cfg.synth.year;
    let corpus = with_pool(cfg.workers, || crate::synth::generate_corpus(&gen_cfg))??;

    let mut meta = base_metadata(cfg, "synth");
    meta.push("preset", &cfg.synth.preset);
    meta.push("n_scs", cfg.synth.n_scs);
    meta.push("n_pubs_per_sc", cfg.synth.n_pubs);
    meta.push("year", cfg.synth.year);
    meta.push("seed", cfg.seed);
    meta.push("rng", "ChaCha8, one stream per SC");

    let mut buf = Vec::new();
    meta.write_to(&mut buf).map_err(|source| Error::Io {
        path: "<corpus output>".into(),
        source,
    })?;
    write_publications(&mut buf, &corpus)?;
    let files = vec![write_file(&cfg.out_dir, "corpus.csv", &buf)?];
    let summary = format!(
        "synth: {} publications in {} SCs (preset {}, seed {})",
        corpus.len(),
        cfg.synth.n_scs,
        cfg.synth.preset,
        cfg.seed
    );
    Ok(CommandOutput { files, summary })
}
