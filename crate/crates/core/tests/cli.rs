//! End-to-end tests of the command layer and the installed binary.

use std::path::{Path, PathBuf};
use std::process::Command;

use citefore::cli::{cmd_errors, cmd_fit, cmd_strata, cmd_summarize, cmd_synth, cmd_uncited};
use citefore::config::{PartialConfig, RunConfig, SynthSection};
use citefore::error::Error;

fn resolve(p: PartialConfig) -> RunConfig {
    RunConfig::resolve(p).unwrap()
}

fn synth_into(dir: &Path, seed: u64, n_scs: usize, n_pubs: usize, preset: &str) -> PathBuf {
    let cfg = resolve(PartialConfig {
        out: Some(dir.to_path_buf()),
        seed: Some(seed),
        synth: Some(SynthSection {
            preset: Some(preset.into()),
            n_scs: Some(n_scs),
            n_pubs: Some(n_pubs),
            year: None,
        }),
        ..Default::default()
    });
    cmd_synth(&cfg).unwrap();
    dir.join("corpus.csv")
}

/// Non-comment, non-header data lines of a report file.
fn data_lines(path: &Path) -> Vec<String> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(str::to_string)
        .collect()
}

#[test]
fn fit_one_sc_both_variants_gives_18_rows() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_into(dir.path(), 3, 1, 300, "fast-peak");
    let cfg = resolve(PartialConfig {
        input: Some(corpus),
        out: Some(dir.path().join("out")),
        ..Default::default()
    });
    let output = cmd_fit(&cfg).unwrap();
    assert_eq!(output.files.len(), 3);
    let rows = data_lines(&dir.path().join("out/results.csv"));
    assert_eq!(rows.len(), 18, "9 windows x 2 variants");
    assert!(rows.iter().all(|r| r.starts_with("SC01,")));
    // All fitted: the skip column is empty.
    assert!(rows.iter().all(|r| r.ends_with(',')), "no skip reasons expected");
}

#[test]
fn fit_below_threshold_sc_is_reported_not_dropped() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_into(dir.path(), 4, 1, 50, "fast-peak");
    let cfg = resolve(PartialConfig {
        input: Some(corpus),
        out: Some(dir.path().join("out")),
        ..Default::default()
    });
    cmd_fit(&cfg).unwrap();
    let rows = data_lines(&dir.path().join("out/results.csv"));
    assert_eq!(rows.len(), 2, "one skip row per variant");
    for row in &rows {
        assert!(row.starts_with("SC01,"), "{row}");
        assert!(row.contains("below SC threshold (n=50 <= 100)"), "{row}");
    }
}

#[test]
fn summarize_writes_na_markers_and_sorted_areas() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_into(dir.path(), 5, 3, 400, "fast-peak");
    let out = dir.path().join("out");
    cmd_fit(&resolve(PartialConfig {
        input: Some(corpus),
        out: Some(out.clone()),
        ..Default::default()
    }))
    .unwrap();

    let area_path = dir.path().join("areas.csv");
    std::fs::write(&area_path, "sc,macro_area\nSC01,Beta\nSC02,Beta\nSC03,Alpha\n").unwrap();
    let cfg = resolve(PartialConfig {
        input: Some(out.join("results.csv")),
        out: Some(out.clone()),
        area_map: Some(area_path),
        t_min: Some(3),
        t_max: Some(3),
        ..Default::default()
    });
    cmd_summarize(&cfg).unwrap();
    let rows = data_lines(&out.join("macro_summary.csv"));
    assert_eq!(rows.len(), 4, "2 areas x 2 variants");
    // Sorted by variant then area; single-SC areas carry n.a. early-sd.
    assert!(rows[0].starts_with("rescaled,3,Alpha"), "{}", rows[0]);
    assert!(rows[1].starts_with("rescaled,3,Beta"), "{}", rows[1]);
    assert!(rows[2].starts_with("log,3,Alpha"), "{}", rows[2]);
    let alpha = &rows[0];
    assert!(alpha.contains("n.a."), "single-SC area needs an n.a. marker: {alpha}");
}

#[test]
fn summarize_rejects_mixed_windows() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_into(dir.path(), 6, 1, 300, "fast-peak");
    let out = dir.path().join("out");
    cmd_fit(&resolve(PartialConfig {
        input: Some(corpus),
        out: Some(out.clone()),
        ..Default::default()
    }))
    .unwrap();
    let cfg = resolve(PartialConfig {
        input: Some(out.join("results.csv")),
        out: Some(out),
        ..Default::default()
    });
    match cmd_summarize(&cfg) {
        Err(Error::MixedWindows) => {}
        other => panic!("expected mixed-window rejection, got {other:?}"),
    }
}

#[test]
fn strata_cardinality_per_variant() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_into(dir.path(), 7, 2, 300, "fast-peak");
    let out = dir.path().join("out");
    cmd_strata(&resolve(PartialConfig {
        input: Some(corpus),
        out: Some(out.clone()),
        quantiles: Some(4),
        ..Default::default()
    }))
    .unwrap();
    let rows = data_lines(&out.join("strata.csv"));
    assert_eq!(rows.len(), 90, "(4 quartiles + ALL) x 9 windows x 2 variants");
    for variant in ["rescaled", "log"] {
        let per_variant = rows
            .iter()
            .filter(|r| r.split(',').nth(1) == Some(variant))
            .count();
        assert_eq!(per_variant, 45, "{variant}");
    }
}

#[test]
fn errors_log_variant_t0_emits_single_overall_row() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_into(dir.path(), 8, 1, 400, "fast-peak");
    let out = dir.path().join("out");
    cmd_errors(&resolve(PartialConfig {
        input: Some(corpus),
        out: Some(out.clone()),
        variant: Some("log".into()),
        t_min: Some(0),
        t_max: Some(0),
        ..Default::default()
    }))
    .unwrap();
    let rows = data_lines(&out.join("error_curves.csv"));
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("log,0,ALL,"), "{}", rows[0]);
}

#[test]
fn uncited_counts_shrink_with_the_window() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth_into(dir.path(), 9, 1, 3000, "slow");
    let out = dir.path().join("out");
    cmd_uncited(&resolve(PartialConfig {
        input: Some(corpus),
        out: Some(out.clone()),
        variant: Some("rescaled".into()),
        ..Default::default()
    }))
    .unwrap();
    let rows = data_lines(&out.join("uncited.csv"));
    let n_at = |t: &str| -> usize {
        rows.iter()
            .find(|r| {
                let mut fields = r.split(',');
                fields.next() == Some("ALL") && {
                    fields.next();
                    fields.next() == Some(t)
                }
            })
            .map(|r| r.split(',').nth(3).unwrap().parse().unwrap())
            .unwrap()
    };
    assert!(n_at("8") <= n_at("3"), "monotone citations shrink the uncited set");
    assert!(n_at("3") <= n_at("0"));
}

#[test]
fn binary_runs_pipeline_and_reports_errors() {
    let bin = env!("CARGO_BIN_EXE_citefore");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w");

    let synth = Command::new(bin)
        .args([
            "synth",
            "--seed",
            "12",
            "--n-scs",
            "1",
            "--n-pubs",
            "200",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert!(synth.status.success(), "{synth:?}");
    let stdout = String::from_utf8(synth.stdout).unwrap();
    assert!(stdout.contains("synth: 200 publications"), "{stdout}");

    let fit = Command::new(bin)
        .args(["fit", "--digits", "4", "--log-x-raw", "--input"])
        .arg(out.join("corpus.csv"))
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(fit.status.success(), "{fit:?}");
    assert!(out.join("results.csv").exists());
    assert!(out.join("results.txt").exists());
    assert!(out.join("baselines.csv").exists());
    let results_text = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert!(
        results_text.contains("# if_scaling: raw (log variant)"),
        "the raw-IF sensitivity switch must be recorded in metadata"
    );

    // Rounded output: no data cell keeps more than four decimals.
    for line in data_lines(&out.join("results.csv")) {
        for cell in line.split(',') {
            if let Some(dot) = cell.find('.') {
                let decimals = cell.len() - dot - 1;
                assert!(decimals <= 4, "cell '{cell}' in '{line}'");
            }
        }
    }

    // Validation failure: missing --input.
    let bad = Command::new(bin).args(["fit"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let stderr = String::from_utf8(bad.stderr).unwrap();
    assert!(
        stderr.lines().any(|l| l.starts_with("error: kind=config exit=2 msg=")),
        "{stderr}"
    );

    // Parse failure on a malformed corpus: exit code 2 with row context.
    let bad_corpus = dir.path().join("bad.csv");
    std::fs::write(
        &bad_corpus,
        "pub_id,year,journal_id,if,sc,c0,c1,c2,c3,c4,c5,c6,c7,c8,c9\nP1,2004,J1,1.0,A,5,4,3,2,1,0,0,0,0,0\n",
    )
    .unwrap();
    let parse = Command::new(bin)
        .args(["fit", "--input"])
        .arg(&bad_corpus)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(parse.status.code(), Some(2));
    let stderr = String::from_utf8(parse.stderr).unwrap();
    assert!(stderr.contains("nonmonotone citation trajectory"), "{stderr}");

    // Computation degeneracy: fewer cited observations than quantiles at
    // t = 0 makes strata fail with exit code 3.
    let sparse = dir.path().join("sparse.csv");
    let mut text =
        String::from("pub_id,year,journal_id,if,sc,c0,c1,c2,c3,c4,c5,c6,c7,c8,c9\n");
    for i in 0..30 {
        text.push_str(&format!("P{i},2004,J{},1.{},A,0,0,1,1,2,2,3,3,4,5\n", i % 4, i % 7));
    }
    std::fs::write(&sparse, text).unwrap();
    let degenerate = Command::new(bin)
        .args(["strata", "--input"])
        .arg(&sparse)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(degenerate.status.code(), Some(3), "{degenerate:?}");
    let stderr = String::from_utf8(degenerate.stderr).unwrap();
    assert!(
        stderr.lines().any(|l| l.starts_with("error: kind=too-few-cited exit=3 msg=")),
        "{stderr}"
    );
}

#[test]
fn binary_flags_override_config_file() {
    let bin = env!("CARGO_BIN_EXE_citefore");
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.toml");
    std::fs::write(
        &cfg_path,
        "seed = 3\n\n[synth]\npreset = \"fast-peak\"\nn_scs = 1\nn_pubs = 100\n",
    )
    .unwrap();
    let out = dir.path().join("o");
    let run = Command::new(bin)
        .args(["synth", "--config"])
        .arg(&cfg_path)
        .args(["--seed", "5", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(run.status.success(), "{run:?}");
    let corpus = std::fs::read_to_string(out.join("corpus.csv")).unwrap();
    assert!(corpus.contains("# seed: 5"), "flag must override the file seed");
    assert!(corpus.contains("# n_pubs_per_sc: 100"), "file value must survive");
}
