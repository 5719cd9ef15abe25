//! Report emission: CSV files with a deterministic metadata header
//! block, an aligned text rendering with significance stars, and the
//! reader used to feed fit results back into the summarize command.
//!
//! Output never contains timestamps; rerunning a command on identical
//! inputs must reproduce every file byte for byte.

use std::io::{Read, Write};

use crate::analysis::{ErrorSummary, FitResult, FitStats, MacroAreaSummary};
use crate::error::{Error, Result};
use crate::inference::{stars, CoefficientInference};
use crate::transforms::{BaselineTable, Variant};

pub const RESULTS_HEADER: &str = "subset,variant,t,n,b0,se0,p0,stars0,b1,se1,p1,stars1,b2,se2,p2,stars2,r2,bp_stat,bp_p,skip_reason";
pub const BASELINES_HEADER: &str = "year,sc,t,cbar,n_cited,ifbar,n_journals";
pub const MACRO_HEADER: &str = "variant,t,area,n_scs,n_if_significant,if_min,if_max,if_mean,if_sd,ec_min,ec_max,ec_mean,ec_sd,r2_mean,r2_sd";
pub const ERROR_CURVES_HEADER: &str = "variant,t,bin,n,median_E";

/// Unavailable-statistic markers following the usual table typography:
/// `n.a.` for a standard deviation over fewer than two values, `-` for
/// statistics over an empty qualifying set.
pub const NA_MARKER: &str = "n.a.";
pub const EMPTY_MARKER: &str = "-";

/// Ordered key/value metadata emitted as `# key: value` lines ahead of
/// every CSV header.
#[derive(Debug, Clone)]
pub struct Metadata {
    entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new(command: &str, config_hash: &str) -> Self {
        Metadata {
            entries: vec![
                ("tool".into(), format!("citefore {}", crate::VERSION)),
                ("command".into(), command.to_string()),
                ("config_hash".into(), config_hash.to_string()),
            ],
        }
    }

    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for (k, v) in &self.entries {
            writeln!(out, "# {k}: {v}")?;
        }
        Ok(())
    }
}

/// Standard inference metadata shared by every regression report.
pub fn inference_metadata(meta: &mut Metadata) {
    meta.push("covariance", "HC3");
    meta.push("p_values", "two-sided Student-t, df = n - p");
    meta.push("heteroskedasticity_test", "Breusch-Pagan, plain LM form");
    meta.push("log_base", "e");
    meta.push("tie_rule", "stable (c_t, pub_id, sc_id)");
    meta.push("stars", "*** p<0.01, ** p<0.05, * p<0.1 (strict)");
}

/// Full-precision (round-trip) or digit-limited float formatting with a
/// `.` decimal separator.
pub fn fmt_f64(v: f64, digits: Option<usize>) -> String {
    match digits {
        Some(d) => format!("{v:.d$}"),
        None => {
            let mut s = v.to_string();
            // Keep the format stable whether or not a value happens to be
            // integral.
            if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
                s.push_str(".0");
            }
            s
        }
    }
}

fn csv_safe(s: &str) -> String {
    s.replace(',', ";")
}

fn coef_cells(c: Option<&CoefficientInference>, digits: Option<usize>) -> [String; 4] {
    match c {
        Some(c) => [
            fmt_f64(c.estimate, digits),
            fmt_f64(c.std_error, digits),
            fmt_f64(c.p_value, digits),
            c.stars().to_string(),
        ],
        None => Default::default(),
    }
}

/// Writes fit results in the fixed 20-column layout. Skipped fits leave
/// the numeric cells empty and carry the reason in the last column.
pub fn write_results_csv<W: Write>(
    out: &mut W,
    results: &[FitResult],
    meta: &Metadata,
    digits: Option<usize>,
) -> Result<()> {
    let io_err = |source| Error::Io {
        path: "<results output>".into(),
        source,
    };
    meta.write_to(out).map_err(io_err)?;
    writeln!(out, "{RESULTS_HEADER}").map_err(io_err)?;
    for r in results {
        let t_cell = r.t.map(|t| t.to_string()).unwrap_or_default();
        let mut cells: Vec<String> = vec![
            csv_safe(&r.subset),
            r.variant.label().to_string(),
            t_cell,
            r.n.to_string(),
        ];
        match &r.stats {
            Some(s) => {
                for j in 0..3 {
                    cells.extend(coef_cells(s.coefficients.get(j), digits));
                }
                cells.push(fmt_f64(s.r_squared, digits));
                cells.push(fmt_f64(s.bp_statistic, digits));
                cells.push(fmt_f64(s.bp_pvalue, digits));
                cells.push(String::new());
            }
            None => {
                cells.extend(std::iter::repeat_n(String::new(), 15));
                cells.push(csv_safe(r.skip_reason.as_deref().unwrap_or("")));
            }
        }
        writeln!(out, "{}", cells.join(",")).map_err(io_err)?;
    }
    Ok(())
}

/// Reads a results CSV produced by `write_results_csv`.
pub fn read_results_csv<R: Read>(source: R) -> Result<Vec<FitResult>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);
    {
        let headers = reader.headers()?;
        let joined = headers.iter().collect::<Vec<_>>().join(",");
        if joined != RESULTS_HEADER {
            return Err(Error::Validation(format!(
                "unexpected results header '{joined}'"
            )));
        }
    }
    let parse_f = |raw: &str, row: usize, field: &str| -> Result<f64> {
        raw.parse().map_err(|_| Error::ParseRow {
            row,
            field: field.into(),
            message: format!("non-numeric field (got '{raw}')"),
        })
    };
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        if record.len() != 20 {
            return Err(Error::ParseRow {
                row,
                field: "-".into(),
                message: format!("expected 20 columns, got {}", record.len()),
            });
        }
        let subset = record[0].to_string();
        let variant = Variant::parse(&record[1])?;
        let t = if record[2].is_empty() {
            None
        } else {
            Some(parse_f(&record[2], row, "t")? as usize)
        };
        let n = parse_f(&record[3], row, "n")? as usize;
        if record[4].is_empty() {
            out.push(FitResult {
                subset,
                variant,
                t,
                n,
                stats: None,
                skip_reason: Some(record[19].to_string()),
            });
            continue;
        }
        let mut coefficients = Vec::new();
        for j in 0..3 {
            let base = 4 + 4 * j;
            if record[base].is_empty() {
                continue;
            }
            let estimate = parse_f(&record[base], row, "b")?;
            let std_error = parse_f(&record[base + 1], row, "se")?;
            let p_value = parse_f(&record[base + 2], row, "p")?;
            coefficients.push(CoefficientInference {
                estimate,
                std_error,
                t_statistic: if std_error > 0.0 { estimate / std_error } else { 0.0 },
                p_value,
                degenerate_se: std_error == 0.0,
            });
        }
        out.push(FitResult {
            subset,
            variant,
            t,
            n,
            stats: Some(FitStats {
                coefficients,
                r_squared: parse_f(&record[16], row, "r2")?,
                bp_statistic: parse_f(&record[17], row, "bp_stat")?,
                bp_pvalue: parse_f(&record[18], row, "bp_p")?,
                degenerate_response: false,
            }),
            skip_reason: None,
        });
    }
    Ok(out)
}

/// Baseline audit export, one row per (year, SC, window).
pub fn write_baselines_csv<W: Write>(
    out: &mut W,
    table: &BaselineTable,
    meta: &Metadata,
    digits: Option<usize>,
) -> Result<()> {
    let io_err = |source| Error::Io {
        path: "<baselines output>".into(),
        source,
    };
    meta.write_to(out).map_err(io_err)?;
    writeln!(out, "{BASELINES_HEADER}").map_err(io_err)?;
    for ((year, sc), b) in table.iter() {
        let ifbar = b.ifbar.map(|v| fmt_f64(v, digits)).unwrap_or_default();
        for (t, cbar) in b.cbar.iter().enumerate() {
            let cbar_cell = cbar.map(|v| fmt_f64(v, digits)).unwrap_or_default();
            writeln!(
                out,
                "{year},{},{t},{cbar_cell},{},{ifbar},{}",
                csv_safe(sc),
                b.n_cited[t],
                b.n_journals
            )
            .map_err(io_err)?;
        }
    }
    Ok(())
}

/// Macro-area summary rows (one per area and variant).
pub fn write_macro_csv<W: Write>(
    out: &mut W,
    rows: &[MacroAreaSummary],
    meta: &Metadata,
    digits: Option<usize>,
) -> Result<()> {
    let io_err = |source| Error::Io {
        path: "<macro output>".into(),
        source,
    };
    meta.write_to(out).map_err(io_err)?;
    writeln!(out, "{MACRO_HEADER}").map_err(io_err)?;
    for r in rows {
        let sd_cell = |sd: Option<f64>| match sd {
            Some(v) => fmt_f64(v, digits),
            None => NA_MARKER.to_string(),
        };
        let (if_min, if_max, if_mean) = match r.if_coeff {
            Some(s) => (
                fmt_f64(s.min, digits),
                fmt_f64(s.max, digits),
                fmt_f64(s.mean, digits),
            ),
            None => (
                EMPTY_MARKER.to_string(),
                EMPTY_MARKER.to_string(),
                EMPTY_MARKER.to_string(),
            ),
        };
        // A zero-qualifying area also leaves the sd blank rather than n.a.
        let if_sd = if r.if_coeff.is_none() {
            EMPTY_MARKER.to_string()
        } else {
            sd_cell(r.if_sd)
        };
        writeln!(
            out,
            "{},{},{},{},{},{if_min},{if_max},{if_mean},{if_sd},{},{},{},{},{},{}",
            r.variant.label(),
            r.t,
            csv_safe(&r.area),
            r.n_scs,
            r.n_if_significant,
            fmt_f64(r.early_coeff.min, digits),
            fmt_f64(r.early_coeff.max, digits),
            fmt_f64(r.early_coeff.mean, digits),
            sd_cell(r.early_sd),
            fmt_f64(r.r2_mean, digits),
            sd_cell(r.r2_sd),
        )
        .map_err(io_err)?;
    }
    Ok(())
}

/// Median-error plot data; the overall row carries bin `ALL`.
pub fn write_error_curves_csv<W: Write>(
    out: &mut W,
    summaries: &[ErrorSummary],
    meta: &Metadata,
    digits: Option<usize>,
) -> Result<()> {
    let io_err = |source| Error::Io {
        path: "<error-curves output>".into(),
        source,
    };
    meta.write_to(out).map_err(io_err)?;
    writeln!(out, "{ERROR_CURVES_HEADER}").map_err(io_err)?;
    for summary in summaries {
        for r in &summary.rows {
            let bin = r.bin.map(|b| b.to_string()).unwrap_or_else(|| "ALL".into());
            writeln!(
                out,
                "{},{},{bin},{},{}",
                summary.variant.label(),
                r.t,
                r.n,
                fmt_f64(r.median_e, digits)
            )
            .map_err(io_err)?;
        }
    }
    Ok(())
}

/// Column alignment for the text rendering.
#[derive(Clone, Copy)]
pub enum Align {
    Left,
    Right,
}

/// Renders rows as an aligned plain-text table.
pub fn render_table(headers: &[&str], aligns: &[Align], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (j, cell) in row.iter().enumerate() {
            widths[j] = widths[j].max(cell.len());
        }
    }
    let mut out = String::new();
    let render_row = |cells: &[String], out: &mut String| {
        let mut parts = Vec::with_capacity(cells.len());
        for (j, cell) in cells.iter().enumerate() {
            let w = widths[j];
            parts.push(match aligns[j] {
                Align::Left => format!("{cell:<w$}"),
                Align::Right => format!("{cell:>w$}"),
            });
        }
        out.push_str(parts.join("  ").trim_end());
        out.push('\n');
    };
    let header_cells: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
    render_row(&header_cells, &mut out);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    render_row(&rule, &mut out);
    for row in rows {
        render_row(row, &mut out);
    }
    out
}

fn coef_with_stars(c: &CoefficientInference, digits: usize) -> String {
    format!("{}{}", fmt_f64(c.estimate, Some(digits)), stars(c.p_value))
}

/// Human-readable rendering of fit results with stars appended to the
/// coefficients ("1.127***").
pub fn render_results_text(results: &[FitResult], digits: usize) -> String {
    let headers = [
        "subset", "variant", "t", "n", "intercept", "if_coeff", "early_coeff", "r2", "bp_p",
        "note",
    ];
    let aligns = [
        Align::Left,
        Align::Left,
        Align::Right,
        Align::Right,
        Align::Right,
        Align::Right,
        Align::Right,
        Align::Right,
        Align::Right,
        Align::Left,
    ];
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            let t_cell = r.t.map(|t| t.to_string()).unwrap_or_default();
            match &r.stats {
                Some(s) => {
                    let early = s
                        .coefficients
                        .get(2)
                        .map(|c| coef_with_stars(c, digits))
                        .unwrap_or_default();
                    vec![
                        r.subset.clone(),
                        r.variant.label().into(),
                        t_cell,
                        r.n.to_string(),
                        coef_with_stars(&s.coefficients[0], digits),
                        coef_with_stars(&s.coefficients[1], digits),
                        early,
                        fmt_f64(s.r_squared, Some(digits)),
                        fmt_f64(s.bp_pvalue, Some(digits)),
                        if s.degenerate_response {
                            "degenerate response".into()
                        } else {
                            String::new()
                        },
                    ]
                }
                None => vec![
                    r.subset.clone(),
                    r.variant.label().into(),
                    t_cell,
                    r.n.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    format!("skipped: {}", r.skip_reason.as_deref().unwrap_or("")),
                ],
            }
        })
        .collect();
    render_table(&headers, &aligns, &rows)
}

/// Text rendering of the macro-area summary.
pub fn render_macro_text(rows: &[MacroAreaSummary], digits: usize) -> String {
    let headers = [
        "variant", "t", "area", "SCs", "IF p<0.1", "IF mean", "IF sd", "early mean", "early sd",
        "R2 mean", "R2 sd",
    ];
    let aligns = [
        Align::Left,
        Align::Right,
        Align::Left,
        Align::Right,
        Align::Right,
        Align::Right,
        Align::Right,
        Align::Right,
        Align::Right,
        Align::Right,
        Align::Right,
    ];
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let sd = |v: Option<f64>| {
                v.map(|s| fmt_f64(s, Some(digits)))
                    .unwrap_or_else(|| NA_MARKER.into())
            };
            vec![
                r.variant.label().into(),
                r.t.to_string(),
                r.area.clone(),
                r.n_scs.to_string(),
                r.n_if_significant.to_string(),
                r.if_coeff
                    .map(|s| fmt_f64(s.mean, Some(digits)))
                    .unwrap_or_else(|| EMPTY_MARKER.into()),
                if r.if_coeff.is_none() {
                    EMPTY_MARKER.into()
                } else {
                    sd(r.if_sd)
                },
                fmt_f64(r.early_coeff.mean, Some(digits)),
                sd(r.early_sd),
                fmt_f64(r.r2_mean, Some(digits)),
                sd(r.r2_sd),
            ]
        })
        .collect();
    render_table(&headers, &aligns, &body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::FitStats;

    fn some_result() -> FitResult {
        let coef = |estimate: f64, p: f64| CoefficientInference {
            estimate,
            std_error: 0.25,
            t_statistic: estimate / 0.25,
            p_value: p,
            degenerate_se: false,
        };
        FitResult {
            subset: "SC01".into(),
            variant: Variant::Rescaled,
            t: Some(3),
            n: 1113,
            stats: Some(FitStats {
                coefficients: vec![coef(0.051, 0.4), coef(-0.04, 0.2), coef(1.127, 0.001)],
                r_squared: 0.812,
                bp_statistic: 12.5,
                bp_pvalue: 0.0019,
                degenerate_response: false,
            }),
            skip_reason: None,
        }
    }

    #[test]
    fn results_round_trip_through_csv() {
        let results = vec![
            some_result(),
            FitResult::skipped("SC02", Variant::Log, Some(0), 7, "baseline unavailable: year=2004 sc=SC02 t=0"),
        ];
        let meta = Metadata::new("fit", "abcd");
        let mut buf = Vec::new();
        write_results_csv(&mut buf, &results, &meta, None).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# tool: citefore"));
        assert!(text.contains(RESULTS_HEADER));

        let back = read_results_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 2);
        let r = &back[0];
        assert_eq!(r.subset, "SC01");
        assert_eq!(r.t, Some(3));
        assert_eq!(r.n, 1113);
        let s = r.stats.as_ref().unwrap();
        assert_eq!(s.coefficients.len(), 3);
        assert_eq!(s.coefficients[2].estimate, 1.127);
        assert_eq!(s.r_squared, 0.812);
        assert!(back[1].stats.is_none());
        assert!(back[1].skip_reason.as_ref().unwrap().contains("baseline unavailable"));
    }

    #[test]
    fn text_rendering_appends_stars() {
        let text = render_results_text(&[some_result()], 3);
        assert!(text.contains("1.127***"), "{text}");
        assert!(text.contains("-0.040"), "{text}");
        assert!(!text.contains("-0.040*"), "p = 0.2 earns no star");
    }

    #[test]
    fn fmt_full_precision_round_trips() {
        for &v in &[0.1, 1.0 / 3.0, 1e-17, 123456.789, -0.0, 2.0] {
            let s = fmt_f64(v, None);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(1.25, Some(1)), "1.2");
        assert_eq!(fmt_f64(2.0, None), "2.0");
    }
}
