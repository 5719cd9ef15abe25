//! Median relative prediction-error curves by citedness quantile.

use std::ops::RangeInclusive;

use crate::corpus::Observation;
use crate::error::Result;
use crate::transforms::{RegressionSample, Variant};

use super::{assign_citedness_quantiles, fit_model, FitStats, ModelContext};

/// One median-error cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub t: usize,
    /// Quantile bin (1 = least cited); `None` for the overall row.
    pub bin: Option<usize>,
    /// Number of error values the median runs over.
    pub n: usize,
    pub median_e: f64,
}

/// Median prediction errors per (window, citedness bin).
#[derive(Debug, Clone)]
pub struct ErrorSummary {
    pub variant: Variant,
    pub q: usize,
    pub rows: Vec<ErrorRow>,
}

/// Relative prediction error
/// `E = |y_long − (b0 + b1·x + b2·y_t)| / y_long`, undefined (None)
/// when `y_long = 0`; undefined values are excluded from medians.
pub fn prediction_error(sample: &RegressionSample, stats: &FitStats) -> Option<f64> {
    debug_assert_eq!(stats.coefficients.len(), 3);
    if sample.y_long <= 0.0 {
        return None;
    }
    let b = &stats.coefficients;
    let predicted = b[0].estimate + b[1].estimate * sample.x + b[2].estimate * sample.y_t;
    Some(((sample.y_long - predicted) / sample.y_long).abs())
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

/// Default bin count per variant: deciles for rescaled, quintiles for
/// log (whose early windows carry too little count variability for a
/// finer stratification).
pub fn default_error_bins(variant: Variant) -> usize {
    match variant {
        Variant::Rescaled => 10,
        Variant::Log => 5,
    }
}

/// Computes the median-error curve of one variant: per window, the
/// median of E inside each citedness bin plus the overall median over
/// all cited observations.
///
/// The coefficients of Eq-style prediction come from the pooled fit
/// over the entire observation set at that window. For the log variant
/// at windows 0 and 1 the stratified rows are replaced by the overall
/// median row alone.
pub fn median_error_curves(
    ctx: &ModelContext<'_>,
    obs: &[Observation],
    variant: Variant,
    t_range: RangeInclusive<usize>,
    q: usize,
) -> Result<ErrorSummary> {
    let mut rows = Vec::new();
    for t in t_range {
        let (all_samples, _) = ctx.samples_lenient(obs, variant, t);
        let stats = fit_model(&all_samples, true)?;

        let log_fallback = variant == Variant::Log && t <= 1;
        let mut overall = Vec::new();

        if log_fallback {
            // Errors over the cited observations, one overall row.
            for o in obs {
                if o.publication(ctx.corpus).citations[t] == 0 {
                    continue;
                }
                if let Ok(s) = ctx.sample(*o, variant, t) {
                    if let Some(e) = prediction_error(&s, &stats) {
                        overall.push(e);
                    }
                }
            }
        } else {
            let assignment = assign_citedness_quantiles(ctx.corpus, obs, t, q)?;
            for (j, bin) in assignment.bins.iter().enumerate() {
                let mut errors = Vec::new();
                let (samples, _) = ctx.samples_lenient(bin, variant, t);
                for s in &samples {
                    if let Some(e) = prediction_error(s, &stats) {
                        errors.push(e);
                    }
                }
                overall.extend_from_slice(&errors);
                let n = errors.len();
                if let Some(m) = median(&mut errors) {
                    rows.push(ErrorRow {
                        t,
                        bin: Some(j + 1),
                        n,
                        median_e: m,
                    });
                }
            }
        }

        let n = overall.len();
        if let Some(m) = median(&mut overall) {
            rows.push(ErrorRow {
                t,
                bin: None,
                n,
                median_e: m,
            });
        }
    }
    Ok(ErrorSummary { variant, q, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::expand_by_sc;
    use crate::inference::CoefficientInference;
    use crate::synth::{generate_corpus, GeneratorConfig};
    use crate::transforms::compute_baselines;

    fn stats_with(b: [f64; 3]) -> FitStats {
        let coef = |estimate: f64| CoefficientInference {
            estimate,
            std_error: 0.0,
            t_statistic: 0.0,
            p_value: 1.0,
            degenerate_se: true,
        };
        FitStats {
            coefficients: vec![coef(b[0]), coef(b[1]), coef(b[2])],
            r_squared: 1.0,
            bp_statistic: 0.0,
            bp_pvalue: 1.0,
            degenerate_response: false,
        }
    }

    fn sample(x: f64, y_t: f64, y_long: f64) -> RegressionSample {
        RegressionSample {
            pub_idx: 0,
            sc_idx: 0,
            x,
            y_t,
            y_long,
            variant: Variant::Rescaled,
        }
    }

    #[test]
    fn error_arithmetic() {
        // Prediction 1 against realized 2 -> E = 0.5.
        let stats = stats_with([1.0, 0.0, 0.0]);
        assert_eq!(prediction_error(&sample(0.0, 0.0, 2.0), &stats), Some(0.5));
        // Exact prediction -> 0.
        let stats = stats_with([0.0, 0.0, 1.0]);
        assert_eq!(prediction_error(&sample(0.0, 3.0, 3.0), &stats), Some(0.0));
        // Zero long-term value -> undefined.
        assert_eq!(prediction_error(&sample(1.0, 1.0, 0.0), &stats), None);
    }

    #[test]
    fn median_rules() {
        let mut v = vec![0.3, 0.3, 0.3];
        assert_eq!(median(&mut v), Some(0.3));
        let mut v = vec![0.9, 0.1, 0.2];
        assert_eq!(median(&mut v), Some(0.2));
        let mut v = vec![0.4, 0.2];
        assert!((median(&mut v).unwrap() - 0.3).abs() < 1e-15);
        let mut v = Vec::new();
        assert_eq!(median(&mut v), None);
    }

    #[test]
    fn log_variant_early_windows_fall_back_to_overall() {
        let corpus = generate_corpus(&GeneratorConfig::fast_peak(41, 2, 300)).unwrap();
        let obs = expand_by_sc(&corpus);
        let table = compute_baselines(&corpus, &obs);
        let ctx = ModelContext::new(&corpus, &table, 9);
        let summary = median_error_curves(&ctx, &obs, Variant::Log, 0..=2, 5).unwrap();
        let t0: Vec<&ErrorRow> = summary.rows.iter().filter(|r| r.t == 0).collect();
        assert_eq!(t0.len(), 1, "single overall row at t = 0");
        assert_eq!(t0[0].bin, None);
        let t1: Vec<&ErrorRow> = summary.rows.iter().filter(|r| r.t == 1).collect();
        assert_eq!(t1.len(), 1, "single overall row at t = 1");
        let t2: Vec<&ErrorRow> = summary.rows.iter().filter(|r| r.t == 2).collect();
        assert_eq!(t2.len(), 6, "five bins plus overall from t = 2 on");
    }

    #[test]
    fn rescaled_rows_cover_all_bins() {
        let corpus = generate_corpus(&GeneratorConfig::fast_peak(42, 2, 400)).unwrap();
        let obs = expand_by_sc(&corpus);
        let table = compute_baselines(&corpus, &obs);
        let ctx = ModelContext::new(&corpus, &table, 9);
        let summary = median_error_curves(&ctx, &obs, Variant::Rescaled, 3..=3, 10).unwrap();
        let bins: Vec<Option<usize>> = summary.rows.iter().map(|r| r.bin).collect();
        let mut expected: Vec<Option<usize>> = (1..=10).map(Some).collect();
        expected.push(None);
        assert_eq!(bins, expected);
        for r in &summary.rows {
            assert!(r.median_e >= 0.0);
            assert!(r.n > 0);
        }
    }
}
