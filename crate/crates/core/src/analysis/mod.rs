//! Regression sweeps and the derived analyses: per-SC fits over time
//! windows, macro-area summaries, uncited-publication regressions,
//! citedness strata and prediction-error curves.

pub mod errors;
pub mod macro_area;
pub mod strata;
pub mod sweep;
pub mod uncited;

pub use errors::{default_error_bins, median_error_curves, prediction_error, ErrorRow, ErrorSummary};
pub use macro_area::{summarize_macro_areas, AreaMap, MacroAreaSummary};
pub use strata::{assign_citedness_quantiles, stratified_regressions, StratumAssignment};
pub use sweep::run_sc_sweep;
pub use uncited::uncited_regression;

use crate::corpus::{Observation, Publication};
use crate::error::{Error, Result};
use crate::inference::{robust_summary, CoefficientInference};
use crate::ols::{fit_ols, DesignMatrix};
use crate::transforms::{
    to_log_sample, to_rescaled_sample, BaselineTable, IfScaling, RegressionSample, Variant,
};

/// Everything needed to map observations into model space.
#[derive(Debug, Clone, Copy)]
pub struct ModelContext<'a> {
    pub corpus: &'a [Publication],
    pub table: &'a BaselineTable,
    /// Index of the long-term response window (default 9).
    pub long_window: usize,
    /// IF regressor handling for the log variant.
    pub if_scaling: IfScaling,
}

impl<'a> ModelContext<'a> {
    pub fn new(corpus: &'a [Publication], table: &'a BaselineTable, long_window: usize) -> Self {
        ModelContext {
            corpus,
            table,
            long_window,
            if_scaling: IfScaling::Rescaled,
        }
    }

    /// Maps one observation, failing on a missing baseline.
    pub fn sample(&self, obs: Observation, variant: Variant, t: usize) -> Result<RegressionSample> {
        match variant {
            Variant::Rescaled => {
                to_rescaled_sample(self.corpus, obs, self.table, t, self.long_window)
            }
            Variant::Log => to_log_sample(
                self.corpus,
                obs,
                self.table,
                t,
                self.long_window,
                self.if_scaling,
            ),
        }
    }

    /// Maps one observation for an IF-only model (no early-citation
    /// regressor; `y_t` is set to zero and never read).
    pub fn sample_if_only(&self, obs: Observation, variant: Variant) -> Result<RegressionSample> {
        match variant {
            Variant::Rescaled => {
                let p = obs.publication(self.corpus);
                let sc = obs.sc_id(self.corpus);
                let baseline =
                    self.table
                        .get(p.pub_year, sc)
                        .ok_or_else(|| Error::BaselineUnavailable {
                            year: p.pub_year,
                            sc: sc.to_string(),
                            t: self.long_window,
                        })?;
                let impact_factor = p.impact_factor.ok_or_else(|| {
                    Error::Validation(format!("publication {} has no impact factor", p.id))
                })?;
                let ifbar = baseline.ifbar.ok_or_else(|| Error::BaselineUnavailable {
                    year: p.pub_year,
                    sc: sc.to_string(),
                    t: self.long_window,
                })?;
                let cbar_long =
                    baseline.cbar[self.long_window].ok_or_else(|| Error::BaselineUnavailable {
                        year: p.pub_year,
                        sc: sc.to_string(),
                        t: self.long_window,
                    })?;
                Ok(RegressionSample {
                    pub_idx: obs.pub_idx,
                    sc_idx: obs.sc_idx,
                    x: impact_factor / ifbar,
                    y_t: 0.0,
                    y_long: p.citations[self.long_window] as f64 / cbar_long,
                    variant,
                })
            }
            Variant::Log => {
                let mut s = to_log_sample(
                    self.corpus,
                    obs,
                    self.table,
                    0,
                    self.long_window,
                    self.if_scaling,
                )?;
                s.y_t = 0.0;
                Ok(s)
            }
        }
    }

    /// Strict mapping of a whole group: publications without an IF are
    /// dropped (they are excluded from every regression and already
    /// appear in the ingest report), but any missing baseline aborts
    /// with the offending (year, SC, window). Used for per-SC fits.
    pub fn samples_strict(
        &self,
        obs: &[Observation],
        variant: Variant,
        t: usize,
    ) -> Result<Vec<RegressionSample>> {
        let mut out = Vec::with_capacity(obs.len());
        for o in obs {
            if o.publication(self.corpus).impact_factor.is_none() {
                continue;
            }
            out.push(self.sample(*o, variant, t)?);
        }
        Ok(out)
    }

    /// Lenient mapping for pooled subsets spanning many SCs: records
    /// that cannot be mapped (missing IF or missing baseline cell) are
    /// dropped and counted instead of aborting the pooled fit.
    pub fn samples_lenient(
        &self,
        obs: &[Observation],
        variant: Variant,
        t: usize,
    ) -> (Vec<RegressionSample>, usize) {
        let mut out = Vec::with_capacity(obs.len());
        let mut dropped = 0;
        for o in obs {
            match self.sample(*o, variant, t) {
                Ok(s) => out.push(s),
                Err(_) => dropped += 1,
            }
        }
        (out, dropped)
    }

    /// Lenient IF-only mapping (see `samples_lenient`).
    pub fn samples_if_only_lenient(
        &self,
        obs: &[Observation],
        variant: Variant,
    ) -> (Vec<RegressionSample>, usize) {
        let mut out = Vec::with_capacity(obs.len());
        let mut dropped = 0;
        for o in obs {
            match self.sample_if_only(*o, variant) {
                Ok(s) => out.push(s),
                Err(_) => dropped += 1,
            }
        }
        (out, dropped)
    }
}

/// Statistics of one successfully fitted model.
#[derive(Debug, Clone)]
pub struct FitStats {
    /// Robust inference per coefficient, in design order
    /// (intercept, impact factor, and - when present - early citations).
    pub coefficients: Vec<CoefficientInference>,
    pub r_squared: f64,
    pub bp_statistic: f64,
    pub bp_pvalue: f64,
    pub degenerate_response: bool,
}

/// The outcome of one (subset, variant, window) regression. Skipped
/// fits carry a reason instead of statistics; they are reported, never
/// silently dropped.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub subset: String,
    pub variant: Variant,
    /// The citation window; `None` for subset-level skips that are not
    /// tied to a window (e.g. an SC below the observation threshold).
    pub t: Option<usize>,
    pub n: usize,
    pub stats: Option<FitStats>,
    pub skip_reason: Option<String>,
}

impl FitResult {
    pub fn skipped(
        subset: impl Into<String>,
        variant: Variant,
        t: Option<usize>,
        n: usize,
        reason: impl Into<String>,
    ) -> Self {
        FitResult {
            subset: subset.into(),
            variant,
            t,
            n,
            stats: None,
            skip_reason: Some(reason.into()),
        }
    }
}

/// Fits one model (full or IF-only) and runs the robust-inference
/// pipeline over it.
pub fn fit_model(samples: &[RegressionSample], include_early: bool) -> Result<FitStats> {
    let design = if include_early {
        DesignMatrix::impact_model(samples)?
    } else {
        DesignMatrix::if_only_model(samples)?
    };
    let fit = fit_ols(&design)?;
    let summary = robust_summary(&fit, &design)?;
    Ok(FitStats {
        coefficients: summary.coefficients,
        r_squared: fit.r_squared,
        bp_statistic: summary.bp_statistic,
        bp_pvalue: summary.bp_pvalue,
        degenerate_response: fit.degenerate_response,
    })
}

/// Canonical report ordering: subset, then variant, then window.
pub fn sort_results(results: &mut [FitResult]) {
    results.sort_by(|a, b| {
        a.subset
            .cmp(&b.subset)
            .then_with(|| a.variant.label().cmp(b.variant.label()))
            .then_with(|| a.t.cmp(&b.t))
    });
}
