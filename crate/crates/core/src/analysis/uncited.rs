//! IF-only regressions for publications uncited at a given window.

use crate::corpus::Observation;
use crate::transforms::Variant;

use super::{fit_model, FitResult, ModelContext};

/// Fits `y_long = b0 + b1·x` on the observations of `obs` that have no
/// citations at window `t`.
///
/// When the uncited subset does not strictly exceed `min_obs` (or too
/// few rows can be mapped into model space) the result is a skip entry,
/// never a silent drop.
pub fn uncited_regression(
    ctx: &ModelContext<'_>,
    obs: &[Observation],
    label: &str,
    variant: Variant,
    t: usize,
    min_obs: usize,
) -> FitResult {
    let uncited: Vec<Observation> = obs
        .iter()
        .filter(|o| o.publication(ctx.corpus).citations[t] == 0)
        .copied()
        .collect();

    if uncited.len() <= min_obs {
        return FitResult::skipped(
            label,
            variant,
            Some(t),
            uncited.len(),
            format!("uncited subset too small (n={} <= {min_obs})", uncited.len()),
        );
    }

    let (samples, _dropped) = ctx.samples_if_only_lenient(&uncited, variant);
    if samples.len() <= min_obs {
        return FitResult::skipped(
            label,
            variant,
            Some(t),
            samples.len(),
            format!(
                "uncited subset too small after model-space mapping (n={} <= {min_obs})",
                samples.len()
            ),
        );
    }

    match fit_model(&samples, false) {
        Ok(stats) => FitResult {
            subset: label.to_string(),
            variant,
            t: Some(t),
            n: samples.len(),
            stats: Some(stats),
            skip_reason: None,
        },
        Err(e) => FitResult::skipped(label, variant, Some(t), samples.len(), e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{expand_by_sc, Publication};
    use crate::transforms::compute_baselines;

    fn corpus_with_uncited(n_uncited: usize) -> Vec<Publication> {
        let mut pubs = Vec::new();
        // Uncited at t = 3, long-term counts independent of IF.
        for i in 0..n_uncited {
            let mut citations = [0u32; 10];
            citations[8] = (i % 3) as u32;
            citations[9] = (i % 3) as u32 + 1;
            pubs.push(Publication {
                id: format!("U{i:04}"),
                pub_year: 2004,
                journal_id: format!("J{}", i % 9),
                impact_factor: Some(0.5 + (i % 13) as f64 * 0.25),
                sc_ids: vec!["A".into()],
                citations,
            });
        }
        // A cited block so baselines exist at every window.
        for i in 0..60 {
            let c = (i % 5 + 1) as u32;
            let mut citations = [c; 10];
            for (t, slot) in citations.iter_mut().enumerate() {
                *slot = c + t as u32;
            }
            pubs.push(Publication {
                id: format!("C{i:04}"),
                pub_year: 2004,
                journal_id: format!("J{}", i % 9),
                impact_factor: Some(1.0 + (i % 4) as f64),
                sc_ids: vec!["A".into()],
                citations,
            });
        }
        pubs
    }

    #[test]
    fn fits_if_only_model_on_uncited_subset() {
        let corpus = corpus_with_uncited(80);
        let obs = expand_by_sc(&corpus);
        let table = compute_baselines(&corpus, &obs);
        let ctx = ModelContext::new(&corpus, &table, 9);
        let result = uncited_regression(&ctx, &obs, "ALL", Variant::Log, 3, 50);
        assert!(result.skip_reason.is_none(), "{:?}", result.skip_reason);
        assert_eq!(result.n, 80);
        let stats = result.stats.unwrap();
        assert_eq!(stats.coefficients.len(), 2, "intercept + IF only");
    }

    #[test]
    fn small_subset_is_skipped() {
        let corpus = corpus_with_uncited(30);
        let obs = expand_by_sc(&corpus);
        let table = compute_baselines(&corpus, &obs);
        let ctx = ModelContext::new(&corpus, &table, 9);
        let result = uncited_regression(&ctx, &obs, "ALL", Variant::Rescaled, 3, 50);
        assert!(result.stats.is_none());
        assert!(
            result.skip_reason.as_ref().unwrap().contains("too small"),
            "{:?}",
            result.skip_reason
        );
    }

    #[test]
    fn uncited_at_late_window_subset_of_early_window() {
        let corpus = corpus_with_uncited(100);
        let obs = expand_by_sc(&corpus);
        let at = |t: usize| -> Vec<&str> {
            obs.iter()
                .filter(|o| o.publication(&corpus).citations[t] == 0)
                .map(|o| o.publication(&corpus).id.as_str())
                .collect()
        };
        let early = at(3);
        let late = at(8);
        for id in &late {
            assert!(early.contains(id), "monotone citations: uncited at 8 ⊆ uncited at 3");
        }
        assert!(late.len() <= early.len());
    }

    #[test]
    fn constant_zero_response_reports_degenerate_fit() {
        // Every uncited publication stays uncited through the long window.
        let mut corpus = corpus_with_uncited(0);
        for i in 0..70 {
            corpus.push(Publication {
                id: format!("Z{i:04}"),
                pub_year: 2004,
                journal_id: format!("J{}", i % 6),
                impact_factor: Some(0.5 + (i % 11) as f64 * 0.3),
                sc_ids: vec!["A".into()],
                citations: [0; 10],
            });
        }
        let obs = expand_by_sc(&corpus);
        let table = compute_baselines(&corpus, &obs);
        let ctx = ModelContext::new(&corpus, &table, 9);
        let result = uncited_regression(&ctx, &obs, "ALL", Variant::Log, 3, 50);
        let stats = result.stats.expect("degenerate but reportable");
        assert!(stats.degenerate_response);
        assert_eq!(stats.r_squared, 1.0);
        assert_eq!(stats.bp_statistic, 0.0);
        assert_eq!(stats.bp_pvalue, 1.0);
    }
}
