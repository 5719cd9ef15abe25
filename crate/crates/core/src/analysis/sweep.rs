//! Per-SC regression sweeps over citation time windows.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::corpus::Observation;
use crate::transforms::Variant;

use super::{fit_model, FitResult, ModelContext};

/// Minimum usable regression size: three coefficients plus one residual
/// degree of freedom.
const MIN_FIT_N: usize = 4;

/// Runs the impact model for every (SC, window) pair of one variant.
///
/// The sweep is a parallel map over independent tasks; results come
/// back in deterministic (SC, t) order regardless of the worker count.
/// Fits that cannot run are reported as skipped entries with a reason.
pub fn run_sc_sweep(
    ctx: &ModelContext<'_>,
    groups: &BTreeMap<String, Vec<Observation>>,
    variant: Variant,
    t_range: RangeInclusive<usize>,
) -> Vec<FitResult> {
    let tasks: Vec<(&String, &Vec<Observation>, usize)> = groups
        .iter()
        .flat_map(|(sc, obs)| t_range.clone().map(move |t| (sc, obs, t)))
        .collect();

    tasks
        .par_iter()
        .map(|(sc, obs, t)| fit_sc_window(ctx, sc, obs, variant, *t))
        .collect()
}

fn fit_sc_window(
    ctx: &ModelContext<'_>,
    sc: &str,
    obs: &[Observation],
    variant: Variant,
    t: usize,
) -> FitResult {
    let samples = match ctx.samples_strict(obs, variant, t) {
        Ok(s) => s,
        Err(e) => return FitResult::skipped(sc, variant, Some(t), obs.len(), e.to_string()),
    };
    if samples.len() < MIN_FIT_N {
        return FitResult::skipped(
            sc,
            variant,
            Some(t),
            samples.len(),
            format!("insufficient observations with impact factor (n={})", samples.len()),
        );
    }
    match fit_model(&samples, true) {
        Ok(stats) => FitResult {
            subset: sc.to_string(),
            variant,
            t: Some(t),
            n: samples.len(),
            stats: Some(stats),
            skip_reason: None,
        },
        Err(e) => FitResult::skipped(sc, variant, Some(t), samples.len(), e.to_string()),
    }
}
