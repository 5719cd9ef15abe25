//! Citedness quantile assignment and per-stratum regressions.

use crate::corpus::{Observation, Publication};
use crate::error::{Error, Result};
use crate::transforms::Variant;

use super::{fit_model, FitResult, ModelContext};

/// A partition of the cited observations at one window into `q` rank
/// bins, with the uncited observations kept aside.
#[derive(Debug, Clone)]
pub struct StratumAssignment {
    pub t: usize,
    pub q: usize,
    /// `bins[j]` holds the cited observations of quantile `j + 1`
    /// (bin 1 = least cited).
    pub bins: Vec<Vec<Observation>>,
    /// Observations with `c_t = 0`; never assigned a quantile.
    pub uncited: Vec<Observation>,
}

impl StratumAssignment {
    pub fn cited_count(&self) -> usize {
        self.bins.iter().map(Vec::len).sum()
    }
}

/// Assigns each cited observation (`c_t >= 1`) to its citedness
/// quantile at window `t`.
///
/// Cited observations are sorted by `(c_t, pub_id, sc_id)`, with the
/// id keys breaking count ties deterministically; bin `j` takes the
/// ranks in `(⌈(j−1)·n/q⌉, ⌈j·n/q⌉]`.
pub fn assign_citedness_quantiles(
    corpus: &[Publication],
    obs: &[Observation],
    t: usize,
    q: usize,
) -> Result<StratumAssignment> {
    if q < 2 {
        return Err(Error::Validation(format!("need at least two quantiles, got {q}")));
    }
    let mut cited = Vec::new();
    let mut uncited = Vec::new();
    for o in obs {
        if o.publication(corpus).citations[t] >= 1 {
            cited.push(*o);
        } else {
            uncited.push(*o);
        }
    }
    let n = cited.len();
    if n < q {
        return Err(Error::TooFewCited { cited: n, q });
    }

    cited.sort_by(|a, b| {
        let (pa, pb) = (a.publication(corpus), b.publication(corpus));
        pa.citations[t]
            .cmp(&pb.citations[t])
            .then_with(|| pa.id.cmp(&pb.id))
            .then_with(|| a.sc_id(corpus).cmp(b.sc_id(corpus)))
    });

    let mut bins = Vec::with_capacity(q);
    let mut start = 0;
    for j in 1..=q {
        let end = (j * n).div_ceil(q);
        bins.push(cited[start..end].to_vec());
        start = end;
    }
    Ok(StratumAssignment { t, q, bins, uncited })
}

/// Fits the full impact model per stratum plus the ALL row over the
/// entire observation set (cited and uncited).
///
/// Pooled subsets span many SCs, so unmappable observations (missing
/// IF, missing baseline cell) are dropped per row rather than failing
/// the whole stratum; `n` reports the observations actually fitted.
pub fn stratified_regressions(
    ctx: &ModelContext<'_>,
    assignment: &StratumAssignment,
    all_obs: &[Observation],
    variant: Variant,
) -> Vec<FitResult> {
    let t = assignment.t;
    let mut out = Vec::with_capacity(assignment.q + 1);
    for (j, bin) in assignment.bins.iter().enumerate() {
        let label = format!("Q{}", j + 1);
        out.push(fit_subset(ctx, &label, bin, variant, t));
    }
    out.push(fit_subset(ctx, "ALL", all_obs, variant, t));
    out
}

fn fit_subset(
    ctx: &ModelContext<'_>,
    label: &str,
    obs: &[Observation],
    variant: Variant,
    t: usize,
) -> FitResult {
    let (samples, _dropped) = ctx.samples_lenient(obs, variant, t);
    if samples.len() < 4 {
        return FitResult::skipped(
            label,
            variant,
            Some(t),
            samples.len(),
            format!("insufficient observations (n={})", samples.len()),
        );
    }
    match fit_model(&samples, true) {
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
