//! Rescaling baselines and the two model-space transforms.
//!
//! The rescaled variant divides citation counts by the mean count of
//! cited publications of the same year and SC, and impact factors by the
//! mean IF over journals of the same year and SC. The log variant maps
//! counts through `ln(1 + c)` instead, keeping the IF regressor rescaled
//! unless raw IF is requested.

use std::collections::BTreeMap;

use crate::corpus::{Observation, Publication, TRAJECTORY_LEN};
use crate::error::{Error, Result};

/// Which of the two model-space transforms is in effect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    Rescaled,
    Log,
}

impl Variant {
    pub fn label(&self) -> &'static str {
        match self {
            Variant::Rescaled => "rescaled",
            Variant::Log => "log",
        }
    }

    pub fn parse(s: &str) -> Result<Variant> {
        match s {
            "rescaled" => Ok(Variant::Rescaled),
            "log" => Ok(Variant::Log),
            other => Err(Error::Validation(format!("unknown variant '{other}'"))),
        }
    }
}

/// IF regressor scaling for the log variant. The rescaled variant always
/// divides by the per-(year, SC) mean IF; this switch exists for
/// sensitivity analysis of the log variant only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IfScaling {
    #[default]
    Rescaled,
    Raw,
}

/// Compensated (Neumaier) summation. Keeps cited-subset means accurate
/// enough for the 1e-12 normalization invariant.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    neumaier_sum(values.iter().copied()) / values.len() as f64
}

/// Rescaling denominators for one (year, SC) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    /// `cbar[t]`: mean citation count at window `t` over publications of
    /// the cell with `c_t >= 1`; `None` when the cell has no such
    /// publication ("cited" is evaluated per window).
    pub cbar: [Option<f64>; TRAJECTORY_LEN],
    /// Number of publications contributing to `cbar[t]`.
    pub n_cited: [u32; TRAJECTORY_LEN],
    /// Mean impact factor over the distinct journals appearing in the
    /// cell; `None` when no journal reports an IF.
    pub ifbar: Option<f64>,
    pub n_journals: u32,
}

/// Per-(year, SC) rescaling denominators.
#[derive(Debug, Clone, Default)]
pub struct BaselineTable {
    cells: BTreeMap<(i32, String), Baseline>,
}

impl BaselineTable {
    pub fn get(&self, year: i32, sc: &str) -> Option<&Baseline> {
        self.cells.get(&(year, sc.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i32, String), &Baseline)> {
        self.cells.iter()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Computes the rescaling denominators for every (year, SC) cell present
/// in `obs`.
///
/// The journal mean uses distinct journals: a journal hosting many
/// publications in the cell counts once, with its IF taken as the mean
/// of the (normally identical) values reported on its rows. Journals
/// with no reported IF do not contribute.
pub fn compute_baselines(corpus: &[Publication], obs: &[Observation]) -> BaselineTable {
    #[derive(Default)]
    struct CellAcc {
        cites: [Vec<f64>; TRAJECTORY_LEN],
        journals: BTreeMap<String, (f64, u32)>,
    }

    let mut acc: BTreeMap<(i32, String), CellAcc> = BTreeMap::new();
    for o in obs {
        let p = o.publication(corpus);
        let cell = acc
            .entry((p.pub_year, o.sc_id(corpus).to_string()))
            .or_default();
        for t in 0..TRAJECTORY_LEN {
            if p.citations[t] >= 1 {
                cell.cites[t].push(p.citations[t] as f64);
            }
        }
        if let Some(f) = p.impact_factor {
            let j = cell.journals.entry(p.journal_id.clone()).or_insert((0.0, 0));
            j.0 += f;
            j.1 += 1;
        }
    }

    let mut cells = BTreeMap::new();
    for (key, cell) in acc {
        let mut cbar = [None; TRAJECTORY_LEN];
        let mut n_cited = [0u32; TRAJECTORY_LEN];
        for t in 0..TRAJECTORY_LEN {
            n_cited[t] = cell.cites[t].len() as u32;
            if !cell.cites[t].is_empty() {
                cbar[t] = Some(mean(&cell.cites[t]));
            }
        }
        let journal_ifs: Vec<f64> = cell.journals.values().map(|(s, n)| s / *n as f64).collect();
        let ifbar = if journal_ifs.is_empty() {
            None
        } else {
            Some(mean(&journal_ifs))
        };
        cells.insert(
            key,
            Baseline {
                cbar,
                n_cited,
                ifbar,
                n_journals: journal_ifs.len() as u32,
            },
        );
    }
    BaselineTable { cells }
}

/// One observation mapped into model space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionSample {
    /// Index of the underlying publication in the corpus vector.
    pub pub_idx: usize,
    /// Index of the observation's SC within that publication's list.
    pub sc_idx: usize,
    /// IF regressor.
    pub x: f64,
    /// Early-citation regressor at the chosen window.
    pub y_t: f64,
    /// Long-term response.
    pub y_long: f64,
    pub variant: Variant,
}

fn require_ifbar(b: &Baseline, year: i32, sc: &str, t: usize) -> Result<f64> {
    b.ifbar.ok_or_else(|| Error::BaselineUnavailable {
        year,
        sc: sc.to_string(),
        t,
    })
}

fn require_cbar(b: &Baseline, year: i32, sc: &str, t: usize) -> Result<f64> {
    b.cbar[t].ok_or_else(|| Error::BaselineUnavailable {
        year,
        sc: sc.to_string(),
        t,
    })
}

/// Maps a publication into rescaled model space:
/// `x = IF/IF̄`, `y_t = c_t/c̄_t`, `y_long = c_L/c̄_L`.
pub fn to_rescaled_sample(
    corpus: &[Publication],
    obs: Observation,
    table: &BaselineTable,
    t: usize,
    long_window: usize,
) -> Result<RegressionSample> {
    let p = obs.publication(corpus);
    let sc = obs.sc_id(corpus);
    let baseline = table
        .get(p.pub_year, sc)
        .ok_or_else(|| Error::BaselineUnavailable {
            year: p.pub_year,
            sc: sc.to_string(),
            t,
        })?;
    let impact_factor = p.impact_factor.ok_or_else(|| {
        Error::Validation(format!("publication {} has no impact factor", p.id))
    })?;

    let ifbar = require_ifbar(baseline, p.pub_year, sc, t)?;
    let cbar_t = require_cbar(baseline, p.pub_year, sc, t)?;
    let cbar_long = require_cbar(baseline, p.pub_year, sc, long_window)?;

    Ok(RegressionSample {
        pub_idx: obs.pub_idx,
        sc_idx: obs.sc_idx,
        x: impact_factor / ifbar,
        y_t: p.citations[t] as f64 / cbar_t,
        y_long: p.citations[long_window] as f64 / cbar_long,
        variant: Variant::Rescaled,
    })
}

/// Maps a publication into log model space:
/// `y_t = ln(1 + c_t)`, `y_long = ln(1 + c_L)`, with `x` rescaled
/// (default) or raw depending on `scaling`.
pub fn to_log_sample(
    corpus: &[Publication],
    obs: Observation,
    table: &BaselineTable,
    t: usize,
    long_window: usize,
    scaling: IfScaling,
) -> Result<RegressionSample> {
    let p = obs.publication(corpus);
    let sc = obs.sc_id(corpus);
    let impact_factor = p.impact_factor.ok_or_else(|| {
        Error::Validation(format!("publication {} has no impact factor", p.id))
    })?;

    let x = match scaling {
        IfScaling::Raw => impact_factor,
        IfScaling::Rescaled => {
            let baseline = table
                .get(p.pub_year, sc)
                .ok_or_else(|| Error::BaselineUnavailable {
                    year: p.pub_year,
                    sc: sc.to_string(),
                    t,
                })?;
            impact_factor / require_ifbar(baseline, p.pub_year, sc, t)?
        }
    };

    Ok(RegressionSample {
        pub_idx: obs.pub_idx,
        sc_idx: obs.sc_idx,
        x,
        y_t: (1.0 + p.citations[t] as f64).ln(),
        y_long: (1.0 + p.citations[long_window] as f64).ln(),
        variant: Variant::Log,
    })
}
