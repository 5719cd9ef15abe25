//! Macro-area summary statistics over per-SC fit results.
//!
//! IF-coefficient statistics follow the convention of the summary
//! tables: they run over the SCs whose IF coefficient has p < 0.1, with
//! the standard deviation marked unavailable below two qualifying SCs.
//! Early-citation and R² statistics run over all SCs of the area.

use std::collections::BTreeMap;
use std::io::Read;

use crate::error::{Error, Result};
use crate::transforms::Variant;

use super::FitResult;

/// SC code → macro-area name.
#[derive(Debug, Clone, Default)]
pub struct AreaMap {
    map: BTreeMap<String, String>,
}

impl AreaMap {
    pub fn new(map: BTreeMap<String, String>) -> Self {
        AreaMap { map }
    }

    /// Reads a two-column CSV `sc,macro_area` (header required,
    /// `#` comments allowed).
    pub fn from_reader<R: Read>(source: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(source);
        {
            let headers = reader.headers()?;
            let joined = headers.iter().collect::<Vec<_>>().join(",");
            if joined != "sc,macro_area" {
                return Err(Error::Validation(format!(
                    "unexpected area-map header '{joined}' (expected 'sc,macro_area')"
                )));
            }
        }
        let mut map = BTreeMap::new();
        for record in reader.records() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::Validation("area map rows must have two columns".into()));
            }
            map.insert(record[0].to_string(), record[1].to_string());
        }
        Ok(AreaMap { map })
    }

    pub fn lookup(&self, sc: &str) -> Result<&str> {
        self.map
            .get(sc)
            .map(String::as_str)
            .ok_or_else(|| Error::UnmappedSubjectCategory { sc: sc.to_string() })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// min/max/mean of a nonempty coefficient set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeStat {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// Summary row for one macro-area at a fixed variant and window.
#[derive(Debug, Clone)]
pub struct MacroAreaSummary {
    pub area: String,
    pub variant: Variant,
    pub t: usize,
    /// Fitted SCs mapped to this area.
    pub n_scs: usize,
    /// SCs whose IF coefficient has p < 0.1.
    pub n_if_significant: usize,
    /// IF-coefficient statistics over the qualifying SCs; `None` when
    /// no SC qualifies.
    pub if_coeff: Option<RangeStat>,
    /// Unavailable below two qualifying SCs.
    pub if_sd: Option<f64>,
    /// Early-citation statistics over all SCs of the area.
    pub early_coeff: RangeStat,
    pub early_sd: Option<f64>,
    pub r2_mean: f64,
    pub r2_sd: Option<f64>,
}

fn range_stat(values: &[f64]) -> RangeStat {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    RangeStat { min, max, mean }
}

fn sample_sd(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (values.len() - 1) as f64;
    Some(var.sqrt())
}

/// Aggregates per-SC fit results (one variant, one window) into one
/// summary row per macro-area, sorted by area name.
pub fn summarize_macro_areas(
    fits: &[FitResult],
    area_map: &AreaMap,
) -> Result<Vec<MacroAreaSummary>> {
    let fitted: Vec<&FitResult> = fits.iter().filter(|f| f.stats.is_some()).collect();
    if fitted.is_empty() {
        return Ok(Vec::new());
    }
    let variant = fitted[0].variant;
    let t = fitted[0].t.ok_or(Error::MixedWindows)?;
    for f in &fitted {
        if f.t != Some(t) {
            return Err(Error::MixedWindows);
        }
        if f.variant != variant {
            return Err(Error::Validation(
                "summary requires fits from a single variant".into(),
            ));
        }
        if f.stats.as_ref().unwrap().coefficients.len() != 3 {
            return Err(Error::Validation(format!(
                "summary expects the two-regressor impact model, subset '{}' has {} coefficients",
                f.subset,
                f.stats.as_ref().unwrap().coefficients.len()
            )));
        }
    }

    let mut by_area: BTreeMap<String, Vec<&FitResult>> = BTreeMap::new();
    for f in &fitted {
        let area = area_map.lookup(&f.subset)?;
        by_area.entry(area.to_string()).or_default().push(f);
    }

    let mut out = Vec::with_capacity(by_area.len());
    for (area, members) in by_area {
        let if_qualifying: Vec<f64> = members
            .iter()
            .filter(|f| f.stats.as_ref().unwrap().coefficients[1].p_value < 0.1)
            .map(|f| f.stats.as_ref().unwrap().coefficients[1].estimate)
            .collect();
        let early: Vec<f64> = members
            .iter()
            .map(|f| f.stats.as_ref().unwrap().coefficients[2].estimate)
            .collect();
        let r2: Vec<f64> = members
            .iter()
            .map(|f| f.stats.as_ref().unwrap().r_squared)
            .collect();

        out.push(MacroAreaSummary {
            area,
            variant,
            t,
            n_scs: members.len(),
            n_if_significant: if_qualifying.len(),
            if_coeff: if if_qualifying.is_empty() {
                None
            } else {
                Some(range_stat(&if_qualifying))
            },
            if_sd: sample_sd(&if_qualifying),
            early_coeff: range_stat(&early),
            early_sd: sample_sd(&early),
            r2_mean: range_stat(&r2).mean,
            r2_sd: sample_sd(&r2),
        });
    }
    Ok(out)
}
