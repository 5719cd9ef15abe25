//! Publication records, corpus CSV ingestion and subject-category handling.
//!
//! The corpus file is a UTF-8 CSV with header
//! `pub_id,year,journal_id,if,sc,c0,...,c9`. The `sc` field is a
//! semicolon-separated list of subject-category codes; `if` may be left
//! empty when the hosting journal has no impact factor. Citation counts
//! are cumulative: `c{t}` is the number of citations accrued `t` years
//! after publication.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Length of the stored citation trajectory (`c0..c9`).
pub const TRAJECTORY_LEN: usize = 10;

/// Default long-term window: citations nine years after publication.
pub const LONG_WINDOW_DEFAULT: usize = 9;

/// Expected CSV header of corpus files.
pub const CORPUS_HEADER: &str = "pub_id,year,journal_id,if,sc,c0,c1,c2,c3,c4,c5,c6,c7,c8,c9";

/// One indexed publication.
#[derive(Debug, Clone, PartialEq)]
pub struct Publication {
    pub id: String,
    pub pub_year: i32,
    pub journal_id: String,
    /// Two-year impact factor of the hosting journal at publication year.
    /// `None` when the journal has no IF; such records are excluded from
    /// every regression and counted in the ingest report.
    pub impact_factor: Option<f64>,
    pub sc_ids: Vec<String>,
    /// Cumulative citation counts, `citations[t]` = citations accrued
    /// `t` years after publication. Nondecreasing.
    pub citations: [u32; TRAJECTORY_LEN],
}

impl Publication {
    /// Checks the record invariants: nondecreasing citations, nonnegative
    /// impact factor, nonempty SC list.
    pub fn validate(&self) -> std::result::Result<(), (String, String)> {
        for t in 1..TRAJECTORY_LEN {
            if self.citations[t] < self.citations[t - 1] {
                return Err((
                    format!("c{t}"),
                    format!("nonmonotone citation trajectory at t={t}"),
                ));
            }
        }
        if let Some(f) = self.impact_factor {
            if !f.is_finite() || f < 0.0 {
                return Err(("if".into(), format!("impact factor must be a finite nonnegative number, got {f}")));
            }
        }
        if self.sc_ids.is_empty() {
            return Err(("sc".into(), "empty subject-category list".into()));
        }
        if self.sc_ids.iter().any(|s| s.is_empty()) {
            return Err(("sc".into(), "empty subject-category code".into()));
        }
        Ok(())
    }
}

/// One (publication, SC) pair. A publication hosted by a multi-category
/// journal yields one observation per SC.
///
/// Observations index into the corpus slice they were created from,
/// which keeps them `Copy` and cheap to regroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observation {
    /// Index of the publication in the corpus vector.
    pub pub_idx: usize,
    /// Index into that publication's `sc_ids`.
    pub sc_idx: usize,
}

impl Observation {
    pub fn publication<'a>(&self, corpus: &'a [Publication]) -> &'a Publication {
        &corpus[self.pub_idx]
    }

    pub fn sc_id<'a>(&self, corpus: &'a [Publication]) -> &'a str {
        &corpus[self.pub_idx].sc_ids[self.sc_idx]
    }
}

/// Counts gathered while ingesting a corpus file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub publications: usize,
    /// Records with an empty `if` field.
    pub missing_impact_factor: usize,
}

fn parse_field<T: std::str::FromStr>(raw: &str, row: usize, field: &str) -> Result<T> {
    raw.trim().parse().map_err(|_| Error::ParseRow {
        row,
        field: field.to_string(),
        message: format!("non-numeric field (got '{raw}')"),
    })
}

/// Parses a corpus CSV stream into validated publications.
///
/// Lines starting with `#` are treated as comments (the tool's own
/// outputs carry a metadata block in that form). Errors name the
/// offending 1-based data row and field.
pub fn parse_publications<R: Read>(source: R) -> Result<(Vec<Publication>, IngestReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(source);

    {
        let headers = reader.headers()?;
        let joined = headers.iter().collect::<Vec<_>>().join(",");
        if joined != CORPUS_HEADER {
            return Err(Error::Validation(format!(
                "unexpected corpus header '{joined}' (expected '{CORPUS_HEADER}')"
            )));
        }
    }

    let mut pubs = Vec::new();
    let mut report = IngestReport::default();

    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        if record.len() != 5 + TRAJECTORY_LEN {
            return Err(Error::ParseRow {
                row,
                field: "-".into(),
                message: format!(
                    "wrong column count: expected {}, got {}",
                    5 + TRAJECTORY_LEN,
                    record.len()
                ),
            });
        }

        let id = record[0].to_string();
        if id.is_empty() {
            return Err(Error::ParseRow {
                row,
                field: "pub_id".into(),
                message: "empty publication id".into(),
            });
        }
        let pub_year: i32 = parse_field(&record[1], row, "year")?;
        let journal_id = record[2].to_string();
        let impact_factor = if record[3].is_empty() {
            report.missing_impact_factor += 1;
            None
        } else {
            Some(parse_field::<f64>(&record[3], row, "if")?)
        };
        let sc_ids: Vec<String> = record[4]
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();

        let mut citations = [0u32; TRAJECTORY_LEN];
        for (t, slot) in citations.iter_mut().enumerate() {
            *slot = parse_field(&record[5 + t], row, &format!("c{t}"))?;
        }

        let publication = Publication {
            id,
            pub_year,
            journal_id,
            impact_factor,
            sc_ids,
            citations,
        };
        publication
            .validate()
            .map_err(|(field, message)| Error::ParseRow { row, field, message })?;
        pubs.push(publication);
    }

    report.publications = pubs.len();
    Ok((pubs, report))
}

/// Serializes publications back to the corpus CSV schema.
///
/// Floating-point fields use the shortest round-trip representation, so
/// parse → write → parse is the identity.
pub fn write_publications<W: Write>(mut out: W, pubs: &[Publication]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: "<corpus output>".into(),
        source,
    };
    writeln!(out, "{CORPUS_HEADER}").map_err(io_err)?;
    for p in pubs {
        let if_field = p.impact_factor.map(|f| f.to_string()).unwrap_or_default();
        let cites = p
            .citations
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",");
        writeln!(
            out,
            "{},{},{},{},{},{}",
            p.id,
            p.pub_year,
            p.journal_id,
            if_field,
            p.sc_ids.join(";"),
            cites
        )
        .map_err(io_err)?;
    }
    Ok(())
}

/// Expands publications into (publication, SC) observations, one per
/// subject category of the hosting journal.
pub fn expand_by_sc(pubs: &[Publication]) -> Vec<Observation> {
    let mut out = Vec::new();
    for (pub_idx, p) in pubs.iter().enumerate() {
        for sc_idx in 0..p.sc_ids.len() {
            out.push(Observation { pub_idx, sc_idx });
        }
    }
    out
}

/// Groups observations by SC, keeping only SCs whose observation count
/// strictly exceeds `threshold`.
pub fn filter_sc_min_count(
    corpus: &[Publication],
    obs: &[Observation],
    threshold: usize,
) -> BTreeMap<String, Vec<Observation>> {
    let mut groups: BTreeMap<String, Vec<Observation>> = BTreeMap::new();
    for o in obs {
        groups
            .entry(o.sc_id(corpus).to_string())
            .or_default()
            .push(*o);
    }
    groups.retain(|_, v| v.len() > threshold);
    groups
}

/// Groups all observations by SC with no size filtering.
pub fn group_by_sc(
    corpus: &[Publication],
    obs: &[Observation],
) -> BTreeMap<String, Vec<Observation>> {
    let mut groups: BTreeMap<String, Vec<Observation>> = BTreeMap::new();
    for o in obs {
        groups
            .entry(o.sc_id(corpus).to_string())
            .or_default()
            .push(*o);
    }
    groups
}
