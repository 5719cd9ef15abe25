//! Prediction of long-term citation impact from early citations and
//! journal impact factor.
//!
//! The crate ingests a publication corpus, rescales citations and
//! impact factors against per-(year, subject category) baselines (or
//! log-transforms the counts), fits the two-regressor linear impact
//! model per subject category and citation time window with
//! heteroskedasticity-robust (HC3) inference, and derives the
//! downstream analyses: macro-area summaries, uncited-publication
//! regressions, citedness-quartile regressions and median
//! prediction-error curves. A deterministic synthetic-corpus generator
//! with known ground truth backs the verification suites.
//!
//! ```
//! use citefore::analysis::{run_sc_sweep, ModelContext};
//! use citefore::corpus::{expand_by_sc, filter_sc_min_count};
//! use citefore::synth::{generate_corpus, GeneratorConfig};
//! use citefore::transforms::{compute_baselines, Variant};
//!
//! let corpus = generate_corpus(&GeneratorConfig::fast_peak(7, 1, 300))?;
//! let obs = expand_by_sc(&corpus);
//! let groups = filter_sc_min_count(&corpus, &obs, 100);
//! let table = compute_baselines(&corpus, &obs);
//! let ctx = ModelContext::new(&corpus, &table, 9);
//!
//! let results = run_sc_sweep(&ctx, &groups, Variant::Rescaled, 0..=8);
//! assert_eq!(results.len(), 9);
//! let eight_year = results.last().unwrap().stats.as_ref().unwrap();
//! assert!(eight_year.r_squared > 0.9);
//! # Ok::<(), citefore::Error>(())
//! ```

pub mod analysis;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod inference;
pub mod ols;
pub mod report;
pub mod special;
pub mod synth;
pub mod transforms;

pub use corpus::{Observation, Publication, LONG_WINDOW_DEFAULT, TRAJECTORY_LEN};
pub use error::{Error, Result};
pub use transforms::Variant;

/// Crate version string stamped into report metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
