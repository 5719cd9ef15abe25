//! Run configuration: defaults, TOML config file, flag overrides and
//! the canonical hash stamped into report metadata.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::corpus::{LONG_WINDOW_DEFAULT, TRAJECTORY_LEN};
use crate::error::{Error, Result};
use crate::transforms::Variant;

/// Variant selection on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VariantSelection {
    Rescaled,
    Log,
    #[default]
    Both,
}

impl VariantSelection {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "rescaled" => Ok(VariantSelection::Rescaled),
            "log" => Ok(VariantSelection::Log),
            "both" => Ok(VariantSelection::Both),
            other => Err(Error::Config(format!(
                "unknown variant '{other}' (expected rescaled, log or both)"
            ))),
        }
    }

    pub fn variants(&self) -> Vec<Variant> {
        match self {
            VariantSelection::Rescaled => vec![Variant::Rescaled],
            VariantSelection::Log => vec![Variant::Log],
            VariantSelection::Both => vec![Variant::Rescaled, Variant::Log],
        }
    }

    fn label(&self) -> &'static str {
        match self {
            VariantSelection::Rescaled => "rescaled",
            VariantSelection::Log => "log",
            VariantSelection::Both => "both",
        }
    }
}

/// Synthetic-corpus settings (config-file section `[synth]`).
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    pub preset: Option<String>,
    pub n_scs: Option<usize>,
    pub n_pubs: Option<usize>,
    pub year: Option<i32>,
}

/// Partial configuration as read from a config file or flags; `None`
/// means "not set here". Flags override file values, which override
/// the built-in defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub input: Option<PathBuf>,
    pub variant: Option<String>,
    pub t_min: Option<usize>,
    pub t_max: Option<usize>,
    pub long_window: Option<usize>,
    pub sc_threshold: Option<usize>,
    pub uncited_threshold: Option<usize>,
    pub quantiles: Option<usize>,
    pub area_map: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub digits: Option<usize>,
    pub log_x_raw: Option<bool>,
    pub synth: Option<SynthSection>,
}

impl PartialConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Overlays `self` (higher precedence) on `base`. Synth sections
    /// merge field-wise, so one synth flag does not discard the rest of
    /// the file's `[synth]` section.
    pub fn over(self, base: PartialConfig) -> PartialConfig {
        let synth = match (self.synth, base.synth) {
            (Some(a), Some(b)) => Some(SynthSection {
                preset: a.preset.or(b.preset),
                n_scs: a.n_scs.or(b.n_scs),
                n_pubs: a.n_pubs.or(b.n_pubs),
                year: a.year.or(b.year),
            }),
            (a, b) => a.or(b),
        };
        PartialConfig {
            input: self.input.or(base.input),
            variant: self.variant.or(base.variant),
            t_min: self.t_min.or(base.t_min),
            t_max: self.t_max.or(base.t_max),
            long_window: self.long_window.or(base.long_window),
            sc_threshold: self.sc_threshold.or(base.sc_threshold),
            uncited_threshold: self.uncited_threshold.or(base.uncited_threshold),
            quantiles: self.quantiles.or(base.quantiles),
            area_map: self.area_map.or(base.area_map),
            out: self.out.or(base.out),
            seed: self.seed.or(base.seed),
            workers: self.workers.or(base.workers),
            digits: self.digits.or(base.digits),
            log_x_raw: self.log_x_raw.or(base.log_x_raw),
            synth,
        }
    }
}

/// Synthetic-generation settings with defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// `fast-peak` or `slow`.
    pub preset: String,
    pub n_scs: usize,
    pub n_pubs: usize,
    pub year: i32,
}

/// Fully resolved configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub variant_selection: VariantSelection,
    pub t_min: usize,
    pub t_max: usize,
    pub long_window: usize,
    pub sc_threshold: usize,
    pub uncited_threshold: usize,
    pub quantiles: Option<usize>,
    pub area_map: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub seed: u64,
    /// 0 = use the default thread pool.
    pub workers: usize,
    /// `None` = full-precision output.
    pub digits: Option<usize>,
    pub log_x_raw: bool,
    pub synth: SynthConfig,
}

impl RunConfig {
    pub fn resolve(p: PartialConfig) -> Result<RunConfig> {
        let long_window = p.long_window.unwrap_or(LONG_WINDOW_DEFAULT);
        if long_window == 0 || long_window >= TRAJECTORY_LEN {
            return Err(Error::Config(format!(
                "long window must lie in [1, {}], got {long_window}",
                TRAJECTORY_LEN - 1
            )));
        }
        let t_min = p.t_min.unwrap_or(0);
        let t_max = p.t_max.unwrap_or(long_window - 1);
        if t_min > t_max || t_max >= long_window {
            return Err(Error::Config(format!(
                "time-window range [{t_min}, {t_max}] must lie within [0, {}]",
                long_window - 1
            )));
        }
        let sc_threshold = p.sc_threshold.unwrap_or(100);
        let uncited_threshold = p.uncited_threshold.unwrap_or(50);
        if sc_threshold < 1 || uncited_threshold < 1 {
            return Err(Error::Config("thresholds must be at least 1".into()));
        }
        if let Some(q) = p.quantiles {
            if !(2..=1000).contains(&q) {
                return Err(Error::Config(format!(
                    "quantile count must lie in [2, 1000], got {q}"
                )));
            }
        }
        let variant_selection = match p.variant.as_deref() {
            Some(s) => VariantSelection::parse(s)?,
            None => VariantSelection::default(),
        };
        let synth_section = p.synth.unwrap_or(SynthSection {
            preset: None,
            n_scs: None,
            n_pubs: None,
            year: None,
        });
        let preset = synth_section.preset.unwrap_or_else(|| "fast-peak".into());
        if preset != "fast-peak" && preset != "slow" {
            return Err(Error::Config(format!(
                "unknown synth preset '{preset}' (expected fast-peak or slow)"
            )));
        }
        Ok(RunConfig {
            input: p.input,
            variant_selection,
            t_min,
            t_max,
            long_window,
            sc_threshold,
            uncited_threshold,
            quantiles: p.quantiles,
            area_map: p.area_map,
            out_dir: p.out.unwrap_or_else(|| PathBuf::from(".")),
            seed: p.seed.unwrap_or(42),
            workers: p.workers.unwrap_or(0),
            digits: p.digits,
            log_x_raw: p.log_x_raw.unwrap_or(false),
            synth: SynthConfig {
                preset,
                n_scs: synth_section.n_scs.unwrap_or(5),
                n_pubs: synth_section.n_pubs.unwrap_or(1000),
                year: synth_section.year.unwrap_or(2004),
            },
        })
    }

    /// Canonical serialization of every resolved field; hashing it keys
    /// each report to the exact configuration that produced it.
    fn canonical(&self) -> String {
        format!(
            "input={}\nvariant={}\nt_min={}\nt_max={}\nlong_window={}\nsc_threshold={}\n\
             uncited_threshold={}\nquantiles={}\narea_map={}\nseed={}\ndigits={}\nlog_x_raw={}\n\
             synth.preset={}\nsynth.n_scs={}\nsynth.n_pubs={}\nsynth.year={}\n",
            self.input
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
            self.variant_selection.label(),
            self.t_min,
            self.t_max,
            self.long_window,
            self.sc_threshold,
            self.uncited_threshold,
            self.quantiles.map(|q| q.to_string()).unwrap_or_default(),
            self.area_map
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
            self.seed,
            self.digits.map(|d| d.to_string()).unwrap_or_default(),
            self.log_x_raw,
            self.synth.preset,
            self.synth.n_scs,
            self.synth.n_pubs,
            self.synth.year,
        )
    }

    /// Short hex hash of the canonical configuration. Worker count and
    /// output directory are deliberately excluded: they must not change
    /// any output byte.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect::<String>()
    }
}

/// Runs `f` on a dedicated pool of `workers` threads (0 = default
/// global pool).
pub fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}
