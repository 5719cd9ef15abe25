//! Ordinary least squares with intercept via Householder QR.
//!
//! The model fitted throughout is small: an intercept plus one or two
//! regressors. The factorization is still done the numerically stable
//! way (orthogonal triangularization, leverages from the triangular
//! factor) so that per-group sweeps over tiny, badly scaled strata fail
//! loudly instead of returning garbage.

use crate::error::{Error, Result};
use crate::transforms::{neumaier_sum, RegressionSample};

/// Reciprocal-condition cutoff below which a design is reported as rank
/// deficient rather than solved.
pub const RCOND_MIN: f64 = 1e-12;

/// A design matrix with explicit intercept column plus the response.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    n: usize,
    p: usize,
    /// Column-major storage; `cols[0]` is the intercept column of ones.
    cols: Vec<Vec<f64>>,
    names: Vec<String>,
    response: Vec<f64>,
}

impl DesignMatrix {
    pub fn new(named_cols: Vec<(&str, Vec<f64>)>, response: Vec<f64>) -> Result<Self> {
        let p = named_cols.len();
        let n = response.len();
        if p == 0 {
            return Err(Error::Validation("design matrix needs at least one column".into()));
        }
        for (name, col) in &named_cols {
            if col.len() != n {
                return Err(Error::Validation(format!(
                    "column '{name}' has {} entries, response has {n}",
                    col.len()
                )));
            }
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::Validation(format!("non-finite entry in column '{name}'")));
            }
        }
        if response.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite entry in response".into()));
        }
        let names = named_cols.iter().map(|(s, _)| s.to_string()).collect();
        let cols = named_cols.into_iter().map(|(_, c)| c).collect();
        Ok(DesignMatrix {
            n,
            p,
            cols,
            names,
            response,
        })
    }

    /// Intercept + IF + early citations, responding with the long-term
    /// value: the two-regressor impact model.
    pub fn impact_model(samples: &[RegressionSample]) -> Result<Self> {
        let n = samples.len();
        Self::new(
            vec![
                ("intercept", vec![1.0; n]),
                ("impact_factor", samples.iter().map(|s| s.x).collect()),
                ("early_citations", samples.iter().map(|s| s.y_t).collect()),
            ],
            samples.iter().map(|s| s.y_long).collect(),
        )
    }

    /// Intercept + IF only (the uncited-publication model).
    pub fn if_only_model(samples: &[RegressionSample]) -> Result<Self> {
        let n = samples.len();
        Self::new(
            vec![
                ("intercept", vec![1.0; n]),
                ("impact_factor", samples.iter().map(|s| s.x).collect()),
            ],
            samples.iter().map(|s| s.y_long).collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.cols[j]
    }

    pub fn column_name(&self, j: usize) -> &str {
        &self.names[j]
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    /// Row `i` of the design, `[x_i0, ..., x_i(p-1)]`.
    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.p).map(|j| self.cols[j][i]).collect()
    }

    /// Same design with a replaced response (used by the auxiliary
    /// regression of the Breusch-Pagan test).
    pub fn with_response(&self, response: Vec<f64>) -> Result<Self> {
        if response.len() != self.n {
            return Err(Error::Validation("response length mismatch".into()));
        }
        if response.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite entry in response".into()));
        }
        Ok(DesignMatrix {
            response,
            ..self.clone()
        })
    }
}

/// A completed least-squares fit.
#[derive(Debug, Clone)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Hat-matrix diagonal, each in [0, 1].
    pub leverages: Vec<f64>,
    pub r_squared: f64,
    pub rss: f64,
    pub tss: f64,
    pub n: usize,
    pub p: usize,
    /// Set when the response was constant and the fit reported R² = 1 by
    /// convention instead of failing.
    pub degenerate_response: bool,
    /// Upper-triangular factor of the design (row-major p×p), kept for
    /// the sandwich covariance.
    pub(crate) r_factor: Vec<f64>,
}

impl OlsFit {
    /// Predicted long-term value for the two-regressor model.
    pub fn predict(&self, x: f64, y_t: f64) -> f64 {
        debug_assert_eq!(self.p, 3);
        self.coefficients[0] + self.coefficients[1] * x + self.coefficients[2] * y_t
    }

    /// Predicted value for arbitrary non-intercept regressors.
    pub fn predict_row(&self, regressors: &[f64]) -> f64 {
        debug_assert_eq!(regressors.len(), self.p - 1);
        self.coefficients[0]
            + regressors
                .iter()
                .zip(&self.coefficients[1..])
                .map(|(x, b)| x * b)
                .sum::<f64>()
    }

    pub(crate) fn r_at(&self, i: usize, j: usize) -> f64 {
        self.r_factor[i * self.p + j]
    }
}

/// Fits the least-squares coefficients of `design` by Householder QR.
pub fn fit_ols(design: &DesignMatrix) -> Result<OlsFit> {
    let n = design.n;
    let p = design.p;
    if n < p {
        return Err(Error::InsufficientData { needed: p, got: n });
    }

    // Working copies that the reflections overwrite.
    let mut a: Vec<Vec<f64>> = design.cols.clone();
    let mut qty: Vec<f64> = design.response.clone();

    for k in 0..p {
        let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::RankDeficient {
                column: design.names[k].clone(),
            });
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let denom: f64 = v.iter().map(|x| x * x).sum();
        if denom == 0.0 {
            // Column already collapsed onto the pivot axis.
            a[k][k] = alpha;
            continue;
        }
        for col in a.iter_mut().skip(k) {
            let s: f64 = v.iter().zip(&col[k..]).map(|(vi, ci)| vi * ci).sum();
            let scale = 2.0 * s / denom;
            for (vi, ci) in v.iter().zip(col[k..].iter_mut()) {
                *ci -= scale * vi;
            }
        }
        let s: f64 = v.iter().zip(&qty[k..]).map(|(vi, yi)| vi * yi).sum();
        let scale = 2.0 * s / denom;
        for (vi, yi) in v.iter().zip(qty[k..].iter_mut()) {
            *yi -= scale * vi;
        }
    }

    // Upper-triangular factor, row-major.
    let mut r_factor = vec![0.0; p * p];
    for i in 0..p {
        for j in i..p {
            r_factor[i * p + j] = a[j][i];
        }
    }

    let diag_abs: Vec<f64> = (0..p).map(|k| r_factor[k * p + k].abs()).collect();
    let max_diag = diag_abs.iter().cloned().fold(0.0, f64::max);
    let (argmin, min_diag) = diag_abs
        .iter()
        .cloned()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("p >= 1");
    if max_diag == 0.0 || min_diag / max_diag < RCOND_MIN {
        return Err(Error::RankDeficient {
            column: design.names[argmin].clone(),
        });
    }

    // Back substitution for the coefficients.
    let mut coefficients = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = qty[i];
        for j in i + 1..p {
            s -= r_factor[i * p + j] * coefficients[j];
        }
        coefficients[i] = s / r_factor[i * p + i];
    }

    // Residuals against the original columns.
    let residuals: Vec<f64> = (0..n)
        .map(|i| {
            let fitted: f64 = (0..p).map(|j| coefficients[j] * design.cols[j][i]).sum();
            design.response[i] - fitted
        })
        .collect();

    // Leverages: h_i = || R^{-T} x_i ||².
    let leverages: Vec<f64> = (0..n)
        .map(|i| {
            let mut w = vec![0.0; p];
            for j in 0..p {
                let mut s = design.cols[j][i];
                for k in 0..j {
                    s -= r_factor[k * p + j] * w[k];
                }
                w[j] = s / r_factor[j * p + j];
            }
            w.iter().map(|x| x * x).sum::<f64>().clamp(0.0, 1.0)
        })
        .collect();

    let rss = neumaier_sum(residuals.iter().map(|e| e * e));
    let ybar = neumaier_sum(design.response.iter().copied()) / n as f64;
    let tss = neumaier_sum(design.response.iter().map(|y| {
        let d = y - ybar;
        d * d
    }));

    let scale = design
        .response
        .iter()
        .fold(0.0f64, |acc, y| acc.max(y.abs()));
    let tol = n as f64 * (scale * 1e-12) * (scale * 1e-12);

    let (r_squared, degenerate_response) = if tss <= tol {
        if rss <= tol {
            (1.0, true)
        } else {
            return Err(Error::DegenerateResponse);
        }
    } else {
        ((1.0 - rss / tss).clamp(0.0, 1.0), false)
    };

    Ok(OlsFit {
        coefficients,
        residuals,
        leverages,
        r_squared,
        rss,
        tss,
        n,
        p,
        degenerate_response,
        r_factor,
    })
}
