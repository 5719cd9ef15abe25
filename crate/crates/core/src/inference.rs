//! Robust inference on top of a least-squares fit: HC3 sandwich
//! covariance, Student-t p-values, the Breusch-Pagan heteroskedasticity
//! diagnostic, and the significance-star convention.

use crate::error::{Error, Result};
use crate::ols::{fit_ols, DesignMatrix, OlsFit};
use crate::special::{chi_square_sf, t_two_sided_p};

/// One coefficient with its robust inference columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientInference {
    pub estimate: f64,
    pub std_error: f64,
    pub t_statistic: f64,
    pub p_value: f64,
    /// Set when the standard error degenerated to zero and the p-value
    /// was assigned by convention.
    pub degenerate_se: bool,
}

impl CoefficientInference {
    pub fn stars(&self) -> &'static str {
        stars(self.p_value)
    }
}

/// Robust summary of one fitted model.
#[derive(Debug, Clone)]
pub struct RobustSummary {
    pub coefficients: Vec<CoefficientInference>,
    /// Row-major p×p HC3 covariance.
    pub covariance: Vec<f64>,
    pub bp_statistic: f64,
    pub bp_pvalue: f64,
}

/// HC3 sandwich covariance `(X'X)⁻¹ X'DX (X'X)⁻¹` with
/// `D = diag(e_i² / (1 − h_ii)²)`, row-major p×p.
///
/// The bread is formed from the triangular factor of the fit, so the
/// result matches a dense normal-equations evaluation only up to
/// floating-point error; the test suite pins that agreement to 1e-9.
pub fn hc3_covariance(fit: &OlsFit, design: &DesignMatrix) -> Result<Vec<f64>> {
    let n = fit.n;
    let p = fit.p;

    // Weights; a leverage of one makes the estimator undefined.
    let mut weights = Vec::with_capacity(n);
    for (i, (&e, &h)) in fit.residuals.iter().zip(&fit.leverages).enumerate() {
        let one_minus_h = 1.0 - h;
        if one_minus_h <= 1e-12 {
            return Err(Error::PerfectLeverage { row: i });
        }
        weights.push((e / one_minus_h) * (e / one_minus_h));
    }

    // Meat: Σ w_i x_i x_iᵀ.
    let mut meat = vec![0.0; p * p];
    for (i, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for r in 0..p {
            let xr = design.column(r)[i];
            for c in r..p {
                meat[r * p + c] += w * xr * design.column(c)[i];
            }
        }
    }
    for r in 0..p {
        for c in 0..r {
            meat[r * p + c] = meat[c * p + r];
        }
    }

    // Bread: (X'X)⁻¹ = R⁻¹ R⁻ᵀ from the stored triangular factor.
    let mut rinv = vec![0.0; p * p];
    for j in (0..p).rev() {
        rinv[j * p + j] = 1.0 / fit.r_at(j, j);
        for i in (0..j).rev() {
            let mut s = 0.0;
            for k in i + 1..=j {
                s += fit.r_at(i, k) * rinv[k * p + j];
            }
            rinv[i * p + j] = -s / fit.r_at(i, i);
        }
    }
    let mut bread = vec![0.0; p * p];
    for r in 0..p {
        for c in 0..p {
            let mut s = 0.0;
            for k in r.max(c)..p {
                s += rinv[r * p + k] * rinv[c * p + k];
            }
            bread[r * p + c] = s;
        }
    }

    let tmp = mat_mul(&bread, &meat, p);
    let mut cov = mat_mul(&tmp, &bread, p);
    // Exact symmetry.
    for r in 0..p {
        for c in 0..r {
            let avg = 0.5 * (cov[r * p + c] + cov[c * p + r]);
            cov[r * p + c] = avg;
            cov[c * p + r] = avg;
        }
    }
    Ok(cov)
}

fn mat_mul(a: &[f64], b: &[f64], p: usize) -> Vec<f64> {
    let mut out = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..p {
            let mut s = 0.0;
            for k in 0..p {
                s += a[i * p + k] * b[k * p + j];
            }
            out[i * p + j] = s;
        }
    }
    out
}

/// Per-coefficient robust t statistics and two-sided Student-t p-values
/// with df = n − p.
pub fn p_values(fit: &OlsFit, covariance: &[f64]) -> Result<Vec<CoefficientInference>> {
    let p = fit.p;
    if fit.n <= p {
        return Err(Error::InsufficientData {
            needed: p + 1,
            got: fit.n,
        });
    }
    let df = (fit.n - p) as f64;
    let mut out = Vec::with_capacity(p);
    for (j, &b) in fit.coefficients.iter().enumerate() {
        let var = covariance[j * p + j];
        if var < -1e-12 {
            return Err(Error::Validation(format!(
                "negative variance {var} for coefficient {j}"
            )));
        }
        let se = var.max(0.0).sqrt();
        if se == 0.0 {
            let (p_value, t_statistic) = if b == 0.0 {
                (1.0, 0.0)
            } else {
                (0.0, f64::INFINITY)
            };
            out.push(CoefficientInference {
                estimate: b,
                std_error: 0.0,
                t_statistic,
                p_value,
                degenerate_se: true,
            });
        } else {
            let t = b / se;
            out.push(CoefficientInference {
                estimate: b,
                std_error: se,
                t_statistic: t,
                p_value: t_two_sided_p(t, df),
                degenerate_se: false,
            });
        }
    }
    Ok(out)
}

/// Breusch-Pagan LM statistic and chi-square p-value.
///
/// Plain (non-studentized) LM form: squared residuals are regressed on
/// the non-intercept regressors and the statistic is n·R² of that
/// auxiliary fit, referred to chi-square with p − 1 degrees of freedom.
pub fn breusch_pagan(fit: &OlsFit, design: &DesignMatrix) -> Result<(f64, f64)> {
    let n = fit.n;
    let p = fit.p;
    if n <= p {
        return Err(Error::InsufficientData { needed: p + 1, got: n });
    }
    let df = (p - 1) as f64;
    let sq: Vec<f64> = fit.residuals.iter().map(|e| e * e).collect();

    // Residuals at (numerical) zero or squared residuals without any
    // variation: nothing to explain.
    let scale = design
        .response()
        .iter()
        .fold(0.0f64, |acc, y| acc.max(y.abs()));
    let zero_tol = n as f64 * (1e-12 * scale) * (1e-12 * scale);
    let max = sq.iter().cloned().fold(0.0f64, f64::max);
    let min = sq.iter().cloned().fold(f64::INFINITY, f64::min);
    if fit.rss <= zero_tol || max - min <= 1e-14 * max.max(1e-300) {
        return Ok((0.0, 1.0));
    }

    let aux = fit_ols(&design.with_response(sq)?)?;
    let statistic = n as f64 * aux.r_squared;
    let p_value = chi_square_sf(statistic, df);
    Ok((statistic, p_value))
}

/// Runs the whole robust-inference pipeline for one fit.
pub fn robust_summary(fit: &OlsFit, design: &DesignMatrix) -> Result<RobustSummary> {
    let covariance = hc3_covariance(fit, design)?;
    let coefficients = p_values(fit, &covariance)?;
    let (bp_statistic, bp_pvalue) = breusch_pagan(fit, design)?;
    Ok(RobustSummary {
        coefficients,
        covariance,
        bp_statistic,
        bp_pvalue,
    })
}

/// Significance stars with the strict thresholds
/// `*** p < 0.01`, `** p < 0.05`, `* p < 0.1`.
pub fn stars(p: f64) -> &'static str {
    debug_assert!((0.0..=1.0).contains(&p), "p-value out of range: {p}");
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::oracles::{oracle_hc3, oracle_student_t_cdf};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_design(rng: &mut ChaCha8Rng, n: usize, het: f64) -> DesignMatrix {
        let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 4.0 + 0.1).collect();
        let z: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 3.0).collect();
        let y: Vec<f64> = x
            .iter()
            .zip(&z)
            .map(|(xi, zi)| {
                let noise = (rng.random::<f64>() - 0.5) * (1.0 + het * xi);
                1.0 + 0.4 * xi + 1.1 * zi + noise
            })
            .collect();
        DesignMatrix::new(
            vec![("intercept", vec![1.0; n]), ("x", x), ("z", z)],
            y,
        )
        .unwrap()
    }

    #[test]
    fn zero_residuals_give_zero_matrix() {
        let x = vec![0.0, 1.0, 2.0, 3.0];
        let z = vec![1.0, 3.0, 2.0, 0.0];
        let y: Vec<f64> = x.iter().zip(&z).map(|(a, b)| 2.0 + a + b).collect();
        let d = DesignMatrix::new(
            vec![("intercept", vec![1.0; 4]), ("x", x), ("z", z)],
            y,
        )
        .unwrap();
        let fit = fit_ols(&d).unwrap();
        let residual_scale = fit.residuals.iter().fold(0.0f64, |a, e| a.max(e.abs()));
        assert!(residual_scale < 1e-12);
        // The sandwich weights are squared residuals, so the covariance is
        // numerically zero as well.
        let cov = hc3_covariance(&fit, &d).unwrap();
        assert!(cov.iter().all(|v| v.abs() < 1e-24), "{cov:?}");
    }

    #[test]
    fn matches_dense_sandwich_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let d = random_design(&mut rng, 8, 1.0);
        let fit = fit_ols(&d).unwrap();
        let cov = hc3_covariance(&fit, &d).unwrap();
        let cols: Vec<&[f64]> = (0..3).map(|j| d.column(j)).collect();
        let oracle = oracle_hc3(&cols, d.response()).unwrap();
        for (a, b) in cov.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn duplicating_rows_matches_recomputed_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let d = random_design(&mut rng, 10, 0.5);
        let mut cols2: Vec<Vec<f64>> = (0..3)
            .map(|j| {
                let mut c = d.column(j).to_vec();
                c.extend_from_slice(d.column(j));
                c
            })
            .collect();
        let mut y2 = d.response().to_vec();
        y2.extend_from_slice(d.response());
        let d2 = DesignMatrix::new(
            vec![
                ("intercept", cols2.remove(0)),
                ("x", cols2.remove(0)),
                ("z", cols2.remove(0)),
            ],
            y2,
        )
        .unwrap();
        let fit2 = fit_ols(&d2).unwrap();
        let cov2 = hc3_covariance(&fit2, &d2).unwrap();
        let cols_ref: Vec<&[f64]> = (0..3).map(|j| d2.column(j)).collect();
        let oracle = oracle_hc3(&cols_ref, d2.response()).unwrap();
        for (a, b) in cov2.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn covariance_is_symmetric_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let d = random_design(&mut rng, 30, 2.0);
            let fit = fit_ols(&d).unwrap();
            let cov = hc3_covariance(&fit, &d).unwrap();
            let p = 3;
            for r in 0..p {
                for c in 0..p {
                    assert!((cov[r * p + c] - cov[c * p + r]).abs() < 1e-10);
                }
                assert!(cov[r * p + r] >= -1e-10);
            }
            // PSD via leading principal minors (3×3).
            let det2 = cov[0] * cov[4] - cov[1] * cov[3];
            let det3 = cov[0] * (cov[4] * cov[8] - cov[5] * cov[7])
                - cov[1] * (cov[3] * cov[8] - cov[5] * cov[6])
                + cov[2] * (cov[3] * cov[7] - cov[4] * cov[6]);
            assert!(det2 >= -1e-10 && det3 >= -1e-12);
        }
    }

    #[test]
    fn p_value_spot_checks() {
        // |t| = 2, df = 10 against the quadrature oracle.
        let expected = 2.0 * (1.0 - oracle_student_t_cdf(2.0, 10.0));
        let got = t_two_sided_p(2.0, 10.0);
        assert!((got - expected).abs() < 1e-6, "{got} vs {expected}");
        assert!((got - 0.07339).abs() < 5e-5, "{got}");
        // Zero coefficient -> p = 1 through the zero-SE convention.
        let d = DesignMatrix::new(
            vec![
                ("intercept", vec![1.0; 5]),
                ("x", vec![0.0, 1.0, 2.0, 3.0, 4.0]),
                ("z", vec![1.0, 0.0, 2.0, 1.0, 3.0]),
            ],
            vec![0.0; 5],
        )
        .unwrap();
        let fit = fit_ols(&d).unwrap();
        let cov = hc3_covariance(&fit, &d).unwrap();
        let infs = p_values(&fit, &cov).unwrap();
        for inf in infs {
            assert_eq!(inf.p_value, 1.0);
            assert!(inf.degenerate_se);
        }
    }

    #[test]
    fn breusch_pagan_matches_two_stage_oracle() {
        // 12 points with variance growing in x.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 12;
        let x: Vec<f64> = (0..n).map(|i| 0.5 + i as f64 * 0.4).collect();
        let z: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0).collect();
        let y: Vec<f64> = x
            .iter()
            .zip(&z)
            .map(|(xi, zi)| 1.0 + xi + 0.5 * zi + (rng.random::<f64>() - 0.5) * xi * 2.0)
            .collect();
        let d = DesignMatrix::new(
            vec![
                ("intercept", vec![1.0; n]),
                ("x", x.clone()),
                ("z", z.clone()),
            ],
            y.clone(),
        )
        .unwrap();
        let fit = fit_ols(&d).unwrap();
        let (lm, pval) = breusch_pagan(&fit, &d).unwrap();

        // Hand-run auxiliary regression through the normal-equations oracle.
        let sq: Vec<f64> = fit.residuals.iter().map(|e| e * e).collect();
        let ones = vec![1.0; n];
        let cols: Vec<&[f64]> = vec![&ones, &x, &z];
        let b = crate::synth::oracles::oracle_fit(&cols, &sq).unwrap();
        let fitted: Vec<f64> = (0..n)
            .map(|i| b[0] + b[1] * x[i] + b[2] * z[i])
            .collect();
        let mean = sq.iter().sum::<f64>() / n as f64;
        let tss: f64 = sq.iter().map(|v| (v - mean) * (v - mean)).sum();
        let rss: f64 = sq
            .iter()
            .zip(&fitted)
            .map(|(v, f)| (v - f) * (v - f))
            .sum();
        let r2 = 1.0 - rss / tss;
        let lm_oracle = n as f64 * r2;
        assert!((lm - lm_oracle).abs() < 1e-8, "{lm} vs {lm_oracle}");
        assert!((0.0..=1.0).contains(&pval));
    }

    #[test]
    fn breusch_pagan_degenerate_cases() {
        // Exact fit: all residuals zero -> (0, 1).
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let z = vec![1.0, 3.0, 0.0, 2.0, 5.0];
        let y: Vec<f64> = x.iter().zip(&z).map(|(a, b)| 1.0 + 2.0 * a + b).collect();
        let d = DesignMatrix::new(
            vec![("intercept", vec![1.0; 5]), ("x", x), ("z", z)],
            y,
        )
        .unwrap();
        let fit = fit_ols(&d).unwrap();
        let (lm, p) = breusch_pagan(&fit, &d).unwrap();
        assert_eq!((lm, p), (0.0, 1.0));
    }

    #[test]
    fn stars_thresholds_are_strict() {
        assert_eq!(stars(0.005), "***");
        assert_eq!(stars(0.01), "**", "p = 0.01 fails the strict < 0.01 cut");
        assert_eq!(stars(0.04), "**");
        assert_eq!(stars(0.05), "*", "p = 0.05 fails the strict < 0.05 cut");
        assert_eq!(stars(0.09), "*");
        assert_eq!(stars(0.1), "");
        assert_eq!(stars(0.5), "");
        assert_eq!(stars(0.0), "***");
        assert_eq!(stars(1.0), "");
    }

    #[test]
    fn perfect_leverage_is_detected() {
        // Three points, three parameters: every leverage is exactly one.
        let d = DesignMatrix::new(
            vec![
                ("intercept", vec![1.0; 3]),
                ("x", vec![0.0, 1.0, 2.0]),
                ("z", vec![1.0, 0.0, 2.0]),
            ],
            vec![0.3, 1.7, 2.9],
        )
        .unwrap();
        let fit = fit_ols(&d).unwrap();
        match hc3_covariance(&fit, &d) {
            Err(Error::PerfectLeverage { .. }) => {}
            other => panic!("expected perfect-leverage error, got {other:?}"),
        }
    }
}
