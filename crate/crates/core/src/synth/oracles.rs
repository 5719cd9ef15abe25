//! Brute-force reference implementations used by the test suites.
//!
//! Everything here deliberately takes the dumbest correct route:
//! normal equations with a closed-form dense inverse, the sandwich
//! covariance evaluated term by term, distribution functions by
//! adaptive quadrature of the density, quantile bins by sort-and-scan.
//! None of it shares code with the production path it cross-checks.

#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

/// Closed-form inverse of a symmetric p×p matrix, p in {1, 2, 3}.
fn dense_inverse(m: &[f64], p: usize) -> Result<Vec<f64>> {
    let singular = || Error::Validation("singular normal-equations matrix".into());
    match p {
        1 => {
            if m[0] == 0.0 {
                return Err(singular());
            }
            Ok(vec![1.0 / m[0]])
        }
        2 => {
            let det = m[0] * m[3] - m[1] * m[2];
            if det.abs() < 1e-300 {
                return Err(singular());
            }
            Ok(vec![m[3] / det, -m[1] / det, -m[2] / det, m[0] / det])
        }
        3 => {
            let a = m[0];
            let b = m[1];
            let c = m[2];
            let d = m[3];
            let e = m[4];
            let f = m[5];
            let g = m[6];
            let h = m[7];
            let i = m[8];
            let det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
            if det.abs() < 1e-300 {
                return Err(singular());
            }
            Ok(vec![
                (e * i - f * h) / det,
                (c * h - b * i) / det,
                (b * f - c * e) / det,
                (f * g - d * i) / det,
                (a * i - c * g) / det,
                (c * d - a * f) / det,
                (d * h - e * g) / det,
                (b * g - a * h) / det,
                (a * e - b * d) / det,
            ])
        }
        _ => Err(Error::Validation(format!(
            "dense inverse implemented for p <= 3, got {p}"
        ))),
    }
}

fn xtx(cols: &[&[f64]]) -> Vec<f64> {
    let p = cols.len();
    let n = cols[0].len();
    let mut m = vec![0.0; p * p];
    for r in 0..p {
        for c in 0..p {
            let mut s = 0.0;
            for i in 0..n {
                s += cols[r][i] * cols[c][i];
            }
            m[r * p + c] = s;
        }
    }
    m
}

/// Least squares by explicit normal equations: `b = (X'X)⁻¹ X'y`.
/// Intended for small test instances only.
pub fn oracle_fit(cols: &[&[f64]], y: &[f64]) -> Result<Vec<f64>> {
    let p = cols.len();
    let n = cols[0].len();
    let inv = dense_inverse(&xtx(cols), p)?;
    let mut xty = vec![0.0; p];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            xty[j] += col[i] * y[i];
        }
    }
    let mut b = vec![0.0; p];
    for r in 0..p {
        for c in 0..p {
            b[r] += inv[r * p + c] * xty[c];
        }
    }
    Ok(b)
}

/// HC3 sandwich covariance evaluated directly from the dense formula,
/// fitting by normal equations and taking leverages from
/// `h_i = x_iᵀ (X'X)⁻¹ x_i`.
pub fn oracle_hc3(cols: &[&[f64]], y: &[f64]) -> Result<Vec<f64>> {
    let p = cols.len();
    let n = cols[0].len();
    let inv = dense_inverse(&xtx(cols), p)?;
    let b = oracle_fit(cols, y)?;

    let residual = |i: usize| -> f64 {
        let mut fitted = 0.0;
        for j in 0..p {
            fitted += b[j] * cols[j][i];
        }
        y[i] - fitted
    };
    let leverage = |i: usize| -> f64 {
        let mut h = 0.0;
        for r in 0..p {
            for c in 0..p {
                h += cols[r][i] * inv[r * p + c] * cols[c][i];
            }
        }
        h
    };

    let mut meat = vec![0.0; p * p];
    for i in 0..n {
        let e = residual(i);
        let one_minus_h = 1.0 - leverage(i);
        if one_minus_h <= 1e-12 {
            return Err(Error::PerfectLeverage { row: i });
        }
        let w = (e / one_minus_h) * (e / one_minus_h);
        for r in 0..p {
            for c in 0..p {
                meat[r * p + c] += w * cols[r][i] * cols[c][i];
            }
        }
    }

    let mut tmp = vec![0.0; p * p];
    for r in 0..p {
        for c in 0..p {
            for k in 0..p {
                tmp[r * p + c] += inv[r * p + k] * meat[k * p + c];
            }
        }
    }
    let mut cov = vec![0.0; p * p];
    for r in 0..p {
        for c in 0..p {
            for k in 0..p {
                cov[r * p + c] += tmp[r * p + k] * inv[k * p + c];
            }
        }
    }
    Ok(cov)
}

/// Adaptive Simpson quadrature with a fixed absolute tolerance.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        // Floor the per-level tolerance so floating-point noise in the
        // integrand cannot force a full-depth recursion tree.
        let child_tol = (0.5 * tol).max(1e-17);
        recurse(f, a, m, fa, flm, fm, left, child_tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, child_tol, depth - 1)
    }

    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 42)
}

/// Integrates `f` over `[a, b]`, pre-splitting at the given breakpoints
/// so that sharply localized integrands are always sampled near their
/// peak instead of being missed by the first Simpson stencil.
fn simpson_segmented(f: &dyn Fn(f64) -> f64, breaks: &[f64], a: f64, b: f64, tol: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    let mut points = vec![a];
    for &p in breaks {
        if p > a && p < b {
            points.push(p);
        }
    }
    points.push(b);
    points
        .windows(2)
        .map(|w| adaptive_simpson(f, w[0], w[1], tol))
        .sum()
}

/// Geometric ladder of breakpoints around a peak at `center` with the
/// given width scale.
fn peak_breaks(center: f64, scale: f64) -> Vec<f64> {
    let mut out = vec![center];
    for k in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0] {
        out.push(center - k * scale);
        out.push(center + k * scale);
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Student-t CDF by quadrature of the (unnormalized) density. For small
/// degrees of freedom the integral runs in the substituted variable
/// θ = atan(u/√ν), which compacts the heavy tails onto a finite
/// interval; for large ν the density is effectively Gaussian and a wide
/// finite window suffices.
pub fn oracle_student_t_cdf(x: f64, df: f64) -> f64 {
    assert!(df > 0.0);
    if df <= 200.0 {
        let half = std::f64::consts::FRAC_PI_2;
        let g = move |theta: f64| theta.cos().powf(df - 1.0);
        let theta_x = (x / df.sqrt()).atan();
        let breaks = peak_breaks(0.0, 1.0 / df.sqrt());
        let total = simpson_segmented(&g, &breaks, -half, half, 1e-14);
        let num = simpson_segmented(&g, &breaks, -half, theta_x, 1e-14);
        (num / total).clamp(0.0, 1.0)
    } else {
        let bound = 60.0;
        if x <= -bound {
            return 0.0;
        }
        let g = move |u: f64| (-(df + 1.0) / 2.0 * (u * u / df).ln_1p()).exp();
        let breaks = peak_breaks(0.0, 1.0);
        let total = simpson_segmented(&g, &breaks, -bound, bound, 1e-14);
        let num = simpson_segmented(&g, &breaks, -bound, x.min(bound), 1e-14);
        (num / total).clamp(0.0, 1.0)
    }
}

/// Chi-square CDF by quadrature of the density, windowed to the region
/// holding all non-negligible mass. The normalizing constant is the
/// quadrature of the same unnormalized density, so nothing here depends
/// on a gamma-function implementation.
pub fn oracle_chi_square_cdf(x: f64, df: f64) -> f64 {
    assert!(df > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if df < 2.0 {
        // Substituting u = v² removes the u^{df/2-1} singularity at zero.
        let g = move |v: f64| 2.0 * v.powf(df - 1.0) * (-0.5 * v * v).exp();
        let hi = (df + 60.0 * (2.0 * df).sqrt() + 120.0).sqrt();
        let breaks = peak_breaks(0.0, 1.0);
        let total = simpson_segmented(&g, &breaks, 0.0, hi, 1e-14);
        let num = simpson_segmented(&g, &breaks, 0.0, x.sqrt().min(hi), 1e-14);
        return (num / total).clamp(0.0, 1.0);
    }
    let sigma = (2.0 * df).sqrt();
    let spread = 60.0 * sigma + 120.0;
    let lo = (df - spread).max(0.0);
    let hi = df + spread;
    if x >= hi {
        return 1.0;
    }
    if x <= lo {
        return 0.0;
    }
    // Shifted log density, with the difference to the mode expanded
    // analytically: ℓ(u) − ℓ(u*) = (df/2 − 1)·ln(1 + (u−u*)/u*) − (u−u*)/2.
    // Forming ℓ(u) and ℓ(u*) separately and subtracting loses ~7 digits
    // at df ≈ 1e6 and leaves the integrand too noisy to quadrature.
    let mode = (df - 2.0).clamp(lo.max(1e-300), hi);
    let g = move |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let d = u - mode;
        ((0.5 * df - 1.0) * (d / mode).ln_1p() - 0.5 * d).exp()
    };
    let breaks = peak_breaks(mode, sigma.max(1.0));
    let tol = 1e-14 * sigma.max(1.0);
    let total = simpson_segmented(&g, &breaks, lo, hi, tol);
    let num = simpson_segmented(&g, &breaks, lo, x, tol);
    (num / total).clamp(0.0, 1.0)
}

/// Standard normal CDF by quadrature (independent of the library's
/// incomplete-gamma route).
pub fn oracle_normal_cdf(z: f64) -> f64 {
    if z <= -40.0 {
        return 0.0;
    }
    if z >= 40.0 {
        return 1.0;
    }
    let phi = |u: f64| (-0.5 * u * u).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if z >= 0.0 {
        0.5 + adaptive_simpson(&phi, 0.0, z, 1e-14)
    } else {
        0.5 - adaptive_simpson(&phi, z, 0.0, 1e-14)
    }
}

/// Sort-and-scan quantile binning: items are (count, tie-break key)
/// pairs of cited observations; returns, per bin 1..q, the indices of
/// the input items landing in it. Rank r (1-based) goes to the smallest
/// bin j with r ≤ ⌈j·n/q⌉.
pub fn oracle_quantile_bins<K: Ord + Clone>(items: &[(u32, K)], q: usize) -> Vec<Vec<usize>> {
    let n = items.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        items[a]
            .0
            .cmp(&items[b].0)
            .then_with(|| items[a].1.cmp(&items[b].1))
    });
    let mut bins = vec![Vec::new(); q];
    for (pos, idx) in order.into_iter().enumerate() {
        let rank = pos + 1;
        let mut assigned = q;
        for j in 1..=q {
            let boundary = (j * n).div_ceil(q);
            if rank <= boundary {
                assigned = j;
                break;
            }
        }
        bins[assigned - 1].push(idx);
    }
    bins
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0;
        for k in i..=j {
            ranks[order[k]] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks on ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let n = xs.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Kolmogorov-Smirnov distance between integer counts and a rounded
/// log-normal: under the hypothesis `count = round(X)` with
/// `ln X ~ N(μ, σ²)`, `P(count ≤ m) = F(m + ½)`, so the empirical CDF
/// is compared at half-integer continuity points.
pub fn ks_rounded_lognormal(counts: &[u32], mu: f64, sigma: f64) -> f64 {
    let n = counts.len();
    assert!(n > 0);
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let cdf = |m: f64| -> f64 {
        if m <= 0.0 {
            0.0
        } else {
            oracle_normal_cdf((m.ln() - mu) / sigma)
        }
    };
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < n {
        let v = sorted[i];
        let below = i as f64 / n as f64;
        let mut j = i;
        while j + 1 < n && sorted[j + 1] == v {
            j += 1;
        }
        let upto = (j + 1) as f64 / n as f64;
        d = d.max((below - cdf(v as f64 - 0.5)).abs());
        d = d.max((upto - cdf(v as f64 + 0.5)).abs());
        i = j + 1;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_fit_interpolates_exact_plane() {
        let ones = vec![1.0; 4];
        let x = vec![0.0, 1.0, 0.0, 1.0];
        let z = vec![0.0, 0.0, 1.0, 1.0];
        let y: Vec<f64> = x
            .iter()
            .zip(&z)
            .map(|(a, b)| 1.0 + 2.0 * a + 3.0 * b)
            .collect();
        let b = oracle_fit(&[&ones, &x, &z], &y).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-12);
        assert!((b[1] - 2.0).abs() < 1e-12);
        assert!((b[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_fit_identity_design() {
        // Orthonormal-ish design: coefficients are the per-column dot products.
        let c0 = vec![1.0, 0.0, 0.0];
        let c1 = vec![0.0, 1.0, 0.0];
        let c2 = vec![0.0, 0.0, 1.0];
        let y = vec![4.0, -2.0, 0.5];
        let b = oracle_fit(&[&c0, &c1, &c2], &y).unwrap();
        assert_eq!(b, vec![4.0, -2.0, 0.5]);
    }

    #[test]
    fn oracle_rejects_singular_design() {
        let ones = vec![1.0; 3];
        let same = vec![1.0; 3];
        let z = vec![0.0, 1.0, 2.0];
        assert!(oracle_fit(&[&ones, &same, &z], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn simpson_integrates_polynomials_exactly() {
        // Simpson is exact through cubics.
        let f = |x: f64| 3.0 * x * x;
        assert!((adaptive_simpson(&f, 0.0, 2.0, 1e-12) - 8.0).abs() < 1e-10);
        let g = |x: f64| x.exp();
        let exact = 1f64.exp() - 1.0;
        assert!((adaptive_simpson(&g, 0.0, 1.0, 1e-13) - exact).abs() < 1e-11);
    }

    #[test]
    fn quadrature_cdfs_hit_known_anchors() {
        // Cauchy (df = 1): CDF(1) = 0.75.
        assert!((oracle_student_t_cdf(1.0, 1.0) - 0.75).abs() < 1e-10);
        // Symmetry at zero.
        assert!((oracle_student_t_cdf(0.0, 7.0) - 0.5).abs() < 1e-10);
        // Large df limits to the normal CDF.
        assert!((oracle_student_t_cdf(1.96, 1e6) - oracle_normal_cdf(1.96)).abs() < 1e-5);
        // Chi-square df = 2 is exponential.
        assert!((oracle_chi_square_cdf(2.0, 2.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-10);
        // Chi-square df = 1 relates to the normal: F(x) = 2Φ(√x) − 1.
        let x: f64 = 2.7;
        let expected = 2.0 * oracle_normal_cdf(x.sqrt()) - 1.0;
        assert!((oracle_chi_square_cdf(x, 1.0) - expected).abs() < 1e-10);
    }

    #[test]
    fn quantile_bins_even_split_and_ties() {
        let items: Vec<(u32, u32)> = (1..=8).map(|c| (c, c)).collect();
        let bins = oracle_quantile_bins(&items, 4);
        let sizes: Vec<usize> = bins.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![2, 2, 2, 2]);

        let tied: Vec<(u32, u32)> = [1, 1, 1, 1, 2, 3, 4, 5]
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as u32))
            .collect();
        let bins = oracle_quantile_bins(&tied, 4);
        // Stable keyed order: the four ones fill the bottom two bins.
        assert_eq!(bins[0], vec![0, 1]);
        assert_eq!(bins[1], vec![2, 3]);
        assert_eq!(bins[2], vec![4, 5]);
        assert_eq!(bins[3], vec![6, 7]);
    }

    #[test]
    fn spearman_handles_monotone_and_ties() {
        let xs = vec![1.0, 2.0, 3.0, 4.0];
        let ys = vec![10.0, 20.0, 30.0, 40.0];
        assert!((spearman(&xs, &ys) - 1.0).abs() < 1e-12);
        let flipped: Vec<f64> = ys.iter().map(|y| -y).collect();
        assert!((spearman(&xs, &flipped) + 1.0).abs() < 1e-12);
    }
}
