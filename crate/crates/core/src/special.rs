//! Special functions backing the t and chi-square tail probabilities.
//!
//! Everything here is classical double-precision machinery: a Lanczos
//! log-gamma, the regularized incomplete beta via Lentz's continued
//! fraction, and the regularized incomplete gamma via series /
//! continued fraction. Accuracy contract: absolute error below 1e-10
//! for degrees of freedom in [1, 1e6], checked against quadrature
//! oracles in the test suite.

/// Lanczos coefficients (Godfrey's set, g = 607/128).
const LANCZOS_G: f64 = 607.0 / 128.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 15] = [
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
];

/// Natural log of the gamma function for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires a positive argument, got {x}");
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + (sum / x).ln()
}

const MAX_ITER: usize = 100_000;
const CF_EPS: f64 = 1e-16;
const CF_TINY: f64 = 1e-300;

/// Above this shape parameter the scale exponents are expanded in
/// Stirling form: forming `a·ln x − x − lnΓ(a)` from its parts loses
/// seven digits around a ≈ 1e6, which would put the CDF tails outside
/// the 1e-10 accuracy contract.
const STIRLING_MIN_A: f64 = 1e3;

/// Stirling remainder s(a) = lnΓ(a) − [(a − ½)·ln a − a + ½·ln 2π].
fn stirling_residual(a: f64) -> f64 {
    let a2 = a * a;
    1.0 / (12.0 * a) - 1.0 / (360.0 * a * a2) + 1.0 / (1260.0 * a2 * a2 * a)
}

/// ln(x^a · e^{−x} / Γ(a)), the scale factor of the incomplete gamma.
fn ln_gamma_scale(a: f64, x: f64) -> f64 {
    if a < STIRLING_MIN_A {
        return a * x.ln() - x - ln_gamma(a);
    }
    let d = x - a;
    (a * (d / a).ln_1p() - d) + 0.5 * (a / (2.0 * std::f64::consts::PI)).ln()
        - stirling_residual(a)
}

/// lnΓ(a + b) − lnΓ(a) without forming the two large values.
fn ln_gamma_ratio(a: f64, b: f64) -> f64 {
    if a < STIRLING_MIN_A {
        return ln_gamma(a + b) - ln_gamma(a);
    }
    (a - 0.5) * (b / a).ln_1p() + b * (a + b).ln() - b + stirling_residual(a + b)
        - stirling_residual(a)
}

/// Continued fraction of the incomplete beta (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;

    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=MAX_ITER {
        let m_f = m as f64;
        let m2 = 2.0 * m_f;

        let aa = m_f * (b - m_f) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m_f) * (qab + m_f) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;

        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    reg_inc_beta_split(a, b, x, 1.0 - x)
}

/// Incomplete beta with the complement `xc = 1 − x` supplied by the
/// caller. Callers that know the complement exactly (the t CDF does)
/// avoid losing it to rounding when x is close to one.
fn reg_inc_beta_split(a: f64, b: f64, x: f64, xc: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "reg_inc_beta requires positive shape parameters");
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 || xc <= 0.0 {
        return 1.0;
    }
    // ln of x^a (1−x)^b Γ(a+b)/(Γ(a)Γ(b)), anchored on the larger shape:
    // its power term runs through ln1p of the other side's argument and
    // the gamma terms through the ratio form, which keeps the exponent
    // accurate when one shape is huge (t CDFs at large df).
    let (lo, hi, small_arg) = if a >= b { (b, a, xc) } else { (a, b, x) };
    let ln_front =
        ln_gamma_ratio(hi, lo) - ln_gamma(lo) + hi * (-small_arg).ln_1p() + lo * small_arg.ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, xc) / b
    }
}

/// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0.
pub fn reg_inc_gamma_p(a: f64, x: f64) -> f64 {
    assert!(a > 0.0, "reg_inc_gamma_p requires a > 0");
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        // Series representation.
        let mut term = 1.0 / a;
        let mut sum = term;
        for n in 1..=MAX_ITER {
            term *= x / (a + n as f64);
            sum += term;
            if term.abs() < sum.abs() * CF_EPS {
                break;
            }
        }
        (sum * ln_gamma_scale(a, x).exp()).clamp(0.0, 1.0)
    } else {
        1.0 - reg_inc_gamma_q_cf(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x).
pub fn reg_inc_gamma_q(a: f64, x: f64) -> f64 {
    assert!(a > 0.0, "reg_inc_gamma_q requires a > 0");
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - reg_inc_gamma_p(a, x)
    } else {
        reg_inc_gamma_q_cf(a, x)
    }
}

/// Continued-fraction evaluation of Q(a, x), valid for x >= a + 1.
fn reg_inc_gamma_q_cf(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / CF_TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = b + an / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    (h * ln_gamma_scale(a, x).exp()).clamp(0.0, 1.0)
}

/// P(T > t) for the Student-t distribution with `df` degrees of freedom,
/// for t >= 0.
pub fn student_t_sf(t: f64, df: f64) -> f64 {
    assert!(df > 0.0, "degrees of freedom must be positive");
    assert!(t >= 0.0, "student_t_sf expects a nonnegative statistic");
    if t == 0.0 {
        return 0.5;
    }
    let x = df / (df + t * t);
    let xc = t * t / (df + t * t);
    0.5 * reg_inc_beta_split(0.5 * df, 0.5, x, xc)
}

/// Student-t CDF at any real `t`.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    if t >= 0.0 {
        1.0 - student_t_sf(t, df)
    } else {
        student_t_sf(-t, df)
    }
}

/// Two-sided p-value of a t statistic.
pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
    (2.0 * student_t_sf(t.abs(), df)).min(1.0)
}

/// Chi-square CDF with `df` degrees of freedom.
pub fn chi_square_cdf(x: f64, df: f64) -> f64 {
    assert!(df > 0.0, "degrees of freedom must be positive");
    if x <= 0.0 {
        return 0.0;
    }
    reg_inc_gamma_p(0.5 * df, 0.5 * x)
}

/// Upper tail of the chi-square distribution.
pub fn chi_square_sf(x: f64, df: f64) -> f64 {
    assert!(df > 0.0, "degrees of freedom must be positive");
    if x <= 0.0 {
        return 1.0;
    }
    reg_inc_gamma_q(0.5 * df, 0.5 * x)
}

/// Standard normal CDF (via the incomplete gamma).
pub fn normal_cdf(z: f64) -> f64 {
    let half_tail = 0.5 * reg_inc_gamma_q(0.5, 0.5 * z * z);
    if z >= 0.0 {
        1.0 - half_tail
    } else {
        half_tail
    }
}
