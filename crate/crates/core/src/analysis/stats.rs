//! Student-t tail probabilities and Welch's unequal-variance t-test.

use serde::Serialize;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the series in its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (-x).ln_1p();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn t_two_tailed_p(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    regularized_incomplete_beta(0.5 * df, 0.5, x).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WelchResult {
    pub mean_a: f64,
    pub mean_d: f64,
    pub var_a: f64,
    pub var_d: f64,
    pub n_a: usize,
    pub n_d: usize,
    pub t_statistic: f64,
    pub degrees_of_freedom: f64,
    pub p_value: f64,
}

/// Mean and unbiased variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, ss / (n - 1.0))
}

/// Two-sample, two-tailed Welch test with Welch–Satterthwaite degrees of
/// freedom.
pub fn welch_t_test(sample_a: &[f64], sample_d: &[f64]) -> Result<WelchResult> {
    if sample_a.len() < 2 || sample_d.len() < 2 {
        return Err(Error::invalid(format!(
            "Welch test needs at least two samples per group (got {} and {})",
            sample_a.len(),
            sample_d.len()
        )));
    }
    if sample_a.iter().chain(sample_d).any(|v| !v.is_finite()) {
        return Err(Error::invalid("Welch test samples must be finite"));
    }
    let (mean_a, var_a) = mean_var(sample_a);
    let (mean_d, var_d) = mean_var(sample_d);
    let (n_a, n_d) = (sample_a.len(), sample_d.len());
    let (ga, gd) = (var_a / n_a as f64, var_d / n_d as f64);
    let se2 = ga + gd;
    if se2.is_nan() || se2 <= 0.0 {
        return Err(Error::invalid(
            "Welch test needs non-zero variance in at least one sample",
        ));
    }
    let t_statistic = (mean_a - mean_d) / se2.sqrt();
    let degrees_of_freedom =
        se2 * se2 / (ga * ga / (n_a as f64 - 1.0) + gd * gd / (n_d as f64 - 1.0));
    Ok(WelchResult {
        mean_a,
        mean_d,
        var_a,
        var_d,
        n_a,
        n_d,
        t_statistic,
        degrees_of_freedom,
        p_value: t_two_tailed_p(t_statistic, degrees_of_freedom),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ln_gamma_known_values() {
        assert_abs_diff_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            ln_gamma(0.5),
            std::f64::consts::PI.sqrt().ln(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(ln_gamma(10.0), 362_880f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(ln_gamma(0.1), 2.252_712_651_734_206, epsilon = 1e-13);
    }

    #[test]
    fn incomplete_beta_closed_forms() {
        // I_x(1, 1) = x; I_x(a, 1) = x^a; I_x(1, b) = 1 - (1-x)^b.
        for x in [0.05, 0.3, 0.5, 0.77, 0.99] {
            assert_abs_diff_eq!(regularized_incomplete_beta(1.0, 1.0, x), x, epsilon = 1e-13);
            assert_abs_diff_eq!(
                regularized_incomplete_beta(3.5, 1.0, x),
                x.powf(3.5),
                epsilon = 1e-13
            );
            assert_abs_diff_eq!(
                regularized_incomplete_beta(1.0, 2.5, x),
                1.0 - (1.0 - x).powf(2.5),
                epsilon = 1e-13
            );
        }
        assert_eq!(regularized_incomplete_beta(2.0, 3.0, 0.0), 0.0);
        assert_eq!(regularized_incomplete_beta(2.0, 3.0, 1.0), 1.0);
    }

    #[test]
    fn t_tail_closed_forms() {
        // df = 1 is Cauchy: p = 1 - 2·atan(|t|)/π.
        for t in [0.3, 1.0, 4.0, 25.0] {
            let expected = 1.0 - 2.0 * f64::atan(t) / std::f64::consts::PI;
            assert_abs_diff_eq!(t_two_tailed_p(t, 1.0), expected, epsilon = 1e-12);
        }
        // df = 2: p = 1 - |t|/sqrt(2 + t²).
        for t in [0.5, 2.0, 9.0] {
            assert_abs_diff_eq!(
                t_two_tailed_p(t, 2.0),
                1.0 - t / (2.0 + t * t).sqrt(),
                epsilon = 1e-12
            );
        }
        assert_eq!(t_two_tailed_p(0.0, 7.3), 1.0);
    }

    #[test]
    fn identical_samples() {
        let a = [1.0, 2.0, 4.0, 8.0];
        let r = welch_t_test(&a, &a).unwrap();
        assert_eq!(r.t_statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn degenerate_samples_rejected() {
        assert!(welch_t_test(&[1.0], &[1.0, 2.0]).is_err());
        assert!(welch_t_test(&[3.0, 3.0], &[3.0, 3.0, 3.0]).is_err());
        assert!(welch_t_test(&[1.0, f64::NAN], &[1.0, 2.0]).is_err());
    }
}
