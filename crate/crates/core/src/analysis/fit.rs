//! Least-squares polynomial fits with Gaussian prediction bands.

use serde::Serialize;

use crate::error::{Error, Result};

/// Two-sided 90 % Gaussian multiplier.
pub const Z90: f64 = 1.645;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyFit {
    /// Highest power first: `[c_n, ..., c_1, c_0]`.
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    /// Residual standard deviation, `sqrt(SS_res / (n - degree - 1))`.
    pub residual_sigma: f64,
    pub n: usize,
}

impl PolyFit {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.coefficients.iter().fold(0.0, |acc, c| acc * x + c)
    }

    /// `(lower, upper)` of the 90 % band at `x`.
    pub fn band(&self, x: f64) -> (f64, f64) {
        let y = self.predict(x);
        let half = Z90 * self.residual_sigma;
        (y - half, y + half)
    }
}

/// Fits a polynomial of degree 1 or 2 by Householder QR on a centred and
/// scaled abscissa, then maps the coefficients back to powers of `x`.
pub fn fit_poly(xs: &[f64], ys: &[f64], degree: usize) -> Result<PolyFit> {
    if !(1..=2).contains(&degree) {
        return Err(Error::invalid(format!(
            "fit degree must be 1 or 2, got {degree}"
        )));
    }
    if xs.len() != ys.len() {
        return Err(Error::invalid(format!(
            "{} abscissae but {} ordinates",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len();
    let cols = degree + 1;
    if n < degree + 2 {
        return Err(Error::invalid(format!(
            "degree-{degree} fit needs at least {} points, got {n}",
            degree + 2
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::invalid("fit data must be finite"));
    }

    let center = xs.iter().sum::<f64>() / n as f64;
    let scale = xs.iter().map(|x| (x - center).abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::SingularFit("all abscissae are equal".into()));
    }

    // Column-major design matrix in the scaled variable, ascending powers.
    let mut a: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            xs.iter()
                .map(|x| ((x - center) / scale).powi(j as i32))
                .collect()
        })
        .collect();
    let mut rhs = ys.to_vec();

    let mut diag = vec![0.0; cols];
    for j in 0..cols {
        let norm = a[j][j..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::SingularFit(format!("design column {j} is zero")));
        }
        let alpha = if a[j][j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        diag[j] = alpha;
        if vnorm2 == 0.0 {
            continue;
        }
        for col in a.iter_mut().skip(j) {
            let dot: f64 = v.iter().zip(&col[j..]).map(|(p, q)| p * q).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, vi) in col[j..].iter_mut().zip(&v) {
                *c -= f * vi;
            }
        }
        let dot: f64 = v.iter().zip(&rhs[j..]).map(|(p, q)| p * q).sum();
        let f = 2.0 * dot / vnorm2;
        for (c, vi) in rhs[j..].iter_mut().zip(&v) {
            *c -= f * vi;
        }
    }
    let rmax = diag.iter().map(|d| d.abs()).fold(0.0, f64::max);
    if diag.iter().any(|d| d.abs() <= 1e-12 * rmax) {
        return Err(Error::SingularFit(format!(
            "rank-deficient design for degree {degree} (too few distinct abscissae)"
        )));
    }

    // Back substitution on R (upper triangle now stored in a[j][i], i <= j).
    let mut scaled = vec![0.0; cols];
    for i in (0..cols).rev() {
        let mut acc = rhs[i];
        for j in i + 1..cols {
            acc -= a[j][i] * scaled[j];
        }
        scaled[i] = acc / a[i][i];
    }

    // p(x) = Σ_k s_k ((x - m)/h)^k expanded into powers of x.
    let mut ascending = vec![0.0; cols];
    for (k, sk) in scaled.iter().enumerate() {
        let hk = scale.powi(k as i32);
        for (j, c) in ascending.iter_mut().enumerate().take(k + 1) {
            *c += sk * binomial(k, j) as f64 * (-center).powi((k - j) as i32) / hk;
        }
    }
    let coefficients: Vec<f64> = ascending.into_iter().rev().collect();

    let mean_y = ys.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    // Residual sum of squares from the orthogonal complement of the QR.
    let ss_res: f64 = rhs[cols..].iter().map(|r| r * r).sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    Ok(PolyFit {
        coefficients,
        r_squared,
        residual_sigma: (ss_res / (n - cols) as f64).sqrt(),
        n,
    })
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}
