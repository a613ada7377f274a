//! Residual functions, Carathéodory certificates, slack terms, and gap geometry.
//!
//! A location candidate `mu` is scored through
//! `Upsilon(t; mu) = 2 e^{-i mu t + sigma2 t^2/2} phi(t) - 1` (known variance)
//! or `Upsilon(t; mu, lambda) = 3 e^{-i mu t + lambda t^2/2} phi(t) - 2`
//! (unknown variance). For a genuine model these are characteristic-function
//! values of a probability measure, so they satisfy the Toeplitz PSD
//! constraints; each certificate below is one such constraint with slack.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest exponent accepted before `exp` would leave double range.
pub const EXPONENT_LIMIT: f64 = 700.0;

fn guard(exponent: f64) -> Result<()> {
    if exponent > EXPONENT_LIMIT || exponent.is_nan() {
        Err(Error::ExponentOverflow { exponent })
    } else {
        Ok(())
    }
}

/// `2 e^{-i mu t + sigma2 t^2/2} phi - 1`.
pub fn upsilon_known(phi_value: Complex64, t: f64, mu: f64, sigma2: f64) -> Result<Complex64> {
    let e = sigma2 * t * t;
    guard(e)?;
    Ok(Complex64::from_polar(2.0 * (0.5 * e).exp(), -mu * t) * phi_value - 1.0)
}

/// `3 e^{-i mu t + lambda t^2/2} phi - 2`.
pub fn upsilon_unknown(phi_value: Complex64, t: f64, mu: f64, lambda: f64) -> Result<Complex64> {
    let e = lambda * t * t;
    guard(e)?;
    Ok(Complex64::from_polar(3.0 * (0.5 * e).exp(), -mu * t) * phi_value - 2.0)
}

/// `Delta(t) = 2 kappa e^{sigma2 t^2} sqrt(8 log(10/delta) / n)`.
pub fn slack_known(t: f64, sigma2: f64, kappa: f64, n: usize, delta: f64) -> Result<f64> {
    let e = sigma2 * t * t;
    guard(e)?;
    Ok(2.0 * kappa * e.exp() * (8.0 * (10.0 / delta).ln() / n as f64).sqrt())
}

/// `(Delta_1, Delta_2)` with `6 kappa e^{s t^2}` and `81 kappa e^{5 s t^2 / 2}`
/// multiplying `sqrt(16 log(10/delta) / n)`, `s` the upper pilot variance.
pub fn slack_unknown(t: f64, sigma2_plus: f64, kappa: f64, n: usize, delta: f64) -> Result<(f64, f64)> {
    let e = sigma2_plus * t * t;
    guard(2.5 * e)?;
    let root = (16.0 * (10.0 / delta).ln() / n as f64).sqrt();
    Ok((6.0 * kappa * e.exp() * root, 81.0 * kappa * (2.5 * e).exp() * root))
}

/// One evaluated row of a certificate report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateMargins {
    #[serde(rename = "t")]
    pub frequency: f64,
    #[serde(rename = "lambda")]
    pub variance_candidate: f64,
    pub order1_margin: f64,
    pub order2_margin: Option<f64>,
    pub passed: bool,
}

impl CertificateMargins {
    pub fn new(frequency: f64, variance_candidate: f64, order1: f64, order2: Option<f64>) -> Self {
        let passed = order1 <= 0.0 && order2.map_or(true, |m| m <= 0.0);
        Self {
            frequency,
            variance_candidate,
            order1_margin: order1,
            order2_margin: order2,
            passed,
        }
    }
}

/// All certificate rows evaluated for one location candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub mu: f64,
    pub entries: Vec<CertificateMargins>,
    pub accepted: bool,
}

/// Margin and verdict of a single inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    pub margin: f64,
    pub passed: bool,
}

impl Margin {
    fn of(margin: f64) -> Self {
        Self {
            margin,
            passed: margin <= 0.0,
        }
    }
}

/// `|Upsilon| - 1 - slack`.
pub fn order1_certificate(upsilon: Complex64, slack: f64) -> Margin {
    Margin::of(upsilon.norm() - 1.0 - slack)
}

/// The known-variance order-1 test written as a cosine threshold:
/// `cos(t mu - Arg phi) >= (1 - (1+slack)^2 + 4 a^2) / (4 a)` with
/// `a = |e^{sigma2 t^2/2} phi|`.
pub fn order1_cosine_form(phi_value: Complex64, t: f64, mu: f64, sigma2: f64, slack: f64) -> bool {
    let a = (0.5 * sigma2 * t * t).exp() * phi_value.norm();
    if a == 0.0 {
        return 1.0 <= 1.0 + slack;
    }
    let threshold = (1.0 - (1.0 + slack).powi(2) + 4.0 * a * a) / (4.0 * a);
    (t * mu - phi_value.arg()).cos() >= threshold
}

/// `|u_t^2 - u_2t| + |u_t|^2 - 1 - slack2`.
pub fn order2_certificate(u_t: Complex64, u_2t: Complex64, slack2: f64) -> Margin {
    Margin::of((u_t * u_t - u_2t).norm() + u_t.norm_sqr() - 1.0 - slack2)
}

/// The four order-3 residuals at `a = u(t), b = u(2t), c = u(3t)`; each is
/// nonnegative when `(1, a, b, c)` are values of a characteristic function.
///
/// 1. `1 - |a|^2`
/// 2. `(1 - |a|^2)^2 - |a^2 - b|^2`
/// 3. the principal minor on rows `{0, 1, 3}`: `1 - |a|^2 - |b|^2 - |c|^2 + 2 Re(a b conj(c))`
/// 4. the full `4 x 4` Toeplitz determinant in expanded form.
pub fn order3_residuals(a: Complex64, b: Complex64, c: Complex64) -> [f64; 4] {
    let a2 = a.norm_sqr();
    let b2 = b.norm_sqr();
    let c2 = c.norm_sqr();
    let r1 = 1.0 - a2;
    let r2 = r1 * r1 - (a * a - b).norm_sqr();
    let r3 = 1.0 - a2 - b2 - c2 + 2.0 * (a * b * c.conj()).re;
    let aab = a * a * b.conj();
    let abc = a * b * c.conj();
    let aaac = a * a * a * c.conj();
    let abbc = a * b.conj() * b.conj() * c;
    let r4 = 1.0 - 3.0 * a2 - 2.0 * b2 - c2 + (a2 - b2).powi(2) + a2 * c2
        + 4.0 * aab.re
        + 4.0 * abc.re
        - 2.0 * aaac.re
        - 2.0 * abbc.re;
    [r1, r2, r3, r4]
}

/// Hermitian Toeplitz matrix with `z_{j-i}` above the diagonal.
pub fn toeplitz_matrix(z: &[Complex64], m: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(m + 1, m + 1, |i, j| if j >= i { z[j - i] } else { z[i - j].conj() })
}

/// Smallest eigenvalue of `T_m` and whether it clears `-1e-10 (m + 1)`.
pub fn toeplitz_psd_check(z: &[Complex64], m: usize) -> Result<(bool, f64)> {
    if m < 1 {
        return Err(Error::invalid("m", "must be at least 1"));
    }
    if z.len() < m + 1 {
        return Err(Error::invalid("z", format!("need {} values, got {}", m + 1, z.len())));
    }
    if (z[0] - 1.0).norm() > 1e-9 {
        return Err(Error::ToeplitzLeading {
            z0_re: z[0].re,
            z0_im: z[0].im,
        });
    }
    let eig = toeplitz_matrix(z, m).symmetric_eigenvalues();
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((min >= -1e-10 * (m as f64 + 1.0), min))
}

/// `1 + 2 (b/pi)^2 - 4 eps`.
pub fn quadratic_gap_lb(b: f64, eps: f64) -> f64 {
    1.0 + 2.0 * (b / PI).powi(2) - 4.0 * eps
}

/// Distance from the origin to the disk of radius `2 eps` centered at
/// `-1 + 2 (1 - eps) e^{-ib}` (signed: negative inside).
pub fn quadratic_gap_exact(b: f64, eps: f64) -> f64 {
    (Complex64::from_polar(2.0 * (1.0 - eps), -b) - 1.0).norm() - 2.0 * eps
}

/// `(lhs, bound)` where `lhs` is the larger of the order-1 and order-2
/// certificate values of the clean Gaussian at offset `r`, and `bound = 1 + (rt/pi)^4`.
pub fn quartic_gap_check(t: f64, r: f64, lambda: f64, sigma2: f64) -> (f64, f64) {
    let ups = |s: f64| {
        let scale = 3.0 * (0.5 * (lambda - sigma2) * s * s).exp();
        Complex64::from_polar(scale, -r * s) - 2.0
    };
    let u1 = ups(t);
    let u2 = ups(2.0 * t);
    let lhs = u1.norm().max((u1 * u1 - u2).norm() + u1.norm_sqr());
    (lhs, 1.0 + (r * t / PI).powi(4))
}

/// Gap between the null disk and the contaminated disk at a rotation `angle`:
/// `(sqrt((em - e)^2 + 4 (1 - em)(1 - e) sin^2(angle/2)) - (em + e))_+`.
pub fn disk_distance(eps_max: f64, eps: f64, angle: f64) -> f64 {
    let s = (0.5 * angle).sin();
    let d = ((eps_max - eps).powi(2) + 4.0 * (1.0 - eps_max) * (1.0 - eps) * s * s).sqrt();
    (d - (eps_max + eps)).max(0.0)
}
