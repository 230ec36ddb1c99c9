//! The Taylor invariants `p`, `q` and `mu = p^3/q^2` of an odd function, and
//! the normalization `f -> f e^{alpha z^2 - beta}` that brings the expansion
//! to `z + A z^5 + B z^7`.
//!
//! For `f = a_1 z + a_3 z^3 + a_5 z^5 + a_7 z^7 + ...`:
//!
//! ```text
//! p = a_3^2 - 2 a_1 a_5
//! q = 3 a_1^2 a_7 - 3 a_1 a_3 a_5 + a_3^3
//! ```
//!
//! `mu` does not change under `z -> a z` or under a Gaussian twist.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TruncatedOddSeries;
use crate::Complex;

/// Relative size below which `p` or `q` is treated as zero.
pub const ZERO_TOLERANCE: f64 = 1e-12;

/// A point of the Riemann sphere, or nothing when `p = q = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", content = "value", rename_all = "lowercase")]
pub enum ProjectiveValue {
    Finite(Complex),
    Infinity,
    Undefined,
}

impl ProjectiveValue {
    pub fn finite(self) -> Option<Complex> {
        match self {
            ProjectiveValue::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn same_tag(&self, other: &ProjectiveValue) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvariantData {
    pub p: Complex,
    pub q: Complex,
    pub mu: ProjectiveValue,
}

/// Series normalized to `a_1 = 1`, `a_3 = 0`: `hat(z) = f(z) e^{alpha z^2 - beta}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HatForm {
    pub series: TruncatedOddSeries,
    /// Applied `z^2` twist, `-a_3/a_1`.
    pub alpha: Complex,
    /// Removed constant, `log a_1` (principal branch).
    pub beta: Complex,
}

impl HatForm {
    /// `A`, the `z^5` coefficient.
    pub fn a5(&self) -> Complex {
        self.series.coeff(5)
    }

    /// `B`, the `z^7` coefficient.
    pub fn a7(&self) -> Complex {
        self.series.coeff(7)
    }
}

fn check_omega(s: &TruncatedOddSeries) -> Result<()> {
    if s.max_degree() < 7 {
        return Err(Error::InsufficientData {
            required: 7,
            actual: s.max_degree(),
        });
    }
    if s.coeff(1).norm() == 0.0 {
        return Err(Error::NotInOmega);
    }
    Ok(())
}

/// Characteristic length of the expansion: `max |a_n / a_1|^{1/(n-1)}` over
/// `n = 3, 5, 7`. Under `z -> a z` it scales by `|a|`, so `scale^4` and
/// `scale^6` (times `|a_1|^2`, `|a_1|^3`) bound the rounding error of `p`, `q`.
pub fn coefficient_scale(s: &TruncatedOddSeries) -> f64 {
    let a1 = s.coeff(1).norm();
    [3usize, 5, 7]
        .iter()
        .map(|&n| (s.coeff(n).norm() / a1).powf(1.0 / (n - 1) as f64))
        .fold(0.0, f64::max)
}

/// `mu` with explicit zero thresholds for `p` and `q`.
pub fn mu_with_thresholds(p: Complex, q: Complex, p_zero: f64, q_zero: f64) -> ProjectiveValue {
    let p_is_zero = p.norm() <= p_zero;
    let q_is_zero = q.norm() <= q_zero;
    match (p_is_zero, q_is_zero) {
        (true, true) => ProjectiveValue::Undefined,
        (false, true) => ProjectiveValue::Infinity,
        (true, false) => ProjectiveValue::Finite(Complex::new(0.0, 0.0)),
        (false, false) => ProjectiveValue::Finite(p * p * p / (q * q)),
    }
}

/// `mu = p^3 / q^2` with exact zero tests.
pub fn mu_of_pq(p: Complex, q: Complex) -> ProjectiveValue {
    mu_with_thresholds(p, q, 0.0, 0.0)
}

/// `p`, `q` and `mu` of an odd series with `a_1 != 0` and `max_degree >= 7`.
///
/// `p` and `q` are reported as computed; `mu` treats them as zero below
/// `ZERO_TOLERANCE |a_1|^2 scale^4` and `ZERO_TOLERANCE |a_1|^3 scale^6`.
pub fn pq_of_series(s: &TruncatedOddSeries) -> Result<InvariantData> {
    check_omega(s)?;
    let (a1, a3, a5, a7) = (s.coeff(1), s.coeff(3), s.coeff(5), s.coeff(7));
    let p = a3 * a3 - a1 * a5 * 2.0;
    let q = a1 * a1 * a7 * 3.0 - a1 * a3 * a5 * 3.0 + a3 * a3 * a3;
    let scale = coefficient_scale(s);
    let m1 = a1.norm();
    let mu = mu_with_thresholds(
        p,
        q,
        ZERO_TOLERANCE * m1.powi(2) * scale.powi(4),
        ZERO_TOLERANCE * m1.powi(3) * scale.powi(6),
    );
    Ok(InvariantData { p, q, mu })
}

/// Twists `s` to `z + A z^5 + B z^7 + ...`; `a_1` and `a_3` are set exactly.
pub fn hat_normalize(s: &TruncatedOddSeries) -> Result<HatForm> {
    check_omega(s)?;
    let a1 = s.coeff(1);
    let alpha = -s.coeff(3) / a1;
    let beta = a1.ln();
    let mut series = s
        .gauss_twist(alpha, Complex::new(0.0, 0.0))
        .scale_by(1.0 / a1);
    series.set_coeff(1, Complex::new(1.0, 0.0));
    series.set_coeff(3, Complex::new(0.0, 0.0));
    Ok(HatForm {
        series,
        alpha,
        beta,
    })
}
