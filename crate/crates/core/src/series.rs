//! Truncated complex power series.
//!
//! Two representations are provided: [`TruncatedSeries`] holds every
//! coefficient `c_0..=c_N`, and [`TruncatedOddSeries`] holds only the odd
//! coefficients `a_1, a_3, ..., a_{2K+1}` of an odd function. Every operation
//! states the highest degree it guarantees; coefficients past that degree are
//! never produced.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Complex;

/// Relative magnitude above which an even coefficient blocks conversion to
/// an odd series.
pub const EVEN_COEFFICIENT_TOLERANCE: f64 = 1e-14;

fn check_finite(coeffs: &[Complex]) -> Result<()> {
    match coeffs.iter().position(|c| !c.is_finite()) {
        Some(i) => Err(Error::Domain(format!("coefficient {i} is not finite"))),
        None => Ok(()),
    }
}

/// Cauchy product of two coefficient slices, keeping degrees `0..=order`.
pub(crate) fn mul_truncated(a: &[Complex], b: &[Complex], order: usize) -> Vec<Complex> {
    let mut out = vec![Complex::new(0.0, 0.0); order + 1];
    for (i, &ai) in a.iter().enumerate().take(order + 1) {
        if ai == Complex::new(0.0, 0.0) {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Formal derivative, zero-filled back to the original length.
fn derivative(a: &[Complex]) -> Vec<Complex> {
    let mut out = vec![Complex::new(0.0, 0.0); a.len()];
    for k in 1..a.len() {
        out[k - 1] = a[k] * k as f64;
    }
    out
}

/// A general truncated series `c_0 + c_1 z + ... + c_N z^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<Complex>,
}

impl TruncatedSeries {
    pub fn new(coeffs: Vec<Complex>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Usage(
                "a series needs at least one coefficient".into(),
            ));
        }
        check_finite(&coeffs)?;
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    /// The constant series `1` truncated at `order`.
    pub fn one(order: usize) -> Self {
        let mut coeffs = vec![Complex::new(0.0, 0.0); order + 1];
        coeffs[0] = Complex::new(1.0, 0.0);
        Self { coeffs }
    }

    /// Truncation exponent `N` (inclusive).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Cauchy product truncated at the common order.
    pub fn multiply(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        if self.order() != other.order() {
            return Err(Error::Usage(format!(
                "cannot multiply series of orders {} and {}",
                self.order(),
                other.order()
            )));
        }
        Ok(Self {
            coeffs: mul_truncated(&self.coeffs, &other.coeffs, self.order()),
        })
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }
}

/// Odd series `a_1 z + a_3 z^3 + ... + a_{2K+1} z^{2K+1}`; even coefficients
/// are exactly zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OddSeriesJson", into = "OddSeriesJson")]
pub struct TruncatedOddSeries {
    odd: Vec<Complex>,
}

/// Wire form: `{"max_degree": 2K+1, "odd_coefficients": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct OddSeriesJson {
    max_degree: usize,
    odd_coefficients: Vec<Complex>,
}

impl TryFrom<OddSeriesJson> for TruncatedOddSeries {
    type Error = Error;

    fn try_from(raw: OddSeriesJson) -> Result<Self> {
        let expected = 2 * raw.odd_coefficients.len().max(1) - 1;
        if raw.max_degree != expected {
            return Err(Error::Usage(format!(
                "max_degree {} does not match {} odd coefficients (expected {expected})",
                raw.max_degree,
                raw.odd_coefficients.len()
            )));
        }
        TruncatedOddSeries::new(raw.odd_coefficients)
    }
}

impl From<TruncatedOddSeries> for OddSeriesJson {
    fn from(s: TruncatedOddSeries) -> Self {
        OddSeriesJson {
            max_degree: s.max_degree(),
            odd_coefficients: s.odd,
        }
    }
}

impl TruncatedOddSeries {
    /// Builds a series from `[a_1, a_3, ...]`.
    pub fn new(odd_coefficients: Vec<Complex>) -> Result<Self> {
        if odd_coefficients.is_empty() {
            return Err(Error::Usage("an odd series needs at least a_1".into()));
        }
        check_finite(&odd_coefficients)?;
        Ok(Self {
            odd: odd_coefficients,
        })
    }

    pub fn from_real(odd_coefficients: &[f64]) -> Result<Self> {
        Self::new(
            odd_coefficients
                .iter()
                .map(|&c| Complex::new(c, 0.0))
                .collect(),
        )
    }

    /// The series `z` padded with zeros through `max_degree`.
    pub fn identity(max_degree: usize) -> Result<Self> {
        let mut s = Self::zeros(max_degree)?;
        s.odd[0] = Complex::new(1.0, 0.0);
        Ok(s)
    }

    pub fn zeros(max_degree: usize) -> Result<Self> {
        if max_degree.is_multiple_of(2) {
            return Err(Error::Usage(format!(
                "max_degree must be odd, got {max_degree}"
            )));
        }
        Ok(Self {
            odd: vec![Complex::new(0.0, 0.0); max_degree / 2 + 1],
        })
    }

    /// Taylor series of `sin(a z)` through `max_degree`.
    pub fn sine(a: Complex, max_degree: usize) -> Result<Self> {
        let mut s = Self::zeros(max_degree)?;
        let a2 = a * a;
        let mut term = a;
        for k in 0..s.odd.len() {
            s.odd[k] = term;
            let n = (2 * k + 2) as f64 * (2 * k + 3) as f64;
            term = -term * a2 / n;
        }
        Ok(s)
    }

    /// Largest degree carried, `2K+1`.
    pub fn max_degree(&self) -> usize {
        2 * self.odd.len() - 1
    }

    pub fn odd_coefficients(&self) -> &[Complex] {
        &self.odd
    }

    /// Coefficient of `z^n`; zero for even `n` and for `n` past the truncation.
    pub fn coeff(&self, n: usize) -> Complex {
        if n.is_multiple_of(2) {
            return Complex::new(0.0, 0.0);
        }
        self.odd.get(n / 2).copied().unwrap_or_default()
    }

    pub fn set_coeff(&mut self, n: usize, value: Complex) {
        assert!(
            n % 2 == 1 && n <= self.max_degree(),
            "degree {n} out of range"
        );
        self.odd[n / 2] = value;
    }

    /// Drops every coefficient above `max_degree`.
    pub fn truncate(&self, max_degree: usize) -> Result<Self> {
        if max_degree.is_multiple_of(2) || max_degree > self.max_degree() {
            return Err(Error::Usage(format!(
                "cannot truncate a degree-{} series to {max_degree}",
                self.max_degree()
            )));
        }
        Ok(Self {
            odd: self.odd[..max_degree / 2 + 1].to_vec(),
        })
    }

    /// Zero-pads through `max_degree`.
    pub fn pad(&self, max_degree: usize) -> Result<Self> {
        if max_degree.is_multiple_of(2) || max_degree < self.max_degree() {
            return Err(Error::Usage(format!(
                "cannot pad a degree-{} series to {max_degree}",
                self.max_degree()
            )));
        }
        let mut odd = self.odd.clone();
        odd.resize(max_degree / 2 + 1, Complex::new(0.0, 0.0));
        Ok(Self { odd })
    }

    pub fn to_general(&self) -> TruncatedSeries {
        let mut coeffs = vec![Complex::new(0.0, 0.0); self.max_degree() + 1];
        for (k, &a) in self.odd.iter().enumerate() {
            coeffs[2 * k + 1] = a;
        }
        TruncatedSeries { coeffs }
    }

    /// Inverse of [`to_general`](Self::to_general). Refuses series whose even
    /// coefficients exceed [`EVEN_COEFFICIENT_TOLERANCE`] relative to the
    /// largest coefficient. A trailing even-degree slot is dropped.
    pub fn from_general(s: &TruncatedSeries) -> Result<Self> {
        let scale = s.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (k, c) in s.coeffs.iter().enumerate().step_by(2) {
            if c.norm() > EVEN_COEFFICIENT_TOLERANCE * scale {
                return Err(Error::Domain(format!(
                    "coefficient of z^{k} is {c}, series is not odd"
                )));
            }
        }
        let odd: Vec<Complex> = s.coeffs.iter().skip(1).step_by(2).copied().collect();
        Self::new(odd)
    }

    /// `s(a z)`: the coefficient of `z^n` is multiplied by `a^n`.
    pub fn scale_argument(&self, a: Complex) -> Self {
        let a2 = a * a;
        let mut pow = a;
        let odd = self
            .odd
            .iter()
            .map(|&c| {
                let out = c * pow;
                pow *= a2;
                out
            })
            .collect();
        Self { odd }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale_by(&self, c: Complex) -> Self {
        Self {
            odd: self.odd.iter().map(|&a| a * c).collect(),
        }
    }

    /// `s(z) e^{alpha z^2 + beta}`, valid through the input `max_degree`.
    pub fn gauss_twist(&self, alpha: Complex, beta: Complex) -> Self {
        // e^{alpha w} in w = z^2, through w^K
        let k_max = self.odd.len();
        let mut gauss = Vec::with_capacity(k_max);
        let mut term = beta.exp();
        for k in 0..k_max {
            gauss.push(term);
            term = term * alpha / (k + 1) as f64;
        }
        let odd = mul_truncated(&self.odd, &gauss, k_max - 1);
        Self { odd }
    }

    /// The odd series of `f^3 f''' - 3 f^2 f' f'' + 2 f (f')^3`, which equals
    /// `f^4 (ln f)'''`.
    ///
    /// Degree bookkeeping: with `f` known through `z^D` (error `O(z^{D+2})`),
    /// the truncation error of each product enters at `z^{D+2}` because `f`
    /// has no constant term. The output is therefore exact through `z^D` and
    /// carries the same `max_degree` as the input.
    pub fn nonlinear_d(&self) -> Self {
        let n = self.max_degree();
        let f = self.to_general().coeffs;
        let f1 = derivative(&f);
        let f2 = derivative(&f1);
        let f3 = derivative(&f2);

        let ff = mul_truncated(&f, &f, n);
        let fff = mul_truncated(&ff, &f, n);
        let f1f1 = mul_truncated(&f1, &f1, n);
        let f1f1f1 = mul_truncated(&f1f1, &f1, n);

        let t1 = mul_truncated(&fff, &f3, n);
        let t2 = mul_truncated(&mul_truncated(&ff, &f1, n), &f2, n);
        let t3 = mul_truncated(&f, &f1f1f1, n);

        let odd = (0..self.odd.len())
            .map(|k| {
                let d = 2 * k + 1;
                t1[d] - t2[d] * 3.0 + t3[d] * 2.0
            })
            .collect();
        Self { odd }
    }

    /// Horner evaluation in `z^2`.
    pub fn eval(&self, z: Complex) -> Complex {
        let z2 = z * z;
        self.odd
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z2 + c)
            * z
    }

    /// Value and first three derivatives of the polynomial at `z`.
    pub fn jet3(&self, z: Complex) -> [Complex; 4] {
        let mut out = [Complex::new(0.0, 0.0); 4];
        for (k, &c) in self.odd.iter().enumerate() {
            let n = 2 * k + 1;
            let mut falling = 1.0;
            for (order, slot) in out.iter_mut().enumerate() {
                if order > n {
                    break;
                }
                *slot += c * falling * z.powu((n - order) as u32);
                falling *= (n - order) as f64;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex {
        Complex::new(re, 0.0)
    }

    fn assert_odd_close(s: &TruncatedOddSeries, expected: &[f64], tol: f64) {
        assert_eq!(s.odd_coefficients().len(), expected.len());
        for (got, &want) in s.odd_coefficients().iter().zip(expected) {
            assert!((got - c(want)).norm() <= tol, "{got} vs {want}");
        }
    }

    #[test]
    fn difference_of_squares() {
        let a = TruncatedSeries::from_real(&[1.0, 1.0, 0.0]).unwrap();
        let b = TruncatedSeries::from_real(&[1.0, -1.0, 0.0]).unwrap();
        let p = a.multiply(&b).unwrap();
        assert_eq!(p.coeffs(), &[c(1.0), c(0.0), c(-1.0)]);
    }

    #[test]
    fn multiplicative_identity() {
        let s = TruncatedSeries::new(vec![
            Complex::new(0.5, -1.0),
            Complex::new(2.0, 3.0),
            Complex::new(-1.0, 0.25),
            Complex::new(0.0, 7.0),
        ])
        .unwrap();
        assert_eq!(s.multiply(&TruncatedSeries::one(3)).unwrap(), s);
    }

    #[test]
    fn sine_cubic_squared() {
        // (z - z^3/6)^2 = z^2 - z^4/3 + z^6/36
        let s = TruncatedSeries::from_real(&[0.0, 1.0, 0.0, -1.0 / 6.0, 0.0, 0.0, 0.0]).unwrap();
        let p = s.multiply(&s).unwrap();
        let want = [0.0, 0.0, 1.0, 0.0, -1.0 / 3.0, 0.0, 1.0 / 36.0];
        for (got, w) in p.coeffs().iter().zip(want) {
            assert_abs_diff_eq!(got.re, w, epsilon = 1e-15);
            assert_eq!(got.im, 0.0);
        }
    }

    #[test]
    fn mismatched_orders_rejected() {
        let a = TruncatedSeries::from_real(&[1.0, 1.0]).unwrap();
        let b = TruncatedSeries::from_real(&[1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(a.multiply(&b), Err(Error::Usage(_))));
    }

    #[test]
    fn scale_argument_examples() {
        let s = TruncatedOddSeries::from_real(&[1.0, 1.0]).unwrap();
        assert_odd_close(&s.scale_argument(c(2.0)), &[2.0, 8.0], 0.0);
        assert_eq!(s.scale_argument(c(1.0)), s);
        let si = s.scale_argument(Complex::i());
        assert_eq!(si.odd_coefficients(), &[Complex::i(), -Complex::i()]);
    }

    #[test]
    fn gauss_twist_examples() {
        let z = TruncatedOddSeries::identity(7).unwrap();
        let t = z.gauss_twist(c(1.0), c(0.0));
        assert_odd_close(&t, &[1.0, 1.0, 0.5, 1.0 / 6.0], 1e-15);

        let t = z.gauss_twist(c(0.0), c(2f64.ln()));
        assert_odd_close(&t, &[2.0, 0.0, 0.0, 0.0], 1e-15);

        let sine = TruncatedOddSeries::sine(c(1.0), 7).unwrap();
        let t = sine.gauss_twist(c(1.0 / 6.0), c(0.0));
        assert_odd_close(&t, &[1.0, 0.0, -1.0 / 180.0, -1.0 / 2835.0], 1e-16);
    }

    #[test]
    fn nonlinear_d_examples() {
        let z = TruncatedOddSeries::identity(1).unwrap();
        assert_odd_close(&z.nonlinear_d(), &[2.0], 0.0);

        let sine = TruncatedOddSeries::sine(c(1.0), 11).unwrap();
        let d = sine.nonlinear_d();
        let sin2 = TruncatedOddSeries::sine(c(2.0), 11).unwrap();
        for (got, want) in d.odd_coefficients().iter().zip(sin2.odd_coefficients()) {
            assert!((got - want).norm() <= 1e-14, "{got} vs {want}");
        }
        assert_abs_diff_eq!(d.coeff(3).re, -4.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.coeff(7).re, -8.0 / 315.0, epsilon = 1e-15);

        // z + z^3 through degree 9: D = 2z + 8z^3 + 6z^9
        let s = TruncatedOddSeries::from_real(&[1.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_odd_close(&s.nonlinear_d(), &[2.0, 8.0, 0.0, 0.0, 6.0], 0.0);
    }

    #[test]
    fn odd_general_conversion() {
        let s = TruncatedOddSeries::from_real(&[1.0, -2.0, 3.0]).unwrap();
        let g = s.to_general();
        assert_eq!(g.order(), 5);
        assert_eq!(TruncatedOddSeries::from_general(&g).unwrap(), s);

        let bad = TruncatedSeries::from_real(&[0.0, 1.0, 1e-3, 2.0]).unwrap();
        assert!(TruncatedOddSeries::from_general(&bad).is_err());
        let ok = TruncatedSeries::from_real(&[0.0, 1.0, 1e-16, 2.0]).unwrap();
        assert!(TruncatedOddSeries::from_general(&ok).is_ok());
    }

    #[test]
    fn jet_matches_closed_form_for_sine() {
        let s = TruncatedOddSeries::sine(c(1.0), 41).unwrap();
        let z = Complex::new(0.3, -0.2);
        let j = s.jet3(z);
        let want = [z.sin(), z.cos(), -z.sin(), -z.cos()];
        for (a, b) in j.iter().zip(want) {
            assert!((a - b).norm() < 1e-14);
        }
        assert!((s.eval(z) - z.sin()).norm() < 1e-15);
    }

    #[test]
    fn json_shape() {
        let s = TruncatedOddSeries::from_real(&[1.0, 0.5]).unwrap();
        let v = serde_json::to_string(&s).unwrap();
        assert_eq!(
            v,
            r#"{"max_degree":3,"odd_coefficients":[[1.0,0.0],[0.5,0.0]]}"#
        );
        let back: TruncatedOddSeries = serde_json::from_str(&v).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"max_degree":5,"odd_coefficients":[[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<TruncatedOddSeries>(bad).is_err());
    }
}
