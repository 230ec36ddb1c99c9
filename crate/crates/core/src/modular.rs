//! q-series evaluation of the first Jacobi theta function, the Dedekind eta
//! function, the Weierstrass invariants g2 and g3, the modular invariant j,
//! and the weight-7/weight-21/2 forms `p(tau)`, `q(tau)` built from them.
//!
//! Every sum and product is truncated adaptively: terms are accumulated
//! until one falls below [`TERM_TOLERANCE`] times the running scale, with a
//! hard cap of [`MAX_TERMS`]. Inside the fundamental domain the nome
//! satisfies `|e^{2 pi i tau}| <= e^{-pi sqrt 3}`, which keeps every series
//! below 20 terms. Points far from the fundamental domain are evaluated as
//! given (no implicit reduction), so modular covariance can be checked
//! directly; reduce with [`crate::lattice::reduce_tau`] first when speed or
//! accuracy matters.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TruncatedOddSeries;
use crate::Complex;

/// Relative size of the first neglected term.
pub const TERM_TOLERANCE: f64 = 1e-18;

/// Hard cap on the number of terms of any q-series or product.
pub const MAX_TERMS: usize = 200;

/// A point of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex", into = "Complex")]
pub struct TauPoint(Complex);

impl TauPoint {
    pub fn new(value: Complex) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Domain(format!("tau = {value} is not finite")));
        }
        if value.im <= 0.0 {
            return Err(Error::Domain(format!(
                "tau = {value} is not in the upper half-plane"
            )));
        }
        Ok(Self(value))
    }

    pub fn from_parts(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex::new(re, im))
    }

    /// `i`.
    pub fn i() -> Self {
        Self(Complex::new(0.0, 1.0))
    }

    /// `1/2 + i sqrt(3)/2`, the representative of the orbit where `j = 0`.
    pub fn corner() -> Self {
        Self(Complex::new(0.5, 3f64.sqrt() / 2.0))
    }

    pub fn value(self) -> Complex {
        self.0
    }

    pub fn nome(self) -> Nome {
        Nome::of(self)
    }
}

impl TryFrom<Complex> for TauPoint {
    type Error = Error;
    fn try_from(value: Complex) -> Result<Self> {
        Self::new(value)
    }
}

impl From<TauPoint> for Complex {
    fn from(t: TauPoint) -> Complex {
        t.0
    }
}

/// `q_half = e^{pi i tau}` and `q_full = e^{2 pi i tau} = q_half^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nome {
    pub q_half: Complex,
    pub q_full: Complex,
}

impl Nome {
    pub fn of(tau: TauPoint) -> Self {
        let q_half = (Complex::i() * PI * tau.0).exp();
        Self {
            q_half,
            q_full: q_half * q_half,
        }
    }
}

/// Sums `term(n)` for `n = 0, 1, ...` until the bound of the latest term
/// drops below `TERM_TOLERANCE * max(|partial|, largest bound seen)`.
///
/// `term` returns the term and an upper bound on its magnitude; the bound
/// must be log-concave in `n` so that a small bound past the peak stays small.
fn sum_adaptive<F>(what: &'static str, mut term: F) -> Result<Complex>
where
    F: FnMut(usize) -> (Complex, f64),
{
    let mut partial = Complex::new(0.0, 0.0);
    let mut peak = 0.0_f64;
    for n in 0..MAX_TERMS {
        let (t, bound) = term(n);
        partial += t;
        peak = peak.max(bound);
        if bound <= TERM_TOLERANCE * partial.norm().max(peak) {
            return finite(what, partial);
        }
    }
    let (t, _) = term(MAX_TERMS);
    Err(Error::NonConvergent {
        what,
        terms: MAX_TERMS,
        last_term: t.norm(),
        partial: partial.norm(),
    })
}

fn finite(what: &'static str, value: Complex) -> Result<Complex> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Numeric(format!("{what} overflowed to {value}")))
    }
}

/// `exp(pi i tau (n + 1/2)^2)`.
fn theta_weight(tau: TauPoint, n: usize) -> Complex {
    let h = n as f64 + 0.5;
    (Complex::i() * PI * tau.0 * (h * h)).exp()
}

/// `theta_1(z, tau) = 2 sum_{n>=0} (-1)^n e^{pi i tau (n+1/2)^2} sin((2n+1) pi z)`.
pub fn theta1_eval(z: Complex, tau: TauPoint) -> Result<Complex> {
    let spread = PI * z.im.abs();
    let s = sum_adaptive("theta1", |n| {
        let w = theta_weight(tau, n);
        let k = (2 * n + 1) as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let t = w * (z * (k * PI)).sin() * sign;
        (t, w.norm() * (k * spread).cosh())
    })?;
    Ok(s * 2.0)
}

/// `theta_1` and its first three `z`-derivatives, summed termwise.
pub fn theta1_jet(z: Complex, tau: TauPoint) -> Result<[Complex; 4]> {
    let spread = PI * z.im.abs();
    let mut out = [Complex::new(0.0, 0.0); 4];
    for (order, slot) in out.iter_mut().enumerate() {
        let s = sum_adaptive("theta1 derivative", |n| {
            let w = theta_weight(tau, n);
            let k = (2 * n + 1) as f64 * PI;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let arg = z * k;
            let d = match order {
                0 => arg.sin(),
                1 => arg.cos() * k,
                2 => -arg.sin() * (k * k),
                _ => -arg.cos() * (k * k * k),
            };
            let t = w * d * sign;
            (
                t,
                w.norm() * k.powi(order as i32) * ((2 * n + 1) as f64 * spread).cosh(),
            )
        })?;
        *slot = s * 2.0;
    }
    Ok(out)
}

fn ln_factorial(m: usize) -> f64 {
    (2..=m).map(|k| (k as f64).ln()).sum()
}

/// Odd Taylor coefficients of `z -> theta_1(z, tau)` through `max_degree`:
///
/// `a_{2k+1} = 2 sum_n (-1)^{n+k} e^{pi i tau (n+1/2)^2} ((2n+1) pi)^{2k+1} / (2k+1)!`
///
/// Each term is formed in log space so high degrees neither overflow nor
/// underflow prematurely.
pub fn theta1_odd_series(tau: TauPoint, max_degree: usize) -> Result<TruncatedOddSeries> {
    if max_degree.is_multiple_of(2) {
        return Err(Error::Usage(format!(
            "max_degree must be odd, got {max_degree}"
        )));
    }
    let mut out = TruncatedOddSeries::zeros(max_degree)?;
    for m in (1..=max_degree).step_by(2) {
        let lf = ln_factorial(m);
        let k = m / 2;
        let a = sum_adaptive("theta1 Taylor coefficient", |n| {
            let h = n as f64 + 0.5;
            let log_term = Complex::i() * PI * tau.0 * (h * h)
                + m as f64 * ((2 * n + 1) as f64 * PI).ln()
                - lf;
            let t = log_term.exp();
            let t = if (n + k) % 2 == 0 { t } else { -t };
            (t, t.norm())
        })?;
        out.set_coeff(m, a * 2.0);
    }
    Ok(out)
}

/// `eta(tau) = e^{pi i tau / 12} prod_{n>=1} (1 - e^{2 pi i n tau})`.
pub fn dedekind_eta(tau: TauPoint) -> Result<Complex> {
    let q = tau.nome().q_full;
    let mut prod = Complex::new(1.0, 0.0);
    let mut qn = q;
    let mut terms = 0;
    while qn.norm() > TERM_TOLERANCE {
        if terms == MAX_TERMS {
            return Err(Error::NonConvergent {
                what: "dedekind eta product",
                terms,
                last_term: qn.norm(),
                partial: prod.norm(),
            });
        }
        prod *= Complex::new(1.0, 0.0) - qn;
        qn *= q;
        terms += 1;
    }
    finite(
        "dedekind eta",
        (Complex::i() * PI * tau.0 / 12.0).exp() * prod,
    )
}

/// `(g2, g3)` for the lattice `Z + tau Z`:
///
/// `g2 = (2 pi)^4 (1/12 + 20 sum n^3 q^n / (1 - q^n))`,
/// `g3 = (2 pi)^6 (1/216 - 7/3 sum n^5 q^n / (1 - q^n))`, `q = e^{2 pi i tau}`.
///
/// `n^k / (e^{-2 pi i n tau} - 1)` and `n^k q^n / (1 - q^n)` are the same
/// term; the latter is what gets summed.
pub fn weierstrass_g(tau: TauPoint) -> Result<(Complex, Complex)> {
    let q = tau.nome().q_full;
    let mut s3 = Complex::new(0.0, 0.0);
    let mut s5 = Complex::new(0.0, 0.0);
    let mut peak3 = 0.0_f64;
    let mut peak5 = 0.0_f64;
    let mut qn = Complex::new(1.0, 0.0);
    let mut converged = false;
    for n in 1..=MAX_TERMS {
        qn *= q;
        let lambert = qn / (Complex::new(1.0, 0.0) - qn);
        let nf = n as f64;
        let t3 = lambert * nf.powi(3);
        let t5 = lambert * nf.powi(5);
        s3 += t3;
        s5 += t5;
        peak3 = peak3.max(t3.norm());
        peak5 = peak5.max(t5.norm());
        if t3.norm() <= TERM_TOLERANCE * s3.norm().max(peak3)
            && t5.norm() <= TERM_TOLERANCE * s5.norm().max(peak5)
        {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergent {
            what: "weierstrass g2/g3 series",
            terms: MAX_TERMS,
            last_term: (qn * (MAX_TERMS as f64).powi(5)).norm(),
            partial: s5.norm(),
        });
    }
    let tp = 2.0 * PI;
    let g2 = (s3 * 20.0 + 1.0 / 12.0) * tp.powi(4);
    let g3 = (s5 * (-7.0 / 3.0) + 1.0 / 216.0) * tp.powi(6);
    Ok((finite("g2", g2)?, finite("g3", g3)?))
}

/// The discriminant `g2^3 - 27 g3^2`, evaluated as `(2 pi)^12 eta^24`.
pub fn discriminant(tau: TauPoint) -> Result<Complex> {
    let eta = dedekind_eta(tau)?;
    Ok(eta.powu(24) * (2.0 * PI).powi(12))
}

/// `j(tau) = 1728 g2^3 / (g2^3 - 27 g3^2) = e^{-2 pi i tau} + 744 + 196884 e^{2 pi i tau} + ...`
///
/// The denominator is taken from the eta product rather than from
/// `g2^3 - 27 g3^2`; the difference form cancels catastrophically once
/// `Im tau` exceeds about 2.
pub fn j_invariant(tau: TauPoint) -> Result<Complex> {
    let (g2, _) = weierstrass_g(tau)?;
    let delta = discriminant(tau)?;
    if delta.norm() == 0.0 {
        return Err(Error::Numeric(format!(
            "discriminant underflowed at tau = {}",
            tau.value()
        )));
    }
    finite("j", g2.powu(3) * 1728.0 / delta)
}

/// `p(tau) = pi^2/30 eta^6 g2` and `q(tau) = -pi^3/35 eta^9 g3`, the Taylor
/// invariants of `theta_1(., tau)`.
pub fn modular_pq(tau: TauPoint) -> Result<(Complex, Complex)> {
    let eta = dedekind_eta(tau)?;
    let (g2, g3) = weierstrass_g(tau)?;
    let p = eta.powu(6) * g2 * (PI * PI / 30.0);
    let q = -eta.powu(9) * g3 * (PI.powi(3) / 35.0);
    Ok((p, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex, b: Complex, rel: f64) -> bool {
        (a - b).norm() <= rel * b.norm().max(1e-300)
    }

    /// Fixed-length partial sum, independent of the adaptive cutoff.
    fn theta1_brute(z: Complex, tau: TauPoint, terms: usize) -> Complex {
        let mut s = Complex::new(0.0, 0.0);
        for n in 0..=terms {
            let h = n as f64 + 0.5;
            let w = (Complex::i() * PI * tau.value() * (h * h)).exp();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            s += w * (z * ((2 * n + 1) as f64 * PI)).sin() * sign;
        }
        s * 2.0
    }

    fn eta_brute(tau: TauPoint, factors: usize) -> Complex {
        let q = (Complex::i() * 2.0 * PI * tau.value()).exp();
        let mut p = Complex::new(1.0, 0.0);
        for n in 1..=factors {
            p *= Complex::new(1.0, 0.0) - q.powu(n as u32);
        }
        (Complex::i() * PI * tau.value() / 12.0).exp() * p
    }

    #[test]
    fn tau_must_be_in_upper_half_plane() {
        assert!(TauPoint::from_parts(0.0, 0.0).is_err());
        assert!(TauPoint::from_parts(1.0, -1.0).is_err());
        assert!(TauPoint::from_parts(f64::NAN, 1.0).is_err());
        let t = TauPoint::from_parts(0.1, 0.5).unwrap();
        let nome = t.nome();
        assert!((nome.q_full.norm() - nome.q_half.norm().powi(2)).abs() < 1e-16);
        assert!(nome.q_full.norm() < 1.0);
    }

    #[test]
    fn theta1_basic_symmetries() {
        for tau in [TauPoint::i(), TauPoint::from_parts(0.3, 0.8).unwrap()] {
            assert_eq!(
                theta1_eval(Complex::new(0.0, 0.0), tau).unwrap(),
                Complex::new(0.0, 0.0)
            );
            let z = Complex::new(0.37, -0.21);
            let a = theta1_eval(z, tau).unwrap();
            let b = theta1_eval(-z, tau).unwrap();
            assert!((a + b).norm() < 1e-15);
        }
    }

    #[test]
    fn theta1_matches_brute_force() {
        let tau = TauPoint::i();
        let v = theta1_eval(Complex::new(0.25, 0.0), tau).unwrap();
        let brute = theta1_brute(Complex::new(0.25, 0.0), tau, 20);
        assert!(close(v, brute, 1e-15));
        // mpmath, 40 digits
        assert!((v.re - 0.643_589_764_038_585_9).abs() < 1e-15);
    }

    #[test]
    fn theta1_translation_covariance() {
        let phase = (Complex::i() * PI / 4.0).exp();
        for (tau, z) in [
            (Complex::new(0.1, 0.9), Complex::new(0.3, 0.1)),
            (Complex::new(-0.4, 1.3), Complex::new(-0.2, 0.45)),
        ] {
            let t0 = TauPoint::new(tau).unwrap();
            let t1 = TauPoint::new(tau + 1.0).unwrap();
            let a = theta1_eval(z, t1).unwrap();
            let b = phase * theta1_eval(z, t0).unwrap();
            assert!((a - b).norm() <= 1e-10 * b.norm().max(1.0));
        }
    }

    #[test]
    fn theta1_s_transformation_principal_branch() {
        // theta_1(z/tau, -1/tau) = -i sqrt(tau/i) e^{pi i z^2 / tau} theta_1(z, tau)
        for (tau, z) in [
            (Complex::new(0.2, 1.1), Complex::new(0.15, 0.05)),
            (Complex::new(-0.3, 0.95), Complex::new(-0.25, 0.1)),
        ] {
            let t = TauPoint::new(tau).unwrap();
            let s = TauPoint::new(-1.0 / tau).unwrap();
            let lhs = theta1_eval(z / tau, s).unwrap();
            let rhs = -Complex::i()
                * (tau / Complex::i()).sqrt()
                * (Complex::i() * PI * z * z / tau).exp()
                * theta1_eval(z, t).unwrap();
            assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm());
        }
    }

    #[test]
    fn theta1_series_leading_coefficient_is_2_pi_eta_cubed() {
        let a1 = theta1_odd_series(TauPoint::i(), 1).unwrap().coeff(1);
        assert!((a1.re - 2.848_694_603_987_787).abs() < 1e-14);
        for tau in [
            Complex::new(0.0, 1.0),
            Complex::new(0.3, 1.1),
            Complex::new(-0.25, 0.9),
            Complex::new(0.5, 0.866),
            Complex::new(0.1, 2.5),
        ] {
            let t = TauPoint::new(tau).unwrap();
            let a1 = theta1_odd_series(t, 1).unwrap().coeff(1);
            let want = eta_brute(t, 200).powu(3) * 2.0 * PI;
            assert!(close(a1, want, 1e-13), "tau={tau}: {a1} vs {want}");
        }
    }

    #[test]
    fn theta1_series_self_consistent_with_pointwise_sum() {
        for tau in [TauPoint::i(), TauPoint::from_parts(-0.3, 0.95).unwrap()] {
            let s = theta1_odd_series(tau, 13).unwrap();
            let z = Complex::new(0.05, 0.0);
            let poly = s.eval(z);
            let direct = theta1_eval(z, tau).unwrap();
            assert!((poly - direct).norm() <= 1e-12 * direct.norm());
        }
    }

    #[test]
    fn theta1_jet_matches_series_derivatives() {
        let tau = TauPoint::from_parts(0.2, 1.05).unwrap();
        let z = Complex::new(0.1, -0.07);
        let jet = theta1_jet(z, tau).unwrap();
        let poly = theta1_odd_series(tau, 61).unwrap().jet3(z);
        for (a, b) in jet.iter().zip(poly) {
            assert!((a - b).norm() <= 1e-11 * b.norm().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn eta_landmarks() {
        let e = dedekind_eta(TauPoint::i()).unwrap();
        assert!((e.re - 0.768_225_422_326_056_7).abs() < 1e-15 && e.im.abs() < 1e-15);
        assert!((e - eta_brute(TauPoint::i(), 200)).norm() < 1e-15);
        let e2 = dedekind_eta(TauPoint::from_parts(0.0, 2.0).unwrap()).unwrap();
        assert!((e2.re - 0.592_382_781_332_416).abs() < 1e-15);
    }

    #[test]
    fn eta_translation() {
        let tau = Complex::new(0.17, 0.93);
        let a = dedekind_eta(TauPoint::new(tau + 1.0).unwrap()).unwrap();
        let b =
            (Complex::i() * PI / 12.0).exp() * dedekind_eta(TauPoint::new(tau).unwrap()).unwrap();
        assert!(close(a, b, 1e-14));
    }

    #[test]
    fn g_landmarks() {
        let (g2, g3) = weierstrass_g(TauPoint::i()).unwrap();
        assert!((g2.re - 189.072_720_129_233_85).abs() < 1e-11);
        assert!(g3.norm() <= 1e-12 * 1e3, "g3(i) = {g3}");
        let (g2, g3) = weierstrass_g(TauPoint::from_parts(0.0, 12.0).unwrap()).unwrap();
        let tp = 2.0 * PI;
        assert!(close(g2, Complex::new(tp.powi(4) / 12.0, 0.0), 1e-12));
        assert!(close(g3, Complex::new(tp.powi(6) / 216.0, 0.0), 1e-12));
        assert!((g2.re - 129.878_788_045_336_6).abs() < 1e-9);
        assert!((g3.re - 284.856_057_355_645_7).abs() < 1e-9);
    }

    #[test]
    fn discriminant_two_routes_agree() {
        for tau in [
            Complex::new(0.0, 1.0),
            Complex::new(0.3, 1.1),
            Complex::new(-0.25, 0.9),
        ] {
            let t = TauPoint::new(tau).unwrap();
            let (g2, g3) = weierstrass_g(t).unwrap();
            let direct = g2.powu(3) - g3 * g3 * 27.0;
            assert!(close(discriminant(t).unwrap(), direct, 1e-11));
        }
    }

    #[test]
    fn j_landmarks() {
        let j = j_invariant(TauPoint::i()).unwrap();
        assert!((j - 1728.0).norm() <= 1e-8 * 1728.0);
        let j = j_invariant(TauPoint::corner()).unwrap();
        assert!(j.norm() <= 1e-8, "j(corner) = {j}");
        let j = j_invariant(TauPoint::from_parts(0.0, 2.0).unwrap()).unwrap();
        assert!((j - 287_496.0).norm() <= 1e-8 * 287_496.0);
    }

    #[test]
    fn j_q_expansion_third_coefficient() {
        for re in [-0.4, 0.0, 0.25] {
            let t = TauPoint::from_parts(re, 3.0).unwrap();
            let q = t.nome().q_full;
            let j = j_invariant(t).unwrap();
            let c1 = (j - 1.0 / q - 744.0) / q;
            assert!(
                (c1.norm() - 196_884.0).abs() <= 0.01 * 196_884.0,
                "c1 = {c1}"
            );
        }
    }

    #[test]
    fn modular_pq_landmarks() {
        let (p, q) = modular_pq(TauPoint::i()).unwrap();
        assert!((p.re - 12.786_138_726_866_149).abs() < 1e-12);
        assert!(q.norm() <= 1e-12);
        let (p, q) = modular_pq(TauPoint::from_parts(0.3, 1.1).unwrap()).unwrap();
        assert!(close(
            p,
            Complex::new(5.509_912_916_960_351, 4.692_798_806_147_481),
            1e-13
        ));
        assert!(close(
            q,
            Complex::new(-22.657_374_896_516_907, -7.446_580_634_157_804),
            1e-13
        ));
    }

    #[test]
    fn too_close_to_real_axis_is_a_numeric_error() {
        let t = TauPoint::from_parts(0.0, 1e-4).unwrap();
        let err = dedekind_eta(t).unwrap_err();
        assert!(err.is_numeric());
        assert!(matches!(
            theta1_eval(Complex::new(0.1, 0.0), t),
            Err(Error::NonConvergent { .. })
        ));
    }
}
