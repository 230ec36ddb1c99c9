//! Lattices `rho (Z + tau Z)`, reduction of `tau` to the fundamental domain,
//! inversion of `j`, and the Weierstrass sigma function.
//!
//! Fundamental-domain convention: `-1/2 < Re tau <= 1/2`, `|tau| >= 1`, and
//! `Re tau >= 0` on the unit circle. Under it the orbit of
//! `(-1 + sqrt(-3))/2` is represented by `1/2 + i sqrt(3)/2`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular::{
    dedekind_eta, j_invariant, theta1_eval, theta1_jet, theta1_odd_series, weierstrass_g, TauPoint,
};
use crate::Complex;

/// Slack used when deciding on which side of a fundamental-domain boundary a
/// point lies.
pub const BOUNDARY_EPS: f64 = 1e-12;

/// An integer matrix `[[a, b], [c, d]]` with `ad - bc = 1`, acting by
/// `tau -> (a tau + b) / (c tau + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnimodularMap {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl UnimodularMap {
    pub const IDENTITY: Self = Self {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };
    /// `tau -> -1/tau`.
    pub const S: Self = Self {
        a: 0,
        b: -1,
        c: 1,
        d: 0,
    };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::Domain(format!(
                "[[{a}, {b}], [{c}, {d}]] does not have determinant 1"
            )));
        }
        Ok(Self { a, b, c, d })
    }

    /// `tau -> tau + k`.
    pub fn translation(k: i64) -> Self {
        Self {
            a: 1,
            b: k,
            c: 0,
            d: 1,
        }
    }

    pub fn determinant(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    /// `self` after `other`: `(self * other)(tau) = self(other(tau))`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Equality in `PSL(2, Z)`.
    pub fn same_action(&self, other: &Self) -> bool {
        self == other
            || (self.a == -other.a
                && self.b == -other.b
                && self.c == -other.c
                && self.d == -other.d)
    }

    pub fn apply(&self, tau: Complex) -> Complex {
        (tau * self.a as f64 + self.b as f64) / (tau * self.c as f64 + self.d as f64)
    }

    pub fn apply_tau(&self, tau: TauPoint) -> Result<TauPoint> {
        TauPoint::new(self.apply(tau.value()))
    }
}

/// Whether `tau` lies in the closed fundamental domain (up to `BOUNDARY_EPS`).
pub fn in_fundamental_domain(tau: TauPoint) -> bool {
    let t = tau.value();
    t.re > -0.5 - BOUNDARY_EPS && t.re <= 0.5 + BOUNDARY_EPS && t.norm_sqr() >= 1.0 - BOUNDARY_EPS
}

/// Maps `tau` into the fundamental domain, returning the reduced point and
/// the map `g` with `g(tau) = reduced`.
pub fn reduce_tau(tau: TauPoint) -> (TauPoint, UnimodularMap) {
    let mut t = tau.value();
    let mut map = UnimodularMap::IDENTITY;
    // Each inversion at least doubles Im tau once |tau| < 1/2; the loop is short.
    for _ in 0..10_000 {
        let mut n = (t.re - 0.5).ceil();
        if t.re - n <= -0.5 + BOUNDARY_EPS {
            n -= 1.0;
        }
        if n != 0.0 {
            t -= n;
            map = UnimodularMap::translation(-(n as i64)).compose(&map);
        }
        let r2 = t.norm_sqr();
        if r2 < 1.0 - BOUNDARY_EPS {
            t = -1.0 / t;
            map = UnimodularMap::S.compose(&map);
            continue;
        }
        if r2 <= 1.0 + BOUNDARY_EPS && t.re < -BOUNDARY_EPS {
            // on the arc: -1/tau = -conj(tau) moves to the right half
            t = -1.0 / t;
            map = UnimodularMap::S.compose(&map);
        }
        break;
    }
    let reduced = TauPoint::new(t).expect("reduction preserves the upper half-plane");
    (reduced, map)
}

/// A lattice given by generators, together with its normal form
/// `rho (Z + tau Z)` with `tau` reduced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub omega1: Complex,
    pub omega2: Complex,
    pub rho: Complex,
    pub tau: TauPoint,
    /// Reduction applied to `omega2/omega1` (after the orientation fix).
    pub map: UnimodularMap,
    /// True when `omega2` was negated to make `Im(omega2/omega1) > 0`.
    pub orientation_flipped: bool,
}

impl Lattice {
    /// `Z + tau Z` with `tau` reduced first.
    pub fn from_tau(tau: TauPoint) -> Self {
        normalize_lattice(Complex::new(1.0, 0.0), tau.value()).expect("1 and tau are independent")
    }

    /// The reduced basis `(rho, rho tau)`.
    pub fn basis(&self) -> (Complex, Complex) {
        (self.rho, self.rho * self.tau.value())
    }

    /// Integer coordinates of `point` in the reduced basis, if it is a lattice
    /// point (to within `tol` in those coordinates).
    pub fn coordinates(&self, point: Complex, tol: f64) -> Option<(i64, i64)> {
        let (u, v) = self.basis();
        let det = u.re * v.im - u.im * v.re;
        let m = (point.re * v.im - point.im * v.re) / det;
        let n = (u.re * point.im - u.im * point.re) / det;
        let (mr, nr) = (m.round(), n.round());
        ((m - mr).abs() <= tol && (n - nr).abs() <= tol).then_some((mr as i64, nr as i64))
    }

    /// Whether `other` describes the same set of points.
    pub fn same_points(&self, other: &Lattice, tol: f64) -> bool {
        let (u, v) = other.basis();
        let (a, c) = match (self.coordinates(u, tol), self.coordinates(v, tol)) {
            (Some(x), Some(y)) => (x, y),
            _ => return false,
        };
        (a.0 * c.1 - a.1 * c.0).abs() == 1
    }
}

/// Normal form of the lattice generated by `omega1` and `omega2`.
///
/// If `Im(omega2/omega1) < 0`, `omega2` is negated. Then `tau0 = omega2/omega1`
/// is reduced by some `g = [[a, b], [c, d]]` and `rho = omega1 (c tau0 + d)`, so
/// that `(rho, rho tau)` is a unimodular change of the (oriented) input basis.
pub fn normalize_lattice(omega1: Complex, omega2: Complex) -> Result<Lattice> {
    if !omega1.is_finite() || !omega2.is_finite() {
        return Err(Error::Domain("lattice generators must be finite".into()));
    }
    if omega1.norm() == 0.0 || omega2.norm() == 0.0 {
        return Err(Error::Domain("lattice generators must be nonzero".into()));
    }
    let ratio = omega2 / omega1;
    if ratio.im.abs() <= 1e-12 * ratio.norm() {
        return Err(Error::Domain(format!(
            "generators {omega1} and {omega2} are collinear"
        )));
    }
    let flipped = ratio.im < 0.0;
    let w2 = if flipped { -omega2 } else { omega2 };
    let tau0 = TauPoint::new(w2 / omega1)?;
    let (tau, map) = reduce_tau(tau0);
    let rho = omega1 * (tau0.value() * map.c as f64 + map.d as f64);
    Ok(Lattice {
        omega1,
        omega2,
        rho,
        tau,
        map,
        orientation_flipped: flipped,
    })
}

/// Gauge `(alpha, beta)` with `sigma(z) = theta_1(z/rho, tau) e^{alpha z^2 + beta}`,
/// fixed by `sigma'(0) = 1` and a vanishing `z^3` coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaGauge {
    pub alpha: Complex,
    pub beta: Complex,
    /// `e^beta = rho / theta_1'(0, tau)`, kept to avoid a log/exp round trip.
    pub scale: Complex,
}

pub fn sigma_gauge(lat: &Lattice) -> Result<SigmaGauge> {
    let th = theta1_odd_series(lat.tau, 3)?;
    let (a1, a3) = (th.coeff(1), th.coeff(3));
    let rho = lat.rho;
    let scale = rho / a1;
    Ok(SigmaGauge {
        alpha: -a3 / (rho * rho * a1),
        beta: scale.ln(),
        scale,
    })
}

/// `sigma(., Lambda)` with its gauge precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaFunction {
    pub lattice: Lattice,
    pub gauge: SigmaGauge,
}

impl SigmaFunction {
    pub fn new(lattice: &Lattice) -> Result<Self> {
        Ok(Self {
            lattice: *lattice,
            gauge: sigma_gauge(lattice)?,
        })
    }

    pub fn eval(&self, z: Complex) -> Result<Complex> {
        let g = &self.gauge;
        let th = theta1_eval(z / self.lattice.rho, self.lattice.tau)?;
        Ok(th * (g.alpha * z * z).exp() * g.scale)
    }

    /// `sigma` and its first three derivatives at `z`.
    pub fn jet3(&self, z: Complex) -> Result<[Complex; 4]> {
        let g = &self.gauge;
        let inv_rho = 1.0 / self.lattice.rho;
        let t = theta1_jet(z * inv_rho, self.lattice.tau)?;
        let t = [
            t[0],
            t[1] * inv_rho,
            t[2] * inv_rho.powu(2),
            t[3] * inv_rho.powu(3),
        ];
        // h = scale e^{alpha z^2} and its derivatives
        let e = (g.alpha * z * z).exp() * g.scale;
        let a = g.alpha;
        let h = [
            e,
            e * a * z * 2.0,
            e * (a * 2.0 + a * a * z * z * 4.0),
            e * (a * a * z * 12.0 + a * a * a * z.powu(3) * 8.0),
        ];
        Ok([
            t[0] * h[0],
            t[1] * h[0] + t[0] * h[1],
            t[2] * h[0] + t[1] * h[1] * 2.0 + t[0] * h[2],
            t[3] * h[0] + t[2] * h[1] * 3.0 + t[1] * h[2] * 3.0 + t[0] * h[3],
        ])
    }
}

/// `sigma(z, Lambda)` through the theta route.
pub fn sigma_eval(z: Complex, lat: &Lattice) -> Result<Complex> {
    SigmaFunction::new(lat)?.eval(z)
}

/// `log(1 - u) + u + u^2/2`.
fn weierstrass_factor_log(u: Complex) -> Complex {
    if u.norm() < 0.25 {
        let mut sum = Complex::new(0.0, 0.0);
        let mut pow = u * u * u;
        let mut k = 3.0;
        while pow.norm() / k > 1e-18 * sum.norm().max(1e-300) {
            sum -= pow / k;
            pow *= u;
            k += 1.0;
        }
        sum
    } else {
        (Complex::new(1.0, 0.0) - u).ln() + u + u * u * 0.5
    }
}

/// `z prod_{0 < |lambda| <= radius} (1 - z/lambda) e^{z/lambda + (z/lambda)^2 / 2}`.
///
/// Lattice points are taken in `lambda, -lambda` pairs, which makes the
/// result exactly odd in `z` and cancels the cubic tail terms. The remaining
/// truncation error is about `|z|^4 sum_{|lambda| > R} |lambda|^{-4} / 2`,
/// i.e. `O(R^-2)`. Meant as a low-precision cross-check only.
pub fn sigma_product_oracle(z: Complex, lat: &Lattice, radius: f64) -> Result<Complex> {
    if radius.is_nan() || radius < 10.0 * z.norm() || radius <= 0.0 {
        return Err(Error::Domain(format!(
            "radius {radius} must be positive and at least 10 |z| = {}",
            10.0 * z.norm()
        )));
    }
    if z.norm() == 0.0 {
        return Ok(Complex::new(0.0, 0.0));
    }
    let (u, v) = lat.basis();
    let tau = lat.tau.value();
    let r = radius / lat.rho.norm();
    let n_max = (r / tau.im).floor() as i64;
    let mut log_sum = Complex::new(0.0, 0.0);
    for n in 0..=n_max {
        let shift = n as f64 * tau.re;
        let m_lo = if n == 0 {
            1
        } else {
            (-r - shift).ceil() as i64
        };
        let m_hi = (r - shift).floor() as i64;
        for m in m_lo..=m_hi {
            let lambda = u * m as f64 + v * n as f64;
            if lambda.norm() > radius {
                continue;
            }
            let w = z / lambda;
            log_sum += weierstrass_factor_log(w) + weierstrass_factor_log(-w);
        }
    }
    Ok(z * log_sum.exp())
}

/// Derivative of `j`: `dj/dtau = -2 pi i E4^2 E6 / eta^24`.
fn j_derivative(tau: TauPoint) -> Result<Complex> {
    let (g2, g3) = weierstrass_g(tau)?;
    let tp = 2.0 * PI;
    let e4 = g2 * 12.0 / tp.powi(4);
    let e6 = g3 * 216.0 / tp.powi(6);
    let eta24 = dedekind_eta(tau)?.powu(24);
    Ok(Complex::new(0.0, -tp) * e4 * e4 * e6 / eta24)
}

const NEWTON_MAX_STEPS: usize = 100;

fn restart_points() -> [Complex; 8] {
    [
        Complex::new(0.0, 1.2),
        Complex::new(0.3, 1.0),
        Complex::new(-0.3, 1.0),
        Complex::new(0.45, 0.95),
        Complex::new(-0.45, 0.95),
        Complex::new(0.0, 2.0),
        Complex::new(0.25, 1.6),
        Complex::new(-0.25, 1.6),
    ]
}

/// Newton iteration for `j(tau) = target` from `start`; iterates are kept in
/// the fundamental domain. Returns the last iterate and its residual.
fn newton_j(target: Complex, start: Complex, tol: f64) -> Result<(TauPoint, f64)> {
    let (mut tau, _) = reduce_tau(TauPoint::new(start)?);
    let mut resid = f64::INFINITY;
    for _ in 0..NEWTON_MAX_STEPS {
        let f = j_invariant(tau)? - target;
        resid = f.norm();
        if resid <= tol {
            break;
        }
        let df = j_derivative(tau)?;
        if df.norm() == 0.0 || !df.is_finite() {
            break;
        }
        let mut step = f / df;
        let t = tau.value();
        while (t - step).im <= 0.1 * t.im {
            step *= 0.5;
        }
        let next = TauPoint::new(t - step)?;
        tau = reduce_tau(next).0;
        if step.norm() <= 1e-15 * t.norm() {
            resid = (j_invariant(tau)? - target).norm();
            break;
        }
    }
    Ok((tau, resid))
}

/// Point `tau` of the fundamental domain with `j(tau) = jval`.
///
/// Starts from `log(1/(jval - 744)) / (2 pi i)` when `|jval| > 2000`,
/// otherwise from `1.2 i`, then runs Newton with up to eight restarts from a
/// fixed grid. `j = 0` and `j = 1728` are answered exactly, since `dj/dtau`
/// vanishes there.
pub fn invert_j(jval: Complex) -> Result<TauPoint> {
    if !jval.is_finite() {
        return Err(Error::Domain(format!("j = {jval} is not finite")));
    }
    if jval.norm() <= 1e-10 {
        return Ok(TauPoint::corner());
    }
    if (jval - 1728.0).norm() <= 1e-8 * 1728.0 {
        return Ok(TauPoint::i());
    }
    let accept = 1e-8 * jval.norm().max(1.0);
    let target_tol = 1e-3 * accept;

    let first = if jval.norm() > 2000.0 {
        let q0 = 1.0 / (jval - 744.0);
        let t = q0.ln() / Complex::new(0.0, 2.0 * PI);
        if t.im > 0.0 {
            t
        } else {
            Complex::new(0.0, 1.2)
        }
    } else {
        Complex::new(0.0, 1.2)
    };

    let mut trace = Vec::new();
    let mut best: Option<(TauPoint, f64)> = None;
    for start in std::iter::once(first).chain(restart_points()) {
        match newton_j(jval, start, target_tol) {
            Ok((tau, resid)) => {
                trace.push(format!(
                    "start {start}: tau {} residual {resid:e}",
                    tau.value()
                ));
                if resid <= target_tol {
                    return Ok(tau);
                }
                if best.is_none_or(|(_, r)| resid < r) {
                    best = Some((tau, resid));
                }
            }
            Err(e) => trace.push(format!("start {start}: {e}")),
        }
    }
    match best {
        Some((tau, resid)) if resid <= accept => Ok(tau),
        _ => Err(Error::Convergence {
            message: format!("no tau found with |j(tau) - {jval}| <= {accept:e}"),
            trace,
        }),
    }
}
