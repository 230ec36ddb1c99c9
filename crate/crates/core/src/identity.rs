//! The four-point identity
//!
//! ```text
//! F(x,y,z,w) = f(x)f(y)f(z)f(w)
//!            - f((x+y+z-w)/2) f((x+y-z+w)/2) f((x-y+z+w)/2) f((-x+y+z+w)/2)
//!            - f((x+y+z+w)/2) f((x+y-z-w)/2) f((x-y+z-w)/2) f((x-y-z+w)/2)
//! ```
//!
//! its differential consequence, the duplication equation
//! `f'(0)^3 f(2z) = f^4 (ln f)'''`, and the coefficient recurrence that
//! extends a solution of the duplication equation from its data through `z^7`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, SigmaFunction};
use crate::modular::{theta1_eval, theta1_jet, theta1_odd_series, TauPoint};
use crate::series::TruncatedOddSeries;
use crate::Complex;

type Evaluator = Arc<dyn Fn(Complex) -> Result<Complex> + Send + Sync>;

#[derive(Clone)]
enum Backing {
    Identity,
    Sine(Complex),
    Sigma(SigmaFunction),
    Theta1(TauPoint),
    Series(TruncatedOddSeries),
    Custom(Evaluator),
}

/// An odd function that can be evaluated pointwise.
///
/// Built-in handles also expose `f'(0)` and a third-order jet, which the
/// duplication-defect check needs; custom closures only evaluate.
#[derive(Clone)]
pub struct OddFunctionHandle {
    label: String,
    backing: Backing,
}

impl fmt::Debug for OddFunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OddFunctionHandle")
            .field("label", &self.label)
            .finish()
    }
}

impl OddFunctionHandle {
    /// `f(z) = z`.
    pub fn identity() -> Self {
        Self {
            label: "identity".into(),
            backing: Backing::Identity,
        }
    }

    /// `f(z) = sin(a z)`.
    pub fn sine(a: Complex) -> Self {
        Self {
            label: format!("sine(a={a})"),
            backing: Backing::Sine(a),
        }
    }

    pub fn sigma(lattice: &Lattice) -> Result<Self> {
        Ok(Self {
            label: format!("sigma(rho={}, tau={})", lattice.rho, lattice.tau.value()),
            backing: Backing::Sigma(SigmaFunction::new(lattice)?),
        })
    }

    pub fn theta1(tau: TauPoint) -> Self {
        Self {
            label: format!("theta1(tau={})", tau.value()),
            backing: Backing::Theta1(tau),
        }
    }

    /// Polynomial evaluation of the given odd series.
    pub fn series(s: TruncatedOddSeries) -> Self {
        Self {
            label: format!("series(max_degree={})", s.max_degree()),
            backing: Backing::Series(s),
        }
    }

    pub fn custom<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(Complex) -> Result<Complex> + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            backing: Backing::Custom(Arc::new(f)),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, z: Complex) -> Result<Complex> {
        match &self.backing {
            Backing::Identity => Ok(z),
            Backing::Sine(a) => Ok((a * z).sin()),
            Backing::Sigma(s) => s.eval(z),
            Backing::Theta1(tau) => theta1_eval(z, *tau),
            Backing::Series(s) => Ok(s.eval(z)),
            Backing::Custom(f) => f(z),
        }
    }

    /// `[f, f', f'', f''']` at `z`.
    pub fn jet3(&self, z: Complex) -> Result<[Complex; 4]> {
        match &self.backing {
            Backing::Identity => Ok([
                z,
                Complex::new(1.0, 0.0),
                Complex::default(),
                Complex::default(),
            ]),
            Backing::Sine(a) => {
                let (s, c) = ((a * z).sin(), (a * z).cos());
                Ok([s, c * a, -s * a * a, -c * a * a * a])
            }
            Backing::Sigma(s) => s.jet3(z),
            Backing::Theta1(tau) => theta1_jet(z, *tau),
            Backing::Series(s) => Ok(s.jet3(z)),
            Backing::Custom(_) => Err(Error::Usage(format!(
                "{} has no derivative information",
                self.label
            ))),
        }
    }

    /// `f'(0)`.
    pub fn leading_coefficient(&self) -> Result<Complex> {
        match &self.backing {
            Backing::Theta1(tau) => Ok(theta1_odd_series(*tau, 1)?.coeff(1)),
            Backing::Series(s) => Ok(s.coeff(1)),
            _ => Ok(self.jet3(Complex::new(0.0, 0.0))?[1]),
        }
    }

    /// Checks `f(-z) = -f(z)` to `tol` (relative) at the given probes.
    pub fn check_odd(&self, probes: &[Complex], tol: f64) -> Result<()> {
        for &z in probes {
            let (a, b) = (self.eval(z)?, self.eval(-z)?);
            if (a + b).norm() > tol * a.norm().max(1.0) {
                return Err(Error::Domain(format!(
                    "{} is not odd at {z}: f(z) = {a}, f(-z) = {b}",
                    self.label
                )));
            }
        }
        Ok(())
    }
}

/// Four points `x, y, z, w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadruplePoint {
    pub x: Complex,
    pub y: Complex,
    pub z: Complex,
    pub w: Complex,
}

impl QuadruplePoint {
    pub fn new(x: Complex, y: Complex, z: Complex, w: Complex) -> Self {
        Self { x, y, z, w }
    }

    pub fn real(x: f64, y: f64, z: f64, w: f64) -> Self {
        let c = |v| Complex::new(v, 0.0);
        Self::new(c(x), c(y), c(z), c(w))
    }
}

/// `F` at one quadruple, with the largest of its three product terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResidual {
    pub value: Complex,
    pub scale: f64,
}

impl IdentityResidual {
    /// `|F| / scale`, or `|F|` when every term vanishes.
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.value.norm() / self.scale
        } else {
            self.value.norm()
        }
    }
}

fn product4(f: &OddFunctionHandle, args: [Complex; 4]) -> Result<Complex> {
    args.iter()
        .try_fold(Complex::new(1.0, 0.0), |acc, &a| Ok(acc * f.eval(a)?))
}

/// The left-hand side `F(x, y, z, w)` of the four-point identity.
pub fn identity_residual(f: &OddFunctionHandle, pt: &QuadruplePoint) -> Result<IdentityResidual> {
    let QuadruplePoint { x, y, z, w } = *pt;
    // pairwise sums keep the half-sums exact when points coincide
    let (s_xy, d_xy, s_zw, d_zw) = (x + y, x - y, z + w, z - w);
    let t1 = product4(f, [x, y, z, w])?;
    let t2 = product4(
        f,
        [
            (s_xy + d_zw) * 0.5,
            (s_xy - d_zw) * 0.5,
            (s_zw + d_xy) * 0.5,
            (s_zw - d_xy) * 0.5,
        ],
    )?;
    let t3 = product4(
        f,
        [
            (s_xy + s_zw) * 0.5,
            (s_xy - s_zw) * 0.5,
            (d_xy + d_zw) * 0.5,
            (d_xy - d_zw) * 0.5,
        ],
    )?;
    Ok(IdentityResidual {
        value: t1 - t2 - t3,
        scale: t1.norm().max(t2.norm()).max(t3.norm()),
    })
}

/// Default seed for every sampled report.
pub const DEFAULT_SEED: u64 = 1729;

/// `n` quadruples with every coordinate uniform in the disk `|.| <= radius`.
pub fn sample_quadruples(seed: u64, n: usize, radius: f64) -> Vec<QuadruplePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = move || {
        let r = radius * rng.random::<f64>().sqrt();
        let phi = 2.0 * PI * rng.random::<f64>();
        Complex::from_polar(r, phi)
    };
    (0..n)
        .map(|_| {
            let (x, y, z, w) = (point(), point(), point(), point());
            QuadruplePoint::new(x, y, z, w)
        })
        .collect()
}

/// Summary of `F` over seeded random quadruples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub function: String,
    pub max_abs_residual: f64,
    pub max_relative_residual: f64,
    /// Largest term magnitude seen over all samples.
    pub scale: f64,
    pub num_samples: usize,
    pub seed: u64,
    pub radius: f64,
}

pub fn verify_identity(
    f: &OddFunctionHandle,
    num_samples: usize,
    seed: u64,
    radius: f64,
) -> Result<ResidualReport> {
    let mut report = ResidualReport {
        function: f.label().to_string(),
        max_abs_residual: 0.0,
        max_relative_residual: 0.0,
        scale: 0.0,
        num_samples,
        seed,
        radius,
    };
    for pt in sample_quadruples(seed, num_samples, radius) {
        let r = identity_residual(f, &pt)?;
        report.max_abs_residual = report.max_abs_residual.max(r.value.norm());
        report.max_relative_residual = report.max_relative_residual.max(r.relative());
        report.scale = report.scale.max(r.scale);
    }
    Ok(report)
}

fn require_leading(s: &TruncatedOddSeries) -> Result<Complex> {
    let a1 = s.coeff(1);
    if a1.norm() == 0.0 {
        return Err(Error::NotInOmega);
    }
    Ok(a1)
}

/// `a_1^3 f(2z) - f^4 (ln f)'''` as an odd series, exact through the input
/// `max_degree`.
pub fn duplication_residual(s: &TruncatedOddSeries) -> Result<TruncatedOddSeries> {
    let a1 = require_leading(s)?;
    if s.max_degree() < 3 {
        return Err(Error::InsufficientData {
            required: 3,
            actual: s.max_degree(),
        });
    }
    let doubled = s
        .scale_argument(Complex::new(2.0, 0.0))
        .scale_by(a1 * a1 * a1);
    let d = s.nonlinear_d();
    let odd = doubled
        .odd_coefficients()
        .iter()
        .zip(d.odd_coefficients())
        .map(|(a, b)| a - b)
        .collect();
    TruncatedOddSeries::new(odd)
}

/// `psi(n) = (n-1)(n-2)(n-3) + 8 - 2^n` for odd `n >= 5`.
pub fn psi(n: u32) -> Result<i128> {
    if n < 5 || n.is_multiple_of(2) {
        return Err(Error::Domain(format!("psi needs an odd n >= 5, got {n}")));
    }
    if n > 125 {
        return Err(Error::Domain(format!(
            "psi({n}) overflows 128-bit integers"
        )));
    }
    let m = n as i128;
    Ok((m - 1) * (m - 2) * (m - 3) + 8 - (1i128 << n))
}

/// Coefficient of `z^n` in the duplication residual of `s`.
fn residual_coeff(s: &TruncatedOddSeries, n: usize) -> Result<Complex> {
    Ok(duplication_residual(s)?.coeff(n))
}

/// Extends a solution of the duplication equation from its coefficients
/// through `z^7` (or further) up to `target_degree`.
///
/// For each odd `n >= 9` the residual coefficient at `z^n` is affine in
/// `a_n`, with slope `-a_1^3 psi(n)`. The slope is measured from the
/// probe `a_1 z + z^n` and cross-checked against `psi(n)`; `a_n` is then the
/// root of the affine map.
pub fn extend_series(s: &TruncatedOddSeries, target_degree: usize) -> Result<TruncatedOddSeries> {
    let a1 = require_leading(s)?;
    if s.max_degree() < 7 {
        return Err(Error::InsufficientData {
            required: 7,
            actual: s.max_degree(),
        });
    }
    if target_degree.is_multiple_of(2) || target_degree <= s.max_degree() {
        return Err(Error::Usage(format!(
            "target degree {target_degree} must be odd and above {}",
            s.max_degree()
        )));
    }
    let mut out = s.clone();
    for n in (s.max_degree() + 2..=target_degree).step_by(2) {
        out = out.pad(n)?;
        let r0 = residual_coeff(&out, n)?;

        let mut probe = TruncatedOddSeries::zeros(n)?;
        probe.set_coeff(1, a1);
        let base = residual_coeff(&probe, n)?;
        probe.set_coeff(n, Complex::new(1.0, 0.0));
        let slope = residual_coeff(&probe, n)? - base;

        let expected = -(a1 * a1 * a1) * psi(n as u32)? as f64;
        assert!(
            (slope - expected).norm() <= 1e-9 * expected.norm(),
            "linearization at z^{n} is {slope}, expected {expected}"
        );
        out.set_coeff(n, -r0 / slope);
    }
    Ok(out)
}

/// `f^4 (ln f)'''(x) - f'(0)^3 f(2x)` from the handle's jet. Zero for every
/// solution of the duplication equation.
pub fn duplication_defect_at(f: &OddFunctionHandle, x: Complex) -> Result<Complex> {
    let [v, d1, d2, d3] = f.jet3(x)?;
    let a1 = f.leading_coefficient()?;
    let lhs = v * v * v * d3 - v * v * d1 * d2 * 3.0 + v * d1 * d1 * d1 * 2.0;
    Ok(lhs - a1 * a1 * a1 * f.eval(x * 2.0)?)
}

/// Default `t` step for [`cube_root_third_derivative`].
pub const CUBE_ROOT_FD_STEP: f64 = 1e-2;

/// `(1/6) d^3/dt^3 F(x, x+t, x+zeta t, x+zeta^2 t)` at `t = 0`,
/// `zeta = e^{2 pi i/3}`, by central differences with one Richardson step
/// (error `O(h^4)`).
pub fn cube_root_third_derivative(f: &OddFunctionHandle, x: Complex, h: f64) -> Result<Complex> {
    let zeta = Complex::from_polar(1.0, 2.0 * PI / 3.0);
    let g = |t: f64| -> Result<Complex> {
        let pt = QuadruplePoint::new(x, x + t, x + zeta * t, x + zeta * zeta * t);
        Ok(identity_residual(f, &pt)?.value)
    };
    let third = |h: f64| -> Result<Complex> {
        Ok((g(2.0 * h)? - g(h)? * 2.0 + g(-h)? * 2.0 - g(-2.0 * h)?) / (2.0 * h * h * h))
    };
    let coarse = third(h)?;
    let fine = third(h / 2.0)?;
    Ok((fine * 4.0 - coarse) / 3.0 / 6.0)
}
