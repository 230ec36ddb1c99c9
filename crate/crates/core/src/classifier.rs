//! Classification of odd solutions of the four-point identity.
//!
//! Every solution is, up to a Gaussian twist `e^{alpha z^2 + beta}`, one of
//! `z`, `sin(a z)` or `sigma(z, Lambda)`, and the twist-invariant `mu` of its
//! first four odd Taylor coefficients tells which:
//!
//! * `p = q = 0`: linear, `z e^{alpha z^2 + beta}`;
//! * `mu = 49/40`: trigonometric, `sin(a z) e^{alpha z^2 + beta}`;
//! * otherwise elliptic, with `j = 1728 mu / (mu - 49/40)` (`j = 1728` when
//!   `mu` is infinite) fixing the lattice shape `tau`.
//!
//! The remaining parameters are read off the normalized expansion
//! `z + A z^5 + B z^7`, whose invariants scale as `a^4` and `a^6` under
//! `z -> a z`. Coefficients beyond `z^7`, when present, are checked against
//! the unique continuation of the candidate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identity::extend_series;
use crate::invariants::{
    coefficient_scale, hat_normalize, pq_of_series, InvariantData, ProjectiveValue,
};
use crate::lattice::{invert_j, normalize_lattice, sigma_gauge, Lattice};
use crate::modular::{theta1_odd_series, TauPoint};
use crate::series::TruncatedOddSeries;
use crate::Complex;

/// `mu(sin z)`.
pub const MU_SINE: f64 = 49.0 / 40.0;

/// Tuning knobs for [`classify_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    /// `|mu - 49/40| <= trig_tolerance * 49/40` selects the trigonometric case.
    pub trig_tolerance: f64,
    /// Relative tolerance for coefficients beyond `z^7`.
    pub validation_tolerance: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            trig_tolerance: 1e-8,
            validation_tolerance: 1e-6,
        }
    }
}

/// Family member with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `z e^{alpha z^2 + beta}`.
    Linear { alpha: Complex, beta: Complex },
    /// `sin(a z) e^{alpha z^2 + beta}`, `a != 0`.
    Trigonometric {
        a: Complex,
        alpha: Complex,
        beta: Complex,
    },
    /// `sigma(z, rho (Z + tau Z)) e^{alpha z^2 + beta}`.
    Elliptic {
        rho: Complex,
        tau: TauPoint,
        alpha: Complex,
        beta: Complex,
    },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Linear { .. } => "linear",
            Family::Trigonometric { .. } => "trig",
            Family::Elliptic { .. } => "elliptic",
        }
    }

    pub fn alpha(&self) -> Complex {
        match *self {
            Family::Linear { alpha, .. }
            | Family::Trigonometric { alpha, .. }
            | Family::Elliptic { alpha, .. } => alpha,
        }
    }

    pub fn beta(&self) -> Complex {
        match *self {
            Family::Linear { beta, .. }
            | Family::Trigonometric { beta, .. }
            | Family::Elliptic { beta, .. } => beta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub invariants: InvariantData,
    /// `A`, `B` of the normalized expansion `z + A z^5 + B z^7`.
    pub hat_a5: Complex,
    pub hat_a7: Complex,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub j: Option<Complex>,
    /// Largest of `|rho^4 - r4| / |r4|`, `|rho^6 - r6| / |r6|` over the
    /// ratios that are defined.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scale_consistency: Option<f64>,
    /// Highest degree checked against the continuation of the candidate.
    pub validated_through: usize,
    pub max_validation_mismatch: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub family: Family,
    pub diagnostics: Diagnostics,
}

/// Flat wire form of a classification.
#[derive(Serialize, Deserialize)]
struct ClassificationJson {
    case: String,
    alpha: Complex,
    beta: Complex,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    a: Option<Complex>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    rho: Option<Complex>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    tau: Option<Complex>,
    diagnostics: Diagnostics,
}

impl Serialize for Classification {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let f = &self.family;
        let (a, rho, tau) = match *f {
            Family::Linear { .. } => (None, None, None),
            Family::Trigonometric { a, .. } => (Some(a), None, None),
            Family::Elliptic { rho, tau, .. } => (None, Some(rho), Some(tau.value())),
        };
        ClassificationJson {
            case: f.tag().to_string(),
            alpha: f.alpha(),
            beta: f.beta(),
            a,
            rho,
            tau,
            diagnostics: self.diagnostics.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Classification {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = ClassificationJson::deserialize(de)?;
        let (alpha, beta) = (raw.alpha, raw.beta);
        let family = match raw.case.as_str() {
            "linear" => Family::Linear { alpha, beta },
            "trig" => Family::Trigonometric {
                a: raw.a.ok_or_else(|| D::Error::missing_field("a"))?,
                alpha,
                beta,
            },
            "elliptic" => Family::Elliptic {
                rho: raw.rho.ok_or_else(|| D::Error::missing_field("rho"))?,
                tau: TauPoint::new(raw.tau.ok_or_else(|| D::Error::missing_field("tau"))?)
                    .map_err(D::Error::custom)?,
                alpha,
                beta,
            },
            other => {
                return Err(D::Error::unknown_variant(
                    other,
                    &["linear", "trig", "elliptic"],
                ))
            }
        };
        Ok(Classification {
            family,
            diagnostics: raw.diagnostics,
        })
    }
}

/// Picks the representative of `+-a` with `Re a > 0`, or `Im a > 0` on the
/// imaginary axis.
fn canonical_sign(a: Complex) -> Complex {
    if a.re < -1e-15 * a.norm() || (a.re.abs() <= 1e-15 * a.norm() && a.im < 0.0) {
        -a
    } else {
        a
    }
}

/// All `k`-th roots of `v`.
fn roots(v: Complex, k: u32) -> Vec<Complex> {
    let (r, phi) = v.to_polar();
    (0..k)
        .map(|m| {
            Complex::from_polar(
                r.powf(1.0 / k as f64),
                (phi + 2.0 * std::f64::consts::PI * m as f64) / k as f64,
            )
        })
        .collect()
}

fn validate(s: &TruncatedOddSeries, family: &Family, tol: f64) -> Result<f64> {
    if s.max_degree() <= 7 {
        return Ok(0.0);
    }
    let base = s.truncate(7)?;
    let candidate = extend_series(&synthesize(family, 7)?, s.max_degree())?;
    let a1 = base.coeff(1).norm();
    let scale = match coefficient_scale(&base) {
        x if x > 0.0 => x,
        _ => 1.0,
    };
    let mut worst = 0.0_f64;
    for n in (9..=s.max_degree()).step_by(2) {
        let expected = candidate.coeff(n);
        let bound = expected.norm() + a1 * scale.powi(n as i32 - 1);
        let mismatch = (s.coeff(n) - expected).norm() / bound;
        worst = worst.max(mismatch);
        if mismatch > tol {
            return Err(Error::IdentityNotSatisfied {
                degree: n,
                mismatch,
                tolerance: tol,
            });
        }
    }
    Ok(worst)
}

/// [`classify_with`] under the default configuration.
pub fn classify(s: &TruncatedOddSeries) -> Result<Classification> {
    classify_with(s, &ClassifierConfig::default())
}

/// Identifies the family of an odd series (`max_degree >= 7`, `a_1 != 0`)
/// and recovers its parameters.
pub fn classify_with(s: &TruncatedOddSeries, cfg: &ClassifierConfig) -> Result<Classification> {
    if s.max_degree() < 7 {
        return Err(Error::InsufficientData {
            required: 7,
            actual: s.max_degree(),
        });
    }
    let base = s.truncate(7)?;
    let invariants = pq_of_series(&base)?;
    let hat = hat_normalize(&base)?;
    let hat_inv = pq_of_series(&hat.series)?;
    let (p_hat, q_hat) = (hat_inv.p, hat_inv.q);

    let a1 = base.coeff(1);
    let a3_over_a1 = base.coeff(3) / a1;
    let mut j_diag = None;
    let mut scale_consistency = None;
    let mut note = String::from("beta is the principal logarithm, defined modulo 2 pi i");

    let family = match invariants.mu {
        ProjectiveValue::Undefined => Family::Linear {
            alpha: a3_over_a1,
            beta: a1.ln(),
        },
        ProjectiveValue::Finite(mu) if (mu - MU_SINE).norm() <= cfg.trig_tolerance * MU_SINE => {
            let a = canonical_sign((q_hat * -21.0 / (p_hat * 2.0)).sqrt());
            note.push_str("; a and -a give the same function up to beta + i pi");
            Family::Trigonometric {
                a,
                alpha: a3_over_a1 + a * a / 6.0,
                beta: (a1 / a).ln(),
            }
        }
        mu => {
            let j = match mu {
                ProjectiveValue::Finite(m) => m * 1728.0 / (m - MU_SINE),
                _ => Complex::new(1728.0, 0.0),
            };
            j_diag = Some(j);
            let tau = invert_j(j)?;
            let theta_hat = hat_normalize(&theta1_odd_series(tau, 7)?)?;
            let th = pq_of_series(&theta_hat.series)?;
            // rho^4 = p(theta hat)/p(hat), rho^6 = q(theta hat)/q(hat)
            let r4 = th.p / p_hat;
            let r6 = th.q / q_hat;
            let rho = match mu {
                ProjectiveValue::Infinity => roots(r4, 4)[0],
                ProjectiveValue::Finite(m) if m.norm() == 0.0 => roots(r6, 6)[0],
                ProjectiveValue::Finite(m) if m.norm() >= 1.0 => {
                    let target = r6;
                    roots(r4, 4)
                        .into_iter()
                        .min_by(|x, y| {
                            (x.powu(6) - target)
                                .norm()
                                .total_cmp(&(y.powu(6) - target).norm())
                        })
                        .expect("four roots")
                }
                _ => {
                    let target = r4;
                    roots(r6, 6)
                        .into_iter()
                        .min_by(|x, y| {
                            (x.powu(4) - target)
                                .norm()
                                .total_cmp(&(y.powu(4) - target).norm())
                        })
                        .expect("six roots")
                }
            };
            let mut worst: f64 = 0.0;
            if r4.is_finite() && r4.norm() > 0.0 {
                worst = worst.max((rho.powu(4) - r4).norm() / r4.norm());
            }
            if r6.is_finite() && r6.norm() > 0.0 {
                worst = worst.max((rho.powu(6) - r6).norm() / r6.norm());
            }
            scale_consistency = Some(worst);
            note.push_str(
                "; (rho, tau) is one basis of the lattice, defined up to unimodular change",
            );
            Family::Elliptic {
                rho: canonical_sign(rho),
                tau,
                alpha: a3_over_a1,
                beta: a1.ln(),
            }
        }
    };

    let max_validation_mismatch = validate(s, &family, cfg.validation_tolerance)?;
    Ok(Classification {
        family,
        diagnostics: Diagnostics {
            invariants,
            hat_a5: hat.a5(),
            hat_a7: hat.a7(),
            j: j_diag,
            scale_consistency,
            validated_through: s.max_degree(),
            max_validation_mismatch,
            note,
        },
    })
}

/// The lattice `rho (Z + tau Z)` of an elliptic family member.
pub fn elliptic_lattice(rho: Complex, tau: TauPoint) -> Result<Lattice> {
    normalize_lattice(rho, rho * tau.value())
}

/// Taylor series through `max_degree` of the family member.
pub fn synthesize(family: &Family, max_degree: usize) -> Result<TruncatedOddSeries> {
    match *family {
        Family::Linear { alpha, beta } => {
            Ok(TruncatedOddSeries::identity(max_degree)?.gauss_twist(alpha, beta))
        }
        Family::Trigonometric { a, alpha, beta } => {
            if a.norm() == 0.0 {
                return Err(Error::Domain("trigonometric family needs a != 0".into()));
            }
            Ok(TruncatedOddSeries::sine(a, max_degree)?.gauss_twist(alpha, beta))
        }
        Family::Elliptic {
            rho,
            tau,
            alpha,
            beta,
        } => {
            // Gauge of sigma for rho (Z + tau Z) taken without reducing tau,
            // so rho is used exactly as given.
            let lat = Lattice {
                omega1: rho,
                omega2: rho * tau.value(),
                rho,
                tau,
                map: crate::lattice::UnimodularMap::IDENTITY,
                orientation_flipped: false,
            };
            let g = sigma_gauge(&lat)?;
            Ok(theta1_odd_series(tau, max_degree)?
                .scale_argument(1.0 / rho)
                .gauss_twist(g.alpha + alpha, beta)
                .scale_by(g.scale))
        }
    }
}
