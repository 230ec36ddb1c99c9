//! Weierstrass sigma function identity machinery.
//!
//! The crate evaluates `theta_1`, `eta`, `g2`, `g3`, `j` and `sigma`, computes
//! the Taylor invariants `p`, `q`, `mu` of odd functions, checks the
//! four-point identity and the duplication equation numerically, and
//! classifies odd Taylor data into the linear, trigonometric and elliptic
//! families of solutions.
//!
//! Complex numbers are `num_complex::Complex64`, serialized as `[re, im]`.
//!
//! ```
//! use sigma_core::{classify, synthesize, Complex, Family, TauPoint};
//!
//! let fam = Family::Elliptic {
//!     rho: Complex::new(1.1, 0.2),
//!     tau: TauPoint::from_parts(0.2, 1.3)?,
//!     alpha: Complex::new(0.1, 0.0),
//!     beta: Complex::new(0.0, 0.3),
//! };
//! let found = classify(&synthesize(&fam, 9)?)?;
//! assert_eq!(found.family.tag(), "elliptic");
//! # Ok::<(), sigma_core::Error>(())
//! ```

pub mod classifier;
pub mod error;
pub mod identity;
pub mod invariants;
pub mod lattice;
pub mod modular;
pub mod series;

/// Complex scalar used throughout.
pub type Complex = num_complex::Complex64;

pub use classifier::{
    classify, classify_with, synthesize, Classification, ClassifierConfig, Family,
};
pub use error::{Error, Result};
pub use identity::{
    duplication_residual, extend_series, identity_residual, psi, verify_identity,
    OddFunctionHandle, QuadruplePoint, ResidualReport,
};
pub use invariants::{
    hat_normalize, mu_of_pq, pq_of_series, HatForm, InvariantData, ProjectiveValue,
};
pub use lattice::{
    invert_j, normalize_lattice, reduce_tau, sigma_eval, sigma_product_oracle, Lattice,
    UnimodularMap,
};
pub use modular::{
    dedekind_eta, j_invariant, modular_pq, theta1_eval, theta1_odd_series, weierstrass_g, Nome,
    TauPoint,
};
pub use series::{TruncatedOddSeries, TruncatedSeries};
