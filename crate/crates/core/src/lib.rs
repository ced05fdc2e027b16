//! Probability and energy accounting for Fraunhofer diffraction gratings.
//!
//! Every quantity is expressed in α-space, `α = (π w / λ) sin θ`. The crate
//! compares the collective *output* probability of N slits (the truncated
//! `sinc²` envelope integral) with the *resultant* probability carried by the
//! propagating diffraction orders (a Riemann sum over the principal maxima),
//! and derives from their ratio the occupation value Ω of the orders.
//!
//! - [`diffraction`]: grating geometry and pointwise intensities.
//! - [`quadrature`]: sine integral, closed-form `sinc²` integrals and an
//!   adaptive Gauss–Kronrod integrator used as an independent check.
//! - [`probability`]: normalized resultant probability, occupation values,
//!   per-order tables and the 0th-order step function.
//! - [`experiment`]: Ω inferred from detector pulse heights and the biases
//!   of an imperfect coupling apparatus.
//!
//! ```
//! use gratingprob::probability::{near_threshold, occupation_value, InclusionRule, ThresholdSide};
//!
//! // A Ronchi ruling whose truncation sits just inside the ±3rd orders.
//! let alpha_t = near_threshold(3, 0.5, ThresholdSide::Below);
//! let omega = occupation_value(alpha_t, 0.5, InclusionRule::default()).unwrap();
//! assert!((omega - 1.0285).abs() < 1e-4);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diffraction;
pub mod error;
pub mod experiment;
pub mod probability;
pub mod quadrature;

pub use diffraction::{Alpha, GratingSpec};
pub use error::{ModelError, Result};
pub use probability::{InclusionRule, OrderTable, ProbabilityCurve};

// The guide's code listings are compiled and run as doc-tests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/alpha-space.md")]
    pub mod alpha_space {}
    #[doc = include_str!("../../../book/src/integrals.md")]
    pub mod integrals {}
    #[doc = include_str!("../../../book/src/dense-sampling.md")]
    pub mod dense_sampling {}
    #[doc = include_str!("../../../book/src/sparse-sampling.md")]
    pub mod sparse_sampling {}
    #[doc = include_str!("../../../book/src/order-tables.md")]
    pub mod order_tables {}
    #[doc = include_str!("../../../book/src/rayleigh-steps.md")]
    pub mod rayleigh_steps {}
    #[doc = include_str!("../../../book/src/measurement.md")]
    pub mod measurement {}
    #[doc = include_str!("../../../README.md")]
    pub mod readme {}
}
