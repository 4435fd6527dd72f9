//! Numerical engine for bounding least nonsplit primes and least quadratic
//! nonresidues via sieve-weight convolution profiles.

// comparisons on floats are negated on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod biquad;
pub mod char_oracle;
pub mod cubic;
pub mod dedekind;
pub mod error;
pub mod incexc;
pub mod primes;
pub mod profiles;
pub mod quad;
pub mod saddle;
pub mod scalar;
pub mod sigma;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` instantiations of the generic types.
pub mod f64_types {
    pub type Profile = crate::profiles::Profile<f64>;
    pub type CharEnvelope = crate::profiles::CharEnvelope<f64>;
    pub type SigmaSolution = crate::sigma::SigmaSolution<f64>;
    pub type OrderingReport = crate::sigma::OrderingReport<f64>;
    pub type IncExcConfig = crate::incexc::IncExcConfig<f64>;
    pub type SaddleEstimate = crate::saddle::SaddleEstimate<f64>;
    pub type FieldParams = crate::dedekind::FieldParams<f64>;
    pub type CubicTerms = crate::cubic::CubicTerms<f64>;
    pub type SQuadruple = crate::biquad::SQuadruple<f64>;
}

pub use f64_types::*;
