//! Exact computation of the effective bound on denominators of simultaneous
//! rational approximations to a pair of real algebraic numbers lying on a
//! curve of degree `m`, together with desk-scale verification of every
//! quantity that enters it.
//!
//! The crate is organised bottom-up:
//!
//! * [`numfield`]: integer polynomials, factorization, real algebraic numbers
//!   and the number field generated by the input pair.
//! * [`polyops`]: bivariate polynomials, Hasse derivatives and the vanishing
//!   index.
//! * [`positivity`]: intersection numbers on blowups of the projective plane.
//! * [`siegel`]: the vanishing-condition map and its integer kernel.
//! * [`effectivity`]: the constant pipeline and its report.
//! * [`search`]: exhaustive enumeration of good approximations.

pub mod bounds;
pub mod effectivity;
pub mod error;
pub mod io;
pub mod linalg;
pub mod numfield;
pub mod polyops;
pub mod positivity;
pub mod rat;
pub mod search;
pub mod siegel;

pub use error::{Error, Result};
pub use rat::Rat;
