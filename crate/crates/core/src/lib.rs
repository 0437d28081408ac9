//! Exact-arithmetic toolkit for r-fold cyclic covers of projective n-space branched along n+3
//! hyperplanes in general position.
//!
//! The crate covers
//! - exact rational linear algebra ([`linalg`]),
//! - hyperplane arrangements and their affine normal form ([`arrangement`]),
//! - the isomorphism between ordered points on the line and ordered hyperplane arrangements
//!   ([`moduli`]),
//! - the Kummer cover built from the Gale dual of an arrangement ([`kummer`]),
//! - the crepant resolution algorithm for binomial hypersurfaces together with a local-chart
//!   oracle ([`resolution`]),
//! - Hodge number bookkeeping ([`hodge`]) and the graded Higgs skeleton that computes the length
//!   of the Yukawa coupling ([`higgs`]),
//! - composed reports and the self-test suite used by the command-line front end ([`report`]).

pub mod arrangement;
pub mod error;
pub mod higgs;
pub mod hodge;
pub mod kummer;
pub mod linalg;
pub mod moduli;
pub mod par;
pub mod report;
pub mod resolution;
pub mod sample;

pub use error::{Error, Result};
pub use linalg::{Rational, RationalMatrix};
