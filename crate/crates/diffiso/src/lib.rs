//! Simultaneous isogeny correspondences in the D6 family via the
//! differential invariant chi.

pub mod bivariate;
pub mod chi;
pub mod equation;
pub mod error;
pub mod lambda;
pub mod pipeline;
pub mod poly;
pub mod rational;
pub mod resultant;
pub mod scalars;
pub mod upoly;

pub use chi::{chi_composed, chi_plain};
pub use equation::{build_f, derive_g, CorrespondenceCase};
pub use error::DiffisoError;
pub use lambda::LambdaChoice;
pub use poly::{DiffPoly, Mono, Var};
pub use rational::DiffRational;
pub use scalars::{Rationals, Scalars};
pub use pipeline::{run_case, verify_candidate, CaseReport, Verdict, DEFAULT_PRIMES};
