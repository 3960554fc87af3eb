//! Exact and analytic machinery for coefficient blocks {a(dn^2)} of
//! half-integral weight modular forms: Dirichlet characters and their
//! twists, truncated q-expansions, formal Dirichlet series, the Shimura-lift
//! coefficient identity, completed L-functions and zero-free certificates.

pub mod analytic;
pub mod arith;
pub mod chars;
pub mod cli;
pub mod cyclo;
pub mod dseries;
pub mod error;
pub mod io;
pub mod lift;
pub mod qseries;

pub use chars::{enumerate_characters, DirichletCharacter, Parity};
pub use cyclo::CycloNumber;
pub use dseries::DirichletSeriesCoeffs;
pub use error::{Error, Result};
pub use qseries::{CoefficientBlock, QExpansion};
