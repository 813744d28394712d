//! Mutually unbiased measurements (MUMs) in arbitrary finite dimension and the
//! separability criteria built on them.
//!
//! The crate is organised bottom-up:
//!
//! - [`opalg`]: dense complex matrices, Kronecker products, trace forms and a
//!   cyclic Jacobi Hermitian eigensolver.
//! - [`mum`]: SU(d) generators, the complete family of `d + 1` MUMs with
//!   efficiency `kappa`, verification, and the prime-dimension MUB baseline.
//! - [`states`]: density matrices, standard state families and seeded random
//!   generation.
//! - [`criteria`]: index of coincidence, the MUB baseline index, the five
//!   MUM witnesses with their separable bounds, and k-nonseparability checks.
//! - [`io`]: JSON file formats for measurement sets, states and reports.
//! - [`cli`]: the `mumsep` command-line front end.
//!
//! Basis states are written 1-based in documentation (`|1>, ..., |d>`) and
//! stored 0-based everywhere in code and in serialized selections.

pub mod cli;
pub mod criteria;
pub mod error;
pub mod io;
pub mod mum;
pub mod opalg;
pub mod states;

pub use error::{Error, Result};
