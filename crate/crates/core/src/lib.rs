//! Pseudospectral simulation and verification laboratory for the 2d
//! Maxwell-Dirac system in Lorenz gauge.
//!
//! The crate evolves charge-class data with half-wave / Klein-Gordon
//! splittings on a periodic box, tracks the T-dependent electromagnetic data
//! norm, runs a two-level global continuation scheme, and property-tests the
//! computable null-form, angular-decomposition and bilinear-estimate facts
//! that the scheme relies on.

pub mod config;
pub mod continuation;
pub mod data;
pub mod dirac;
pub mod error;
pub mod evolution;
pub mod field;
pub mod grid;
pub mod io;
pub mod norms;
pub mod rng;
pub mod verifier;

pub use error::{CoreError, Result};
pub use field::{ComplexField2D, Representation, Sector, Sign, SpinorField2D, VectorField2D};
pub use grid::{Dyadic, Grid2D};
