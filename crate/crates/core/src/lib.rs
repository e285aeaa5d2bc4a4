//! Finite-truncation numerics for solitonic representations of conformal
//! nets: circle diffeomorphisms, Fourier and Sobolev data, Virasoro
//! modules, the U(1) current and soliton invariants.

pub mod circle_diffeo;
pub mod dsl;
pub mod error;
pub mod fourier_sobolev;
pub mod ode;
pub mod quadrature;
pub mod solitons;
pub mod taylor;
pub mod u1_current;
pub mod virasoro;

pub use error::{Error, Result};
