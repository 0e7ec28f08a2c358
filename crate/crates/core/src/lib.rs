//! Exact analysis of Pfaffian systems with polynomial coefficients.
//!
//! The crate is organized bottom-up:
//!
//! * [`exactalg`]: rationals, polynomials, rational functions, fraction-free
//!   linear algebra;
//! * [`exterior`]: differential forms on a coordinate chart;
//! * [`pfaffian`]: system-level invariants (derived flag, characteristic
//!   system, gender, Darboux class);
//! * [`integral`]: integral elements at a point, polar spaces, chains and
//!   characters;
//! * [`reduction`]: slices, coordinate quotients and numeric integral curves;
//! * [`cli`]: the input language, the example catalog and report output.

pub mod cli;
pub mod exactalg;
pub mod exterior;
pub mod integral;
pub mod pfaffian;
pub mod reduction;
#[doc(hidden)]
pub mod testing;

pub use exactalg::{Polynomial, Rational, RationalFunction};
pub use exterior::{DifferentialForm, MultiIndex, TangentVector};
pub use pfaffian::PfaffianSystem;
