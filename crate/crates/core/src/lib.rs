//! Numerical toolkit for periodic dispersive revivals: Fourier series on the
//! torus, step initial data, continued fractions, quadratic Gauss sums,
//! revival and spectral evolution, Littlewood–Paley regularity probes and
//! box-counting dimension estimates.

// `!(a < b)` guards are written that way so NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boxdim;
pub mod cfrac;
pub mod error;
pub mod evolution;
pub mod experiment;
pub mod gauss;
pub mod initial;
pub mod phase;
pub mod regularity;
pub mod revival;
pub mod series;

pub use error::{Error, Result};
pub use phase::{RationalTime, TimeMult};
pub use series::{FourierSeries, TorusGrid};
