//! Decreasing-impatience analysis for discount functions and their mixtures.
//!
//! The crate covers four layers:
//!
//! * [`discount`]: parametric and tabulated discount functions with their
//!   time-preference rate `r = -D'/D`, impatience rate `IR = -D''/D'` and
//!   index of decreasing impatience `I = IR - r`.
//! * [`comparison`]: grid-based classification (DI / II / constant
//!   impatience) and comparative-DI ordering of pairs.
//! * [`mixture`]: weighted mixtures of discount functions and the
//!   decomposition of the mixture index into a convex combination of
//!   component indices plus a non-negative residual.
//! * [`ce`]: certainty-equivalent rates of probability-weighted hyperbolic
//!   and exponential discounting.
//!
//! [`io`], [`csv`], [`svg`], [`figures`] and [`household`] support the
//! command-line front end.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ce;
pub mod comparison;
pub mod csv;
pub mod discount;
pub mod error;
pub mod figures;
pub mod grid;
pub mod household;
pub mod io;
pub mod mixture;
pub mod numeric;
pub mod svg;

pub use discount::{Derivatives, DerivativeMode, Discount, DiscountSpec, Family, Rates};
pub use error::{Error, Result};
pub use grid::TimeGrid;
