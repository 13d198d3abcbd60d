//! Swiss cheese sets, rectifiable path calculus, log-convex minorants and
//! numerical certificates for quasianalytic classes of functions.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: disks, abstract Swiss cheeses, classicality and membership.
//! * [`paths`]: piecewise line/arc/polyline paths, arc-length parametrisation,
//!   adaptive contour quadrature and checks of path-wise derivative identities.
//! * [`jets`]: rational functions and exact derivative jets.
//! * [`sequences`]: log-convexity, minorants and Denjoy–Carleman diagnostics.
//! * [`cohen`]: the `B_{j,k}` constants and bound-propagation certificates.
//! * [`estimates`]: derivative estimates for rational functions on cheeses.
//! * [`construction`]: the dyadic annulus construction and its verification.
//! * [`io`] and [`render`]: file formats and SVG output used by the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cohen;
pub mod construction;
pub mod error;
pub mod estimates;
pub mod geometry;
pub mod io;
pub mod jets;
pub mod paths;
pub mod render;
pub mod sequences;

pub use error::{Error, Result};
pub use num_complex::Complex64;

#[cfg(test)]
pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
