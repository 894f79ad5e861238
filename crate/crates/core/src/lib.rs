//! Numerical geometry of weighted rotationally symmetric model spaces.
//!
//! The crate evaluates volumes, isoperimetric quotients, capacities and
//! parabolicity of model spaces `[0, R) x S^{m-1}` with metric
//! `dr^2 + w(r)^2 dθ^2` and density `e^{f(r)}`, and checks comparison
//! inequalities between an ambient model and a comparison model.
//!
//! Radial profiles are parsed from a small expression language and
//! differentiated with second-order forward-mode jets.
//!
//! ```
//! use wgeom_core::{capacity, model::WeightedModelSpace, profile::WarpingFunction};
//!
//! let h3 = WeightedModelSpace::unweighted(3, WarpingFunction::space_form(-1.0).unwrap()).unwrap();
//! let cap = capacity::capacity_at_infinity(&h3, 1.0).unwrap();
//! let expected = 4.0 * core::f64::consts::PI / (1.0 / 1f64.tanh() - 1.0);
//! assert!((cap.value.unwrap() - expected).abs() < 1e-8 * expected);
//! ```

#![no_std]
#![forbid(unsafe_code)]
// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod capacity;
pub mod comparison;
pub mod extrinsic;
pub mod model;
pub mod oracle;
pub mod profile;
pub mod quadrature;

pub use error::{Error, Result};
