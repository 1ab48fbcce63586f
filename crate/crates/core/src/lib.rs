//! Finite-time turnpike structures in optimal control with non-smooth
//! tracking terms.
//!
//! The crate is organised bottom-up:
//!
//! * [`scalar_oracle`] closed-form solutions for scalar ODE problems with an
//!   L¹ tracking term, used as ground truth.
//! * [`dynamics`] discrete-time linear systems, builders for the scalar ODE,
//!   wave and 2×2 hyperbolic examples, and controllability machinery.
//! * [`objectives`] composite objectives, proximal maps and dual projections.
//! * [`solver`] a primal–dual splitting solver and a brute-force active-set
//!   oracle for tiny instances.
//! * [`turnpike`] arrival detection, threshold sweeps and the max-norm /
//!   point-penalty value equivalence check.
//! * [`scenario`] declarative JSON scenarios, CSV and SVG output, used by the
//!   `turnpike-lab` binary.

pub mod dynamics;
pub mod error;
pub mod objectives;
pub mod quadrature;
pub mod scalar_oracle;
pub mod scenario;
pub mod series;
pub mod solver;
pub mod turnpike;

pub use error::{Error, Result};
pub use series::Series;
