//! Uniformized hyperbolic fillings of finite metric measure spaces, the
//! energies of classical and fractional Hardy inequalities on them, and
//! solvers for the associated best constants.
//!
//! The crate works entirely at desk scale: every space is a finite set of
//! atoms with a validated metric, the filling is a weighted metric graph
//! with closed-form boundary tails, and every integral is an exact finite
//! sum. Best constants are Rayleigh-quotient minima, computed by inverse
//! power iteration at p = 2 and projected gradient descent otherwise, with
//! a brute-force coordinate-descent oracle for small instances.

pub mod covers;
pub mod energy;
pub mod error;
pub mod filling;
pub mod fixtures;
pub mod io;
pub mod metric;
pub mod solver;
pub mod space;
pub mod traceext;
pub mod weights;

pub use error::{Error, Result};
pub use space::{FieldZ, NetHierarchy, PointCloudSpace, SubsetMask};
