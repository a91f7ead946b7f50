//! Three-dimensional parallelohedra as zonotopes: measures, the tetrahedron/β
//! representation, surface isotropic position and minimal mean width per type.

pub mod cli;
pub mod error;
pub mod geom;
pub mod hull;
pub mod isotropy;
pub mod nelder_mead;
pub mod optimizer;
pub mod pairs;
pub mod parallelohedron;
pub mod sampling;
pub mod symfunc;
pub mod verify;
pub mod zonotope;

pub use error::{Error, Result};
pub use geom::{Matrix3, Vector3};
