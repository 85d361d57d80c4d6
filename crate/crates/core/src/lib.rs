//! Rank-two hypersurfaces with constant scalar curvature in the space forms
//! S⁴ and H⁴, and the tools to build and check them numerically.
//!
//! A hypersurface of this kind is recovered from its polar surface through
//! the Gauss parametrization. The crate provides explicit examples, a
//! finite-difference oracle for fundamental forms and curvatures, the reduced
//! structure equations on the leaf space, and a Lie-group integrator that
//! generates the non-symmetric members of the family.

pub mod catalog;
pub mod error;
pub mod export;
pub mod frame_flow;
pub mod gauss_param;
pub mod leafspace;
pub mod linalg;
pub mod numgeom;
pub mod report;
pub mod suites;

pub use error::{GeomError, Result};
