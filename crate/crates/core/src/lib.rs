//! Numerical laboratory for quasi-states on finite-dimensional real Lie
//! algebras: evaluation, randomized verification, the almost-abelian
//! classification and rigidity test, reductive examples, frame functions on
//! complex space and the motion-algebra reconstruction.

pub mod almost_abelian;
pub mod error;
pub mod frame;
pub mod linalg;
pub mod motion;
pub mod lie;
pub mod quasistate;
pub mod realization;
pub mod reductive;
pub mod sampling;

pub use error::{Error, Result};
pub use lie::{Element, LieAlgebra, LinearMap, SemidirectSplit};
