//! Signed measures on the half-line, their Laplace–Stieltjes transforms, and
//! numerical checks of continuity and Tauberian theorems for them.

pub mod convergence;
pub mod error;
pub mod expression;
pub mod laplace;
pub mod measure;
pub mod quadrature;
pub mod roots;
pub mod special;
pub mod sum;
pub mod tauberian;
pub mod verdict;

pub use error::{Error, Result};
pub use expression::{Expression, Oscillation, Term};
pub use measure::{Atom, DensitySegment, ExtendedReal, Part, SignedMeasure};
pub use verdict::{Status, VerdictReport, Witness};
