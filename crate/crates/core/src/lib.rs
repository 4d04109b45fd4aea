//! Compiler and verification workbench for entropic constraint systems built
//! from Wang tile sets.

pub mod ci;
pub mod compiler;
pub mod entropy;
pub mod error;
pub mod expr;
pub mod gadget;
pub mod joint;
pub mod rational;
pub mod refute;
pub mod tiling;
pub mod witness;

pub use error::{Error, Result};
pub use expr::{ci_expr, AffineConstraint, InfoExpr, Rel, VarId, VarSet};
pub use joint::FactoredJoint;
pub use rational::Rational;
