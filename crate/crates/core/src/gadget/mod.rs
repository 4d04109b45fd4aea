//! The constraint calculus: systems, composition and the gadget catalog.

pub mod catalog;
pub mod lint;
pub mod system;

pub use catalog::{instantiate_at, instantiate_gadget, Gadget, Instance, SatKind};
pub use lint::{decode_ci, lint, RowShape};
pub use system::{conjoin, exists_extend, ConstraintSystem, Row};
