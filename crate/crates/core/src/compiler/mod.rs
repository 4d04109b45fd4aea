//! Tile set to constraint system compilation, flattening and emission.

pub mod constants;
pub mod corollary;
pub mod sparse;
pub mod ttori;

pub use constants::{pick_alpha, pick_log_bounds, RationalLogBound};
pub use corollary::{emit_corollary, CorollaryForm, CorollaryInput, Statement};
pub use sparse::{flatten, slackify, SparseAffineSystem, SparseRow};
pub use ttori::{compile_ttori, compile_ttori_tree, switch_count, Compiled};
