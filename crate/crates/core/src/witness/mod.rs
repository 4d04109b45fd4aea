//! Explicit distributions realizing compiled systems.

pub mod builder;
pub mod slack;
pub mod torus;
pub mod unit;
pub mod verify;

pub use builder::{build_witness, Builder, Witness};
pub use slack::extend_with_slack;
pub use torus::{tiling_to_colored_tori, ColoredTorus};
pub use verify::{verify, verify_ci, verify_sparse, RowReport, VerificationReport, SYSTEM_TOLERANCE, UNIT_TOLERANCE};
