//! Exact arithmetic for rank-two Donaldson–Thomas partition functions of
//! local elliptic-surface fourfolds.

pub mod eqalg;
pub mod error;
pub mod localize;
pub mod moduli;
pub mod par;
pub mod partitions;
pub mod qseries;
pub mod universal;

pub use error::{Error, Result};
