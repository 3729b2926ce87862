//! Exact moments and p^j-rank probability laws for Cohen-Lenstra style
//! heuristics (class groups, Tate-Shafarevich groups, Selmer groups), with
//! machinery to check the laws against the moment systems at finite scale.

pub mod cli;
pub mod error;
pub mod moments;
pub mod numerics;
pub mod partitions;
pub mod qseries;
pub mod rank_laws;
pub mod subgroup_count;
pub mod verify;

pub use error::{Error, Result};
pub use numerics::{Enclosure, ExactRational};
pub use partitions::Partition;
