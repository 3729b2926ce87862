//! Finite-scale checks that the rank laws solve the moment systems, plus
//! identity, normalization, limit, table and Monte-Carlo checks.

mod limits;
mod report;
mod sample;
mod system;
mod tables;

pub use limits::check_limits;
pub use report::{sci, VerificationReport};
pub use sample::{sample_ranks, SampleReport};
pub use system::{
    check_identity, check_marginalization, check_normalization, check_selmer_slice, check_system,
    check_u_grid, check_u_solution,
};
pub use tables::{printed_tables, reproduce_tables, CellStatus, PrintedCell, TableCell, TableReport};
