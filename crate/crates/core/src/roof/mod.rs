//! Symmetric multi-copy relaxations of roof optimizations.

pub mod frame;
pub mod measures;
pub mod objective;
pub mod program;
pub mod sym_var;

pub use objective::{CopyTerm, MultiCopyOp};
pub use program::{
    sym_transfer, with_data_constraints, ConstraintMode, ProgramOptions, Relaxation, ResultSummary, RoofProgram,
    RoofResult,
};
