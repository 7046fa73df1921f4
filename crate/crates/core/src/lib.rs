//! Verification workbench for CCS: labelled transition systems, modal
//! mu-calculus model checking, weak simulation, and simulation-sound
//! abstraction rules.

pub mod abstraction;
pub mod action;
pub mod corpus;
pub mod error;
pub mod frontend;
pub mod logic;
pub mod lts;
pub mod process;
pub mod semantics;
pub mod simulation;

pub use action::{Action, ActionSet, Label, Relabelling};
pub use error::{AbstractionError, CcsError, LogicError, ParseError, SimulationError};
pub use lts::{build_lts, Lts, DEFAULT_MAX_STATES};
pub use process::{sort, Family, Process};
pub use semantics::{canonical_state, successors};
