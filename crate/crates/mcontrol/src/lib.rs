//! Election control in the presence of manipulative voters: an exhaustive
//! game-tree oracle, direct solvers for the tractable cases, and instance
//! transformers for the hardness constructions.

pub mod artificial;
pub mod control;
pub mod election;
pub mod error;
pub mod formula;
pub mod oracle;
pub mod reductions;
pub mod scenario;
pub mod solvers;

pub use control::{Action, ControlType, Goal, Kind, Tie};
pub use election::{Ballot, Cand, CandSet, Rule, Voter};
pub use error::{Error, Result};
pub use scenario::{Instance, Mode, Scenario};
