//! Mean-payoff games with limited and partial observation: arena model,
//! weight-function abstraction, cycle-forming reachability games, class
//! predicates, strategy synthesis, the clamped safety reduction and a
//! simulator.

pub mod belief;
pub mod classify;
pub mod cycle_game;
pub mod cycles;
pub mod error;
pub mod format;
pub mod game;
pub mod generators;
pub mod graph;
pub mod par;
pub mod path;
pub mod safety;
pub mod sim;
pub mod strategy;
pub mod verdict;
pub mod weights;

pub use error::{MpgError, Result};
pub use game::{ActionId, Game, GameBuilder, ObsId, StateId, Transition};
pub use verdict::{Verdict, VerdictTag, Witness};
pub use weights::{ExtValue, SuccessorMode, WeightFunction};
