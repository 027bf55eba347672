//! Learning macro-actions from solution plans.
//!
//! The pipeline:
//! 1. solve training problems with the baseline A* planner ([`search`]),
//! 2. encode the plans as a sequence database and mine maximal frequent
//!    contiguous action sequences ([`mining`]),
//! 3. bind the sequences to a new problem's ground actions and search with
//!    them as extra successors ([`macros`]),
//! 4. score baseline and macro runs with IPC time/quality metrics over a
//!    support sweep ([`bench`]).

pub mod bench;
pub mod ground;
pub mod macros;
pub mod mining;
pub mod pddl;
pub mod plan;
pub mod search;
pub mod task;

use thiserror::Error;

pub use ground::{ground, GroundError};
pub use macros::{apply_macro, encode_macros, enhanced_astar, macro_applicable, Macro, MacroLibrary};
pub use mining::{
    build_sequence_db, mine_maximal, support_of, ActionDictionary, MiningConfig, Pattern, SequenceDatabase,
};
pub use pddl::{parse_domain, parse_problem, Domain, ParseError, Problem};
pub use plan::{validate_plan, Plan, PlanFailure, PlanValidation};
pub use search::{astar, HeuristicKind, Limits, MacroSuccessors, Outcome, SearchOptions, SearchResult};
pub use task::{applicable, apply, apply_sequence, ActionId, AtomId, GroundAction, GroundTask, State};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("domain: {0}")]
    Domain(ParseError),
    #[error("problem: {0}")]
    Problem(ParseError),
    #[error(transparent)]
    Ground(#[from] GroundError),
}

/// Parses and grounds a domain/problem pair.
pub fn load_task(domain_text: &str, problem_text: &str) -> Result<GroundTask, LoadError> {
    let domain = parse_domain(domain_text).map_err(LoadError::Domain)?;
    let problem = parse_problem(problem_text, &domain).map_err(LoadError::Problem)?;
    Ok(ground(&domain, &problem)?)
}
