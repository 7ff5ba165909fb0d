//! Grounded STRIPS planning toolkit built around the progression/regression
//! duality.
//!
//! A task is a quadruple `(X, I, G, A)` over a fixed universe of atoms `X`.
//! The dual of a task complements the initial state and goal against `X` and
//! swaps each action's precondition with its delete list. Regression search on
//! a task and progression search on its dual then explore mirror images of the
//! same space: a task is solvable iff its dual is, and dual plans map back to
//! primal plans by reversal.
//!
//! The crate provides the task model ([`task`]), the dual transformation
//! ([`dual`]), invariant synthesis ([`invariants`]), forward and backward
//! search ([`search`]), brute-force ground-truth oracles ([`oracle`]), a
//! STRIPS PDDL front end ([`pddl`]), and a line-oriented ground-task format
//! ([`gtf`]).

pub mod atom;
pub mod dual;
pub mod gtf;
pub mod invariants;
pub mod oracle;
pub mod pddl;
pub mod planfile;
pub mod search;
pub mod semantics;
pub mod state;
pub mod task;

#[cfg(test)]
pub(crate) mod testutil;

pub use atom::{AtomId, AtomTable};
pub use dual::{dual_action, dual_plan_to_primal, dual_task};
pub use gtf::{read_gtf, write_gtf};
pub use invariants::{backward_invariants, mutex_fixpoint, BackwardClauseSet, MutexSet};
pub use pddl::{ground, parse_domain, parse_problem, write_pddl, GroundOptions};
pub use planfile::{read_plan, write_plan};
pub use search::{solve, Direction, Heuristic, Outcome, SearchConfig, Strategy, Verdict};
pub use semantics::{applicable, apply, consistent, regress, relevant, useful};
pub use state::StateSet;
pub use task::{normalize_task, validate_plan, Action, Plan, Task};
