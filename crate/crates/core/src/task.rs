//! Tasks, actions and plans.

use crate::atom::AtomTable;
use crate::semantics::applicable;
use crate::state::StateSet;
use thiserror::Error;

/// A ground STRIPS action.
///
/// Application follows the add-then-delete convention: the successor of `s`
/// is `(s ∪ add) \ del`, so deletes win on overlap. Normalizing an action
/// (see [`Action::normalize`]) removes such overlaps without changing the
/// successor of any state that satisfies the precondition under the usual
/// delete-then-add reading of PDDL effect lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Action {
    pub name: String,
    pub pre: StateSet,
    pub add: StateSet,
    pub del: StateSet,
}

impl Action {
    pub fn new(name: impl Into<String>, pre: StateSet, add: StateSet, del: StateSet) -> Self {
        Action {
            name: name.into(),
            pre,
            add,
            del,
        }
    }

    /// True when `add ∩ del = ∅` and `add ∩ pre = ∅`.
    pub fn is_normalized(&self) -> bool {
        self.add.is_disjoint(&self.del) && self.add.is_disjoint(&self.pre)
    }

    /// Returns the normal form: first `del := del \ add`, then
    /// `add := add \ pre`. Idempotent.
    pub fn normalize(&self) -> Action {
        let del = self.del.difference(&self.add);
        let add = self.add.difference(&self.pre);
        Action {
            name: self.name.clone(),
            pre: self.pre.clone(),
            add,
            del,
        }
    }
}

/// A ground STRIPS task `(X, I, G, A)`.
///
/// All member sets have width `|X|`. The `dualized` flag records whether the
/// task was produced by [`crate::dual::dual_task`]; it round-trips through
/// the ground-task format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub atoms: AtomTable,
    pub init: StateSet,
    pub goal: StateSet,
    pub actions: Vec<Action>,
    pub dualized: bool,
}

/// Returned by operations that require a normalized task.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("task is not normalized; normalize it first")]
pub struct NotNormalizedError;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TaskError {
    #[error("set width {found} does not match atom count {expected} (in {context})")]
    WidthMismatch {
        expected: usize,
        found: usize,
        context: String,
    },
    #[error("duplicate action name `{0}`")]
    DuplicateActionName(String),
}

impl Task {
    /// Builds a task, checking that every set has width `|X|` and that
    /// action names are unique.
    pub fn new(
        atoms: AtomTable,
        init: StateSet,
        goal: StateSet,
        actions: Vec<Action>,
    ) -> Result<Task, TaskError> {
        let n = atoms.len();
        let check = |s: &StateSet, context: &str| {
            if s.width() != n {
                Err(TaskError::WidthMismatch {
                    expected: n,
                    found: s.width(),
                    context: context.to_string(),
                })
            } else {
                Ok(())
            }
        };
        check(&init, "init")?;
        check(&goal, "goal")?;
        let mut seen = std::collections::HashSet::new();
        for a in &actions {
            check(&a.pre, &a.name)?;
            check(&a.add, &a.name)?;
            check(&a.del, &a.name)?;
            if !seen.insert(a.name.as_str()) {
                return Err(TaskError::DuplicateActionName(a.name.clone()));
            }
        }
        Ok(Task {
            atoms,
            init,
            goal,
            actions,
            dualized: false,
        })
    }

    /// Number of atoms in the universe `X`.
    pub fn width(&self) -> usize {
        self.atoms.len()
    }

    /// True when every action is in normal form.
    pub fn is_normalized(&self) -> bool {
        self.actions.iter().all(Action::is_normalized)
    }

    /// `G ⊆ s`.
    pub fn satisfies_goal(&self, s: &StateSet) -> bool {
        self.goal.is_subset(s)
    }

    pub fn action_by_name(&self, name: &str) -> Option<(usize, &Action)> {
        self.actions
            .iter()
            .enumerate()
            .find(|(_, a)| a.name == name)
    }

    /// Renders a set of atoms as sorted names, for error messages.
    pub fn atom_names(&self, s: &StateSet) -> Vec<String> {
        s.iter().map(|id| self.atoms.name(id).to_string()).collect()
    }
}

/// Returns a copy of the task with every action normalized. The universe,
/// initial state and goal are unchanged. Idempotent.
pub fn normalize_task(task: &Task) -> Task {
    Task {
        atoms: task.atoms.clone(),
        init: task.init.clone(),
        goal: task.goal.clone(),
        actions: task.actions.iter().map(Action::normalize).collect(),
        dualized: task.dualized,
    }
}

/// An ordered sequence of action names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Plan {
    pub steps: Vec<String>,
}

impl Plan {
    pub fn new(steps: Vec<String>) -> Self {
        Plan { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The same steps in reverse order.
    pub fn reversed(&self) -> Plan {
        let mut steps = self.steps.clone();
        steps.reverse();
        Plan { steps }
    }
}

impl<S: Into<String>> FromIterator<S> for Plan {
    fn from_iter<T: IntoIterator<Item = S>>(iter: T) -> Self {
        Plan::new(iter.into_iter().map(Into::into).collect())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanError {
    #[error("step {step}: unknown action `{name}`")]
    UnknownAction { step: usize, name: String },
    #[error("step {step}: `{name}` is not applicable, missing: {}", missing.join(" "))]
    NotApplicable {
        step: usize,
        name: String,
        missing: Vec<String>,
    },
    #[error("final state does not satisfy the goal, missing: {}", missing.join(" "))]
    GoalUnsatisfied { missing: Vec<String> },
}

/// Simulates `plan` from the initial state and returns the state trace
/// (including the initial state) iff every step is applicable and the final
/// state satisfies the goal.
///
/// Effect lists are read the way PDDL readers apply them, deletes first and
/// adds second, so raw and normalized versions of the same task validate the
/// same plans.
pub fn validate_plan(task: &Task, plan: &Plan) -> Result<Vec<StateSet>, PlanError> {
    let mut trace = vec![task.init.clone()];
    for (step, name) in plan.steps.iter().enumerate() {
        let (_, action) = task
            .action_by_name(name)
            .ok_or_else(|| PlanError::UnknownAction {
                step,
                name: name.clone(),
            })?;
        let s = trace.last().unwrap();
        if !applicable(s, action) {
            return Err(PlanError::NotApplicable {
                step,
                name: name.clone(),
                missing: task.atom_names(&action.pre.difference(s)),
            });
        }
        trace.push(s.difference(&action.del).union(&action.add));
    }
    let last = trace.last().unwrap();
    if !task.satisfies_goal(last) {
        return Err(PlanError::GoalUnsatisfied {
            missing: task.atom_names(&task.goal.difference(last)),
        });
    }
    Ok(trace)
}
