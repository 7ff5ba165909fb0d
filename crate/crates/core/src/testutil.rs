//! Compact task builders for unit tests.

use crate::atom::AtomTable;
use crate::state::StateSet;
use crate::task::{Action, Task};

pub(crate) type ActionSpec<'a> = (&'a str, &'a [&'a str], &'a [&'a str], &'a [&'a str]);

/// Builds a task from atom names and `(name, pre, add, del)` tuples.
pub(crate) fn tiny_task(
    atoms: &[&str],
    init: &[&str],
    goal: &[&str],
    actions: &[ActionSpec],
) -> Task {
    let mut table = AtomTable::new();
    for a in atoms {
        table.intern(a);
    }
    let set = |names: &[&str]| {
        StateSet::from_ids(table.len(), names.iter().map(|n| table.get(n).unwrap()))
    };
    let actions = actions
        .iter()
        .map(|(name, pre, add, del)| Action::new(*name, set(pre), set(add), set(del)))
        .collect();
    let (init, goal) = (set(init), set(goal));
    Task::new(table, init, goal, actions).unwrap()
}

pub(crate) trait TaskExt {
    /// Builds a set over this task's universe from atom names.
    fn set(&self, names: &[&str]) -> StateSet;
}

impl TaskExt for Task {
    fn set(&self, names: &[&str]) -> StateSet {
        StateSet::from_ids(
            self.atoms.len(),
            names.iter().map(|n| self.atoms.get(n).unwrap()),
        )
    }
}
