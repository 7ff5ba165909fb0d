//! Transition semantics for progression and regression.
//!
//! Progression expands a state `s` with the applicable actions and maps each
//! to `(s ∪ add) \ del`. Regression expands a sub-goal `t` with the
//! consistent actions and maps each to `(t \ add) ∪ pre`; a regressed
//! sub-goal stands for every state that contains it.

use crate::state::StateSet;
use crate::task::Action;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("`{action}` is not applicable, missing atoms: {}", missing.join(" "))]
    NotApplicable { action: String, missing: Vec<String> },
    #[error("`{action}` is not consistent, deletes required atoms: {}", conflict.join(" "))]
    Inconsistent { action: String, conflict: Vec<String> },
}

fn indices(s: &StateSet) -> Vec<String> {
    s.iter().map(|id| id.to_string()).collect()
}

/// `pre ⊆ s`: the action can fire in state `s`.
pub fn applicable(s: &StateSet, a: &Action) -> bool {
    a.pre.is_subset(s)
}

/// Progression: `(s ∪ add) \ del`. Fails if the action is not applicable,
/// naming the missing atoms (by index).
pub fn apply(s: &StateSet, a: &Action) -> Result<StateSet, SemanticsError> {
    if !applicable(s, a) {
        return Err(SemanticsError::NotApplicable {
            action: a.name.clone(),
            missing: indices(&a.pre.difference(s)),
        });
    }
    Ok(s.union(&a.add).difference(&a.del))
}

/// `del ∩ t = ∅`: the action cannot destroy any atom of sub-goal `t`.
pub fn consistent(t: &StateSet, a: &Action) -> bool {
    a.del.is_disjoint(t)
}

/// Regression: `(t \ add) ∪ pre`. Fails if the action is not consistent
/// with `t`, naming the conflicting atoms (by index).
pub fn regress(t: &StateSet, a: &Action) -> Result<StateSet, SemanticsError> {
    if !consistent(t, a) {
        return Err(SemanticsError::Inconsistent {
            action: a.name.clone(),
            conflict: indices(&a.del.intersection(t)),
        });
    }
    Ok(t.difference(&a.add).union(&a.pre))
}

/// `add ∩ t ≠ ∅`: the action establishes part of sub-goal `t`. Regression
/// steps that are not relevant only grow the sub-goal.
pub fn relevant(t: &StateSet, a: &Action) -> bool {
    a.add.intersects(t)
}

/// `¬(add ⊆ s)`: the action makes at least one new atom true in `s`.
/// Progression steps that are not useful never shrink the distance to any
/// goal.
pub fn useful(s: &StateSet, a: &Action) -> bool {
    !a.add.is_subset(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{tiny_task, TaskExt};

    #[test]
    fn apply_is_add_then_delete() {
        // apply({p,q}, (pre {}, add {q}, del {q})) = {p}: deletes win.
        let t = tiny_task(&["p", "q"], &[], &[], &[("a", &[], &["q"], &["q"])]);
        let s = t.set(&["p", "q"]);
        let out = apply(&s, &t.actions[0]).unwrap();
        assert_eq!(t.atom_names(&out), ["p"]);
    }

    #[test]
    fn apply_requires_precondition() {
        let t = tiny_task(&["p", "q"], &[], &[], &[("a", &["p"], &["q"], &[])]);
        let err = apply(&t.set(&[]), &t.actions[0]).unwrap_err();
        assert!(matches!(err, SemanticsError::NotApplicable { .. }));
        assert!(applicable(&t.set(&["p"]), &t.actions[0]));
    }

    #[test]
    fn regress_swaps_add_for_pre() {
        // T2's a2 = ({q},{r},{}): regress({r}) = {q}.
        let t = tiny_task(&["p", "q", "r"], &[], &[], &[("a2", &["q"], &["r"], &[])]);
        let out = regress(&t.set(&["r"]), &t.actions[0]).unwrap();
        assert_eq!(t.atom_names(&out), ["q"]);
    }

    #[test]
    fn regress_requires_consistency() {
        let t = tiny_task(&["p", "q"], &[], &[], &[("a", &[], &["p"], &["q"])]);
        assert!(consistent(&t.set(&["p"]), &t.actions[0]));
        let err = regress(&t.set(&["q"]), &t.actions[0]).unwrap_err();
        assert!(matches!(err, SemanticsError::Inconsistent { .. }));
    }

    #[test]
    fn relevance_and_usefulness() {
        let t = tiny_task(&["p", "q"], &[], &[], &[("a", &[], &["p"], &[])]);
        let a = &t.actions[0];
        assert!(relevant(&t.set(&["p", "q"]), a));
        assert!(!relevant(&t.set(&["q"]), a));
        assert!(useful(&t.set(&["q"]), a));
        assert!(!useful(&t.set(&["p", "q"]), a));
    }
}
