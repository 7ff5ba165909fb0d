//! The dual transformation.
//!
//! The dual of a normalized task `(X, I, G, A)` is `(X, X\G, X\I, Aᵈ)` where
//! the dual of an action `(pre, add, del)` is `(del, add, pre)`. Regression
//! through a task explores exactly the complements of the states that
//! progression explores through its dual, so the two tasks are solvable by
//! the same action sequences read in opposite order.

use crate::task::{Action, NotNormalizedError, Plan, PlanError, Task};

/// Swaps the precondition and delete list: `(pre, add, del) ↦ (del, add, pre)`.
/// The name is shared with the primal action. Involutive.
pub fn dual_action(a: &Action) -> Action {
    Action {
        name: a.name.clone(),
        pre: a.del.clone(),
        add: a.add.clone(),
        del: a.pre.clone(),
    }
}

/// Builds the dual task `(X, X\G, X\I, Aᵈ)`.
///
/// Requires a normalized task: the swap preserves normal form exactly then
/// (`add ∩ pre` and `add ∩ del` trade places), and the mirror between
/// regression on the task and progression on the dual only holds for
/// normalized actions. Action order is preserved and the `dualized` flag is
/// toggled, so applying this twice reproduces the input field for field.
pub fn dual_task(task: &Task) -> Result<Task, NotNormalizedError> {
    if !task.is_normalized() {
        return Err(NotNormalizedError);
    }
    Ok(Task {
        atoms: task.atoms.clone(),
        init: task.goal.complement(),
        goal: task.init.complement(),
        actions: task.actions.iter().map(dual_action).collect(),
        dualized: !task.dualized,
    })
}

/// Maps a plan for the dual task back to a plan for the primal task: the
/// same names in reverse order. Fails if a name does not resolve in the
/// dual task.
pub fn dual_plan_to_primal(dual: &Task, plan: &Plan) -> Result<Plan, PlanError> {
    for (step, name) in plan.steps.iter().enumerate() {
        if dual.action_by_name(name).is_none() {
            return Err(PlanError::UnknownAction {
                step,
                name: name.clone(),
            });
        }
    }
    Ok(plan.reversed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::validate_plan;
    use crate::testutil::{tiny_task, TaskExt};

    #[test]
    fn dual_action_swaps_pre_and_del() {
        let t = tiny_task(&["p", "q"], &[], &[], &[("a", &["p"], &["q"], &["p"])]);
        let d = dual_action(&t.actions[0]);
        assert_eq!(d.pre, t.actions[0].del);
        assert_eq!(d.add, t.actions[0].add);
        assert_eq!(d.del, t.actions[0].pre);
        assert_eq!(dual_action(&d), t.actions[0]);
    }

    #[test]
    fn self_dual_task() {
        // X={p,q}, I={p}, G={q}, a1=({p},{q},{p}) is its own dual up to the flag.
        let t1 = tiny_task(&["p", "q"], &["p"], &["q"], &[("a1", &["p"], &["q"], &["p"])]);
        let d = dual_task(&t1).unwrap();
        assert_eq!(d.init, t1.init);
        assert_eq!(d.goal, t1.goal);
        assert_eq!(d.actions, t1.actions);
        assert!(d.dualized);
    }

    #[test]
    fn dual_of_chain_task() {
        // X={p,q,r}, I={p}, G={r}, a1=({p},{q},{}), a2=({q},{r},{}).
        let t2 = tiny_task(
            &["p", "q", "r"],
            &["p"],
            &["r"],
            &[("a1", &["p"], &["q"], &[]), ("a2", &["q"], &["r"], &[])],
        );
        let d = dual_task(&t2).unwrap();
        assert_eq!(d.init, t2.set(&["p", "q"]));
        assert_eq!(d.goal, t2.set(&["q", "r"]));
        assert_eq!(d.actions[0].pre, t2.set(&[]));
        assert_eq!(d.actions[0].add, t2.set(&["q"]));
        assert_eq!(d.actions[0].del, t2.set(&["p"]));
        assert_eq!(d.actions[1].pre, t2.set(&[]));
        assert_eq!(d.actions[1].add, t2.set(&["r"]));
        assert_eq!(d.actions[1].del, t2.set(&["q"]));
    }

    #[test]
    fn dual_of_unsolvable_task() {
        // X={p,q}, I={}, G={q}, a=({p},{q},{}).
        let t3 = tiny_task(&["p", "q"], &[], &["q"], &[("a", &["p"], &["q"], &[])]);
        let d = dual_task(&t3).unwrap();
        assert_eq!(d.init, t3.set(&["p"]));
        assert_eq!(d.goal, t3.set(&["p", "q"]));
    }

    #[test]
    fn dual_is_involutive_and_preserves_normal_form() {
        let t2 = tiny_task(
            &["p", "q", "r"],
            &["p"],
            &["r"],
            &[("a1", &["p"], &["q"], &[]), ("a2", &["q"], &["r"], &[])],
        );
        let d = dual_task(&t2).unwrap();
        assert!(d.is_normalized());
        assert_eq!(dual_task(&d).unwrap(), t2);
    }

    #[test]
    fn unnormalized_tasks_are_rejected() {
        let t = tiny_task(&["p", "q"], &[], &[], &[("a", &[], &["q"], &["q"])]);
        assert_eq!(dual_task(&t).unwrap_err(), NotNormalizedError);
    }

    #[test]
    fn dual_plans_reverse_into_primal_plans() {
        let t2 = tiny_task(
            &["p", "q", "r"],
            &["p"],
            &["r"],
            &[("a1", &["p"], &["q"], &[]), ("a2", &["q"], &["r"], &[])],
        );
        let d = dual_task(&t2).unwrap();
        // [a2, a1] solves the dual: {p,q} -> {p,r} -> {q,r}.
        let dual_plan = Plan::from_iter(["a2", "a1"]);
        validate_plan(&d, &dual_plan).unwrap();
        let primal = dual_plan_to_primal(&d, &dual_plan).unwrap();
        assert_eq!(primal, Plan::from_iter(["a1", "a2"]));
        validate_plan(&t2, &primal).unwrap();

        assert!(matches!(
            dual_plan_to_primal(&d, &Plan::from_iter(["zz"])),
            Err(PlanError::UnknownAction { .. })
        ));
    }
}
