//! Invariant synthesis and the pruning predicates built on it.
//!
//! Forward invariants are properties of every reachable state: atoms that
//! can never become true, atoms that are never destroyed, and mutex pairs
//! (negative binary clauses). Backward invariants are properties of every
//! state from which the goal is reachable; they are obtained by synthesizing
//! forward invariants on the dual task and reading them back through
//! complementation, where a mutex turns into a positive clause.

use crate::atom::AtomId;
use crate::dual::dual_task;
use crate::state::StateSet;
use crate::task::{NotNormalizedError, Task};

/// Unary facts and mutex pairs that hold in every reachable state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutexSet {
    /// Atoms provably never true in any reachable state.
    pub always_false: StateSet,
    /// Atoms true initially and deleted by no action.
    pub always_true: StateSet,
    /// Unordered pairs (canonical p < q) never jointly true in any
    /// reachable state. Never contains an always-false atom.
    pub pairs: Vec<(AtomId, AtomId)>,
}

/// Positive clauses that hold in every state from which the goal is
/// reachable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackwardClauseSet {
    /// Unordered pairs (canonical p < q) read as clauses `p ∨ q`.
    pub clauses: Vec<(AtomId, AtomId)>,
    /// Atoms required in every goal-reaching state.
    pub unary: StateSet,
}

/// Atoms reachable under the delete relaxation: the least fixpoint of
/// "I plus everything added by an action whose precondition is reached".
fn relaxed_reachable(task: &Task) -> StateSet {
    let mut reached = task.init.clone();
    loop {
        let mut changed = false;
        for a in &task.actions {
            if a.pre.is_subset(&reached) && !a.add.is_subset(&reached) {
                reached = reached.union(&a.add);
                changed = true;
            }
        }
        if !changed {
            return reached;
        }
    }
}

/// Synthesizes unary facts and binary mutexes by fixpoint.
///
/// Phase 1 computes `always_false` (complement of the delete-relaxed
/// reachable atoms) and `always_true` (initial atoms no action deletes).
/// Phase 2 starts from all candidate pairs, pairs not already violated in
/// the initial state and not subsumed by a unary fact, and repeatedly
/// deletes every pair some action can establish. An action threatens
/// `{p,q}` when its precondition is consistent with the surviving facts and
/// it either adds both atoms, or adds one while the other is not deleted
/// and is consistent with the precondition. Deletion is monotone, so the
/// fixpoint terminates and is order-independent.
pub fn mutex_fixpoint(task: &Task) -> Result<MutexSet, NotNormalizedError> {
    if !task.is_normalized() {
        return Err(NotNormalizedError);
    }
    let n = task.width();
    let always_false = relaxed_reachable(task).complement();
    let deleted_somewhere = task
        .actions
        .iter()
        .fold(StateSet::empty(n), |acc, a| acc.union(&a.del));
    let always_true = task.init.difference(&deleted_somewhere);

    // Symmetric adjacency: adj[p] = atoms currently mutex with p.
    let mut adj: Vec<StateSet> = vec![StateSet::empty(n); n];
    for p in 0..n as u32 {
        for q in (p + 1)..n as u32 {
            let (p, q) = (AtomId(p), AtomId(q));
            let both_init = task.init.contains(p) && task.init.contains(q);
            let subsumed = always_false.contains(p) || always_false.contains(q);
            if !both_init && !subsumed {
                adj[p.index()].insert(q);
                adj[q.index()].insert(p);
            }
        }
    }

    let consistent_with = |adj: &[StateSet], set: &StateSet, extra: AtomId| -> bool {
        !adj[extra.index()].intersects(set)
    };
    let set_consistent = |adj: &[StateSet], set: &StateSet| -> bool {
        set.is_disjoint(&always_false) && set.iter().all(|x| consistent_with(adj, set, x))
    };

    loop {
        let mut changed = false;
        for a in &task.actions {
            if !set_consistent(&adj, &a.pre) {
                continue;
            }
            // (i) both atoms added.
            let added: Vec<AtomId> = a.add.iter().collect();
            for (i, &p) in added.iter().enumerate() {
                for &q in &added[i + 1..] {
                    if adj[p.index()].contains(q) {
                        adj[p.index()].remove(q);
                        adj[q.index()].remove(p);
                        changed = true;
                    }
                }
            }
            // (ii)/(iii) one atom added, the other carried over: q survives
            // if the action does not delete it and pre ∪ {q} is consistent.
            for &p in &added {
                let partners: Vec<AtomId> = adj[p.index()].iter().collect();
                for q in partners {
                    if !a.del.contains(q) && consistent_with(&adj, &a.pre, q) {
                        adj[p.index()].remove(q);
                        adj[q.index()].remove(p);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut pairs = Vec::new();
    for p in 0..n as u32 {
        for q in adj[p as usize].iter() {
            if AtomId(p) < q {
                pairs.push((AtomId(p), q));
            }
        }
    }
    Ok(MutexSet {
        always_false,
        always_true,
        pairs,
    })
}

/// Synthesizes backward invariants: forward invariants of the dual task,
/// read back through complementation. A dual mutex `{p,q}` (never both
/// absent) becomes the clause `p ∨ q`; a dual always-false atom (never
/// absent) becomes a unary requirement.
pub fn backward_invariants(task: &Task) -> Result<BackwardClauseSet, NotNormalizedError> {
    let m = mutex_fixpoint(&dual_task(task)?)?;
    Ok(BackwardClauseSet {
        clauses: m.pairs,
        unary: m.always_false,
    })
}

/// True iff sub-goal `t` contains an always-false atom or both atoms of a
/// mutex pair; such a sub-goal is satisfiable by no reachable state.
pub fn violates_forward(t: &StateSet, m: &MutexSet) -> bool {
    if t.intersects(&m.always_false) {
        return true;
    }
    m.pairs.iter().any(|&(p, q)| t.contains(p) && t.contains(q))
}

/// True iff state `s` misses a unary requirement or falsifies a clause;
/// such a state cannot reach the goal.
pub fn violates_backward(s: &StateSet, c: &BackwardClauseSet) -> bool {
    if !c.unary.is_subset(s) {
        return true;
    }
    c.clauses
        .iter()
        .any(|&(p, q)| !s.contains(p) && !s.contains(q))
}
