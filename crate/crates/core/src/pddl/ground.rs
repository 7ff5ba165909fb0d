//! Instantiates a parsed domain/problem pair into a grounded task.
//!
//! The pipeline: check types, enumerate type-consistent instances of every
//! predicate that some effect can change, instantiate schemas over
//! type-consistent bindings, resolve rigid preconditions against the
//! initial state, optionally prune atoms and actions that are unreachable
//! under delete relaxation, and normalize.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::ast::{AtomAst, DomainAst, ProblemAst, TypedName};
use crate::atom::AtomTable;
use crate::state::StateSet;
use crate::task::{normalize_task, Action, Task, TaskError};

#[derive(Debug, Error)]
pub enum GroundError {
    #[error("problem is for domain '{referenced}', not '{domain}'")]
    DomainMismatch { domain: String, referenced: String },
    #[error("unknown type '{name}' in {context}")]
    UnknownType { name: String, context: String },
    #[error("type hierarchy has a cycle through '{0}'")]
    TypeCycle(String),
    #[error("unknown predicate '{name}' in {context}")]
    UnknownPredicate { name: String, context: String },
    #[error("unknown object '{name}' in {context}")]
    UnknownObject { name: String, context: String },
    #[error("predicate '{pred}' takes {expected} argument(s), got {found} in {context}")]
    ArityMismatch {
        pred: String,
        expected: usize,
        found: usize,
        context: String,
    },
    #[error("atom '{atom}' does not type-check in {context}")]
    IllTyped { atom: String, context: String },
    #[error(transparent)]
    Task(#[from] TaskError),
}

#[derive(Debug, Clone)]
pub struct GroundOptions {
    /// Drop atoms and actions that delete-relaxed reachability rules out.
    /// Goal atoms are always kept so unsolvability stays observable.
    pub reachability_prune: bool,
}

impl Default for GroundOptions {
    fn default() -> Self {
        GroundOptions {
            reachability_prune: true,
        }
    }
}

/// Type table with precomputed ancestor chains.
struct Types {
    ancestors: HashMap<String, HashSet<String>>,
}

impl Types {
    fn build(decls: &[TypedName]) -> Result<Types, GroundError> {
        let mut parent: HashMap<&str, &str> = HashMap::new();
        let mut known: HashSet<&str> = HashSet::new();
        known.insert("object");
        for d in decls {
            known.insert(&d.name);
            known.insert(&d.ty);
            if d.name != "object" {
                parent.insert(&d.name, &d.ty);
            }
        }
        let mut ancestors = HashMap::new();
        for &ty in &known {
            let mut chain = HashSet::new();
            chain.insert(ty.to_string());
            let mut cur = ty;
            while let Some(&up) = parent.get(cur) {
                if !chain.insert(up.to_string()) {
                    return Err(GroundError::TypeCycle(ty.to_string()));
                }
                cur = up;
            }
            chain.insert("object".to_string());
            ancestors.insert(ty.to_string(), chain);
        }
        Ok(Types { ancestors })
    }

    fn known(&self, ty: &str) -> bool {
        self.ancestors.contains_key(ty)
    }

    /// True when `sub` is `sup` or a descendant of it.
    fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        self.ancestors
            .get(sub)
            .is_some_and(|chain| chain.contains(sup))
    }
}

/// Renders `pred(a,b)`; zero-argument instances keep the bare name.
fn ground_name(head: &str, args: &[&str]) -> String {
    if args.is_empty() {
        head.to_string()
    } else {
        format!("{}({})", head, args.join(","))
    }
}

/// Iterates over all assignments of candidate objects to positions, last
/// position varying fastest.
struct Odometer<'a> {
    candidates: &'a [Vec<&'a str>],
    current: Vec<usize>,
    done: bool,
}

impl<'a> Odometer<'a> {
    fn new(candidates: &'a [Vec<&'a str>]) -> Odometer<'a> {
        let done = candidates.iter().any(Vec::is_empty);
        Odometer {
            candidates,
            current: vec![0; candidates.len()],
            done,
        }
    }
}

impl<'a> Iterator for Odometer<'a> {
    type Item = Vec<&'a str>;

    fn next(&mut self) -> Option<Vec<&'a str>> {
        if self.done {
            return None;
        }
        let binding: Vec<&str> = self
            .current
            .iter()
            .zip(self.candidates)
            .map(|(&i, c)| c[i])
            .collect();
        self.done = true;
        for pos in (0..self.current.len()).rev() {
            self.current[pos] += 1;
            if self.current[pos] < self.candidates[pos].len() {
                self.done = false;
                break;
            }
            self.current[pos] = 0;
        }
        Some(binding)
    }
}

pub fn ground(
    domain: &DomainAst,
    problem: &ProblemAst,
    opts: &GroundOptions,
) -> Result<Task, GroundError> {
    if problem.domain != domain.name {
        return Err(GroundError::DomainMismatch {
            domain: domain.name.clone(),
            referenced: problem.domain.clone(),
        });
    }
    let types = Types::build(&domain.types)?;
    let check_ty = |name: &str, context: String| -> Result<(), GroundError> {
        if types.known(name) {
            Ok(())
        } else {
            Err(GroundError::UnknownType {
                name: name.to_string(),
                context,
            })
        }
    };
    for p in &domain.predicates {
        for param in &p.params {
            check_ty(&param.ty, format!("predicate '{}'", p.name))?;
        }
    }
    for s in &domain.schemas {
        for param in &s.params {
            check_ty(&param.ty, format!("action '{}'", s.name))?;
        }
    }
    for o in &problem.objects {
        check_ty(&o.ty, format!("object '{}'", o.name))?;
    }

    let pred_params: HashMap<&str, &[TypedName]> = domain
        .predicates
        .iter()
        .map(|p| (p.name.as_str(), p.params.as_slice()))
        .collect();

    // A predicate is rigid when no effect ever touches it.
    let rigid: HashSet<&str> = domain
        .predicates
        .iter()
        .map(|p| p.name.as_str())
        .filter(|p| {
            domain
                .schemas
                .iter()
                .all(|s| s.add.iter().chain(&s.del).all(|a| a.pred != *p))
        })
        .collect();

    // Static type check of an atom whose arguments have known types.
    let check_atom = |atom: &AtomAst, arg_ty: &dyn Fn(&str) -> String, context: &str| {
        let params = pred_params.get(atom.pred.as_str()).copied().ok_or_else(|| {
            GroundError::UnknownPredicate {
                name: atom.pred.clone(),
                context: context.to_string(),
            }
        })?;
        if params.len() != atom.args.len() {
            return Err(GroundError::ArityMismatch {
                pred: atom.pred.clone(),
                expected: params.len(),
                found: atom.args.len(),
                context: context.to_string(),
            });
        }
        for (arg, param) in atom.args.iter().zip(params) {
            if !types.is_subtype(&arg_ty(arg), &param.ty) {
                let shown: Vec<&str> = atom.args.iter().map(String::as_str).collect();
                return Err(GroundError::IllTyped {
                    atom: ground_name(&atom.pred, &shown),
                    context: context.to_string(),
                });
            }
        }
        Ok(())
    };

    let object_ty: HashMap<&str, &str> = problem
        .objects
        .iter()
        .map(|o| (o.name.as_str(), o.ty.as_str()))
        .collect();
    let object_type_of = |name: &str| object_ty.get(name).copied().unwrap_or("").to_string();

    for atom in &problem.init {
        check_atom(atom, &object_type_of, "init")?;
    }
    for atom in &problem.goal {
        check_atom(atom, &object_type_of, "goal")?;
    }
    for schema in &domain.schemas {
        let var_ty: HashMap<&str, &str> = schema
            .params
            .iter()
            .map(|p| (p.name.as_str(), p.ty.as_str()))
            .collect();
        // An argument is either a declared parameter or a ground constant
        // naming a problem object.
        let term_type_of = |term: &str| match term.strip_prefix('?') {
            Some(var) => var_ty.get(var).copied().unwrap_or("").to_string(),
            None => object_type_of(term),
        };
        let context = format!("action '{}'", schema.name);
        for atom in schema.pre.iter().chain(&schema.add).chain(&schema.del) {
            for arg in &atom.args {
                if !arg.starts_with('?') && !object_ty.contains_key(arg.as_str()) {
                    return Err(GroundError::UnknownObject {
                        name: arg.clone(),
                        context: context.clone(),
                    });
                }
            }
            check_atom(atom, &term_type_of, &context)?;
        }
    }

    // The universe: every type-consistent instance of every non-rigid
    // predicate, in declaration-then-binding order.
    let candidates_for = |params: &[TypedName]| -> Vec<Vec<&str>> {
        params
            .iter()
            .map(|p| {
                problem
                    .objects
                    .iter()
                    .filter(|o| types.is_subtype(&o.ty, &p.ty))
                    .map(|o| o.name.as_str())
                    .collect()
            })
            .collect()
    };
    let mut atoms = AtomTable::new();
    let mut atom_index: HashMap<String, usize> = HashMap::new();
    for p in &domain.predicates {
        if rigid.contains(p.name.as_str()) {
            continue;
        }
        let cands = candidates_for(&p.params);
        for binding in Odometer::new(&cands) {
            let name = ground_name(&p.name, &binding);
            let id = atoms.intern(&name);
            atom_index.insert(name, id.index());
        }
    }

    let key_of = |atom: &AtomAst, subst: &dyn Fn(&str) -> String| -> String {
        let args: Vec<String> = atom.args.iter().map(|a| subst(a)).collect();
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        ground_name(&atom.pred, &refs)
    };
    let identity = |name: &str| name.to_string();

    let mut rigid_true: HashSet<String> = HashSet::new();
    let mut init: HashSet<usize> = HashSet::new();
    for atom in &problem.init {
        let key = key_of(atom, &identity);
        if rigid.contains(atom.pred.as_str()) {
            rigid_true.insert(key);
        } else {
            init.insert(atom_index[&key]);
        }
    }

    let mut goal: HashSet<usize> = HashSet::new();
    let mut goal_blocked = false;
    for atom in &problem.goal {
        let key = key_of(atom, &identity);
        if rigid.contains(atom.pred.as_str()) {
            // A rigid goal atom is either already satisfied forever or
            // unachievable; the latter makes the whole task unsolvable.
            if !rigid_true.contains(&key) {
                goal_blocked = true;
            }
        } else {
            goal.insert(atom_index[&key]);
        }
    }
    if goal_blocked {
        let mut marker = "goal-unreachable".to_string();
        let mut n = 1;
        while atom_index.contains_key(&marker) {
            n += 1;
            marker = format!("goal-unreachable-{n}");
        }
        let id = atoms.intern(&marker);
        atom_index.insert(marker, id.index());
        goal.insert(id.index());
    }

    struct GroundAction {
        name: String,
        pre: HashSet<usize>,
        add: HashSet<usize>,
        del: HashSet<usize>,
    }

    let mut actions: Vec<GroundAction> = Vec::new();
    for schema in &domain.schemas {
        let cands = candidates_for(&schema.params);
        'bindings: for binding in Odometer::new(&cands) {
            let subst_map: HashMap<&str, &str> = schema
                .params
                .iter()
                .map(|p| p.name.as_str())
                .zip(binding.iter().copied())
                .collect();
            let subst = |term: &str| match term.strip_prefix('?') {
                Some(var) => subst_map[var].to_string(),
                None => term.to_string(),
            };
            let mut pre = HashSet::new();
            for atom in &schema.pre {
                let key = key_of(atom, &subst);
                if rigid.contains(atom.pred.as_str()) {
                    if !rigid_true.contains(&key) {
                        continue 'bindings;
                    }
                } else {
                    pre.insert(atom_index[&key]);
                }
            }
            let resolve = |list: &[AtomAst]| -> HashSet<usize> {
                list.iter().map(|a| atom_index[&key_of(a, &subst)]).collect()
            };
            actions.push(GroundAction {
                name: ground_name(&schema.name, &binding),
                pre,
                add: resolve(&schema.add),
                del: resolve(&schema.del),
            });
        }
    }

    // Delete-relaxed reachability: grow the reachable set to a fixpoint,
    // then keep only reachable atoms (plus goal atoms) and applicable
    // actions. Pruned atoms can never hold, so dropping them from delete
    // sets changes nothing.
    let (kept_atoms, kept_actions): (Vec<usize>, Vec<usize>) = if opts.reachability_prune {
        let mut reachable = init.clone();
        let mut applied = vec![false; actions.len()];
        loop {
            let mut changed = false;
            for (i, a) in actions.iter().enumerate() {
                if !applied[i] && a.pre.iter().all(|x| reachable.contains(x)) {
                    applied[i] = true;
                    for &x in &a.add {
                        reachable.insert(x);
                    }
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let kept_atoms = (0..atoms.len())
            .filter(|x| reachable.contains(x) || goal.contains(x))
            .collect();
        let kept_actions = (0..actions.len()).filter(|&i| applied[i]).collect();
        (kept_atoms, kept_actions)
    } else {
        ((0..atoms.len()).collect(), (0..actions.len()).collect())
    };

    let mut final_atoms = AtomTable::new();
    let mut remap: HashMap<usize, usize> = HashMap::new();
    for &old in &kept_atoms {
        let id = final_atoms.intern(atoms.name(crate::atom::AtomId(old as u32)));
        remap.insert(old, id.index());
    }
    let width = final_atoms.len();
    let to_set = |old: &HashSet<usize>, drop_missing: bool| -> StateSet {
        let mut s = StateSet::empty(width);
        for x in old {
            match remap.get(x) {
                Some(&new) => s.insert(crate::atom::AtomId(new as u32)),
                None => assert!(drop_missing, "pruned atom survived in a kept set"),
            }
        }
        s
    };

    let final_actions: Vec<Action> = kept_actions
        .into_iter()
        .map(|i| {
            let a = &actions[i];
            Action::new(
                a.name.clone(),
                to_set(&a.pre, false),
                to_set(&a.add, false),
                to_set(&a.del, true),
            )
        })
        .collect();
    let task = Task::new(
        final_atoms,
        to_set(&init, false),
        to_set(&goal, false),
        final_actions,
    )?;
    Ok(normalize_task(&task))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::parse::{parse_domain, parse_problem};

    const LOGISTICS_DOMAIN: &str = "\
(define (domain micro-logistics)
  (:requirements :strips :typing)
  (:types truck location - object)
  (:predicates (at ?t - truck ?l - location)
               (road ?a - location ?b - location))
  (:action drive
    :parameters (?t - truck ?from - location ?to - location)
    :precondition (and (at ?t ?from) (road ?from ?to))
    :effect (and (at ?t ?to) (not (at ?t ?from)))))";

    const LOGISTICS_PROBLEM: &str = "\
(define (problem micro-logistics-1)
  (:domain micro-logistics)
  (:objects t1 - truck a b - location)
  (:init (at t1 a) (road a b))
  (:goal (at t1 b)))";

    fn ground_texts(domain: &str, problem: &str, opts: &GroundOptions) -> Task {
        let d = parse_domain(domain).unwrap();
        let p = parse_problem(problem).unwrap();
        ground(&d, &p, opts).unwrap()
    }

    #[test]
    fn rigid_atoms_leave_the_universe() {
        let task = ground_texts(LOGISTICS_DOMAIN, LOGISTICS_PROBLEM, &GroundOptions::default());
        let names: Vec<&str> = task.atoms.names().collect();
        assert_eq!(names, ["at(t1,a)", "at(t1,b)"]);
        assert!(task.is_normalized());
        // Only drives along the declared road survive.
        let action_names: Vec<&str> = task.actions.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(action_names, ["drive(t1,a,b)"]);
        assert_eq!(task.atom_names(&task.init), ["at(t1,a)"]);
        assert_eq!(task.atom_names(&task.goal), ["at(t1,b)"]);
    }

    #[test]
    fn binding_enumeration_counts() {
        // Two typed parameters over 3 + 2 objects give 6 bindings.
        let domain = "\
(define (domain pairs)
  (:requirements :strips :typing)
  (:types box slot - object)
  (:predicates (in ?b - box ?s - slot))
  (:action put
    :parameters (?b - box ?s - slot)
    :effect (in ?b ?s)))";
        let problem = "\
(define (problem pairs-1)
  (:domain pairs)
  (:objects b1 b2 b3 - box s1 s2 - slot)
  (:init)
  (:goal (in b1 s1)))";
        let opts = GroundOptions {
            reachability_prune: false,
        };
        let task = ground_texts(domain, problem, &opts);
        assert_eq!(task.actions.len(), 6);
        assert_eq!(task.width(), 6);
        let names: Vec<&str> = task.actions.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(
            names,
            [
                "put(b1,s1)",
                "put(b1,s2)",
                "put(b2,s1)",
                "put(b2,s2)",
                "put(b3,s1)",
                "put(b3,s2)",
            ]
        );
    }

    #[test]
    fn rigid_goal_atom_false_in_init_degenerates() {
        let problem = "\
(define (problem stuck)
  (:domain micro-logistics)
  (:objects t1 - truck a b - location)
  (:init (at t1 a) (road a b))
  (:goal (and (at t1 b) (road b a))))";
        let task = ground_texts(LOGISTICS_DOMAIN, problem, &GroundOptions::default());
        let marker = task.atoms.get("goal-unreachable").unwrap();
        assert!(task.goal.contains(marker));
        assert!(!task.init.contains(marker));
        assert!(task.actions.iter().all(|a| !a.add.contains(marker)));
    }

    #[test]
    fn rigid_goal_atom_true_in_init_is_dropped() {
        let problem = "\
(define (problem fine)
  (:domain micro-logistics)
  (:objects t1 - truck a b - location)
  (:init (at t1 a) (road a b))
  (:goal (and (at t1 b) (road a b))))";
        let task = ground_texts(LOGISTICS_DOMAIN, problem, &GroundOptions::default());
        assert_eq!(task.atom_names(&task.goal), ["at(t1,b)"]);
        assert!(task.atoms.get("goal-unreachable").is_none());
    }

    #[test]
    fn reachability_prune_keeps_unreachable_goal_atoms() {
        let problem = "\
(define (problem marooned)
  (:domain micro-logistics)
  (:objects t1 t2 - truck a b - location)
  (:init (at t1 a) (road a b))
  (:goal (at t2 b)))";
        let task = ground_texts(LOGISTICS_DOMAIN, problem, &GroundOptions::default());
        // t2 is nowhere, so nothing moves it; its goal atom must survive
        // pruning so the task reports unsolvable instead of losing the goal.
        assert!(task.atoms.get("at(t2,b)").is_some());
        assert!(task.atoms.get("at(t2,a)").is_none());
        assert!(!crate::oracle::solvable_bruteforce(&task).unwrap());
    }

    #[test]
    fn subtypes_extend_candidate_sets() {
        let domain = "\
(define (domain typed)
  (:requirements :strips :typing)
  (:types vehicle - object car - vehicle)
  (:predicates (parked ?v - vehicle))
  (:action park
    :parameters (?v - vehicle)
    :effect (parked ?v)))";
        let problem = "\
(define (problem typed-1)
  (:domain typed)
  (:objects v1 - vehicle c1 - car)
  (:init)
  (:goal (parked c1)))";
        let opts = GroundOptions {
            reachability_prune: false,
        };
        let task = ground_texts(domain, problem, &opts);
        let names: Vec<&str> = task.atoms.names().collect();
        assert_eq!(names, ["parked(v1)", "parked(c1)"]);
        assert_eq!(task.actions.len(), 2);
    }

    #[test]
    fn untyped_domains_use_the_object_root() {
        let domain = "\
(define (domain plain)
  (:requirements :strips)
  (:predicates (p ?x) (q ?x))
  (:action step
    :parameters (?x)
    :precondition (p ?x)
    :effect (and (q ?x) (not (p ?x)))))";
        let problem = "\
(define (problem plain-1)
  (:domain plain)
  (:objects o1 o2)
  (:init (p o1))
  (:goal (q o1)))";
        let task = ground_texts(domain, problem, &GroundOptions::default());
        assert_eq!(task.atom_names(&task.init), ["p(o1)"]);
        assert_eq!(task.atom_names(&task.goal), ["q(o1)"]);
        assert_eq!(task.actions.len(), 1);
    }

    #[test]
    fn ill_typed_goal_is_rejected() {
        let problem = "\
(define (problem bad)
  (:domain micro-logistics)
  (:objects t1 - truck a b - location)
  (:init (at t1 a) (road a b))
  (:goal (at a t1)))";
        let d = parse_domain(LOGISTICS_DOMAIN).unwrap();
        let p = parse_problem(problem).unwrap();
        let e = ground(&d, &p, &GroundOptions::default()).unwrap_err();
        assert!(matches!(e, GroundError::IllTyped { .. }), "{e}");
    }

    #[test]
    fn type_cycles_are_rejected() {
        let domain = "\
(define (domain loopy)
  (:requirements :strips :typing)
  (:types a - b b - a)
  (:predicates (p ?x - a))
  (:action go :parameters (?x - a) :effect (p ?x)))";
        let d = parse_domain(domain).unwrap();
        let p = parse_problem(
            "(define (problem x) (:domain loopy) (:objects o - a) (:init) (:goal (p o)))",
        )
        .unwrap();
        let e = ground(&d, &p, &GroundOptions::default()).unwrap_err();
        assert!(matches!(e, GroundError::TypeCycle(_)), "{e}");
    }

    #[test]
    fn pruning_preserves_solvability() {
        let marooned = "\
(define (problem marooned)
  (:domain micro-logistics)
  (:objects t1 t2 - truck a b - location)
  (:init (at t1 a) (road a b))
  (:goal (at t2 b)))";
        for problem in [LOGISTICS_PROBLEM, marooned] {
            let with = ground_texts(LOGISTICS_DOMAIN, problem, &GroundOptions::default());
            let without = ground_texts(
                LOGISTICS_DOMAIN,
                problem,
                &GroundOptions {
                    reachability_prune: false,
                },
            );
            assert!(with.width() <= without.width());
            assert_eq!(
                crate::oracle::solvable_bruteforce(&with).unwrap(),
                crate::oracle::solvable_bruteforce(&without).unwrap()
            );
        }
    }
}
