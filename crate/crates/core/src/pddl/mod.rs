//! PDDL front end for the STRIPS subset: parse, ground, and write back.
//!
//! Grounded tasks can be re-emitted as PDDL so external planners can
//! consume them, including dualized tasks. The writer encodes each atom as
//! an object under a single unary predicate, which keeps re-ingesting the
//! output an exact inverse: as long as one action has an effect the
//! predicate is non-rigid, so no atom is analyzed away.

mod ast;
mod ground;
mod parse;

pub use ast::{AtomAst, DomainAst, PredicateDecl, ProblemAst, SchemaAst, TypedName};
pub use ground::{ground, GroundError, GroundOptions};
pub use parse::{parse_domain, parse_problem, ParseError};

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::state::StateSet;
use crate::task::Task;

/// Maps an atom or action name to a PDDL-safe identifier, appending a
/// numeric suffix on collision.
fn sanitize(raw: &str, used: &mut HashSet<String>) -> String {
    let mut base = String::new();
    for c in raw.chars() {
        match c {
            'a'..='z' | '0'..='9' | '_' | '-' => base.push(c),
            'A'..='Z' => base.push(c.to_ascii_lowercase()),
            '(' | ',' => base.push('-'),
            ')' => {}
            _ => base.push('-'),
        }
    }
    if !base.starts_with(|c: char| c.is_ascii_lowercase()) {
        base.insert(0, 'x');
    }
    let mut name = base.clone();
    let mut n = 1;
    while !used.insert(name.clone()) {
        n += 1;
        name = format!("{base}-{n}");
    }
    name
}

/// Writes a grounded task as a domain/problem pair in the STRIPS subset.
///
/// Every atom becomes an object, every action a parameterless schema over
/// the single predicate `holds`. Parsing and grounding the output (with
/// reachability pruning disabled) reproduces the task up to renaming,
/// except for the degenerate case of a task whose actions all have empty
/// effects, where `holds` itself becomes rigid.
pub fn write_pddl(task: &Task) -> (String, String) {
    let mut used = HashSet::new();
    let objects: Vec<String> = task
        .atoms
        .names()
        .map(|n| sanitize(n, &mut used))
        .collect();
    let mut used = HashSet::new();
    let action_names: Vec<String> = task
        .actions
        .iter()
        .map(|a| sanitize(&a.name, &mut used))
        .collect();

    let literals = |s: &StateSet, negate: bool| -> String {
        s.iter()
            .map(|id| {
                if negate {
                    format!(" (not (holds {}))", objects[id.index()])
                } else {
                    format!(" (holds {})", objects[id.index()])
                }
            })
            .collect()
    };

    let mut domain = String::new();
    let _ = writeln!(domain, "(define (domain grounded)");
    let _ = writeln!(domain, "  (:requirements :strips)");
    let _ = writeln!(domain, "  (:predicates (holds ?x))");
    for (action, name) in task.actions.iter().zip(&action_names) {
        let _ = writeln!(domain, "  (:action {name}");
        let _ = writeln!(domain, "    :parameters ()");
        let _ = writeln!(domain, "    :precondition (and{})", literals(&action.pre, false));
        let _ = writeln!(
            domain,
            "    :effect (and{}{}))",
            literals(&action.add, false),
            literals(&action.del, true)
        );
    }
    let _ = writeln!(domain, ")");

    let mut problem = String::new();
    let _ = writeln!(problem, "(define (problem grounded-instance)");
    let _ = writeln!(problem, "  (:domain grounded)");
    let _ = writeln!(problem, "  (:objects{})", {
        let mut s = String::new();
        for o in &objects {
            s.push(' ');
            s.push_str(o);
        }
        s
    });
    let _ = writeln!(problem, "  (:init{})", literals(&task.init, false));
    let _ = writeln!(problem, "  (:goal (and{}))", literals(&task.goal, false));
    let _ = writeln!(problem, ")");
    (domain, problem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::tiny_task;

    fn reingest(task: &Task) -> Task {
        let (dom, prob) = write_pddl(task);
        let d = parse_domain(&dom).unwrap();
        let p = parse_problem(&prob).unwrap();
        ground(
            &d,
            &p,
            &GroundOptions {
                reachability_prune: false,
            },
        )
        .unwrap()
    }

    #[test]
    fn roundtrip_reproduces_structure() {
        let t1 = tiny_task(&["p", "q"], &["p"], &["q"], &[("a1", &["p"], &["q"], &["p"])]);
        let (dom, _) = write_pddl(&t1);
        assert_eq!(dom.matches(":action").count(), 1);
        assert!(dom.contains(":parameters ()"));
        let back = reingest(&t1);
        let names: Vec<&str> = back.atoms.names().collect();
        assert_eq!(names, ["holds(p)", "holds(q)"]);
        assert_eq!(back.atom_names(&back.init), ["holds(p)"]);
        assert_eq!(back.atom_names(&back.goal), ["holds(q)"]);
        assert_eq!(back.actions.len(), 1);
        let a = &back.actions[0];
        assert_eq!(a.name, "a1");
        assert_eq!(back.atom_names(&a.pre), ["holds(p)"]);
        assert_eq!(back.atom_names(&a.add), ["holds(q)"]);
        assert_eq!(back.atom_names(&a.del), ["holds(p)"]);
    }

    #[test]
    fn dual_problem_inits_with_goal_complement() {
        let t2 = tiny_task(
            &["p", "q", "r"],
            &["p"],
            &["r"],
            &[("a1", &["p"], &["q"], &[]), ("a2", &["q"], &["r"], &[])],
        );
        let dual = crate::dual::dual_task(&t2).unwrap();
        let (_, prob) = write_pddl(&dual);
        assert!(prob.contains("(:init (holds p) (holds q))"), "{prob}");
        let back = reingest(&dual);
        assert_eq!(back.atom_names(&back.init), ["holds(p)", "holds(q)"]);
    }

    #[test]
    fn empty_goal_is_an_empty_conjunction() {
        let t = tiny_task(&["p"], &["p"], &[], &[("a", &[], &[], &["p"])]);
        let (_, prob) = write_pddl(&t);
        assert!(prob.contains("(:goal (and))"), "{prob}");
        let back = reingest(&t);
        assert!(back.goal.is_empty());
        assert_eq!(back.width(), 1);
    }

    #[test]
    fn name_collisions_pick_up_suffixes() {
        let t = tiny_task(
            &["on(a,b)", "on-a-b", "on-a", "on(a)"],
            &[],
            &[],
            &[("go", &[], &["on(a,b)"], &["on-a"])],
        );
        let (_, prob) = write_pddl(&t);
        assert!(prob.contains("(:objects on-a-b on-a-b-2 on-a on-a-2)"), "{prob}");
        let back = reingest(&t);
        assert_eq!(back.width(), 4);
        assert_eq!(back.atom_names(&back.actions[0].add), ["holds(on-a-b)"]);
        assert_eq!(back.atom_names(&back.actions[0].del), ["holds(on-a)"]);
    }

    #[test]
    fn action_order_survives_the_roundtrip() {
        let t = tiny_task(
            &["p", "q", "r"],
            &["p"],
            &["r"],
            &[
                ("z-last", &["q"], &["r"], &[]),
                ("a-first", &["p"], &["q"], &[]),
            ],
        );
        let back = reingest(&t);
        let names: Vec<&str> = back.actions.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, ["z-last", "a-first"]);
        let out = crate::search::solve(
            &back,
            crate::search::Direction::Forward,
            &crate::search::SearchConfig::default(),
        )
        .unwrap();
        assert!(out.plan.is_some());
    }
}
