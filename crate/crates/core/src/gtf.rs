//! The ground-task format: a line-oriented, diffable task serialization.
//!
//! ```text
//! gtf 1
//! atoms: 2
//! p
//! q
//! init: p
//! goal: q
//! actions: 1
//! action a1
//! pre: p
//! add: q
//! del: p
//! flags: normalized
//! ```
//!
//! Atom and action sets are written in universe order, so writing is
//! canonical and `read_gtf(write_gtf(t)) == t`, atom and action order
//! included. The `normalized` flag is recomputed on read and must agree;
//! `dualized` is carried through as stated.

use std::fmt::Write as _;

use thiserror::Error;

use crate::atom::AtomTable;
use crate::state::StateSet;
use crate::task::{Action, Task, TaskError};

#[derive(Debug, Error)]
pub enum GtfError {
    #[error("unsupported format version '{0}'")]
    Version(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown atom '{name}'")]
    UnknownAtom { line: usize, name: String },
    #[error("duplicate atom name '{0}'")]
    DuplicateAtom(String),
    #[error(transparent)]
    Task(#[from] TaskError),
}

fn valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| {
            c.is_ascii_lowercase()
                || c.is_ascii_digit()
                || matches!(c, '_' | '(' | ')' | '-' | ',')
        })
}

fn set_line(out: &mut String, key: &str, set: &StateSet, atoms: &AtomTable) {
    out.push_str(key);
    out.push(':');
    for id in set.iter() {
        out.push(' ');
        out.push_str(atoms.name(id));
    }
    out.push('\n');
}

pub fn write_gtf(task: &Task) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "gtf 1");
    let _ = writeln!(out, "atoms: {}", task.width());
    for name in task.atoms.names() {
        let _ = writeln!(out, "{name}");
    }
    set_line(&mut out, "init", &task.init, &task.atoms);
    set_line(&mut out, "goal", &task.goal, &task.atoms);
    let _ = writeln!(out, "actions: {}", task.actions.len());
    for action in &task.actions {
        let _ = writeln!(out, "action {}", action.name);
        set_line(&mut out, "pre", &action.pre, &task.atoms);
        set_line(&mut out, "add", &action.add, &task.atoms);
        set_line(&mut out, "del", &action.del, &task.atoms);
    }
    let mut flags = Vec::new();
    if task.is_normalized() {
        flags.push("normalized");
    }
    if task.dualized {
        flags.push("dualized");
    }
    if !flags.is_empty() {
        let _ = writeln!(out, "flags: {}", flags.join(" "));
    }
    out
}

/// Line cursor over the non-blank lines of the input, remembering
/// 1-based positions for diagnostics.
struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    at: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Lines<'a> {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end()))
            .filter(|(_, l)| !l.trim().is_empty())
            .collect();
        Lines { lines, at: 0 }
    }

    fn next(&mut self, expect: &str) -> Result<(usize, &'a str), GtfError> {
        match self.lines.get(self.at) {
            Some(&(n, l)) => {
                self.at += 1;
                Ok((n, l))
            }
            None => Err(GtfError::Syntax {
                line: self.lines.last().map(|&(n, _)| n + 1).unwrap_or(1),
                msg: format!("unexpected end of file, expected {expect}"),
            }),
        }
    }

    fn done(&self) -> Option<(usize, &'a str)> {
        self.lines.get(self.at).copied()
    }
}

fn keyed_line<'a>(lines: &mut Lines<'a>, key: &str) -> Result<(usize, &'a str), GtfError> {
    let (n, line) = lines.next(&format!("'{key}:'"))?;
    match line.strip_prefix(key).and_then(|r| r.strip_prefix(':')) {
        Some(rest) => Ok((n, rest)),
        None => Err(GtfError::Syntax {
            line: n,
            msg: format!("expected '{key}:', found '{line}'"),
        }),
    }
}

fn count_line(lines: &mut Lines, key: &str) -> Result<usize, GtfError> {
    let (n, rest) = keyed_line(lines, key)?;
    rest.trim().parse().map_err(|_| GtfError::Syntax {
        line: n,
        msg: format!("expected a count after '{key}:'"),
    })
}

fn parse_set(line: usize, rest: &str, atoms: &AtomTable) -> Result<StateSet, GtfError> {
    let mut set = StateSet::empty(atoms.len());
    for name in rest.split_whitespace() {
        match atoms.get(name) {
            Some(id) => set.insert(id),
            None => {
                return Err(GtfError::UnknownAtom {
                    line,
                    name: name.to_string(),
                })
            }
        }
    }
    Ok(set)
}

pub fn read_gtf(text: &str) -> Result<Task, GtfError> {
    let mut lines = Lines::new(text);
    let (n, header) = lines.next("'gtf 1' header")?;
    match header.strip_prefix("gtf ") {
        Some("1") => {}
        Some(other) => return Err(GtfError::Version(other.trim().to_string())),
        None => {
            return Err(GtfError::Syntax {
                line: n,
                msg: format!("expected 'gtf 1' header, found '{header}'"),
            })
        }
    }
    let n_atoms = count_line(&mut lines, "atoms")?;
    let mut atoms = AtomTable::new();
    for _ in 0..n_atoms {
        let (n, name) = lines.next("an atom name")?;
        let name = name.trim();
        if !valid_name(name) {
            return Err(GtfError::Syntax {
                line: n,
                msg: format!("invalid atom name '{name}'"),
            });
        }
        if atoms.get(name).is_some() {
            return Err(GtfError::DuplicateAtom(name.to_string()));
        }
        atoms.intern(name);
    }
    let (n, rest) = keyed_line(&mut lines, "init")?;
    let init = parse_set(n, rest, &atoms)?;
    let (n, rest) = keyed_line(&mut lines, "goal")?;
    let goal = parse_set(n, rest, &atoms)?;
    let n_actions = count_line(&mut lines, "actions")?;
    let mut actions = Vec::with_capacity(n_actions);
    for _ in 0..n_actions {
        let (n, line) = lines.next("'action <name>'")?;
        let name = match line.strip_prefix("action ") {
            Some(name) if valid_name(name.trim()) => name.trim().to_string(),
            _ => {
                return Err(GtfError::Syntax {
                    line: n,
                    msg: format!("expected 'action <name>', found '{line}'"),
                })
            }
        };
        let (n, rest) = keyed_line(&mut lines, "pre")?;
        let pre = parse_set(n, rest, &atoms)?;
        let (n, rest) = keyed_line(&mut lines, "add")?;
        let add = parse_set(n, rest, &atoms)?;
        let (n, rest) = keyed_line(&mut lines, "del")?;
        let del = parse_set(n, rest, &atoms)?;
        actions.push(Action::new(name, pre, add, del));
    }
    let mut dualized = false;
    let mut claimed_normalized = false;
    if let Some((n, line)) = lines.done() {
        let rest = line.strip_prefix("flags:").ok_or_else(|| GtfError::Syntax {
            line: n,
            msg: format!("unexpected trailing line '{line}'"),
        })?;
        for flag in rest.split_whitespace() {
            match flag {
                "normalized" => claimed_normalized = true,
                "dualized" => dualized = true,
                other => {
                    return Err(GtfError::Syntax {
                        line: n,
                        msg: format!("unknown flag '{other}'"),
                    })
                }
            }
        }
        if let Some((n, line)) = lines.lines.get(lines.at + 1).copied() {
            return Err(GtfError::Syntax {
                line: n,
                msg: format!("unexpected trailing line '{line}'"),
            });
        }
        if claimed_normalized && !actions.iter().all(Action::is_normalized) {
            let offender = actions.iter().find(|a| !a.is_normalized()).unwrap();
            return Err(GtfError::Syntax {
                line: n,
                msg: format!(
                    "flagged normalized, but action '{}' is not in normal form",
                    offender.name
                ),
            });
        }
    }
    let mut task = Task::new(atoms, init, goal, actions)?;
    task.dualized = dualized;
    Ok(task)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::dual_task;
    use crate::testutil::tiny_task;

    fn t1() -> Task {
        tiny_task(&["p", "q"], &["p"], &["q"], &[("a1", &["p"], &["q"], &["p"])])
    }

    #[test]
    fn roundtrip_is_exact() {
        let task = t1();
        let text = write_gtf(&task);
        assert_eq!(
            text,
            "gtf 1\natoms: 2\np\nq\ninit: p\ngoal: q\nactions: 1\n\
             action a1\npre: p\nadd: q\ndel: p\nflags: normalized\n"
        );
        let back = read_gtf(&text).unwrap();
        assert_eq!(back, task);
        assert_eq!(write_gtf(&back), text);
    }

    #[test]
    fn dualized_flag_roundtrips() {
        let dual = dual_task(&t1()).unwrap();
        let text = write_gtf(&dual);
        assert!(text.ends_with("flags: normalized dualized\n"));
        let back = read_gtf(&text).unwrap();
        assert!(back.dualized);
        assert_eq!(back, dual);
    }

    #[test]
    fn empty_action_list_roundtrips() {
        let task = tiny_task(&["p"], &["p"], &[], &[]);
        let back = read_gtf(&write_gtf(&task)).unwrap();
        assert_eq!(back, task);
    }

    #[test]
    fn unnormalized_tasks_roundtrip_without_the_flag() {
        let task = tiny_task(&["p", "q"], &[], &[], &[("a", &[], &["p", "q"], &["q"])]);
        let text = write_gtf(&task);
        assert!(!text.contains("flags:"));
        assert_eq!(read_gtf(&text).unwrap(), task);
    }

    #[test]
    fn unknown_goal_atom_is_an_error() {
        let text = "gtf 1\natoms: 1\np\ninit:\ngoal: q\nactions: 0\n";
        match read_gtf(text).unwrap_err() {
            GtfError::UnknownAtom { line, name } => {
                assert_eq!(line, 5);
                assert_eq!(name, "q");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn version_mismatch_is_an_error() {
        let text = "gtf 2\natoms: 0\ninit:\ngoal:\nactions: 0\n";
        assert!(matches!(read_gtf(text).unwrap_err(), GtfError::Version(v) if v == "2"));
    }

    #[test]
    fn duplicate_atom_is_an_error() {
        let text = "gtf 1\natoms: 2\np\np\ninit:\ngoal:\nactions: 0\n";
        assert!(matches!(
            read_gtf(text).unwrap_err(),
            GtfError::DuplicateAtom(name) if name == "p"
        ));
    }

    #[test]
    fn lying_normalized_flag_is_an_error() {
        let text = "gtf 1\natoms: 2\np\nq\ninit:\ngoal:\nactions: 1\n\
                    action a\npre: p\nadd: p q\ndel:\nflags: normalized\n";
        let e = read_gtf(text).unwrap_err();
        assert!(e.to_string().contains("action 'a' is not in normal form"), "{e}");
    }

    #[test]
    fn truncation_is_an_error() {
        let text = "gtf 1\natoms: 2\np\n";
        let e = read_gtf(text).unwrap_err();
        assert!(e.to_string().contains("unexpected end of file"), "{e}");
    }

    #[test]
    fn blank_lines_are_ignored() {
        let text = "gtf 1\n\natoms: 1\np\n\ninit: p\ngoal:\n\nactions: 0\n";
        let task = read_gtf(text).unwrap();
        assert_eq!(task.width(), 1);
        assert_eq!(task.atom_names(&task.init), ["p"]);
    }
}
