//! Plan files: one action name per line, IPC style.

use std::fmt::Write as _;

use thiserror::Error;

use crate::task::Plan;

#[derive(Debug, Error)]
#[error("line {line}: {msg}")]
pub struct PlanFileError {
    pub line: usize,
    pub msg: String,
}

/// Writes one `(name)` step per line.
pub fn write_plan(plan: &Plan) -> String {
    let mut out = String::new();
    for step in &plan.steps {
        let _ = writeln!(out, "({step})");
    }
    out
}

/// Reads steps written as `name` or `(name)`. Blank lines and lines
/// starting with `;` are ignored.
pub fn read_plan(text: &str) -> Result<Plan, PlanFileError> {
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }
        let step = line
            .strip_prefix('(')
            .map(|rest| {
                rest.strip_suffix(')').ok_or(PlanFileError {
                    line: i + 1,
                    msg: format!("unclosed '(' in step '{line}'"),
                })
            })
            .transpose()?
            .unwrap_or(line);
        let step = step.trim();
        if step.is_empty() {
            return Err(PlanFileError {
                line: i + 1,
                msg: "empty step".to_string(),
            });
        }
        if step.chars().any(char::is_whitespace) {
            return Err(PlanFileError {
                line: i + 1,
                msg: format!("step '{step}' contains whitespace"),
            });
        }
        steps.push(step.to_string());
    }
    Ok(Plan::new(steps))
}
