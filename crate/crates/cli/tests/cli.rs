//! Black-box tests of the `dualplan` binary: subcommand output, exit codes,
//! and the stdin/stdout conventions.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

const T1: &str = "gtf 1\natoms: 2\np\nq\ninit: p\ngoal: q\nactions: 1\naction a1\npre: p\nadd: q\ndel: p\nflags: normalized\n";

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn dualplan(args: &[&str], stdin: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dualplan"));
    cmd.args(args)
        .stdin(if stdin.is_some() {
            Stdio::piped()
        } else {
            Stdio::null()
        })
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    let mut child = cmd.spawn().expect("binary runs");
    if let Some(text) = stdin {
        child
            .stdin
            .take()
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
    }
    let out = child.wait_with_output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write_t1(dir: &Path) -> PathBuf {
    let path = dir.join("t1.gtf");
    std::fs::write(&path, T1).unwrap();
    path
}

fn logistics() -> (String, String) {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../domains/micro-logistics");
    (
        dir.join("domain.pddl").to_str().unwrap().to_string(),
        dir.join("problem.pddl").to_str().unwrap().to_string(),
    )
}

#[test]
fn solve_finds_the_one_step_plan() {
    let tmp = tempfile::tempdir().unwrap();
    let t1 = write_t1(tmp.path());
    let run = dualplan(
        &[
            "solve",
            t1.to_str().unwrap(),
            "--direction",
            "forward",
            "--strategy",
            "bfs",
        ],
        None,
    );
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    assert!(run.stdout.contains("verdict=plan-found"));
    assert!(run.stdout.contains("expanded=2"));
    assert!(run.stdout.contains("plan-length=1"));
    assert!(run.stdout.lines().any(|l| l == "(a1)"));
}

#[test]
fn solve_reads_stdin_with_dash() {
    let run = dualplan(&["solve", "-", "--strategy", "bfs"], Some(T1));
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    assert!(run.stdout.contains("verdict=plan-found"));
}

#[test]
fn dualize_twice_is_the_identity_at_the_tool_level() {
    let once = dualplan(&["dualize", "-"], Some(T1));
    assert_eq!(once.code, 0);
    let twice = dualplan(&["dualize", "-"], Some(&once.stdout));
    assert_eq!(twice.code, 0);
    assert_eq!(twice.stdout, T1);
}

#[test]
fn dual_of_a_solvable_task_solves() {
    let dual = dualplan(&["dualize", "-"], Some(T1));
    let run = dualplan(&["solve", "-"], Some(&dual.stdout));
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    assert!(run.stdout.contains("verdict=plan-found"));
}

#[test]
fn ground_pipes_into_solve_with_and_without_double_dualize() {
    let (domain, problem) = logistics();
    let grounded = dualplan(&["ground", "-d", &domain, "-p", &problem], None);
    assert_eq!(grounded.code, 0, "stderr: {}", grounded.stderr);

    let direct = dualplan(&["solve", "-", "--strategy", "bfs"], Some(&grounded.stdout));
    let once = dualplan(&["dualize", "-"], Some(&grounded.stdout));
    let twice = dualplan(&["dualize", "-"], Some(&once.stdout));
    let roundabout = dualplan(&["solve", "-", "--strategy", "bfs"], Some(&twice.stdout));

    assert_eq!(direct.code, 0);
    let plan_of = |run: &Run| {
        run.stdout
            .lines()
            .filter(|l| l.starts_with('('))
            .map(str::to_string)
            .collect::<Vec<_>>()
    };
    assert_eq!(plan_of(&direct), plan_of(&roundabout));
}

#[test]
fn ground_reports_task_size_when_writing_to_a_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("task.gtf");
    let (domain, problem) = logistics();
    let run = dualplan(
        &["ground", "-d", &domain, "-p", &problem, "-o", out.to_str().unwrap()],
        None,
    );
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    assert!(run.stdout.contains("atoms=5"));
    assert!(run.stdout.contains("actions=6"));
    assert!(out.exists());
}

#[test]
fn invariants_print_one_fact_per_line() {
    let forward = dualplan(&["invariants", "-"], Some(T1));
    assert_eq!(forward.code, 0);
    assert_eq!(forward.stdout, "mutex p q\n");

    let backward = dualplan(&["invariants", "-", "--direction", "backward"], Some(T1));
    assert_eq!(backward.code, 0);
    assert_eq!(backward.stdout, "clause p q\n");
}

#[test]
fn validate_distinguishes_good_and_bad_plans() {
    let tmp = tempfile::tempdir().unwrap();
    let t1 = write_t1(tmp.path());
    let good = tmp.path().join("good.plan");
    std::fs::write(&good, "(a1)\n").unwrap();
    let run = dualplan(
        &["validate", t1.to_str().unwrap(), good.to_str().unwrap()],
        None,
    );
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    assert!(run.stdout.contains("valid=true"));

    let bad = tmp.path().join("bad.plan");
    std::fs::write(&bad, "(a1)\n(a1)\n").unwrap();
    let run = dualplan(
        &["validate", t1.to_str().unwrap(), bad.to_str().unwrap()],
        None,
    );
    assert_eq!(run.code, 1);
    assert!(run.stdout.contains("valid=false"));
}

#[test]
fn check_reports_full_agreement() {
    let run = dualplan(
        &[
            "check", "--random", "100", "--atoms", "6", "--actions", "6", "--seed", "1",
        ],
        None,
    );
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    assert!(run.stdout.contains("duality: 100/100 agree"));
    assert!(run.stdout.contains("pruning: 100/100 agree"));
}

#[test]
fn resource_limits_exit_with_code_two() {
    let run = dualplan(&["solve", "-", "--node-limit", "1"], Some(T1));
    assert_eq!(run.code, 2);
    assert!(run.stdout.contains("verdict=node-limit"));
}

#[test]
fn input_errors_exit_with_code_three() {
    let missing = dualplan(&["solve", "/nonexistent/task.gtf"], None);
    assert_eq!(missing.code, 3);

    let bad_flag = dualplan(&["solve", "-", "--strategy", "dfs"], Some(T1));
    assert_eq!(bad_flag.code, 3);

    let wrong_direction = dualplan(
        &["solve", "-", "--direction", "backward", "--prune", "useful"],
        Some(T1),
    );
    assert_eq!(wrong_direction.code, 3);
    assert!(wrong_direction.stderr.contains("useful"));
}

#[test]
fn help_and_version_exit_cleanly() {
    assert_eq!(dualplan(&["--help"], None).code, 0);
    assert_eq!(dualplan(&["--version"], None).code, 0);
    assert_eq!(dualplan(&["frobnicate"], None).code, 3);
}
