//! Command-line front end for the grounded planning toolkit.
//!
//! Exit codes: 0 plan found / plan valid / all checks agree, 1 proven
//! unsolvable / plan invalid / counterexample found, 2 resource limit hit,
//! 3 bad input or configuration.

use std::fs;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use dualplan::invariants::{backward_invariants, mutex_fixpoint};
use dualplan::oracle::{random_task, solvable_bruteforce, RandomTaskConfig};
use dualplan::pddl::GroundOptions;
use dualplan::search::{PrunerSet, SearchConfig};
use dualplan::{
    dual_task, normalize_task, parse_domain, parse_problem, read_gtf, read_plan, solve,
    validate_plan, write_gtf, write_pddl, write_plan, Direction, Heuristic, Strategy, Task,
    Verdict,
};

const EXIT_NEGATIVE: u8 = 1;
const EXIT_LIMIT: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "dualplan",
    version,
    about = "Ground, dualize, solve and check STRIPS planning tasks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ground a PDDL domain/problem pair into a task file
    Ground {
        /// Domain file (PDDL, STRIPS subset)
        #[arg(short = 'd', long)]
        domain: PathBuf,
        /// Problem file (PDDL, STRIPS subset)
        #[arg(short = 'p', long)]
        problem: PathBuf,
        /// Output task file; stdout when omitted or '-'
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        /// Keep atoms and actions that delete-relaxed reachability rules out
        #[arg(long)]
        no_reachability_prune: bool,
    },
    /// Write the dual of a task: complemented initial state and goal,
    /// preconditions and delete lists swapped
    Dualize {
        /// Task file; stdin when '-'
        task: PathBuf,
        /// Output task file; stdout when omitted or '-'
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        /// Also write the dual as domain.pddl/problem.pddl into this directory
        #[arg(long, value_name = "DIR")]
        emit_pddl: Option<PathBuf>,
    },
    /// Search for a plan
    Solve {
        /// Task file; stdin when '-'
        task: PathBuf,
        /// Search from the initial state (forward) or from the goal (backward)
        #[arg(long, default_value = "forward")]
        direction: Direction,
        #[arg(long, default_value = "gbfs")]
        strategy: Strategy,
        /// Heuristic for gbfs: goal-count, hadd, hmax or relaxed-plan
        /// (default relaxed-plan forward, goal-count backward)
        #[arg(long)]
        heuristic: Option<Heuristic>,
        /// Comma-separated pruners: useful, relevant, invariants, or 'none'
        /// (default useful,invariants forward; relevant,invariants backward)
        #[arg(long)]
        prune: Option<PrunerSet>,
        /// Give up after this many seconds
        #[arg(long, value_name = "S")]
        time_limit: Option<f64>,
        /// Give up after this many expansions
        #[arg(long, value_name = "N")]
        node_limit: Option<u64>,
        /// Plan output file; printed after the stats when omitted
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Check a plan against a task
    Validate {
        /// Task file; stdin when '-'
        task: PathBuf,
        /// Plan file, one step per line
        plan: PathBuf,
    },
    /// Print state invariants of a task
    Invariants {
        /// Task file; stdin when '-'
        task: PathBuf,
        /// forward: facts holding in every reachable state;
        /// backward: clauses holding in every goal-reaching state
        #[arg(long, default_value = "forward")]
        direction: Direction,
    },
    /// Cross-check search and dualization against brute-force oracles on
    /// seeded random tasks
    Check {
        /// Number of random tasks per suite
        #[arg(long, default_value_t = 100)]
        random: usize,
        /// Universe size of each task (at most 20)
        #[arg(long, default_value_t = 6)]
        atoms: usize,
        /// Number of actions in each task
        #[arg(long, default_value_t = 6)]
        actions: usize,
        /// Seed of the first task; task i uses seed + i
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Suite {
    /// A task and its dual agree on solvability, and dualizing twice is
    /// the identity
    Duality,
    /// Pruned searches keep the oracle verdict and never expand more nodes
    Pruning,
    All,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_INPUT)
            };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn read_input(path: &Path) -> Result<String, String> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| format!("cannot read stdin: {e}"))?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) if p == Path::new("-") => {
            print!("{text}");
            Ok(())
        }
        Some(p) => fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
    }
}

fn load_task(path: &Path) -> Result<Task, String> {
    read_gtf(&read_input(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(command: Command) -> Result<u8, String> {
    match command {
        Command::Ground {
            domain,
            problem,
            output,
            no_reachability_prune,
        } => {
            let dom = parse_domain(&read_input(&domain)?)
                .map_err(|e| format!("{}:{e}", domain.display()))?;
            let prob = parse_problem(&read_input(&problem)?)
                .map_err(|e| format!("{}:{e}", problem.display()))?;
            let opts = GroundOptions {
                reachability_prune: !no_reachability_prune,
            };
            let task = dualplan::ground(&dom, &prob, &opts).map_err(|e| e.to_string())?;
            write_output(output.as_deref(), &write_gtf(&task))?;
            if output.is_some() {
                println!("atoms={}", task.width());
                println!("actions={}", task.actions.len());
            }
            Ok(0)
        }
        Command::Dualize {
            task,
            output,
            emit_pddl,
        } => {
            let primal = normalize_task(&load_task(&task)?);
            let dual = dual_task(&primal).expect("normalized above");
            write_output(output.as_deref(), &write_gtf(&dual))?;
            if let Some(dir) = emit_pddl {
                fs::create_dir_all(&dir)
                    .map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
                let (domain_text, problem_text) = write_pddl(&dual);
                write_output(Some(&dir.join("domain.pddl")), &domain_text)?;
                write_output(Some(&dir.join("problem.pddl")), &problem_text)?;
            }
            Ok(0)
        }
        Command::Solve {
            task,
            direction,
            strategy,
            heuristic,
            prune,
            time_limit,
            node_limit,
            output,
        } => {
            let task = normalize_task(&load_task(&task)?);
            let heuristic = heuristic.unwrap_or(Heuristic::default_for(strategy, direction));
            let pruners = prune.unwrap_or(PrunerSet::default_for(direction));
            let config = SearchConfig {
                strategy,
                heuristic,
                pruners,
                node_limit,
                time_limit: time_limit
                    .map(Duration::try_from_secs_f64)
                    .transpose()
                    .map_err(|e| format!("invalid time limit: {e}"))?,
                record_layers: false,
            };
            let outcome = solve(&task, direction, &config).map_err(|e| e.to_string())?;
            let s = &outcome.stats;
            println!("verdict={}", outcome.verdict);
            println!("expanded={}", s.expanded);
            println!("generated={}", s.generated);
            println!("duplicates={}", s.duplicates);
            println!("pruned-useful={}", s.pruned_useful);
            println!("pruned-relevant={}", s.pruned_relevant);
            println!("pruned-invariants={}", s.pruned_invariants);
            println!("pruned-infinite={}", s.pruned_infinite);
            println!("peak-open={}", s.peak_open);
            println!("wall-time-ms={:.3}", s.wall_time.as_secs_f64() * 1e3);
            if let Some(plan) = &outcome.plan {
                println!("plan-length={}", plan.len());
                write_output(output.as_deref(), &write_plan(plan))?;
            }
            Ok(match outcome.verdict {
                Verdict::PlanFound => 0,
                Verdict::Unsolvable => EXIT_NEGATIVE,
                Verdict::LimitHit(_) => EXIT_LIMIT,
            })
        }
        Command::Validate { task, plan } => {
            let task = load_task(&task)?;
            let plan_path = plan;
            let plan = read_plan(&read_input(&plan_path)?)
                .map_err(|e| format!("{}: {e}", plan_path.display()))?;
            match validate_plan(&task, &plan) {
                Ok(_) => {
                    println!("valid=true");
                    println!("steps={}", plan.len());
                    Ok(0)
                }
                Err(e) => {
                    println!("valid=false");
                    eprintln!("error: {e}");
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Invariants { task, direction } => {
            let task = normalize_task(&load_task(&task)?);
            let name = |id| task.atoms.name(id);
            match direction {
                Direction::Forward => {
                    let m = mutex_fixpoint(&task).expect("normalized above");
                    for id in m.always_true.iter() {
                        println!("always-true {}", name(id));
                    }
                    for id in m.always_false.iter() {
                        println!("always-false {}", name(id));
                    }
                    let mut pairs = m.pairs;
                    pairs.sort();
                    for (p, q) in pairs {
                        println!("mutex {} {}", name(p), name(q));
                    }
                }
                Direction::Backward => {
                    // Unary facts hold in every goal-reaching state; pairs
                    // are disjunctions over them.
                    let c = backward_invariants(&task).expect("normalized above");
                    for id in c.unary.iter() {
                        println!("always-true {}", name(id));
                    }
                    let mut clauses = c.clauses;
                    clauses.sort();
                    for (p, q) in clauses {
                        println!("clause {} {}", name(p), name(q));
                    }
                }
            }
            Ok(0)
        }
        Command::Check {
            random,
            atoms,
            actions,
            seed,
            suite,
        } => {
            if atoms > 20 {
                return Err("the oracle enumerates 2^atoms states; use at most 20 atoms".into());
            }
            let suites: &[Suite] = match suite {
                Suite::All => &[Suite::Duality, Suite::Pruning],
                Suite::Duality => &[Suite::Duality],
                Suite::Pruning => &[Suite::Pruning],
            };
            let mut all_agree = true;
            type CheckFn = fn(&Task) -> Result<bool, String>;
            for &s in suites {
                let (label, run_one): (&str, CheckFn) = match s {
                    Suite::Duality => ("duality", check_duality),
                    Suite::Pruning => ("pruning", check_pruning),
                    Suite::All => unreachable!(),
                };
                let mut agree = 0usize;
                let mut counterexample: Option<(u64, Task)> = None;
                for i in 0..random {
                    let cfg = RandomTaskConfig {
                        n_atoms: atoms,
                        n_actions: actions,
                        seed: seed + i as u64,
                        ..Default::default()
                    };
                    let task = random_task(&cfg);
                    if run_one(&task)? {
                        agree += 1;
                    } else if counterexample.is_none() {
                        counterexample = Some((cfg.seed, task));
                    }
                }
                println!("{label}: {agree}/{random} agree");
                if let Some((bad_seed, task)) = counterexample {
                    let path = format!("counterexample-{label}-{bad_seed}.gtf");
                    fs::write(&path, write_gtf(&task))
                        .map_err(|e| format!("cannot write {path}: {e}"))?;
                    println!("counterexample: {path}");
                    all_agree = false;
                }
            }
            Ok(if all_agree { 0 } else { EXIT_NEGATIVE })
        }
    }
}

/// One duality probe: the task and its dual agree on brute-force
/// solvability, and the dual of the dual is the task again.
fn check_duality(task: &Task) -> Result<bool, String> {
    let dual = dual_task(task).map_err(|e| e.to_string())?;
    let back = dual_task(&dual).map_err(|e| e.to_string())?;
    let solvable = solvable_bruteforce(task).map_err(|e| e.to_string())?;
    let dual_solvable = solvable_bruteforce(&dual).map_err(|e| e.to_string())?;
    Ok(solvable == dual_solvable && back == *task)
}

/// One pruning probe: along each ladder of increasingly aggressive pruner
/// sets, the verdict matches the oracle, every plan validates, and the
/// expansion count never grows.
fn check_pruning(task: &Task) -> Result<bool, String> {
    let expected = solvable_bruteforce(task).map_err(|e| e.to_string())?;
    let none = PrunerSet {
        useful: false,
        relevant: false,
        invariants: false,
    };
    let ladders = [
        (
            Direction::Forward,
            [
                none,
                PrunerSet {
                    useful: true,
                    ..none
                },
                PrunerSet {
                    useful: true,
                    invariants: true,
                    ..none
                },
            ],
        ),
        (
            Direction::Backward,
            [
                none,
                PrunerSet {
                    relevant: true,
                    ..none
                },
                PrunerSet {
                    relevant: true,
                    invariants: true,
                    ..none
                },
            ],
        ),
    ];
    for (direction, ladder) in ladders {
        let mut previous = u64::MAX;
        for pruners in ladder {
            let config = SearchConfig {
                pruners,
                ..Default::default()
            };
            let outcome = solve(task, direction, &config).map_err(|e| e.to_string())?;
            let verdict_ok = match outcome.verdict {
                Verdict::PlanFound => {
                    expected
                        && outcome
                            .plan
                            .as_ref()
                            .is_some_and(|p| validate_plan(task, p).is_ok())
                }
                Verdict::Unsolvable => !expected,
                Verdict::LimitHit(_) => false,
            };
            if !verdict_ok || outcome.stats.expanded > previous {
                return Ok(false);
            }
            previous = outcome.stats.expanded;
        }
    }
    Ok(true)
}
