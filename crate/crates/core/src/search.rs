//! Progression and regression search engines.
//!
//! Both directions are instances of the same template over three entry
//! points: a start node, a target test and a successor function. Forward
//! search starts at `I`, targets states containing `G` and expands with
//! applicable actions; backward search starts at `G` as a sub-goal, targets
//! sub-goals contained in `I` and expands with consistent actions via
//! regression. On a normalized task, backward search on the task and forward
//! search on its dual visit complements of each other's nodes in lockstep.

use crate::invariants::{
    backward_invariants, mutex_fixpoint, violates_backward, violates_forward, BackwardClauseSet,
    MutexSet,
};
use crate::semantics::{applicable, consistent, relevant, useful};
use crate::state::StateSet;
use crate::task::{validate_plan, NotNormalizedError, Plan, Task};
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        })
    }
}

impl FromStr for Direction {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "forward" => Ok(Direction::Forward),
            "backward" => Ok(Direction::Backward),
            other => Err(format!("unknown direction `{other}`")),
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    Bfs,
    Gbfs,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Bfs => "bfs",
            Strategy::Gbfs => "gbfs",
        })
    }
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bfs" => Ok(Strategy::Bfs),
            "gbfs" => Ok(Strategy::Gbfs),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Heuristic {
    #[default]
    None,
    GoalCount,
    HAdd,
    HMax,
    RelaxedPlan,
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Heuristic::None => "none",
            Heuristic::GoalCount => "goal-count",
            Heuristic::HAdd => "hadd",
            Heuristic::HMax => "hmax",
            Heuristic::RelaxedPlan => "relaxed-plan",
        })
    }
}

impl FromStr for Heuristic {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Heuristic::None),
            "goal-count" => Ok(Heuristic::GoalCount),
            "hadd" => Ok(Heuristic::HAdd),
            "hmax" => Ok(Heuristic::HMax),
            "relaxed-plan" => Ok(Heuristic::RelaxedPlan),
            other => Err(format!("unknown heuristic `{other}`")),
        }
    }
}

impl Heuristic {
    /// What callers get when they do not pick a heuristic: blind search for
    /// bfs, relaxed-plan forward and goal-count backward for gbfs.
    pub fn default_for(strategy: Strategy, direction: Direction) -> Heuristic {
        match (strategy, direction) {
            (Strategy::Bfs, _) => Heuristic::None,
            (Strategy::Gbfs, Direction::Forward) => Heuristic::RelaxedPlan,
            (Strategy::Gbfs, Direction::Backward) => Heuristic::GoalCount,
        }
    }
}

/// A heuristic estimate; `Infinite` is the distinguished top value meaning
/// the goal is unreachable even under the delete relaxation.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HeuristicValue {
    Finite(u64),
    Infinite,
}

impl fmt::Display for HeuristicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeuristicValue::Finite(v) => write!(f, "{v}"),
            HeuristicValue::Infinite => f.write_str("inf"),
        }
    }
}

/// Which pruning predicates the engine applies.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct PrunerSet {
    /// Skip forward successors whose action adds nothing new.
    pub useful: bool,
    /// Skip backward successors whose action establishes nothing.
    pub relevant: bool,
    /// Discard successor nodes that violate synthesized invariants.
    pub invariants: bool,
}

impl PrunerSet {
    pub const NONE: PrunerSet = PrunerSet {
        useful: false,
        relevant: false,
        invariants: false,
    };

    /// What callers get when they do not pick pruners: the applicable
    /// direction-specific pruner plus invariants.
    pub fn default_for(direction: Direction) -> PrunerSet {
        match direction {
            Direction::Forward => PrunerSet {
                useful: true,
                relevant: false,
                invariants: true,
            },
            Direction::Backward => PrunerSet {
                useful: false,
                relevant: true,
                invariants: true,
            },
        }
    }
}

impl fmt::Display for PrunerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names = Vec::new();
        if self.useful {
            names.push("useful");
        }
        if self.relevant {
            names.push("relevant");
        }
        if self.invariants {
            names.push("invariants");
        }
        if names.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&names.join(","))
        }
    }
}

impl FromStr for PrunerSet {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let mut set = PrunerSet::NONE;
        if s == "none" || s.is_empty() {
            return Ok(set);
        }
        for part in s.split(',') {
            match part.trim() {
                "useful" => set.useful = true,
                "relevant" => set.relevant = true,
                "invariants" => set.invariants = true,
                other => return Err(format!("unknown pruner `{other}`")),
            }
        }
        Ok(set)
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub heuristic: Heuristic,
    pub pruners: PrunerSet,
    /// Maximum number of expansions before giving up.
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Record expanded nodes grouped by depth in [`Outcome::layers`].
    pub record_layers: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum LimitKind {
    Nodes,
    Time,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    PlanFound,
    Unsolvable,
    LimitHit(LimitKind),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::PlanFound => "plan-found",
            Verdict::Unsolvable => "unsolvable",
            Verdict::LimitHit(LimitKind::Nodes) => "node-limit",
            Verdict::LimitHit(LimitKind::Time) => "time-limit",
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchStats {
    pub expanded: u64,
    /// Successor nodes enumerated, including ones later pruned or rejected
    /// as duplicates.
    pub generated: u64,
    pub duplicates: u64,
    pub pruned_useful: u64,
    pub pruned_relevant: u64,
    pub pruned_invariants: u64,
    /// Nodes discarded because their heuristic value was infinite.
    pub pruned_infinite: u64,
    pub peak_open: usize,
    pub wall_time: Duration,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub verdict: Verdict,
    pub plan: Option<Plan>,
    pub stats: SearchStats,
    /// Expanded nodes grouped by depth; empty unless
    /// [`SearchConfig::record_layers`] is set.
    pub layers: Vec<Vec<StateSet>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error(transparent)]
    NotNormalized(#[from] NotNormalizedError),
    #[error("gbfs requires a heuristic")]
    HeuristicRequired,
    #[error("heuristic `{kind}` is not supported in {direction} search")]
    UnsupportedHeuristic { kind: Heuristic, direction: Direction },
    #[error("pruner `{pruner}` only applies to {direction} search")]
    PrunerDirection {
        pruner: &'static str,
        direction: Direction,
    },
}

/// The three entry points that progression and regression instantiate.
pub struct SearchSpec<'a> {
    task: &'a Task,
    direction: Direction,
}

impl<'a> SearchSpec<'a> {
    pub fn task(&self) -> &'a Task {
        self.task
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Forward: the initial state. Backward: the goal as a sub-goal.
    pub fn start(&self) -> StateSet {
        match self.direction {
            Direction::Forward => self.task.init.clone(),
            Direction::Backward => self.task.goal.clone(),
        }
    }

    /// Forward: `G ⊆ t`. Backward: `t ⊆ I`.
    pub fn is_target(&self, t: &StateSet) -> bool {
        match self.direction {
            Direction::Forward => self.task.goal.is_subset(t),
            Direction::Backward => t.is_subset(&self.task.init),
        }
    }

    /// Successors as `(action index, node)` pairs in task action order.
    /// Forward enumerates exactly the applicable actions with progression;
    /// backward exactly the consistent actions with regression. No pruning
    /// happens here.
    pub fn succ(&self, t: &StateSet) -> Vec<(usize, StateSet)> {
        let mut out = Vec::new();
        for (i, a) in self.task.actions.iter().enumerate() {
            match self.direction {
                Direction::Forward => {
                    if applicable(t, a) {
                        out.push((i, t.union(&a.add).difference(&a.del)));
                    }
                }
                Direction::Backward => {
                    if consistent(t, a) {
                        out.push((i, t.difference(&a.add).union(&a.pre)));
                    }
                }
            }
        }
        out
    }
}

/// Instantiates the entry points for one direction. The task should be
/// normalized; the solvers check this.
pub fn make_search_spec(task: &Task, direction: Direction) -> SearchSpec<'_> {
    SearchSpec { task, direction }
}

/// Evaluates a heuristic at a node.
///
/// `goal-count` works in both directions (`|G \ node|` forward, `|node \ I|`
/// backward). The delete-relaxation heuristics (`hadd`, `hmax`,
/// `relaxed-plan`) are forward-only.
pub fn heuristic_value(
    kind: Heuristic,
    task: &Task,
    node: &StateSet,
    direction: Direction,
) -> Result<HeuristicValue, SearchError> {
    match kind {
        Heuristic::None => Err(SearchError::HeuristicRequired),
        Heuristic::GoalCount => Ok(HeuristicValue::Finite(match direction {
            Direction::Forward => task.goal.difference(node).len() as u64,
            Direction::Backward => node.difference(&task.init).len() as u64,
        })),
        Heuristic::HAdd | Heuristic::HMax | Heuristic::RelaxedPlan => {
            if direction == Direction::Backward {
                return Err(SearchError::UnsupportedHeuristic { kind, direction });
            }
            let use_max = kind == Heuristic::HMax;
            let (costs, supporters) = relaxed_costs(task, node, use_max);
            if kind == Heuristic::RelaxedPlan {
                return Ok(extract_relaxed_plan_size(task, node, &costs, &supporters));
            }
            let mut total: u64 = 0;
            for g in task.goal.iter() {
                match costs[g.index()] {
                    None => return Ok(HeuristicValue::Infinite),
                    Some(c) => {
                        if use_max {
                            total = total.max(c);
                        } else {
                            total += c;
                        }
                    }
                }
            }
            Ok(HeuristicValue::Finite(total))
        }
    }
}

/// Bellman fixpoint over the delete relaxation from `node`: unit action
/// costs, additive or max combination over preconditions. Returns per-atom
/// costs (`None` = unreachable) and the first best supporter per atom.
fn relaxed_costs(task: &Task, node: &StateSet, use_max: bool) -> (Vec<Option<u64>>, Vec<Option<usize>>) {
    let n = task.width();
    let mut costs: Vec<Option<u64>> = vec![None; n];
    let mut supporters: Vec<Option<usize>> = vec![None; n];
    for x in node.iter() {
        costs[x.index()] = Some(0);
    }
    loop {
        let mut changed = false;
        for (ai, a) in task.actions.iter().enumerate() {
            let mut pre_cost: u64 = 0;
            let mut reachable = true;
            for p in a.pre.iter() {
                match costs[p.index()] {
                    None => {
                        reachable = false;
                        break;
                    }
                    Some(c) => {
                        if use_max {
                            pre_cost = pre_cost.max(c);
                        } else {
                            pre_cost += c;
                        }
                    }
                }
            }
            if !reachable {
                continue;
            }
            let through = pre_cost + 1;
            for x in a.add.iter() {
                if costs[x.index()].is_none_or(|c| through < c) {
                    costs[x.index()] = Some(through);
                    supporters[x.index()] = Some(ai);
                    changed = true;
                }
            }
        }
        if !changed {
            return (costs, supporters);
        }
    }
}

/// Counts the distinct actions of a relaxed plan extracted by chasing best
/// supporters back from the goal atoms.
fn extract_relaxed_plan_size(
    task: &Task,
    node: &StateSet,
    costs: &[Option<u64>],
    supporters: &[Option<usize>],
) -> HeuristicValue {
    let mut stack = Vec::new();
    for g in task.goal.iter() {
        if costs[g.index()].is_none() {
            return HeuristicValue::Infinite;
        }
        if !node.contains(g) {
            stack.push(g);
        }
    }
    let mut marked = node.clone();
    let mut chosen = std::collections::HashSet::new();
    while let Some(x) = stack.pop() {
        if marked.contains(x) {
            continue;
        }
        marked.insert(x);
        let ai = supporters[x.index()].expect("reached atom outside node has a supporter");
        chosen.insert(ai);
        for p in task.actions[ai].pre.iter() {
            if !marked.contains(p) {
                stack.push(p);
            }
        }
    }
    HeuristicValue::Finite(chosen.len() as u64)
}

struct Node {
    state: StateSet,
    parent: usize,
    action: usize,
    depth: usize,
}

const NO_PARENT: usize = usize::MAX;

fn validate_pruners(direction: Direction, pruners: PrunerSet) -> Result<(), SearchError> {
    if pruners.useful && direction == Direction::Backward {
        return Err(SearchError::PrunerDirection {
            pruner: "useful",
            direction: Direction::Forward,
        });
    }
    if pruners.relevant && direction == Direction::Forward {
        return Err(SearchError::PrunerDirection {
            pruner: "relevant",
            direction: Direction::Backward,
        });
    }
    Ok(())
}

/// Breadth-first search with exact duplicate detection. Returns a shortest
/// node-sequence plan; `unsolvable` only when the (pruned) space is
/// exhausted.
pub fn bfs_solve(spec: &SearchSpec, config: &SearchConfig) -> Result<Outcome, SearchError> {
    run_search(spec, config, false)
}

/// Greedy best-first search on the configured heuristic with FIFO
/// tie-breaking and exact duplicate detection. The returned plan is
/// validated before it is returned.
pub fn gbfs_solve(spec: &SearchSpec, config: &SearchConfig) -> Result<Outcome, SearchError> {
    run_search(spec, config, true)
}

/// Dispatches on `config.strategy`.
pub fn solve(task: &Task, direction: Direction, config: &SearchConfig) -> Result<Outcome, SearchError> {
    let spec = make_search_spec(task, direction);
    match config.strategy {
        Strategy::Bfs => bfs_solve(&spec, config),
        Strategy::Gbfs => gbfs_solve(&spec, config),
    }
}

fn run_search(
    spec: &SearchSpec,
    config: &SearchConfig,
    use_heuristic: bool,
) -> Result<Outcome, SearchError> {
    let task = spec.task;
    let direction = spec.direction;
    if !task.is_normalized() {
        return Err(NotNormalizedError.into());
    }
    validate_pruners(direction, config.pruners)?;
    if use_heuristic {
        if config.heuristic == Heuristic::None {
            return Err(SearchError::HeuristicRequired);
        }
        // Surface unsupported kind/direction pairings before searching.
        heuristic_value(config.heuristic, task, &task.init, direction)?;
    }

    let start_time = Instant::now();
    let mut stats = SearchStats::default();
    let mut layers: Vec<Vec<StateSet>> = Vec::new();

    // Invariant structures are synthesized once per run: state invariants
    // prune backward nodes, goal-reaching invariants prune forward states.
    let forward_clauses: Option<BackwardClauseSet> =
        if config.pruners.invariants && direction == Direction::Forward {
            Some(backward_invariants(task)?)
        } else {
            None
        };
    let backward_mutexes: Option<MutexSet> =
        if config.pruners.invariants && direction == Direction::Backward {
            Some(mutex_fixpoint(task)?)
        } else {
            None
        };

    let eval = |node: &StateSet, stats: &mut SearchStats| -> Result<HeuristicValue, SearchError> {
        if use_heuristic {
            let h = heuristic_value(config.heuristic, task, node, direction)?;
            if h == HeuristicValue::Infinite {
                stats.pruned_infinite += 1;
            }
            Ok(h)
        } else {
            Ok(HeuristicValue::Finite(0))
        }
    };

    let mut nodes: Vec<Node> = Vec::new();
    let mut visited: HashMap<StateSet, usize> = HashMap::new();
    let mut open: BinaryHeap<Reverse<(HeuristicValue, u64, usize)>> = BinaryHeap::new();
    let mut seq: u64 = 0;

    let finish = |verdict: Verdict,
                  plan: Option<Plan>,
                  mut stats: SearchStats,
                  layers: Vec<Vec<StateSet>>|
     -> Result<Outcome, SearchError> {
        stats.wall_time = start_time.elapsed();
        Ok(Outcome {
            verdict,
            plan,
            stats,
            layers,
        })
    };

    let start = spec.start();
    let h0 = eval(&start, &mut stats)?;
    if h0 == HeuristicValue::Infinite {
        return finish(Verdict::Unsolvable, None, stats, layers);
    }
    visited.insert(start.clone(), 0);
    nodes.push(Node {
        state: start,
        parent: NO_PARENT,
        action: usize::MAX,
        depth: 0,
    });
    open.push(Reverse((h0, seq, 0)));
    seq += 1;
    stats.peak_open = 1;

    while let Some(Reverse((_, _, idx))) = open.pop() {
        if let Some(limit) = config.node_limit {
            if stats.expanded >= limit {
                return finish(Verdict::LimitHit(LimitKind::Nodes), None, stats, layers);
            }
        }
        if let Some(limit) = config.time_limit {
            if start_time.elapsed() >= limit {
                return finish(Verdict::LimitHit(LimitKind::Time), None, stats, layers);
            }
        }
        stats.expanded += 1;
        if config.record_layers {
            let depth = nodes[idx].depth;
            if layers.len() <= depth {
                layers.resize_with(depth + 1, Vec::new);
            }
            layers[depth].push(nodes[idx].state.clone());
        }
        if spec.is_target(&nodes[idx].state) {
            let plan = reconstruct_plan(task, &nodes, idx, direction);
            debug_assert!(validate_plan(task, &plan).is_ok());
            validate_plan(task, &plan).expect("search produced an invalid plan");
            return finish(Verdict::PlanFound, Some(plan), stats, layers);
        }

        let parent_state = nodes[idx].state.clone();
        let depth = nodes[idx].depth;
        for (ai, succ_state) in spec.succ(&parent_state) {
            stats.generated += 1;
            let action = &task.actions[ai];
            match direction {
                Direction::Forward => {
                    if config.pruners.useful && !useful(&parent_state, action) {
                        stats.pruned_useful += 1;
                        continue;
                    }
                    if let Some(clauses) = &forward_clauses {
                        if violates_backward(&succ_state, clauses) {
                            stats.pruned_invariants += 1;
                            continue;
                        }
                    }
                }
                Direction::Backward => {
                    if config.pruners.relevant && !relevant(&parent_state, action) {
                        stats.pruned_relevant += 1;
                        continue;
                    }
                    if let Some(mutexes) = &backward_mutexes {
                        if violates_forward(&succ_state, mutexes) {
                            stats.pruned_invariants += 1;
                            continue;
                        }
                    }
                }
            }
            if visited.contains_key(&succ_state) {
                stats.duplicates += 1;
                continue;
            }
            let h = eval(&succ_state, &mut stats)?;
            if h == HeuristicValue::Infinite {
                continue;
            }
            let new_idx = nodes.len();
            visited.insert(succ_state.clone(), new_idx);
            nodes.push(Node {
                state: succ_state,
                parent: idx,
                action: ai,
                depth: depth + 1,
            });
            open.push(Reverse((h, seq, new_idx)));
            seq += 1;
            stats.peak_open = stats.peak_open.max(open.len());
        }
    }
    finish(Verdict::Unsolvable, None, stats, layers)
}

/// Reads the action chain off the parent pointers. Walking target-to-root
/// yields the executable order for backward search (the last regression
/// step is the first action to run) and the reverse of the executable order
/// for forward search.
fn reconstruct_plan(task: &Task, nodes: &[Node], target: usize, direction: Direction) -> Plan {
    let mut names = Vec::new();
    let mut idx = target;
    while nodes[idx].parent != NO_PARENT {
        names.push(task.actions[nodes[idx].action].name.clone());
        idx = nodes[idx].parent;
    }
    if direction == Direction::Forward {
        names.reverse();
    }
    Plan::new(names)
}
