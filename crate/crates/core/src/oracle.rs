//! Brute-force ground truth for small universes.
//!
//! Everything here trades efficiency for obviousness: states are enumerated
//! as bit masks and reachability is computed by exhaustive closure. The
//! search engines, the invariant synthesis and the dual transformation are
//! all tested against these oracles on thousands of small random tasks.

use crate::state::StateSet;
use crate::task::{normalize_task, Task};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Universe cap for reachability closures (2^20 states).
pub const MAX_ORACLE_ATOMS: usize = 20;
/// Universe cap for the full goal-reaching closure over 2^X.
pub const MAX_BACKWARD_ORACLE_ATOMS: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("universe has {atoms} atoms, oracle limit is {limit}")]
    UniverseTooLarge { atoms: usize, limit: usize },
}

fn check_width(task: &Task, limit: usize) -> Result<usize, OracleError> {
    let atoms = task.width();
    if atoms > limit {
        return Err(OracleError::UniverseTooLarge { atoms, limit });
    }
    Ok(atoms)
}

fn action_masks(task: &Task) -> Vec<(u64, u64, u64)> {
    task.actions
        .iter()
        .map(|a| (a.pre.as_mask(), a.add.as_mask(), a.del.as_mask()))
        .collect()
}

/// All states reachable from the initial state, in breadth-first discovery
/// order. Guarded to universes of at most [`MAX_ORACLE_ATOMS`] atoms.
pub fn enumerate_reachable(task: &Task) -> Result<Vec<StateSet>, OracleError> {
    let n = check_width(task, MAX_ORACLE_ATOMS)?;
    let acts = action_masks(task);
    let init = task.init.as_mask();
    let mut seen = vec![false; 1usize << n];
    let mut order = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    seen[init as usize] = true;
    queue.push_back(init);
    while let Some(s) = queue.pop_front() {
        order.push(StateSet::from_mask(n, s));
        for &(pre, add, del) in &acts {
            if pre & !s == 0 {
                let succ = (s | add) & !del;
                if !seen[succ as usize] {
                    seen[succ as usize] = true;
                    queue.push_back(succ);
                }
            }
        }
    }
    Ok(order)
}

/// Whether some reachable state satisfies the goal.
pub fn solvable_bruteforce(task: &Task) -> Result<bool, OracleError> {
    let n = check_width(task, MAX_ORACLE_ATOMS)?;
    let acts = action_masks(task);
    let goal = task.goal.as_mask();
    let init = task.init.as_mask();
    let mut seen = vec![false; 1usize << n];
    let mut queue = std::collections::VecDeque::new();
    seen[init as usize] = true;
    queue.push_back(init);
    while let Some(s) = queue.pop_front() {
        if goal & !s == 0 {
            return Ok(true);
        }
        for &(pre, add, del) in &acts {
            if pre & !s == 0 {
                let succ = (s | add) & !del;
                if !seen[succ as usize] {
                    seen[succ as usize] = true;
                    queue.push_back(succ);
                }
            }
        }
    }
    Ok(false)
}

/// The complete transition graph over all `2^|X|` states.
///
/// States are bit masks; `transitions[s]` lists `(action index, successor)`
/// pairs for every action applicable in `s`.
pub struct TransitionSystem {
    pub width: usize,
    pub transitions: Vec<Vec<(usize, u64)>>,
    pub goal_states: Vec<u64>,
}

impl TransitionSystem {
    /// Materializes the full graph. Guarded to [`MAX_ORACLE_ATOMS`] atoms.
    pub fn build(task: &Task) -> Result<TransitionSystem, OracleError> {
        let n = check_width(task, MAX_ORACLE_ATOMS)?;
        let acts = action_masks(task);
        let goal = task.goal.as_mask();
        let count = 1usize << n;
        let mut transitions = Vec::with_capacity(count);
        let mut goal_states = Vec::new();
        for s in 0..count as u64 {
            let mut out = Vec::new();
            for (ai, &(pre, add, del)) in acts.iter().enumerate() {
                if pre & !s == 0 {
                    out.push((ai, (s | add) & !del));
                }
            }
            transitions.push(out);
            if goal & !s == 0 {
                goal_states.push(s);
            }
        }
        Ok(TransitionSystem {
            width: n,
            transitions,
            goal_states,
        })
    }

    pub fn state(&self, mask: u64) -> StateSet {
        StateSet::from_mask(self.width, mask)
    }

    pub fn states(&self) -> impl Iterator<Item = StateSet> + '_ {
        (0..self.transitions.len() as u64).map(|m| self.state(m))
    }
}

/// All states (reachable or not) from which some goal state can be reached,
/// in increasing mask order. Guarded to [`MAX_BACKWARD_ORACLE_ATOMS`] atoms
/// because it closes over the full `2^|X|` graph.
pub fn goal_reaching_states(task: &Task) -> Result<Vec<StateSet>, OracleError> {
    let n = check_width(task, MAX_BACKWARD_ORACLE_ATOMS)?;
    let ts = TransitionSystem::build(task)?;
    let count = 1usize << n;
    let mut rev: Vec<Vec<u64>> = vec![Vec::new(); count];
    for (s, out) in ts.transitions.iter().enumerate() {
        for &(_, succ) in out {
            rev[succ as usize].push(s as u64);
        }
    }
    let mut reaching = vec![false; count];
    let mut queue: std::collections::VecDeque<u64> = ts.goal_states.iter().copied().collect();
    for &g in &ts.goal_states {
        reaching[g as usize] = true;
    }
    while let Some(s) = queue.pop_front() {
        for &p in &rev[s as usize] {
            if !reaching[p as usize] {
                reaching[p as usize] = true;
                queue.push_back(p);
            }
        }
    }
    Ok((0..count as u64)
        .filter(|&m| reaching[m as usize])
        .map(|m| ts.state(m))
        .collect())
}

/// Parameters for [`random_task`].
#[derive(Clone, Debug)]
pub struct RandomTaskConfig {
    pub n_atoms: usize,
    pub n_actions: usize,
    /// Maximum cardinality of each of pre, add and del.
    pub max_set_size: usize,
    /// Probability that an atom joins the initial state.
    pub init_prob: f64,
    /// Probability that an atom joins the goal.
    pub goal_prob: f64,
    /// Normalize the generated actions (on by default). Disable to exercise
    /// raw add/delete overlaps.
    pub normalize: bool,
    pub seed: u64,
}

impl Default for RandomTaskConfig {
    fn default() -> Self {
        RandomTaskConfig {
            n_atoms: 6,
            n_actions: 6,
            max_set_size: 3,
            init_prob: 0.4,
            goal_prob: 0.3,
            normalize: true,
            seed: 0,
        }
    }
}

/// Generates a task deterministically from the config's seed.
///
/// Atoms are named `x0..`, actions `a0..`. One action is biased to add a
/// goal atom so that the solvable/unsolvable mix stays informative.
pub fn random_task(cfg: &RandomTaskConfig) -> Task {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_atoms;
    let mut atoms = crate::atom::AtomTable::new();
    for i in 0..n {
        atoms.intern(&format!("x{i}"));
    }
    let sample_state = |rng: &mut ChaCha8Rng, prob: f64| {
        let mut s = StateSet::empty(n);
        for i in 0..n {
            if rng.gen_bool(prob) {
                s.insert(crate::atom::AtomId(i as u32));
            }
        }
        s
    };
    let init = sample_state(&mut rng, cfg.init_prob);
    let goal = sample_state(&mut rng, cfg.goal_prob);

    let max_k = cfg.max_set_size.min(n);
    let sample_set = |rng: &mut ChaCha8Rng| {
        let k = rng.gen_range(0..=max_k);
        let mut s = StateSet::empty(n);
        if k > 0 {
            for idx in rand::seq::index::sample(rng, n, k) {
                s.insert(crate::atom::AtomId(idx as u32));
            }
        }
        s
    };
    let mut actions = Vec::with_capacity(cfg.n_actions);
    for i in 0..cfg.n_actions {
        let pre = sample_set(&mut rng);
        let add = sample_set(&mut rng);
        let del = sample_set(&mut rng);
        actions.push(crate::task::Action::new(format!("a{i}"), pre, add, del));
    }
    if !goal.is_empty() && !actions.is_empty() {
        let target = rng.gen_range(0..actions.len());
        let goal_atoms: Vec<_> = goal.iter().collect();
        let pick = goal_atoms[rng.gen_range(0..goal_atoms.len())];
        actions[target].add.insert(pick);
    }
    let task = Task::new(atoms, init, goal, actions).unwrap();
    if cfg.normalize {
        normalize_task(&task)
    } else {
        task
    }
}
