//! Planning and game models that compile to bilinear programs.

pub mod average;
pub mod decmdp;
pub mod game;
pub mod rover;

pub use average::{compile_average_reward, extract_stochastic_policy, StochasticPolicy};
pub use decmdp::{compile_decmdp, evaluate_policy, example_four, extract_policy, oracle_enumerate, prune_unreachable, ORACLE_CAP};
pub use game::{compile_game, equilibrium_residual, game_assignment, GameSpec};
pub use rover::{generate_rover, RoverConfig};

use crate::error::{Error, Result};

const PROB_TOL: f64 = 1e-9;

/// One enabled action of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct Choice {
    pub action: usize,
    pub reward: f64,
    /// `(next state, probability)`.
    pub next: Vec<(usize, f64)>,
}

/// One agent of a two-agent transition-independent model.
#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub states: Vec<String>,
    pub terminal: Vec<bool>,
    pub actions: Vec<String>,
    /// Enabled actions per state in increasing action order; empty for terminal states.
    pub choices: Vec<Vec<Choice>>,
    pub initial: Vec<f64>,
}

/// Reward credited on the pair of state-action occupancies of the two agents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointReward {
    pub state1: usize,
    pub action1: usize,
    pub state2: usize,
    pub action2: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecMdp {
    pub agents: [Agent; 2],
    pub joint: Vec<JointReward>,
}

/// A deterministic joint policy; `None` on terminal states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    pub actions: [Vec<Option<usize>>; 2],
}

impl Agent {
    /// `(state, action)` of every variable, ordered by state, then action.
    pub fn variables(&self) -> Vec<(usize, usize)> {
        self.choices
            .iter()
            .enumerate()
            .flat_map(|(s, cs)| cs.iter().map(move |c| (s, c.action)))
            .collect()
    }

    pub fn n_variables(&self) -> usize {
        self.choices.iter().map(Vec::len).sum()
    }

    /// Position of the variable for `(state, action)`.
    pub fn variable_index(&self, state: usize, action: usize) -> Option<usize> {
        let before: usize = self.choices.get(..state)?.iter().map(Vec::len).sum();
        let k = self.choices[state].iter().position(|c| c.action == action)?;
        Some(before + k)
    }

    pub fn non_terminal(&self) -> Vec<usize> {
        (0..self.states.len()).filter(|&s| !self.terminal[s]).collect()
    }

    /// Number of deterministic policies.
    pub fn policy_count(&self) -> f64 {
        self.choices.iter().filter(|c| !c.is_empty()).map(|c| c.len() as f64).product()
    }

    pub(crate) fn validate(&self, name: &str, allow_terminal: bool) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(format!("{name}: {msg}")));
        let n = self.states.len();
        if n == 0 {
            return bad("no states".into());
        }
        if self.terminal.len() != n || self.choices.len() != n || self.initial.len() != n {
            return bad("per-state lists differ in length".into());
        }
        for s in 0..n {
            let label = &self.states[s];
            let cs = &self.choices[s];
            if self.terminal[s] {
                if !allow_terminal {
                    return bad(format!("state {label} is terminal"));
                }
                if !cs.is_empty() {
                    return bad(format!("terminal state {label} has actions"));
                }
                continue;
            }
            if cs.is_empty() {
                return bad(format!("state {label} has no actions"));
            }
            for (k, c) in cs.iter().enumerate() {
                if c.action >= self.actions.len() {
                    return bad(format!("state {label} uses unknown action {}", c.action));
                }
                if k > 0 && cs[k - 1].action >= c.action {
                    return bad(format!("actions of state {label} are not increasing"));
                }
                if !c.reward.is_finite() {
                    return bad(format!("state {label} has a non-finite reward"));
                }
                let mut total = 0.0;
                for &(t, p) in &c.next {
                    if t >= n || !(p >= 0.0) || !p.is_finite() {
                        return bad(format!("state {label} has an invalid transition"));
                    }
                    total += p;
                }
                if (total - 1.0).abs() > PROB_TOL {
                    return bad(format!(
                        "transitions of state {label} under action {} sum to {total}",
                        self.actions[c.action]
                    ));
                }
            }
        }
        if self.initial.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return bad("negative initial probability".into());
        }
        let total: f64 = self.initial.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return bad(format!("initial distribution sums to {total}"));
        }
        Ok(())
    }

    /// Non-terminal states in an order where every transition goes forward.
    pub(crate) fn topological_order(&self, name: &str) -> Result<Vec<usize>> {
        let n = self.states.len();
        let mut indegree = vec![0usize; n];
        for s in self.non_terminal() {
            for c in &self.choices[s] {
                for &(t, p) in &c.next {
                    if p > 0.0 && !self.terminal[t] {
                        indegree[t] += 1;
                    }
                }
            }
        }
        let mut stack: Vec<usize> = self.non_terminal().into_iter().filter(|&s| indegree[s] == 0).rev().collect();
        let mut order = Vec::with_capacity(n);
        while let Some(s) = stack.pop() {
            order.push(s);
            for c in &self.choices[s] {
                for &(t, p) in c.next.iter().rev() {
                    if p > 0.0 && !self.terminal[t] {
                        indegree[t] -= 1;
                        if indegree[t] == 0 {
                            stack.push(t);
                        }
                    }
                }
            }
        }
        if order.len() != self.non_terminal().len() {
            let s = (0..n).find(|&s| !self.terminal[s] && indegree[s] > 0).unwrap_or(0);
            return Err(Error::InvalidModel(format!(
                "{name}: state {} lies on a cycle",
                self.states[s]
            )));
        }
        Ok(order)
    }
}

impl DecMdp {
    pub(crate) fn validate(&self, allow_terminal: bool) -> Result<()> {
        self.agents[0].validate("agent 1", allow_terminal)?;
        self.agents[1].validate("agent 2", allow_terminal)?;
        for j in &self.joint {
            if !j.value.is_finite() {
                return Err(Error::InvalidModel("non-finite joint reward".into()));
            }
            let ok1 = self.agents[0].choices.get(j.state1).is_some_and(|cs| cs.iter().any(|c| c.action == j.action1));
            let ok2 = self.agents[1].choices.get(j.state2).is_some_and(|cs| cs.iter().any(|c| c.action == j.action2));
            if !ok1 || !ok2 {
                return Err(Error::InvalidModel(format!(
                    "joint reward on ({}, {}) x ({}, {}) refers to a disabled state-action pair",
                    j.state1, j.action1, j.state2, j.action2
                )));
            }
        }
        Ok(())
    }
}
