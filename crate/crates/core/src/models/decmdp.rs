//! Finite-horizon DEC-MDPs over occupancy measures.
//!
//! Each agent's state-action occupancy `x(s, a)` satisfies one balance row per
//! non-terminal state `s′`:
//!
//! ```text
//! Σₐ x(s′, a) − Σₛ Σₐ P(s, a, s′) x(s, a) = α(s′)
//! ```
//!
//! and the expected reward is `r₁ᵀx + xᵀRy + r₂ᵀy`. Joint rewards are credited
//! on occupancies, so a pair of state-action events earns its reward whether
//! or not the two agents reach them at the same time.

use super::{Agent, Choice, DecMdp, JointReward, Policy};
use crate::bilinear::{Assignment, BilinearProgram, ConstraintSense, Side};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Largest number of joint deterministic policies [`oracle_enumerate`] visits.
pub const ORACLE_CAP: f64 = 1.0e6;

fn occupancy_side(agent: &Agent) -> Side {
    let vars = agent.variables();
    let rows = agent.non_terminal();
    let row_of: Vec<Option<usize>> = {
        let mut m = vec![None; agent.states.len()];
        for (i, &s) in rows.iter().enumerate() {
            m[s] = Some(i);
        }
        m
    };
    let mut a = DenseMatrix::zeros(rows.len(), vars.len());
    let mut r = Vec::with_capacity(vars.len());
    let mut v = 0;
    for (s, cs) in agent.choices.iter().enumerate() {
        for c in cs {
            if let Some(i) = row_of[s] {
                a[(i, v)] += 1.0;
            }
            for &(t, p) in &c.next {
                if let Some(i) = row_of[t] {
                    a[(i, v)] -= p;
                }
            }
            r.push(c.reward);
            v += 1;
        }
    }
    let rhs = rows.iter().map(|&s| agent.initial[s]).collect();
    Side::new(a, rhs, r, ConstraintSense::Equality)
}

pub(crate) fn joint_matrix(m: &DecMdp) -> DenseMatrix {
    let [a1, a2] = &m.agents;
    let mut c = DenseMatrix::zeros(a1.n_variables(), a2.n_variables());
    for j in &m.joint {
        if let (Some(i), Some(k)) = (a1.variable_index(j.state1, j.action1), a2.variable_index(j.state2, j.action2)) {
            c[(i, k)] += j.value;
        }
    }
    c
}

/// Occupancy program of a two-agent model; `x` belongs to agent 1, `y` to agent 2.
pub fn compile_decmdp(m: &DecMdp) -> Result<BilinearProgram> {
    m.validate(true)?;
    m.agents[0].topological_order("agent 1")?;
    m.agents[1].topological_order("agent 2")?;
    BilinearProgram::new(occupancy_side(&m.agents[0]), occupancy_side(&m.agents[1]), joint_matrix(m))
}

fn argmax_policy(agent: &Agent, occupancy: &[f64]) -> Vec<Option<usize>> {
    let mut v = 0;
    agent
        .choices
        .iter()
        .map(|cs| {
            let mut best: Option<(usize, f64)> = None;
            for c in cs {
                let x = occupancy[v];
                v += 1;
                if best.is_none_or(|(_, b)| x > b) {
                    best = Some((c.action, x));
                }
            }
            best.map(|(a, _)| a)
        })
        .collect()
}

/// Action with the largest occupancy in every non-terminal state; ties go to
/// the lowest action index.
pub fn extract_policy(m: &DecMdp, a: &Assignment) -> Result<Policy> {
    let [a1, a2] = &m.agents;
    if a.x.len() != a1.n_variables() || a.y.len() != a2.n_variables() {
        return Err(Error::DimensionMismatch(format!(
            "assignment has {} and {} occupancies, model has {} and {}",
            a.x.len(),
            a.y.len(),
            a1.n_variables(),
            a2.n_variables()
        )));
    }
    Ok(Policy {
        actions: [argmax_policy(a1, &a.x), argmax_policy(a2, &a.y)],
    })
}

/// Occupancy vector and local reward of a deterministic policy.
fn policy_occupancy(agent: &Agent, order: &[usize], policy: &[Option<usize>]) -> (Vec<f64>, f64) {
    let mut inflow = agent.initial.clone();
    let mut x = vec![0.0; agent.n_variables()];
    let mut value = 0.0;
    for &s in order {
        let Some(action) = policy[s] else { continue };
        let Some(k) = agent.choices[s].iter().position(|c| c.action == action) else {
            continue;
        };
        let c = &agent.choices[s][k];
        let v = agent.variable_index(s, action).expect("enabled action");
        x[v] = inflow[s];
        value += c.reward * inflow[s];
        for &(t, p) in &c.next {
            inflow[t] += inflow[s] * p;
        }
    }
    (x, value)
}

fn joint_value(joint: &[(usize, usize, f64)], x: &[f64], y: &[f64]) -> f64 {
    joint.iter().map(|&(i, k, v)| v * x[i] * y[k]).sum()
}

fn sparse_joint(m: &DecMdp) -> Vec<(usize, usize, f64)> {
    m.joint
        .iter()
        .filter_map(|j| {
            let i = m.agents[0].variable_index(j.state1, j.action1)?;
            let k = m.agents[1].variable_index(j.state2, j.action2)?;
            Some((i, k, j.value))
        })
        .collect()
}

/// Expected total reward of a deterministic joint policy.
pub fn evaluate_policy(m: &DecMdp, policy: &Policy) -> Result<f64> {
    let o1 = m.agents[0].topological_order("agent 1")?;
    let o2 = m.agents[1].topological_order("agent 2")?;
    let (x, v1) = policy_occupancy(&m.agents[0], &o1, &policy.actions[0]);
    let (y, v2) = policy_occupancy(&m.agents[1], &o2, &policy.actions[1]);
    Ok(v1 + v2 + joint_value(&sparse_joint(m), &x, &y))
}

/// The `index`-th deterministic policy, with the first non-terminal state as
/// the most significant digit.
fn decode_policy(agent: &Agent, mut index: usize) -> Vec<Option<usize>> {
    let mut policy = vec![None; agent.states.len()];
    for s in (0..agent.states.len()).rev() {
        let cs = &agent.choices[s];
        if cs.is_empty() {
            continue;
        }
        policy[s] = Some(cs[index % cs.len()].action);
        index /= cs.len();
    }
    policy
}

/// Optimal value and joint deterministic policy by exhaustive enumeration.
///
/// Among policies with equal value the one with the lexicographically smallest
/// pair of policy indices wins.
pub fn oracle_enumerate(m: &DecMdp) -> Result<(f64, Policy)> {
    m.validate(true)?;
    let [a1, a2] = &m.agents;
    let (n1, n2) = (a1.policy_count(), a2.policy_count());
    let count = n1 * n2;
    if count > ORACLE_CAP {
        return Err(Error::TooLarge { count, cap: ORACLE_CAP });
    }
    let o1 = a1.topological_order("agent 1")?;
    let o2 = a2.topological_order("agent 2")?;
    let joint = sparse_joint(m);
    let (n1, n2) = (n1 as usize, n2 as usize);

    // the agent with fewer policies is tabulated, the other is streamed
    let swap = n2 > n1;
    let (stored_agent, stored_order, stored_n) = if swap { (a1, &o1, n1) } else { (a2, &o2, n2) };
    let stored: Vec<(Vec<f64>, f64)> = (0..stored_n)
        .map(|i| policy_occupancy(stored_agent, stored_order, &decode_policy(stored_agent, i)))
        .collect();
    let (stream_agent, stream_order, stream_n) = if swap { (a2, &o2, n2) } else { (a1, &o1, n1) };

    let mut best: Option<(f64, (usize, usize))> = None;
    for i in 0..stream_n {
        let (u, vu) = policy_occupancy(stream_agent, stream_order, &decode_policy(stream_agent, i));
        for (k, (w, vw)) in stored.iter().enumerate() {
            let (pair, coupling) = if swap {
                ((k, i), joint_value(&joint, w, &u))
            } else {
                ((i, k), joint_value(&joint, &u, w))
            };
            let value = vu + vw + coupling;
            let better = match best {
                None => true,
                Some((b, bp)) => value > b || (value == b && pair < bp),
            };
            if better {
                best = Some((value, pair));
            }
        }
    }
    let (value, (i1, i2)) = best.expect("at least one policy per agent");
    Ok((
        value,
        Policy {
            actions: [decode_policy(a1, i1), decode_policy(a2, i2)],
        },
    ))
}

fn reachable(agent: &Agent) -> Vec<bool> {
    let mut seen: Vec<bool> = agent.initial.iter().map(|&p| p > 0.0).collect();
    let mut stack: Vec<usize> = (0..seen.len()).filter(|&s| seen[s]).collect();
    while let Some(s) = stack.pop() {
        for c in &agent.choices[s] {
            for &(t, p) in &c.next {
                if p > 0.0 && !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    seen
}

fn restrict(agent: &Agent, keep: &[bool]) -> (Agent, Vec<Option<usize>>) {
    let mut map = vec![None; agent.states.len()];
    let mut n = 0;
    for (s, &k) in keep.iter().enumerate() {
        if k {
            map[s] = Some(n);
            n += 1;
        }
    }
    let pick = |s: usize| keep[s];
    let out = Agent {
        states: agent.states.iter().enumerate().filter(|(s, _)| pick(*s)).map(|(_, v)| v.clone()).collect(),
        terminal: agent.terminal.iter().enumerate().filter(|(s, _)| pick(*s)).map(|(_, &v)| v).collect(),
        actions: agent.actions.clone(),
        choices: agent
            .choices
            .iter()
            .enumerate()
            .filter(|(s, _)| pick(*s))
            .map(|(_, cs)| {
                cs.iter()
                    .map(|c| Choice {
                        action: c.action,
                        reward: c.reward,
                        next: c.next.iter().filter_map(|&(t, p)| Some((map[t]?, p))).collect(),
                    })
                    .collect()
            })
            .collect(),
        initial: agent.initial.iter().enumerate().filter(|(s, _)| pick(*s)).map(|(_, &v)| v).collect(),
    };
    (out, map)
}

/// Drops states that no policy reaches from the initial distributions.
pub fn prune_unreachable(m: &DecMdp) -> DecMdp {
    let (a1, map1) = restrict(&m.agents[0], &reachable(&m.agents[0]));
    let (a2, map2) = restrict(&m.agents[1], &reachable(&m.agents[1]));
    let joint = m
        .joint
        .iter()
        .filter_map(|j| {
            Some(JointReward {
                state1: map1[j.state1]?,
                state2: map2[j.state2]?,
                ..*j
            })
        })
        .collect();
    DecMdp {
        agents: [a1, a2],
        joint,
    }
}

/// The two-agent example with deterministic transitions: agent 1 chooses
/// between `s3` (local reward 1) and `s4`, agent 2 between `s5` (local reward
/// 1.5) and `s4`; reaching both `s4` states earns a joint reward of 3.
pub fn example_four() -> DecMdp {
    let det = |action: usize, reward: f64, to: usize| Choice {
        action,
        reward,
        next: vec![(to, 1.0)],
    };
    let names = |n: usize| {
        let mut v: Vec<String> = (1..=n).map(|i| format!("s{i}")).collect();
        v.push("end".into());
        v
    };
    let actions = vec!["a1".to_string(), "a2".to_string()];
    let agent1 = Agent {
        states: names(4),
        terminal: vec![false, false, false, false, true],
        actions: actions.clone(),
        choices: vec![
            vec![det(0, 0.0, 1)],
            vec![det(0, 0.0, 2), det(1, 0.0, 3)],
            vec![det(0, 1.0, 4)],
            vec![det(0, 0.0, 4)],
            vec![],
        ],
        initial: vec![1.0, 0.0, 0.0, 0.0, 0.0],
    };
    let agent2 = Agent {
        states: names(5),
        terminal: vec![false, false, false, false, false, true],
        actions,
        choices: vec![
            vec![det(0, 0.0, 1), det(1, 0.0, 3)],
            vec![det(0, 0.0, 2)],
            vec![det(0, 0.0, 4)],
            vec![det(0, 0.0, 5)],
            vec![det(0, 1.5, 5)],
            vec![],
        ],
        initial: vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    };
    DecMdp {
        agents: [agent1, agent2],
        joint: vec![JointReward {
            state1: 3,
            action1: 0,
            state2: 3,
            action2: 0,
            value: 3.0,
        }],
    }
}
