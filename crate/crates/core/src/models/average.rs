//! Average-reward models without terminal states.
//!
//! Side `i` carries the limiting state-action frequencies `pᵢ` as bilinear
//! variables and the transient frequencies `qᵢ` as extra variables:
//!
//! ```text
//! Σₐ p(s′, a) − Σₛₐ p(s, a) P(s, a, s′) = 0
//! Σₐ p(s′, a) + Σₐ q(s′, a) − Σₛₐ q(s, a) P(s, a, s′) = α(s′)
//! ```
//!
//! The objective is the gain `p₁ᵀRp₂`.

use super::decmdp::joint_matrix;
use super::{Agent, DecMdp};
use crate::bilinear::{Assignment, BilinearProgram, ConstraintSense, Side};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

const MASS_TOL: f64 = 1e-9;

/// Per agent and state, a distribution over all actions (zero where disabled).
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticPolicy {
    pub probabilities: [Vec<Vec<f64>>; 2],
}

fn stationary_side(agent: &Agent) -> Side {
    let n = agent.states.len();
    let vars = agent.variables();
    let nv = vars.len();
    let mut flow = DenseMatrix::zeros(n, nv);
    let mut v = 0;
    for (s, cs) in agent.choices.iter().enumerate() {
        for c in cs {
            flow[(s, v)] += 1.0;
            for &(t, p) in &c.next {
                flow[(t, v)] -= p;
            }
            v += 1;
        }
    }
    let mut visits = DenseMatrix::zeros(n, nv);
    for (v, &(s, _)) in vars.iter().enumerate() {
        visits[(s, v)] = 1.0;
    }
    let a = flow.vstack(&visits);
    let b = DenseMatrix::zeros(n, nv).vstack(&flow);
    let mut rhs = vec![0.0; n];
    rhs.extend_from_slice(&agent.initial);
    Side::new(a, rhs, vec![0.0; nv], ConstraintSense::Equality).with_extra(b, vec![0.0; nv])
}

/// Gain-maximization program; requires no terminal states and zero local rewards.
pub fn compile_average_reward(m: &DecMdp) -> Result<BilinearProgram> {
    m.validate(false)?;
    for (i, agent) in m.agents.iter().enumerate() {
        for (s, cs) in agent.choices.iter().enumerate() {
            if cs.iter().any(|c| c.reward != 0.0) {
                return Err(Error::InvalidModel(format!(
                    "agent {}: state {} has a nonzero local reward",
                    i + 1,
                    agent.states[s]
                )));
            }
        }
    }
    BilinearProgram::new(stationary_side(&m.agents[0]), stationary_side(&m.agents[1]), joint_matrix(m))
}

fn ratios(agent: &Agent, p: &[f64], q: &[f64]) -> Vec<Vec<f64>> {
    let mut v = 0;
    agent
        .choices
        .iter()
        .map(|cs| {
            let range = v..v + cs.len();
            v += cs.len();
            let mut out = vec![0.0; agent.actions.len()];
            let mass = |w: &[f64]| w[range.clone()].iter().map(|x| x.max(0.0)).sum::<f64>();
            let source = if mass(p) > MASS_TOL {
                Some(p)
            } else if mass(q) > MASS_TOL {
                Some(q)
            } else {
                None
            };
            match source {
                Some(w) => {
                    let total = mass(w);
                    for (c, x) in cs.iter().zip(&w[range.clone()]) {
                        out[c.action] = x.max(0.0) / total;
                    }
                }
                None => {
                    for c in cs {
                        out[c.action] = 1.0 / cs.len() as f64;
                    }
                }
            }
            out
        })
        .collect()
}

/// `p`-ratios in recurrent states, `q`-ratios in transient ones, uniform elsewhere.
pub fn extract_stochastic_policy(m: &DecMdp, a: &Assignment) -> Result<StochasticPolicy> {
    let [a1, a2] = &m.agents;
    let (n1, n2) = (a1.n_variables(), a2.n_variables());
    if a.x.len() != n1 || a.w.len() != n1 || a.y.len() != n2 || a.z.len() != n2 {
        return Err(Error::DimensionMismatch("assignment does not match the model".into()));
    }
    Ok(StochasticPolicy {
        probabilities: [ratios(a1, &a.x, &a.w), ratios(a2, &a.y, &a.z)],
    })
}
