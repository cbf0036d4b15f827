//! JSON problem and solution documents.
//!
//! Matrices are sparse `{rows, cols, triplets}` listings, vectors are dense
//! arrays and DEC-MDP states and actions are referred to by name. Writing a
//! parsed document reproduces it byte for byte when it was produced by
//! [`write_document`].

use std::collections::HashMap;

use bilinear_core::bilinear::{Assignment, BilinearProgram, ConstraintSense, Side};
use bilinear_core::linalg::DenseMatrix;
use bilinear_core::models::{Agent, Choice, DecMdp, GameSpec, JointReward, Policy};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, DocumentError> {
    Err(DocumentError::Invalid(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    /// `[row, col, value]`.
    pub triplets: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    pub fn from_dense(m: &DenseMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            triplets: m.triplets(),
        }
    }

    pub fn to_dense(&self) -> Result<DenseMatrix, DocumentError> {
        let mut m = DenseMatrix::zeros(self.rows, self.cols);
        for &(i, j, v) in &self.triplets {
            if i >= self.rows || j >= self.cols {
                return invalid(format!("triplet ({i}, {j}) outside a {}x{} matrix", self.rows, self.cols));
            }
            m[(i, j)] += v;
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SenseDoc {
    Equality,
    Inequality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SideDoc {
    pub a: SparseMatrix,
    pub b: SparseMatrix,
    pub rhs: Vec<f64>,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub sense: SenseDoc,
    #[serde(default)]
    pub free_bilinear: Vec<usize>,
    #[serde(default)]
    pub free_extra: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BilinearDoc {
    pub side1: SideDoc,
    pub side2: SideDoc,
    pub c: SparseMatrix,
    #[serde(default)]
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentDoc {
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub terminal: Vec<String>,
    /// `[state, probability]`.
    pub initial: Vec<(String, f64)>,
    /// `[state, action, next state, probability]`; an action is enabled in a
    /// state exactly when it has transitions there.
    pub transitions: Vec<(String, String, String, f64)>,
    /// `[state, action, reward]`; missing pairs earn nothing.
    #[serde(default)]
    pub rewards: Vec<(String, String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecMdpDoc {
    pub agents: [AgentDoc; 2],
    /// `[state 1, action 1, state 2, action 2, reward]`.
    #[serde(default)]
    pub joint: Vec<(String, String, String, String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDoc {
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    pub c1: SparseMatrix,
    pub c2: SparseMatrix,
    pub a1: SparseMatrix,
    pub b1: Vec<f64>,
    pub a2: SparseMatrix,
    pub b2: Vec<f64>,
    #[serde(default)]
    pub dual_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProblemDocument {
    Bilinear(BilinearDoc),
    Decmdp(DecMdpDoc),
    Game(GameDoc),
}

pub fn read_document(text: &str) -> Result<ProblemDocument, DocumentError> {
    Ok(serde_json::from_str(text)?)
}

/// Canonical form: two-space indentation, arrays of scalars on one line and a
/// trailing newline.
pub fn write_document(doc: &ProblemDocument) -> String {
    canonical(&serde_json::to_value(doc).expect("documents always serialize"))
}

fn canonical(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                out.push_str(&item.to_string());
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, item, depth + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            let mut entries: Vec<_> = map.iter().collect();
            entries.sort_by_key(|(key, _)| key.as_str() != "kind");
            for (k, (key, item)) in entries.into_iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, depth + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

impl SideDoc {
    pub fn from_side(side: &Side) -> Self {
        Self {
            a: SparseMatrix::from_dense(&side.a),
            b: SparseMatrix::from_dense(&side.b),
            rhs: side.rhs.clone(),
            r: side.r.clone(),
            s: side.s.clone(),
            sense: match side.sense {
                ConstraintSense::Equality => SenseDoc::Equality,
                ConstraintSense::Inequality => SenseDoc::Inequality,
            },
            free_bilinear: side.free_bilinear.clone(),
            free_extra: side.free_extra.clone(),
        }
    }

    pub fn to_side(&self) -> Result<Side, DocumentError> {
        let sense = match self.sense {
            SenseDoc::Equality => ConstraintSense::Equality,
            SenseDoc::Inequality => ConstraintSense::Inequality,
        };
        Ok(Side::new(self.a.to_dense()?, self.rhs.clone(), self.r.clone(), sense)
            .with_extra(self.b.to_dense()?, self.s.clone())
            .with_free(self.free_bilinear.clone(), self.free_extra.clone()))
    }
}

impl BilinearDoc {
    pub fn from_program(p: &BilinearProgram) -> Self {
        Self {
            side1: SideDoc::from_side(&p.side1),
            side2: SideDoc::from_side(&p.side2),
            c: SparseMatrix::from_dense(&p.c),
            offset: p.offset,
        }
    }

    pub fn to_program(&self) -> Result<BilinearProgram, DocumentError> {
        let mut p = BilinearProgram::new(self.side1.to_side()?, self.side2.to_side()?, self.c.to_dense()?)
            .map_err(|e| DocumentError::Invalid(e.to_string()))?;
        p.offset = self.offset;
        Ok(p)
    }
}

fn lookup<'a>(names: &'a [String], what: &str) -> impl Fn(&str) -> Result<usize, DocumentError> + 'a {
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let what = what.to_string();
    move |name: &str| match index.get(name) {
        Some(&i) => Ok(i),
        None => invalid(format!("unknown {what} {name:?}")),
    }
}

fn unique(names: &[String], what: &str) -> Result<(), DocumentError> {
    let mut seen = std::collections::HashSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return invalid(format!("duplicate {what} {n:?}"));
        }
    }
    Ok(())
}

impl AgentDoc {
    pub fn from_agent(agent: &Agent) -> Self {
        let mut transitions = Vec::new();
        let mut rewards = Vec::new();
        for (s, cs) in agent.choices.iter().enumerate() {
            for c in cs {
                let action = &agent.actions[c.action];
                for &(t, p) in &c.next {
                    transitions.push((agent.states[s].clone(), action.clone(), agent.states[t].clone(), p));
                }
                if c.reward != 0.0 {
                    rewards.push((agent.states[s].clone(), action.clone(), c.reward));
                }
            }
        }
        Self {
            states: agent.states.clone(),
            actions: agent.actions.clone(),
            terminal: (0..agent.states.len())
                .filter(|&s| agent.terminal[s])
                .map(|s| agent.states[s].clone())
                .collect(),
            initial: (0..agent.states.len())
                .filter(|&s| agent.initial[s] != 0.0)
                .map(|s| (agent.states[s].clone(), agent.initial[s]))
                .collect(),
            transitions,
            rewards,
        }
    }

    pub fn to_agent(&self) -> Result<Agent, DocumentError> {
        unique(&self.states, "state")?;
        unique(&self.actions, "action")?;
        let state = lookup(&self.states, "state");
        let action = lookup(&self.actions, "action");
        let n = self.states.len();
        let mut terminal = vec![false; n];
        for name in &self.terminal {
            terminal[state(name)?] = true;
        }
        let mut initial = vec![0.0; n];
        for (name, p) in &self.initial {
            initial[state(name)?] += p;
        }
        // choices[s][a] = (reward, transitions)
        let mut table: Vec<Vec<Option<(f64, Vec<(usize, f64)>)>>> = vec![vec![None; self.actions.len()]; n];
        for (s, a, t, p) in &self.transitions {
            let (s, a, t) = (state(s)?, action(a)?, state(t)?);
            let entry = table[s][a].get_or_insert_with(|| (0.0, Vec::new()));
            match entry.1.iter_mut().find(|e| e.0 == t) {
                Some(e) => e.1 += p,
                None => entry.1.push((t, *p)),
            }
        }
        for (s, a, r) in &self.rewards {
            let (si, ai) = (state(s)?, action(a)?);
            match table[si][ai].as_mut() {
                Some(entry) => entry.0 += r,
                None => return invalid(format!("reward on disabled pair ({s}, {a})")),
            }
        }
        let choices = table
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .enumerate()
                    .filter_map(|(a, e)| {
                        e.map(|(reward, mut next)| {
                            next.sort_by_key(|x| x.0);
                            Choice { action: a, reward, next }
                        })
                    })
                    .collect()
            })
            .collect();
        Ok(Agent {
            states: self.states.clone(),
            terminal,
            actions: self.actions.clone(),
            choices,
            initial,
        })
    }
}

impl DecMdpDoc {
    pub fn from_model(m: &DecMdp) -> Self {
        let [a1, a2] = &m.agents;
        Self {
            agents: [AgentDoc::from_agent(a1), AgentDoc::from_agent(a2)],
            joint: m
                .joint
                .iter()
                .map(|j| {
                    (
                        a1.states[j.state1].clone(),
                        a1.actions[j.action1].clone(),
                        a2.states[j.state2].clone(),
                        a2.actions[j.action2].clone(),
                        j.value,
                    )
                })
                .collect(),
        }
    }

    pub fn to_model(&self) -> Result<DecMdp, DocumentError> {
        let a1 = self.agents[0].to_agent()?;
        let a2 = self.agents[1].to_agent()?;
        let mut joint = Vec::with_capacity(self.joint.len());
        {
            let (s1, x1) = (lookup(&a1.states, "state"), lookup(&a1.actions, "action"));
            let (s2, x2) = (lookup(&a2.states, "state"), lookup(&a2.actions, "action"));
            for (p, a, q, b, value) in &self.joint {
                joint.push(JointReward {
                    state1: s1(p)?,
                    action1: x1(a)?,
                    state2: s2(q)?,
                    action2: x2(b)?,
                    value: *value,
                });
            }
        }
        Ok(DecMdp {
            agents: [a1, a2],
            joint,
        })
    }
}

impl GameDoc {
    pub fn from_spec(g: &GameSpec) -> Self {
        Self {
            r1: g.r1.clone(),
            r2: g.r2.clone(),
            c1: SparseMatrix::from_dense(&g.c1),
            c2: SparseMatrix::from_dense(&g.c2),
            a1: SparseMatrix::from_dense(&g.a1),
            b1: g.b1.clone(),
            a2: SparseMatrix::from_dense(&g.a2),
            b2: g.b2.clone(),
            dual_bound: g.dual_bound,
        }
    }

    pub fn to_spec(&self) -> Result<GameSpec, DocumentError> {
        Ok(GameSpec {
            r1: self.r1.clone(),
            r2: self.r2.clone(),
            c1: self.c1.to_dense()?,
            c2: self.c2.to_dense()?,
            a1: self.a1.to_dense()?,
            b1: self.b1.clone(),
            a2: self.a2.to_dense()?,
            b2: self.b2.clone(),
            dual_bound: self.dual_bound,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentDoc {
    pub w: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl From<&Assignment> for AssignmentDoc {
    fn from(a: &Assignment) -> Self {
        Self {
            w: a.w.clone(),
            x: a.x.clone(),
            y: a.y.clone(),
            z: a.z.clone(),
        }
    }
}

/// Per agent, `[state, action]` for every state with an assigned action.
pub type PolicyDoc = [Vec<(String, String)>; 2];

pub fn policy_doc(m: &DecMdp, policy: &Policy) -> PolicyDoc {
    let side = |i: usize| -> Vec<(String, String)> {
        let agent = &m.agents[i];
        policy.actions[i]
            .iter()
            .enumerate()
            .filter_map(|(s, a)| a.map(|a| (agent.states[s].clone(), agent.actions[a].clone())))
            .collect()
    };
    [side(0), side(1)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDocument {
    pub value: f64,
    /// The optimum is at most `value + bound`.
    pub bound: f64,
    pub iterations: usize,
    pub converged: bool,
    pub kept_dims: usize,
    pub reduction_error: f64,
    pub assignment: AssignmentDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicyDoc>,
}

pub fn write_solution(doc: &SolutionDocument) -> String {
    canonical(&serde_json::to_value(doc).expect("solutions always serialize"))
}

pub fn read_solution(text: &str) -> Result<SolutionDocument, DocumentError> {
    Ok(serde_json::from_str(text)?)
}
