//! Random small instances for property checks and benchmarks.

use rand::Rng;

use crate::bilinear::{BilinearProgram, ConstraintSense, Side};
use crate::linalg::DenseMatrix;
use crate::models::{Agent, Choice, DecMdp, JointReward};

/// Variable and row counts of a random program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub x: usize,
    pub w: usize,
    pub y: usize,
    pub z: usize,
    /// Constraint rows per side, besides the bounding row.
    pub rows: usize,
}

/// Bounded inequality side `A v + B e ≤ b`, `v, e ≥ 0`, with nonnegative
/// coefficients and a final row bounding the sum of all variables.
pub fn random_side<R: Rng>(rng: &mut R, n_bilinear: usize, n_extra: usize, rows: usize) -> Side {
    let n = n_bilinear + n_extra;
    let mut m = DenseMatrix::zeros(rows + 1, n);
    let mut rhs = Vec::with_capacity(rows + 1);
    for i in 0..rows {
        for j in 0..n {
            if rng.random_bool(0.7) {
                m[(i, j)] = rng.random_range(0.0..1.0);
            }
        }
        rhs.push(rng.random_range(0.5..2.0));
    }
    for j in 0..n {
        m[(rows, j)] = rng.random_range(0.5..1.5);
    }
    rhs.push(rng.random_range(1.0..3.0));
    let cols: Vec<usize> = (0..n_bilinear).collect();
    let extra: Vec<usize> = (n_bilinear..n).collect();
    let r = (0..n_bilinear).map(|_| rng.random_range(-1.0..1.0)).collect();
    let s = (0..n_extra).map(|_| rng.random_range(-1.0..1.0)).collect();
    Side::new(m.select_columns(&cols), rhs, r, ConstraintSense::Inequality).with_extra(m.select_columns(&extra), s)
}

pub fn random_program<R: Rng>(rng: &mut R, shape: Shape) -> BilinearProgram {
    let side1 = random_side(rng, shape.x, shape.w, shape.rows);
    let side2 = random_side(rng, shape.y, shape.z, shape.rows);
    let mut c = DenseMatrix::zeros(shape.x, shape.y);
    for i in 0..shape.x {
        for j in 0..shape.y {
            c[(i, j)] = rng.random_range(-2.0..2.0);
        }
    }
    BilinearProgram::new(side1, side2, c).expect("shapes agree")
}

/// Acyclic agent with `states` non-terminal states and one terminal state.
///
/// Every state enables between one and `max_actions` actions, each moving to
/// one or two later states.
pub fn random_agent<R: Rng>(rng: &mut R, states: usize, max_actions: usize) -> Agent {
    let done = states;
    let mut choices = Vec::with_capacity(states + 1);
    for s in 0..states {
        let count = rng.random_range(1..=max_actions);
        let mut cs = Vec::with_capacity(count);
        for action in 0..count {
            let a = rng.random_range(s + 1..=done);
            let b = rng.random_range(s + 1..=done);
            let p: f64 = if a == b { 1.0 } else { rng.random_range(0.1..0.9) };
            let mut next = vec![(a, p)];
            if a != b {
                next.push((b, 1.0 - p));
            }
            next.sort_by_key(|e| e.0);
            cs.push(Choice {
                action,
                reward: if rng.random_bool(0.5) { rng.random_range(0.0..1.0) } else { 0.0 },
                next,
            });
        }
        choices.push(cs);
    }
    choices.push(Vec::new());
    let mut terminal = vec![false; states + 1];
    terminal[done] = true;
    let mut initial = vec![0.0; states + 1];
    initial[0] = 1.0;
    Agent {
        states: (0..states).map(|s| format!("s{s}")).chain(["end".to_string()]).collect(),
        terminal,
        actions: (0..max_actions).map(|a| format!("a{a}")).collect(),
        choices,
        initial,
    }
}

/// Two random agents with up to `max_states` non-terminal states each and a
/// few joint rewards on random state-action pairs.
pub fn random_decmdp<R: Rng>(rng: &mut R, max_states: usize, max_actions: usize) -> DecMdp {
    let n1 = rng.random_range(1..=max_states);
    let a1 = random_agent(rng, n1, max_actions);
    let n2 = rng.random_range(1..=max_states);
    let a2 = random_agent(rng, n2, max_actions);
    let vars1 = a1.variables();
    let vars2 = a2.variables();
    let count = rng.random_range(1..=4);
    let joint = (0..count)
        .map(|_| {
            let (state1, action1) = vars1[rng.random_range(0..vars1.len())];
            let (state2, action2) = vars2[rng.random_range(0..vars2.len())];
            JointReward {
                state1,
                action1,
                state2,
                action2,
                value: rng.random_range(-1.0..2.0),
            }
        })
        .collect();
    DecMdp {
        agents: [a1, a2],
        joint,
    }
}
