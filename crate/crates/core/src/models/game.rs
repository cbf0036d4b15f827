//! Two-player games where each player solves a linear program
//! `max rᵢᵀv + xᵀCᵢy` over `Aᵢv = bᵢ, v ≥ 0` given the other player's choice.
//!
//! With duals `λᵢ`, complementary slackness gives the program
//!
//! ```text
//! maximize   r₁ᵀx + r₂ᵀy + xᵀ(C₁ + C₂)y − b₁ᵀλ₁ − b₂ᵀλ₂
//! subject to A₁x = b₁,  r₂ + C₂ᵀx − A₂ᵀλ₂ ≤ 0,  |λ₂| ≤ Λ
//!            A₂y = b₂,  r₁ + C₁y − A₁ᵀλ₁ ≤ 0,  |λ₁| ≤ Λ
//! ```
//!
//! whose value is at most zero and equals zero exactly at equilibria. Each
//! dual is grouped with the variables of the constraint it appears in, so side
//! 1 holds `(x, λ₂)` and side 2 holds `(y, λ₁)`.

use crate::bilinear::{Assignment, BilinearProgram, ConstraintSense, Side};
use crate::error::{Error, Result};
use crate::linalg::{dot, DenseMatrix};
use crate::lp::{solve_lp_with_free_vars, LpProblem, LpStatus, Sense};

#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    /// `|x| × |y|` payoff of player 1.
    pub c1: DenseMatrix,
    /// `|x| × |y|` payoff of player 2.
    pub c2: DenseMatrix,
    pub a1: DenseMatrix,
    pub b1: Vec<f64>,
    pub a2: DenseMatrix,
    pub b2: Vec<f64>,
    /// Box `|λ| ≤ Λ` on the duals; derived from the payoffs when absent.
    pub dual_bound: Option<f64>,
}

impl GameSpec {
    /// Normal-form game with mixed strategies on probability simplices.
    pub fn bimatrix(c1: DenseMatrix, c2: DenseMatrix) -> Self {
        let (m, n) = c1.shape();
        Self {
            r1: vec![0.0; m],
            r2: vec![0.0; n],
            c1,
            c2,
            a1: DenseMatrix::from_rows(&[vec![1.0; m]]),
            b1: vec![1.0],
            a2: DenseMatrix::from_rows(&[vec![1.0; n]]),
            b2: vec![1.0],
            dual_bound: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let (m, n) = self.c1.shape();
        let ok = self.c2.shape() == (m, n)
            && self.r1.len() == m
            && self.r2.len() == n
            && self.a1.cols() == m
            && self.a2.cols() == n
            && self.a1.rows() == self.b1.len()
            && self.a2.rows() == self.b2.len();
        if !ok {
            return Err(Error::DimensionMismatch("game payoffs and constraints disagree".into()));
        }
        if self.dual_bound.is_some_and(|l| !(l > 0.0)) {
            return Err(Error::InvalidArgument("dual bound must be positive".into()));
        }
        Ok(())
    }

    /// The dual bound in use.
    pub fn effective_dual_bound(&self) -> Result<f64> {
        if let Some(l) = self.dual_bound {
            return Ok(l);
        }
        let mass = |a: &DenseMatrix, b: &[f64], inf: Error, unb: Error| -> Result<f64> {
            let lp = LpProblem::new(Sense::Maximize, vec![1.0; a.cols()], a.clone(), b.to_vec());
            let s = solve_lp_with_free_vars(&lp, &[]);
            match s.status {
                LpStatus::Optimal => Ok(s.objective),
                LpStatus::Infeasible => Err(inf),
                LpStatus::Unbounded => Err(unb),
                LpStatus::IterationLimit => Err(Error::LpIterationLimit),
            }
        };
        let mx = mass(&self.a1, &self.b1, Error::XInfeasible, Error::XUnbounded)?;
        let my = mass(&self.a2, &self.b2, Error::YInfeasible, Error::YUnbounded)?;
        let r = self.r1.iter().chain(&self.r2).fold(0.0_f64, |a, v| a.max(v.abs()));
        let c = self.c1.max_abs().max(self.c2.max_abs());
        Ok(1.0 + r + c * mx.max(my))
    }
}

/// One side: primal rows `A v = b`, dual rows `r_o + C_o v − A_oᵀλ + σ = 0`
/// for the other player, and the box on `λ` with slacks `μ`, `ν`.
fn game_side(a: &DenseMatrix, b: &[f64], r: &[f64], c_other_t: &DenseMatrix, r_other: &[f64], a_other: &DenseMatrix, b_other: &[f64], bound: f64) -> Side {
    let n = a.cols();
    let m = a.rows();
    let k = c_other_t.rows();
    let md = a_other.rows();
    let n_extra = md + k + 2 * md;
    let rows = m + k + 2 * md;
    let mut av = DenseMatrix::zeros(rows, n);
    let mut be = DenseMatrix::zeros(rows, n_extra);
    let mut rhs = Vec::with_capacity(rows);
    for i in 0..m {
        av.row_mut(i).copy_from_slice(a.row(i));
        rhs.push(b[i]);
    }
    for j in 0..k {
        let row = m + j;
        av.row_mut(row).copy_from_slice(c_other_t.row(j));
        for l in 0..md {
            be[(row, l)] = -a_other[(l, j)];
        }
        be[(row, md + j)] = 1.0;
        rhs.push(-r_other[j]);
    }
    for l in 0..md {
        let up = m + k + l;
        be[(up, l)] = 1.0;
        be[(up, md + k + l)] = 1.0;
        rhs.push(bound);
    }
    for l in 0..md {
        let down = m + k + md + l;
        be[(down, l)] = -1.0;
        be[(down, md + k + md + l)] = 1.0;
        rhs.push(bound);
    }
    let mut s = vec![0.0; n_extra];
    for l in 0..md {
        s[l] = -b_other[l];
    }
    Side::new(av, rhs, r.to_vec(), ConstraintSense::Equality)
        .with_extra(be, s)
        .with_free(vec![], (0..md).collect())
}

/// Equilibrium program of the game; its optimal value is 0 at a Nash equilibrium.
pub fn compile_game(g: &GameSpec) -> Result<BilinearProgram> {
    g.validate()?;
    let bound = g.effective_dual_bound()?;
    let side1 = game_side(&g.a1, &g.b1, &g.r1, &g.c2.transpose(), &g.r2, &g.a2, &g.b2, bound);
    let side2 = game_side(&g.a2, &g.b2, &g.r2, &g.c1, &g.r1, &g.a1, &g.b1, bound);
    BilinearProgram::new(side1, side2, g.c1.add(&g.c2))
}

fn best_response_dual(a: &DenseMatrix, b: &[f64], q: &[f64]) -> Result<Vec<f64>> {
    // min bᵀλ  s.t.  −Aᵀλ ≤ −q
    let m = a.rows();
    let lp = LpProblem::new(Sense::Minimize, b.to_vec(), DenseMatrix::zeros(0, m), vec![])
        .with_inequalities(a.transpose().scale(-1.0), q.iter().map(|v| -v).collect());
    let s = solve_lp_with_free_vars(&lp, &(0..m).collect::<Vec<_>>());
    match s.status {
        LpStatus::Optimal => Ok(s.x),
        LpStatus::Infeasible => Err(Error::XUnbounded),
        LpStatus::Unbounded => Err(Error::XInfeasible),
        LpStatus::IterationLimit => Err(Error::LpIterationLimit),
    }
}

fn side_extras(a_other: &DenseMatrix, c_rows: &DenseMatrix, r_other: &[f64], v: &[f64], lambda: &[f64], bound: f64) -> Vec<f64> {
    let cv = c_rows.mul_vec(v);
    let at_l = a_other.tr_mul_vec(lambda);
    let mut e = lambda.to_vec();
    e.extend((0..cv.len()).map(|j| (at_l[j] - r_other[j] - cv[j]).max(0.0)));
    e.extend(lambda.iter().map(|l| bound - l));
    e.extend(lambda.iter().map(|l| bound + l));
    e
}

/// Assignment of the compiled program at strategies `(x, y)` with the duals of
/// both best-response problems.
pub fn game_assignment(g: &GameSpec, x: &[f64], y: &[f64]) -> Result<Assignment> {
    g.validate()?;
    let bound = g.effective_dual_bound()?;
    let q1: Vec<f64> = g.c1.mul_vec(y).iter().zip(&g.r1).map(|(a, b)| a + b).collect();
    let q2: Vec<f64> = g.c2.tr_mul_vec(x).iter().zip(&g.r2).map(|(a, b)| a + b).collect();
    let l1 = best_response_dual(&g.a1, &g.b1, &q1)?;
    let l2 = best_response_dual(&g.a2, &g.b2, &q2)?;
    Ok(Assignment {
        w: side_extras(&g.a2, &g.c2.transpose(), &g.r2, x, &l2, bound),
        x: x.to_vec(),
        y: y.to_vec(),
        z: side_extras(&g.a1, &g.c1, &g.r1, y, &l1, bound),
    })
}

/// Total gain both players could get by deviating; zero exactly at equilibria.
pub fn equilibrium_residual(g: &GameSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    g.validate()?;
    let q1: Vec<f64> = g.c1.mul_vec(y).iter().zip(&g.r1).map(|(a, b)| a + b).collect();
    let q2: Vec<f64> = g.c2.tr_mul_vec(x).iter().zip(&g.r2).map(|(a, b)| a + b).collect();
    let l1 = best_response_dual(&g.a1, &g.b1, &q1)?;
    let l2 = best_response_dual(&g.a2, &g.b2, &q2)?;
    Ok((dot(&g.b1, &l1) - dot(&q1, x)) + (dot(&g.b2, &l2) - dot(&q2, y)))
}
