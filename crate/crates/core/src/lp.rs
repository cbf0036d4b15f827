//! Dense two-phase primal simplex with dual extraction.
//!
//! Problems are stated as `max|min cᵀx` subject to `A_eq x = b_eq`,
//! `A_ub x ≤ b_ub` and `x ≥ 0`, except for variables explicitly declared free.
//! Inequality rows receive slack columns; rows with a negative right-hand side
//! are negated so every row starts with a nonnegative rhs. The starting basis
//! uses slacks where possible and artificial columns elsewhere.

use crate::linalg::{dot, DenseMatrix};

/// Primal feasibility / pricing tolerance.
pub const FEAS_TOL: f64 = 1e-9;
/// Phase-1 residual above which a problem is declared infeasible (relative to `max(1, ‖b‖∞)`).
pub const INFEAS_TOL: f64 = 1e-7;
const PIVOT_EPS: f64 = 1e-9;
const DROP_EPS: f64 = 1e-13;
const REFRESH_EVERY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Pivot budget exhausted; only reachable on badly conditioned input.
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub a_eq: DenseMatrix,
    pub b_eq: Vec<f64>,
    pub a_ub: DenseMatrix,
    pub b_ub: Vec<f64>,
}

impl LpProblem {
    /// Equality-form problem `A x = b`.
    pub fn new(sense: Sense, objective: Vec<f64>, a_eq: DenseMatrix, b_eq: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            sense,
            objective,
            a_eq,
            b_eq,
            a_ub: DenseMatrix::zeros(0, n),
            b_ub: Vec::new(),
        }
    }

    pub fn maximize(objective: Vec<f64>, a_eq: DenseMatrix, b_eq: Vec<f64>) -> Self {
        Self::new(Sense::Maximize, objective, a_eq, b_eq)
    }

    pub fn minimize(objective: Vec<f64>, a_eq: DenseMatrix, b_eq: Vec<f64>) -> Self {
        Self::new(Sense::Minimize, objective, a_eq, b_eq)
    }

    /// Adds rows `G x ≤ h`.
    pub fn with_inequalities(mut self, a_ub: DenseMatrix, b_ub: Vec<f64>) -> Self {
        self.a_ub = a_ub;
        self.b_ub = b_ub;
        self
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn check_dims(&self) {
        let n = self.num_vars();
        assert_eq!(self.a_eq.cols(), n, "equality matrix column count");
        assert_eq!(self.a_eq.rows(), self.b_eq.len(), "equality rhs length");
        assert_eq!(self.a_ub.cols(), n, "inequality matrix column count");
        assert_eq!(self.a_ub.rows(), self.b_ub.len(), "inequality rhs length");
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal values in the caller's variable order (empty unless optimal).
    pub x: Vec<f64>,
    /// One dual per equality row; `objective = b_eqᵀ duals_eq + b_ubᵀ duals_ub` at optimum.
    pub duals_eq: Vec<f64>,
    /// One dual per inequality row (≥ 0 for maximization, ≤ 0 for minimization).
    pub duals_ub: Vec<f64>,
    pub objective: f64,
}

impl LpSolution {
    fn failed(status: LpStatus, sense: Sense) -> Self {
        let objective = match (status, sense) {
            (LpStatus::Unbounded, Sense::Maximize) => f64::INFINITY,
            (LpStatus::Unbounded, Sense::Minimize) => f64::NEG_INFINITY,
            _ => f64::NAN,
        };
        Self {
            status,
            x: Vec::new(),
            duals_eq: Vec::new(),
            duals_ub: Vec::new(),
            objective,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Solves `p` with all variables nonnegative.
pub fn solve_lp(p: &LpProblem) -> LpSolution {
    solve_lp_with_free_vars(p, &[])
}

/// Solves `p` with the listed variables unrestricted in sign.
pub fn solve_lp_with_free_vars(p: &LpProblem, free: &[usize]) -> LpSolution {
    p.check_dims();
    let n = p.num_vars();
    let mut is_free = vec![false; n];
    for &j in free {
        assert!(j < n, "free index {j} out of range");
        is_free[j] = true;
    }
    let free_list: Vec<usize> = (0..n).filter(|&j| is_free[j]).collect();
    Tableau::build(p, &free_list).run(p, &free_list)
}

struct Tableau {
    m: usize,
    /// Structural + slack + artificial columns (rhs excluded).
    ncols: usize,
    width: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
    /// Column that was the unit vector for each row at start.
    identity_col: Vec<usize>,
    row_sign: Vec<f64>,
    n_struct: usize,
    first_artificial: usize,
    cost: Vec<f64>,
    b_scale: f64,
    max_iters: usize,
}

impl Tableau {
    fn build(p: &LpProblem, free: &[usize]) -> Self {
        let n = p.num_vars();
        let n_struct = n + free.len();
        let m_eq = p.a_eq.rows();
        let m_ub = p.a_ub.rows();
        let m = m_eq + m_ub;

        let mut row_sign = vec![1.0; m];
        for i in 0..m {
            let b = if i < m_eq { p.b_eq[i] } else { p.b_ub[i - m_eq] };
            if b < 0.0 {
                row_sign[i] = -1.0;
            }
        }
        // slack of an inequality row can seed the basis only if its coefficient stays +1
        let n_art = (0..m).filter(|&i| i < m_eq || row_sign[i] < 0.0).count();
        let first_artificial = n_struct + m_ub;
        let ncols = first_artificial + n_art;
        let width = ncols + 1;
        let mut t = vec![0.0; m * width];
        let mut basis = vec![0; m];
        let mut identity_col = vec![0; m];
        let mut next_art = first_artificial;
        let mut b_scale: f64 = 1.0;

        for i in 0..m {
            let s = row_sign[i];
            let (row, b) = if i < m_eq {
                (p.a_eq.row(i), p.b_eq[i])
            } else {
                (p.a_ub.row(i - m_eq), p.b_ub[i - m_eq])
            };
            b_scale = b_scale.max(b.abs());
            let dst = &mut t[i * width..(i + 1) * width];
            for (j, &a) in row.iter().enumerate() {
                dst[j] = s * a;
            }
            for (k, &j) in free.iter().enumerate() {
                dst[n + k] = -s * row[j];
            }
            dst[ncols] = s * b;
            if i >= m_eq {
                let slack = n_struct + (i - m_eq);
                dst[slack] = s;
                if s > 0.0 {
                    basis[i] = slack;
                    identity_col[i] = slack;
                    continue;
                }
            }
            dst[next_art] = 1.0;
            basis[i] = next_art;
            identity_col[i] = next_art;
            next_art += 1;
        }

        let mut cost = vec![0.0; ncols];
        let dir = if p.sense == Sense::Maximize { 1.0 } else { -1.0 };
        for j in 0..n {
            cost[j] = dir * p.objective[j];
        }
        for (k, &j) in free.iter().enumerate() {
            cost[n + k] = -dir * p.objective[j];
        }

        Self {
            m,
            ncols,
            width,
            t,
            basis,
            identity_col,
            row_sign,
            n_struct,
            first_artificial,
            cost,
            b_scale,
            max_iters: 50_000 + 50 * (m + ncols),
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.t[i * self.width + self.ncols]
    }

    /// Reduced costs `d_j = c_j − c_Bᵀ B⁻¹ A_j` and current objective `c_Bᵀ B⁻¹ b`.
    fn reduced_costs(&self, c: &[f64]) -> (Vec<f64>, f64) {
        let mut d = c.to_vec();
        d.push(0.0);
        for i in 0..self.m {
            let cb = c[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            let row = &self.t[i * self.width..(i + 1) * self.width];
            for (dj, &a) in d.iter_mut().zip(row) {
                *dj -= cb * a;
            }
        }
        let z = -d[self.ncols];
        d.truncate(self.ncols);
        (d, z)
    }

    fn pivot(&mut self, r: usize, q: usize, d: &mut [f64]) {
        let w = self.width;
        let piv = self.t[r * w + q];
        {
            let row = &mut self.t[r * w..(r + 1) * w];
            for v in row.iter_mut() {
                *v /= piv;
            }
            row[q] = 1.0;
        }
        let pivot_row: Vec<(usize, f64)> = self.t[r * w..(r + 1) * w]
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, v)| (j, *v))
            .collect();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i * w..(i + 1) * w];
            for &(j, v) in &pivot_row {
                let nv = row[j] - f * v;
                row[j] = if nv.abs() < DROP_EPS { 0.0 } else { nv };
            }
            row[q] = 0.0;
            if row[self.ncols] < 0.0 && row[self.ncols] > -FEAS_TOL * self.b_scale {
                row[self.ncols] = 0.0;
            }
        }
        let f = d[q];
        if f != 0.0 {
            for &(j, v) in &pivot_row {
                if j < self.ncols {
                    d[j] -= f * v;
                }
            }
            d[q] = 0.0;
        }
        self.basis[r] = q;
    }

    /// Minimum ratio, ties to the smallest basic index.
    fn ratio_test_bland(&self, q: usize) -> Option<(usize, f64)> {
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..self.m {
            let a = self.at(i, q);
            if a > PIVOT_EPS {
                let ratio = self.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-12 * (1.0 + lr.abs())
                            || (ratio <= lr + 1e-12 * (1.0 + lr.abs()) && self.basis[i] < self.basis[li])
                        {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        leave
    }

    /// Two-pass test: among rows within a small tolerance of the minimum ratio,
    /// the largest pivot element wins.
    fn ratio_test_harris(&self, q: usize) -> Option<(usize, f64)> {
        let tol = FEAS_TOL * self.b_scale;
        let mut bound = f64::INFINITY;
        for i in 0..self.m {
            let a = self.at(i, q);
            if a > PIVOT_EPS {
                bound = bound.min((self.rhs(i).max(0.0) + tol) / a);
            }
        }
        if !bound.is_finite() {
            return None;
        }
        let mut leave: Option<(usize, f64, f64)> = None;
        for i in 0..self.m {
            let a = self.at(i, q);
            if a > PIVOT_EPS {
                let ratio = self.rhs(i).max(0.0) / a;
                if ratio <= bound && leave.is_none_or(|(_, _, best)| a > best) {
                    leave = Some((i, ratio, a));
                }
            }
        }
        leave.map(|(i, r, _)| (i, r))
    }

    fn artificial_mass(&self) -> f64 {
        (0..self.m)
            .filter(|&i| self.basis[i] >= self.first_artificial)
            .map(|i| self.rhs(i).abs())
            .sum()
    }

    /// Primal simplex on columns `< limit`; returns Optimal, Unbounded or IterationLimit.
    fn simplex(&mut self, c: &[f64], limit: usize, iters: &mut usize) -> LpStatus {
        let (mut d, _) = self.reduced_costs(c);
        let mut in_basis = vec![false; self.ncols];
        for &b in &self.basis {
            in_basis[b] = true;
        }
        let bland_after = 2 * (self.m + self.ncols);
        let mut degenerate_run = 0usize;
        let mut bland = false;
        let phase_one = limit > self.first_artificial;
        loop {
            if phase_one && self.artificial_mass() <= FEAS_TOL * self.b_scale {
                return LpStatus::Optimal;
            }
            if *iters >= self.max_iters {
                return LpStatus::IterationLimit;
            }
            let entering = if bland {
                (0..limit).find(|&j| !in_basis[j] && d[j] > FEAS_TOL)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for (j, &dj) in d.iter().enumerate().take(limit) {
                    if !in_basis[j] && dj > FEAS_TOL && best.is_none_or(|(_, b)| dj > b) {
                        best = Some((j, dj));
                    }
                }
                best.map(|(j, _)| j)
            };
            let Some(q) = entering else {
                return LpStatus::Optimal;
            };

            let leave = if bland { self.ratio_test_bland(q) } else { self.ratio_test_harris(q) };
            let Some((r, ratio)) = leave else {
                return LpStatus::Unbounded;
            };
            if ratio <= FEAS_TOL {
                degenerate_run += 1;
                if degenerate_run > bland_after {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            in_basis[self.basis[r]] = false;
            in_basis[q] = true;
            self.pivot(r, q, &mut d);
            *iters += 1;
            if iters.is_multiple_of(REFRESH_EVERY) {
                d = self.reduced_costs(c).0;
            }
        }
    }

    fn run(mut self, p: &LpProblem, free: &[usize]) -> LpSolution {
        let mut iters = 0usize;
        let n_art = self.ncols - self.first_artificial;
        if n_art > 0 {
            let mut c1 = vec![0.0; self.ncols];
            for v in c1.iter_mut().skip(self.first_artificial) {
                *v = -1.0;
            }
            match self.simplex(&c1, self.ncols, &mut iters) {
                LpStatus::Optimal => {}
                LpStatus::IterationLimit => {
                    return LpSolution::failed(LpStatus::IterationLimit, p.sense)
                }
                LpStatus::Unbounded | LpStatus::Infeasible => unreachable!("phase 1 is bounded"),
            }
            if self.artificial_mass() > INFEAS_TOL * self.b_scale {
                return LpSolution::failed(LpStatus::Infeasible, p.sense);
            }
            self.drive_out_artificials();
        }

        let cost = self.cost.clone();
        match self.simplex(&cost, self.first_artificial, &mut iters) {
            LpStatus::Optimal => {}
            other => return LpSolution::failed(other, p.sense),
        }
        self.extract(p, free)
    }

    fn drive_out_artificials(&mut self) {
        let mut scratch = vec![0.0; self.ncols];
        for i in 0..self.m {
            if self.basis[i] < self.first_artificial {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.first_artificial {
                let a = self.at(i, j).abs();
                if a > PIVOT_EPS && best.is_none_or(|(_, b)| a > b) && !self.basis.contains(&j) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                self.pivot(i, j, &mut scratch);
                // rows this pivot touched keep tiny rhs drift from the phase-1 optimum
                for k in 0..self.m {
                    let idx = k * self.width + self.ncols;
                    if self.t[idx].abs() < FEAS_TOL && self.t[idx] < 0.0 {
                        self.t[idx] = 0.0;
                    }
                }
            }
        }
    }

    fn extract(&self, p: &LpProblem, free: &[usize]) -> LpSolution {
        let n = p.num_vars();
        let mut full = vec![0.0; self.ncols];
        for i in 0..self.m {
            full[self.basis[i]] = self.rhs(i);
        }
        let mut x: Vec<f64> = full[..n].to_vec();
        for (k, &j) in free.iter().enumerate() {
            x[j] -= full[n + k];
        }
        let mut is_free = vec![false; n];
        for &j in free {
            is_free[j] = true;
        }
        for (j, v) in x.iter_mut().enumerate() {
            if !is_free[j] && *v < 0.0 && *v > -FEAS_TOL {
                *v = 0.0;
            }
        }

        let dir = if p.sense == Sense::Maximize { 1.0 } else { -1.0 };
        let mut duals = vec![0.0; self.m];
        for (i, dual) in duals.iter_mut().enumerate() {
            let col = self.identity_col[i];
            let mut s = 0.0;
            for k in 0..self.m {
                let cb = self.cost[self.basis[k]];
                if cb != 0.0 {
                    s += cb * self.at(k, col);
                }
            }
            *dual = dir * self.row_sign[i] * s;
        }
        let m_eq = p.a_eq.rows();
        let duals_ub = duals.split_off(m_eq);
        debug_assert!(self.n_struct >= n);
        LpSolution {
            status: LpStatus::Optimal,
            objective: dot(&p.objective, &x),
            x,
            duals_eq: duals,
            duals_ub,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn row(v: &[f64]) -> DenseMatrix {
        DenseMatrix::from_rows(&[v])
    }

    #[test]
    fn simple_vertex() {
        let p = LpProblem::maximize(vec![1.0, 2.0], row(&[1.0, 1.0]), vec![1.0]);
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.x, vec![0.0, 1.0]);
        assert_eq!(s.objective, 2.0);
        assert!((s.duals_eq[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = LpProblem::maximize(vec![1.0], row(&[1.0]), vec![-1.0]);
        assert_eq!(solve_lp(&p).status, LpStatus::Infeasible);
        let p = LpProblem::maximize(vec![1.0], row(&[0.0]), vec![0.0]);
        assert_eq!(solve_lp(&p).status, LpStatus::Unbounded);
    }

    #[test]
    fn free_variables() {
        let p = LpProblem::maximize(vec![-1.0], row(&[1.0]), vec![-5.0]);
        let s = solve_lp_with_free_vars(&p, &[0]);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.x, vec![-5.0]);
        assert_eq!(s.objective, 5.0);

        // a free variable that touches nothing is left alone
        let p = LpProblem::maximize(vec![1.0, 0.0], row(&[1.0, 0.0]), vec![2.0]);
        let s = solve_lp_with_free_vars(&p, &[1]);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, 2.0);
        // ...unless it drives the objective
        let p = LpProblem::maximize(vec![1.0, 1.0], row(&[1.0, 0.0]), vec![2.0]);
        assert_eq!(solve_lp_with_free_vars(&p, &[1]).status, LpStatus::Unbounded);
    }

    #[test]
    fn minimize_with_inequalities() {
        // min x + y s.t. x + 2y >= 2, 3x + y >= 3  ->  (0.8, 0.6), value 1.4
        let p = LpProblem::minimize(vec![1.0, 1.0], DenseMatrix::zeros(0, 2), vec![])
            .with_inequalities(
                DenseMatrix::from_rows(&[[-1.0, -2.0], [-3.0, -1.0]]),
                vec![-2.0, -3.0],
            );
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 0.8).abs() < 1e-12 && (s.x[1] - 0.6).abs() < 1e-12);
        assert!((s.objective - 1.4).abs() < 1e-12);
        let dual_obj: f64 = s.duals_ub.iter().zip(&p.b_ub).map(|(l, b)| l * b).sum();
        assert!((dual_obj - 1.4).abs() < 1e-12);
        assert!(s.duals_ub.iter().all(|&l| l <= 1e-12));
    }

    #[test]
    fn redundant_rows() {
        let a = DenseMatrix::from_rows(&[[1.0, 1.0], [2.0, 2.0]]);
        let p = LpProblem::maximize(vec![1.0, 3.0], a, vec![1.0, 2.0]);
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, 3.0);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's cycling example
        let a = DenseMatrix::from_rows(&[
            [0.25, -60.0, -1.0 / 25.0, 9.0],
            [0.5, -90.0, -1.0 / 50.0, 3.0],
            [0.0, 0.0, 1.0, 0.0],
        ]);
        let p = LpProblem::maximize(vec![0.75, -150.0, 1.0 / 50.0, -6.0], DenseMatrix::zeros(0, 4), vec![])
            .with_inequalities(a, vec![0.0, 0.0, 1.0]);
        let s = solve_lp(&p);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 0.05).abs() < 1e-9);
    }

    /// Random LP with a known feasible point and a bounded region.
    fn random_lp(rng: &mut ChaCha8Rng) -> (LpProblem, Vec<usize>) {
        let n = rng.random_range(2..30);
        let m_eq = rng.random_range(0..n.min(8));
        let m_ub = rng.random_range(1..10);
        let x0: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
        let mut a_eq = DenseMatrix::zeros(m_eq, n);
        for i in 0..m_eq {
            for j in 0..n {
                if rng.random_bool(0.6) {
                    a_eq[(i, j)] = rng.random_range(-3.0..3.0);
                }
            }
        }
        let b_eq = a_eq.mul_vec(&x0);
        let mut a_ub = DenseMatrix::zeros(m_ub + 1, n);
        for i in 0..m_ub {
            for j in 0..n {
                a_ub[(i, j)] = rng.random_range(-2.0..2.0);
            }
        }
        for j in 0..n {
            a_ub[(m_ub, j)] = 1.0;
        }
        let mut b_ub: Vec<f64> = a_ub
            .mul_vec(&x0)
            .into_iter()
            .map(|v| v + rng.random_range(0.0..1.0))
            .collect();
        let nfree = rng.random_range(0..3);
        let free: Vec<usize> = (0..nfree).map(|k| k * 3 % n).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        // bound free variables from below too
        let mut extra = DenseMatrix::zeros(free.len(), n);
        for (k, &j) in free.iter().enumerate() {
            extra[(k, j)] = -1.0;
            b_ub.push(5.0);
        }
        let a_ub = a_ub.vstack(&extra);
        let c = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let sense = if rng.random_bool(0.5) { Sense::Maximize } else { Sense::Minimize };
        (
            LpProblem::new(sense, c, a_eq, b_eq).with_inequalities(a_ub, b_ub),
            free,
        )
    }

    #[test]
    fn strong_duality_and_feasibility_on_random_lps() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..300 {
            let (p, free) = random_lp(&mut rng);
            let s = solve_lp_with_free_vars(&p, &free);
            assert_eq!(s.status, LpStatus::Optimal);
            let r = p.a_eq.mul_vec(&s.x);
            for (a, b) in r.iter().zip(&p.b_eq) {
                assert!((a - b).abs() <= 1e-7 * (1.0 + b.abs()));
            }
            let r = p.a_ub.mul_vec(&s.x);
            for (a, b) in r.iter().zip(&p.b_ub) {
                assert!(*a <= b + 1e-7);
            }
            for (j, &v) in s.x.iter().enumerate() {
                assert!(free.contains(&j) || v >= -1e-9);
            }
            let dual = dot(&p.b_eq, &s.duals_eq) + dot(&p.b_ub, &s.duals_ub);
            assert!(
                (dual - s.objective).abs() <= 1e-6 * (1.0 + s.objective.abs()),
                "primal {} dual {}",
                s.objective,
                dual
            );
            // dual feasibility: reduced costs have the right sign
            let dir = if p.sense == Sense::Maximize { 1.0 } else { -1.0 };
            let at_l = {
                let mut v = p.a_eq.tr_mul_vec(&s.duals_eq);
                for (vi, wi) in v.iter_mut().zip(p.a_ub.tr_mul_vec(&s.duals_ub)) {
                    *vi += wi;
                }
                v
            };
            for j in 0..p.num_vars() {
                let rc = dir * (p.objective[j] - at_l[j]);
                if free.contains(&j) {
                    assert!(rc.abs() <= 1e-7);
                } else {
                    assert!(rc <= 1e-7);
                    assert!((rc * s.x[j]).abs() <= 1e-6, "complementary slackness");
                }
            }
        }
    }

    #[test]
    fn row_scaling_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let (p, free) = random_lp(&mut rng);
            let mut q = p.clone();
            for i in 0..q.a_eq.rows() {
                let f = rng.random_range(0.1..10.0);
                q.a_eq.row_mut(i).iter_mut().for_each(|v| *v *= f);
                q.b_eq[i] *= f;
            }
            for i in 0..q.a_ub.rows() {
                let f = rng.random_range(0.1..10.0);
                q.a_ub.row_mut(i).iter_mut().for_each(|v| *v *= f);
                q.b_ub[i] *= f;
            }
            let a = solve_lp_with_free_vars(&p, &free);
            let b = solve_lp_with_free_vars(&q, &free);
            assert_eq!(a.status, b.status);
            assert!((a.objective - b.objective).abs() <= 1e-7 * (1.0 + a.objective.abs()));
        }
    }

    #[test]
    fn deterministic_bits() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (p, free) = random_lp(&mut rng);
        let a = solve_lp_with_free_vars(&p, &free);
        let b = solve_lp_with_free_vars(&p, &free);
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}
