//! Exhaustive reference solutions for small programs.
//!
//! Every vertex of each side's polytope is enumerated through its basic
//! feasible solutions, then the objective is maximized over all vertex pairs.
//! Nothing here touches the simplex code, so it serves as an independent
//! check for the LP-based machinery.

use crate::bilinear::{evaluate_objective, Assignment, BilinearProgram, ConstraintSense, Side};
use crate::error::{Error, Result};
use crate::linalg::{solve_linear, DenseMatrix};

/// Largest number of column subsets examined per side.
pub const SUBSET_CAP: f64 = 2.0e6;

const TOL: f64 = 1e-9;

/// A vertex of one side: `(bilinear, extra)`.
pub type Vertex = (Vec<f64>, Vec<f64>);

/// Basic feasible points of a bounded side, deduplicated, in discovery order.
///
/// The list contains every vertex. Free variables are split into two
/// nonnegative parts, which can add feasible non-vertex points; maximizing
/// over the list is still exact.
pub fn vertices(side: &Side) -> Result<Vec<Vertex>> {
    let nb = side.n_bilinear();
    let ne = side.n_extra();
    let n = nb + ne;
    let m = side.n_rows();
    let free = side.stacked_free();
    let slacks = if side.sense == ConstraintSense::Inequality { m } else { 0 };

    // standard form columns: originals, negated copies of free ones, slacks
    let total = n + free.len() + slacks;
    let stacked = side.stacked();
    let mut a = DenseMatrix::zeros(m, total);
    for i in 0..m {
        for j in 0..n {
            a[(i, j)] = stacked[(i, j)];
        }
        for (k, &j) in free.iter().enumerate() {
            a[(i, n + k)] = -stacked[(i, j)];
        }
        if slacks > 0 {
            a[(i, n + free.len() + i)] = 1.0;
        }
    }
    let rows = independent_rows(&a);
    let r = rows.len();
    let count = binomial(total, r);
    if count > SUBSET_CAP {
        return Err(Error::TooLarge {
            count,
            cap: SUBSET_CAP,
        });
    }
    let a_r = a.select_rows(&rows);
    let b_r: Vec<f64> = rows.iter().map(|&i| side.rhs[i]).collect();

    let mut out: Vec<Vertex> = Vec::new();
    let mut subset: Vec<usize> = (0..r).collect();
    loop {
        if let Some(full) = basic_solution(&a_r, &b_r, &subset, total) {
            if residual_ok(&a, &side.rhs, &full) {
                let mut v: Vec<f64> = full[..n].to_vec();
                for (k, &j) in free.iter().enumerate() {
                    v[j] -= full[n + k];
                }
                let vertex = (v[..nb].to_vec(), v[nb..].to_vec());
                if !out.iter().any(|u| same_vertex(u, &vertex)) {
                    out.push(vertex);
                }
            }
        }
        if !next_subset(&mut subset, total) {
            break;
        }
    }
    Ok(out)
}

/// Maximizes the objective over all vertex pairs; `None` when a side is empty.
pub fn brute_force_optimum(p: &BilinearProgram) -> Result<Option<(Assignment, f64)>> {
    let xs = vertices(&p.side1)?;
    let ys = vertices(&p.side2)?;
    let mut best: Option<(Assignment, f64)> = None;
    for (x, w) in &xs {
        for (y, z) in &ys {
            let a = Assignment {
                w: w.clone(),
                x: x.clone(),
                y: y.clone(),
                z: z.clone(),
            };
            let v = evaluate_objective(p, &a)?;
            if best.as_ref().is_none_or(|(_, b)| v > *b) {
                best = Some((a, v));
            }
        }
    }
    Ok(best)
}

fn basic_solution(a: &DenseMatrix, b: &[f64], subset: &[usize], total: usize) -> Option<Vec<f64>> {
    let mut full = vec![0.0; total];
    if subset.is_empty() {
        return Some(full);
    }
    let basis = a.select_columns(subset);
    let xb = solve_linear(&basis, b).ok()?;
    for (&j, &v) in subset.iter().zip(&xb) {
        if v < -TOL * (1.0 + v.abs()) {
            return None;
        }
        full[j] = v.max(0.0);
    }
    Some(full)
}

fn residual_ok(a: &DenseMatrix, b: &[f64], x: &[f64]) -> bool {
    a.mul_vec(x)
        .iter()
        .zip(b)
        .all(|(p, q)| (p - q).abs() <= 1e-7 * (1.0 + q.abs()))
}

fn same_vertex(u: &Vertex, v: &Vertex) -> bool {
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(p, q)| (p - q).abs() <= 1e-9 * (1.0 + p.abs()));
    close(&u.0, &v.0) && close(&u.1, &v.1)
}

/// Indices of a maximal set of linearly independent rows (greedy, in order).
fn independent_rows(a: &DenseMatrix) -> Vec<usize> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut keep = Vec::new();
    for i in 0..a.rows() {
        let mut v = a.row(i).to_vec();
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in &basis {
                let p: f64 = v.iter().zip(q).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= p * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 * scale {
            basis.push(v.iter().map(|x| x / norm).collect());
            keep.push(i);
        }
    }
    keep
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Advances `s` to the next `k`-subset of `0..n` in lexicographic order.
fn next_subset(s: &mut [usize], n: usize) -> bool {
    let k = s.len();
    for i in (0..k).rev() {
        if s[i] < n - k + i {
            s[i] += 1;
            for j in i + 1..k {
                s[j] = s[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
