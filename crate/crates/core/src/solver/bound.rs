//! Maximal gap between the vertex interpolation of `g` and the vertex planes
//! over one simplex, and the point where it is attained.

use super::cut::Cut;
use super::region::{centroid, combine};
use super::PivotMethod;
use crate::bilinear::{BilinearProgram, ConstraintSense, ResponsePlane};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::lp::{solve_lp_with_free_vars, LpProblem, LpStatus, Sense};

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorEstimate {
    pub epsilon: f64,
    pub pivot: Vec<f64>,
    /// Barycentric coordinates of `pivot`.
    pub weights: Vec<f64>,
}

/// Upper bound on `max g − g̃` over the simplex, restricted according to `method`.
///
/// `planes[k]` is the best response at `vertices[k]` and `vertex_g[k]` its
/// value there. The methods are cumulative: `Feasible` intersects with `Y`,
/// `LinearBound` additionally keeps only points whose interpolated upper bound
/// reaches `h`, and `CuttingPlane` also applies `cut` when one is given. An
/// empty search set yields `ε = 0` at the centroid.
pub fn polyhedron_error(
    p: &BilinearProgram,
    vertices: &[Vec<f64>],
    vertex_g: &[f64],
    planes: &[&ResponsePlane],
    method: PivotMethod,
    h: f64,
    cut: Option<&Cut>,
) -> Result<ErrorEstimate> {
    let k = vertices.len();
    if k == 0 || vertex_g.len() != k || planes.len() != k {
        return Err(Error::DimensionMismatch("region data lengths differ".into()));
    }
    let uses_bound = matches!(method, PivotMethod::LinearBound | PivotMethod::CuttingPlane);
    if uses_bound && !p.is_semi_compact() {
        return Err(Error::NotSemiCompact);
    }
    let n_y = p.dimensionality();
    let feasible = method != PivotMethod::Basic;
    let n_z = if feasible { p.side2.n_extra() } else { 0 };
    // variables: t (k), ε, z (n_z)
    let nv = k + 1 + n_z;
    let eps = k;

    let mut objective = vec![0.0; nv];
    objective[eps] = 1.0;

    let mut eq_rows: Vec<Vec<f64>> = Vec::new();
    let mut eq_rhs: Vec<f64> = Vec::new();
    let mut ub_rows: Vec<Vec<f64>> = Vec::new();
    let mut ub_rhs: Vec<f64> = Vec::new();

    let mut simplex_row = vec![0.0; nv];
    simplex_row[..k].iter_mut().for_each(|v| *v = 1.0);
    eq_rows.push(simplex_row);
    eq_rhs.push(1.0);

    // ε ≤ Σᵢ tᵢ (g(yᵢ) − planeₗ(yᵢ)) for every vertex plane l
    for plane in planes {
        let mut row = vec![0.0; nv];
        row[eps] = 1.0;
        for i in 0..k {
            let gap = (vertex_g[i] - plane.value(&vertices[i])).max(0.0);
            row[i] = -gap;
        }
        ub_rows.push(row);
        ub_rhs.push(0.0);
    }

    if feasible {
        let side = &p.side2;
        let a_t: Vec<Vec<f64>> = vertices.iter().map(|v| side.a.mul_vec(v)).collect();
        for r in 0..side.n_rows() {
            let mut row = vec![0.0; nv];
            for i in 0..k {
                row[i] = a_t[i][r];
            }
            for j in 0..n_z {
                row[k + 1 + j] = side.b[(r, j)];
            }
            match side.sense {
                ConstraintSense::Equality => {
                    eq_rows.push(row);
                    eq_rhs.push(side.rhs[r]);
                }
                ConstraintSense::Inequality => {
                    ub_rows.push(row);
                    ub_rhs.push(side.rhs[r]);
                }
            }
        }
        for j in 0..n_y {
            if side.free_bilinear.contains(&j) {
                continue;
            }
            let mut row = vec![0.0; nv];
            for i in 0..k {
                row[i] = -vertices[i][j];
            }
            ub_rows.push(row);
            ub_rhs.push(0.0);
        }
    }

    if uses_bound && h.is_finite() {
        let mut row = vec![0.0; nv];
        for i in 0..k {
            row[i] = -vertex_g[i];
        }
        ub_rows.push(row);
        ub_rhs.push(-h);
    }

    if method == PivotMethod::CuttingPlane {
        if let Some(cut) = cut {
            let mut row = vec![0.0; nv];
            for i in 0..k {
                row[i] = cut.level(&vertices[i]);
            }
            ub_rows.push(row);
            ub_rhs.push(cut.tau);
        }
    }

    let lp = LpProblem::new(Sense::Maximize, objective, to_matrix(eq_rows, nv), eq_rhs)
        .with_inequalities(to_matrix(ub_rows, nv), ub_rhs);
    let free: Vec<usize> = if feasible {
        p.side2.free_extra.iter().map(|j| k + 1 + j).collect()
    } else {
        Vec::new()
    };
    let sol = solve_lp_with_free_vars(&lp, &free);
    match sol.status {
        LpStatus::Optimal => {
            let weights: Vec<f64> = sol.x[..k].iter().map(|v| v.max(0.0)).collect();
            let sum: f64 = weights.iter().sum();
            let weights: Vec<f64> = weights.into_iter().map(|v| v / sum).collect();
            Ok(ErrorEstimate {
                epsilon: sol.objective.max(0.0),
                pivot: combine(vertices, &weights),
                weights,
            })
        }
        LpStatus::Infeasible => Ok(ErrorEstimate {
            epsilon: 0.0,
            pivot: centroid(vertices),
            weights: vec![1.0 / k as f64; k],
        }),
        LpStatus::Unbounded => Err(Error::YUnbounded),
        LpStatus::IterationLimit => Err(Error::LpIterationLimit),
    }
}

fn to_matrix(rows: Vec<Vec<f64>>, cols: usize) -> DenseMatrix {
    if rows.is_empty() {
        DenseMatrix::zeros(0, cols)
    } else {
        DenseMatrix::from_rows(&rows)
    }
}
