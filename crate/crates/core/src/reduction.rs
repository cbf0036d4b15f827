//! Linear dimensionality reduction of the coupling matrix.
//!
//! With `C = S Σ Vᵀ`, the right singular vectors `T₁` of the kept singular
//! values span the only directions of `y` that matter up to the discarded
//! part. The reduced program carries the original `y` as extra variables of
//! side 2 and a new free `ȳ = T₁ᵀy` as its bilinear variable, with coupling
//! `C T₁`.

use crate::bilinear::{Assignment, BilinearProgram, ConstraintSense, Dims, Side};
use crate::error::{Error, Result};
use crate::linalg::{dot, invert, svd, DenseMatrix};
use crate::solver::region::y_box;

/// Singular values below this fraction of the largest are treated as zero.
const RANK_TOL: f64 = 1e-10;

/// Whether singular values are compared after scaling `X` and `Y` into unit balls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Scale by the Euclidean radii of the per-coordinate bounding boxes.
    Auto,
    None,
}

#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub program: BilinearProgram,
    pub kept_dims: usize,
    /// Bound on `|xᵀCy − xᵀC T₁T₁ᵀ y|` over the feasible sets.
    pub error_bound: f64,
    /// `|y| × kept_dims` with orthonormal columns.
    pub basis: DenseMatrix,
    pub singular_values: Vec<f64>,
    /// Radius of the ball around the bounding box of `X` (1 without scaling).
    pub radius_x: f64,
    pub radius_y: f64,
    original_side2: Side,
    original: Dims,
}

impl ReductionResult {
    pub fn original_dims(&self) -> Dims {
        self.original
    }

    /// Maps an assignment of the reduced program back to the original variables.
    pub fn restore(&self, a: &Assignment) -> Assignment {
        let d = self.original;
        Assignment {
            w: a.w.clone(),
            x: a.x.clone(),
            y: a.z[..d.y].to_vec(),
            z: a.z[d.y..d.y + d.z].to_vec(),
        }
    }

    /// Maps a feasible assignment of the original program into the reduced one.
    pub fn lift(&self, a: &Assignment) -> Assignment {
        let side = &self.original_side2;
        let mut z = a.y.clone();
        z.extend_from_slice(&a.z);
        if side.sense == ConstraintSense::Inequality {
            let ay = side.a.mul_vec(&a.y);
            let bz = side.b.mul_vec(&a.z);
            z.extend((0..side.n_rows()).map(|i| (side.rhs[i] - ay[i] - bz[i]).max(0.0)));
        }
        Assignment {
            w: a.w.clone(),
            x: a.x.clone(),
            y: self.basis.tr_mul_vec(&a.y),
            z,
        }
    }
}

/// Euclidean radius of the bounding box of `Y`.
fn box_radius(p: &BilinearProgram) -> Result<f64> {
    let (lo, hi) = y_box(p)?;
    Ok(lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| l.abs().max(h.abs()).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Drops the singular directions of `C` whose scaled value is at most `epsilon`.
///
/// With `epsilon = 0` every direction with a nonzero singular value is kept.
pub fn reduce(p: &BilinearProgram, epsilon: f64, scale: Scale) -> Result<ReductionResult> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!("reduction epsilon {epsilon} must be nonnegative")));
    }
    p.validate()?;
    let d = p.dims();
    let (radius_x, radius_y) = match scale {
        Scale::None => (1.0, 1.0),
        Scale::Auto => {
            let rx = box_radius(&p.transpose()).map_err(|e| match e {
                Error::YInfeasible => Error::XInfeasible,
                Error::YUnbounded => Error::XUnbounded,
                other => other,
            })?;
            (rx, box_radius(p)?)
        }
    };
    let factor = radius_x * radius_y;

    let (singular_values, vt) = if d.x == 0 || d.y == 0 {
        (Vec::new(), DenseMatrix::zeros(0, d.y))
    } else {
        let dec = svd(&p.c);
        (dec.singular_values, dec.vt)
    };
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let keep = |s: f64| s > RANK_TOL * sigma_max && s * factor > epsilon;
    let kept: Vec<usize> = (0..singular_values.len()).filter(|&j| keep(singular_values[j])).collect();
    let discarded = singular_values
        .iter()
        .enumerate()
        .filter(|(j, _)| !kept.contains(j))
        .fold(0.0_f64, |m, (_, &s)| m.max(s));
    let columns: Vec<Vec<f64>> = kept.iter().map(|&j| vt.row(j).to_vec()).collect();
    let basis = DenseMatrix::from_columns(&columns, d.y);
    let k = kept.len();

    let s2 = p.side2.with_slacks();
    let n_ext = s2.n_extra();
    let link_b = basis.transpose().hstack(&DenseMatrix::zeros(k, n_ext));
    let a = DenseMatrix::zeros(s2.n_rows(), k).vstack(&DenseMatrix::identity(k).scale(-1.0));
    let b = s2.a.hstack(&s2.b).vstack(&link_b);
    let mut rhs = s2.rhs.clone();
    rhs.extend(std::iter::repeat_n(0.0, k));
    let mut s = s2.r.clone();
    s.extend_from_slice(&s2.s);
    let mut free_extra = s2.free_bilinear.clone();
    free_extra.extend(s2.free_extra.iter().map(|j| d.y + j));
    let side2 = Side {
        a,
        b,
        rhs,
        r: vec![0.0; k],
        s,
        sense: ConstraintSense::Equality,
        free_bilinear: (0..k).collect(),
        free_extra,
    };
    let program = BilinearProgram {
        side1: p.side1.clone(),
        side2,
        c: p.c.matmul(&basis),
        offset: p.offset,
    };
    program.validate()?;

    Ok(ReductionResult {
        program,
        kept_dims: k,
        error_bound: factor * discarded,
        basis,
        singular_values,
        radius_x,
        radius_y,
        original_side2: p.side2.clone(),
        original: d,
    })
}

/// `Q = I − Aᵀ(AAᵀ)⁻¹A` and `v₀ = Aᵀ(AAᵀ)⁻¹b` for the equality rows that
/// involve only the bilinear variables of `side`.
fn side_projector(side: &Side) -> Result<(DenseMatrix, Vec<f64>)> {
    let n = side.n_bilinear();
    let rows: Vec<usize> = if side.sense == ConstraintSense::Equality {
        (0..side.n_rows())
            .filter(|&i| side.b.row(i).iter().all(|&v| v == 0.0))
            .filter(|&i| side.a.row(i).iter().any(|&v| v != 0.0))
            .collect()
    } else {
        Vec::new()
    };
    if rows.is_empty() {
        return Ok((DenseMatrix::identity(n), vec![0.0; n]));
    }
    let a = side.a.select_rows(&rows);
    let b: Vec<f64> = rows.iter().map(|&i| side.rhs[i]).collect();
    projector(&a, &b)
}

fn projector(a: &DenseMatrix, b: &[f64]) -> Result<(DenseMatrix, Vec<f64>)> {
    let gram_inv = invert(&a.matmul(&a.transpose())).map_err(|_| Error::RankDeficientRows)?;
    let at = a.transpose();
    let q = DenseMatrix::identity(a.cols()).sub(&at.matmul(&gram_inv).matmul(a));
    let v0 = at.mul_vec(&gram_inv.mul_vec(b));
    Ok((q, v0))
}

/// Replaces `C` by `Q₁CQ₂`, where `Qᵢ` projects onto the null space of the
/// equality rows of side `i` that contain only bilinear variables.
///
/// The linear terms and the offset absorb the difference, so the objective is
/// unchanged on the feasible set. Sides with inequality rows contribute no
/// rows to their projector.
pub fn project_objective(p: &BilinearProgram) -> Result<BilinearProgram> {
    p.validate()?;
    let (q1, x0) = side_projector(&p.side1)?;
    let (q2, y0) = side_projector(&p.side2)?;
    let c = q1.matmul(&p.c).matmul(&q2);
    let mut side1 = p.side1.clone();
    for (r, v) in side1.r.iter_mut().zip(q1.mul_vec(&p.c.mul_vec(&y0))) {
        *r += v;
    }
    let mut side2 = p.side2.clone();
    for (r, v) in side2.r.iter_mut().zip(q2.mul_vec(&p.c.tr_mul_vec(&x0))) {
        *r += v;
    }
    Ok(BilinearProgram {
        side1,
        side2,
        c,
        offset: p.offset + dot(&x0, &p.c.mul_vec(&y0)),
    })
}

/// Projected objective `Qc` of the LP `max cᵀx, Ax = b`, and the constant
/// `cᵀAᵀ(AAᵀ)⁻¹b` with `cᵀx = (Qc)ᵀx + shift` on `{Ax = b}`.
pub fn projected_lp_objective(c: &[f64], a: &DenseMatrix, b: &[f64]) -> Result<(Vec<f64>, f64)> {
    if c.len() != a.cols() || b.len() != a.rows() {
        return Err(Error::DimensionMismatch("objective or rhs length".into()));
    }
    let (q, v0) = projector(a, b)?;
    Ok((q.mul_vec(c), dot(c, &v0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilinear::evaluate_objective;
    use crate::linalg::spectral_norm;
    use crate::lp::{solve_lp, LpProblem, LpStatus};

    fn simplex_side(n: usize, r: Vec<f64>) -> Side {
        Side::new(DenseMatrix::from_rows(&[vec![1.0; n]]), vec![1.0], r, ConstraintSense::Equality)
    }

    fn program(c: DenseMatrix) -> BilinearProgram {
        let (m, n) = c.shape();
        let r1 = (0..m).map(|i| 0.1 * i as f64).collect();
        let r2 = (0..n).map(|j| -0.2 * j as f64).collect();
        BilinearProgram::new(simplex_side(m, r1), simplex_side(n, r2), c).unwrap()
    }

    fn point(m: usize, n: usize) -> Assignment {
        Assignment {
            w: vec![],
            x: (0..m).map(|i| (i + 1) as f64).map(|v| v / (m * (m + 1) / 2) as f64).collect(),
            y: vec![1.0 / n as f64; n],
            z: vec![],
        }
    }

    #[test]
    fn zero_coupling_keeps_nothing() {
        let p = program(DenseMatrix::zeros(3, 4));
        let r = reduce(&p, 1e-4, Scale::Auto).unwrap();
        assert_eq!(r.kept_dims, 0);
        assert_eq!(r.error_bound, 0.0);
        assert_eq!(r.program.dimensionality(), 0);
        assert!(r.program.c.is_zero());
    }

    #[test]
    fn rank_one_keeps_one() {
        let u = [1.0, -2.0, 0.5];
        let v = [0.3, 0.0, 1.0, 2.0];
        let rows: Vec<Vec<f64>> = u.iter().map(|a| v.iter().map(|b| a * b).collect()).collect();
        let p = program(DenseMatrix::from_rows(&rows));
        let r = reduce(&p, 1e-4, Scale::None).unwrap();
        assert_eq!(r.kept_dims, 1);
        assert!(r.error_bound < 1e-9);
    }

    #[test]
    fn basis_is_orthonormal_and_lift_preserves_objective() {
        let c = DenseMatrix::from_rows(&[[1.0, 0.5, -0.3, 0.0], [0.2, -1.0, 0.4, 0.8], [0.0, 0.3, 0.3, -0.6]]);
        let p = program(c);
        let r = reduce(&p, 0.0, Scale::None).unwrap();
        assert_eq!(r.kept_dims, 3);
        let gram = r.basis.transpose().matmul(&r.basis);
        assert!(gram.sub(&DenseMatrix::identity(3)).max_abs() < 1e-8);
        let a = point(3, 4);
        let lifted = r.lift(&a);
        assert!(r.program.is_feasible(&lifted, 1e-9));
        let f = evaluate_objective(&p, &a).unwrap();
        let g = evaluate_objective(&r.program, &lifted).unwrap();
        assert!((f - g).abs() < 1e-9);
        assert_eq!(r.restore(&lifted), a);
    }

    #[test]
    fn inequality_side_gets_slack_columns() {
        let side2 = Side::new(DenseMatrix::from_rows(&[[1.0, 1.0]]), vec![1.0], vec![0.5, 0.0], ConstraintSense::Inequality);
        let p = BilinearProgram::new(simplex_side(2, vec![0.0, 0.0]), side2, DenseMatrix::identity(2)).unwrap();
        let r = reduce(&p, 0.0, Scale::Auto).unwrap();
        let a = Assignment {
            w: vec![],
            x: vec![0.5, 0.5],
            y: vec![0.25, 0.25],
            z: vec![],
        };
        let lifted = r.lift(&a);
        assert_eq!(lifted.z.len(), 3);
        assert!(r.program.is_feasible(&lifted, 1e-9));
        let diff = evaluate_objective(&p, &a).unwrap() - evaluate_objective(&r.program, &lifted).unwrap();
        assert!(diff.abs() < 1e-12);
    }

    #[test]
    fn negative_epsilon_is_rejected() {
        let p = program(DenseMatrix::identity(2));
        assert!(matches!(reduce(&p, -1.0, Scale::None), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn projection_keeps_objective_on_feasible_set() {
        let c = DenseMatrix::from_rows(&[[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]]);
        let p = program(c.clone());
        let q = project_objective(&p).unwrap();
        // every row of C is constant on 1ᵀx = 1 up to a y-linear term
        assert!(spectral_norm(&q.c) <= spectral_norm(&c) + 1e-8);
        for a in [point(2, 3), Assignment { w: vec![], x: vec![1.0, 0.0], y: vec![0.0, 0.2, 0.8], z: vec![] }] {
            let f = evaluate_objective(&p, &a).unwrap();
            let g = evaluate_objective(&q, &a).unwrap();
            assert!((f - g).abs() < 1e-12);
        }
        // C = 1 vᵀ projects to zero on the x side
        assert!(q.c.max_abs() < 1e-12);
    }

    #[test]
    fn projection_without_pure_rows_is_identity() {
        let side1 = Side::new(DenseMatrix::from_rows(&[[1.0, 1.0]]), vec![1.0], vec![0.0, 0.0], ConstraintSense::Inequality);
        let c = DenseMatrix::from_rows(&[[1.0, -1.0], [0.5, 2.0]]);
        let p = BilinearProgram::new(side1.clone(), side1, c.clone()).unwrap();
        let q = project_objective(&p).unwrap();
        assert_eq!(q.c, c);
        assert_eq!(q.offset, 0.0);
    }

    #[test]
    fn dependent_rows_are_reported() {
        let side = Side::new(DenseMatrix::from_rows(&[[1.0, 1.0], [2.0, 2.0]]), vec![1.0, 2.0], vec![0.0, 0.0], ConstraintSense::Equality);
        let p = BilinearProgram::new(side.clone(), side, DenseMatrix::identity(2)).unwrap();
        assert_eq!(project_objective(&p).unwrap_err(), Error::RankDeficientRows);
    }

    #[test]
    fn projected_lp_has_same_argmax() {
        let a = DenseMatrix::from_rows(&[[1.0, 1.0, 1.0, 0.0], [0.0, 1.0, 2.0, 1.0]]);
        let b = vec![2.0, 3.0];
        let c = vec![1.0, 3.0, -1.0, 0.5];
        let (cp, shift) = projected_lp_objective(&c, &a, &b).unwrap();
        let s1 = solve_lp(&LpProblem::maximize(c.clone(), a.clone(), b.clone()));
        let s2 = solve_lp(&LpProblem::maximize(cp, a, b));
        assert_eq!(s1.status, LpStatus::Optimal);
        assert_eq!(s2.status, LpStatus::Optimal);
        for (u, v) in s1.x.iter().zip(&s2.x) {
            assert!((u - v).abs() < 1e-9);
        }
        assert!((s1.objective - s2.objective - shift).abs() < 1e-9);
    }
}
