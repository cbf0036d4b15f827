//! Separable bilinear programs.
//!
//! ```text
//! maximize   s₁ᵀw + r₁ᵀx + xᵀCy + r₂ᵀy + s₂ᵀz + offset
//! subject to A₁x + B₁w (= | ≤) b₁
//!            A₂y + B₂z (= | ≤) b₂
//!            w, x, y, z ≥ 0   (except variables marked free)
//! ```
//!
//! `x` and `y` are the bilinear variables, `w` and `z` the extra variables of
//! each side. The dimensionality of a program is `|y|`.

use crate::error::{Error, Result};
use crate::linalg::{dot, DenseMatrix};
use crate::lp::{solve_lp_with_free_vars, LpProblem, LpSolution, LpStatus, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSense {
    Equality,
    /// Rows read `A v + B e ≤ b`.
    Inequality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    Normal,
    /// `s₂ = 0`.
    SemiCompact,
    /// `s₁ = s₂ = 0`.
    Compact,
}

/// Constraints and linear objective of one side.
#[derive(Debug, Clone, PartialEq)]
pub struct Side {
    /// Coefficients of the bilinear variables (`A`).
    pub a: DenseMatrix,
    /// Coefficients of the extra variables (`B`).
    pub b: DenseMatrix,
    pub rhs: Vec<f64>,
    /// Linear objective on the bilinear variables.
    pub r: Vec<f64>,
    /// Linear objective on the extra variables.
    pub s: Vec<f64>,
    pub sense: ConstraintSense,
    /// Bilinear variables unrestricted in sign.
    pub free_bilinear: Vec<usize>,
    /// Extra variables unrestricted in sign.
    pub free_extra: Vec<usize>,
}

impl Side {
    /// Side with only bilinear variables and nonnegativity.
    pub fn new(a: DenseMatrix, rhs: Vec<f64>, r: Vec<f64>, sense: ConstraintSense) -> Self {
        let m = a.rows();
        Self {
            a,
            b: DenseMatrix::zeros(m, 0),
            rhs,
            r,
            s: Vec::new(),
            sense,
            free_bilinear: Vec::new(),
            free_extra: Vec::new(),
        }
    }

    pub fn with_extra(mut self, b: DenseMatrix, s: Vec<f64>) -> Self {
        self.b = b;
        self.s = s;
        self
    }

    pub fn with_free(mut self, free_bilinear: Vec<usize>, free_extra: Vec<usize>) -> Self {
        self.free_bilinear = free_bilinear;
        self.free_extra = free_extra;
        self
    }

    pub fn n_bilinear(&self) -> usize {
        self.a.cols()
    }

    pub fn n_extra(&self) -> usize {
        self.b.cols()
    }

    pub fn n_rows(&self) -> usize {
        self.rhs.len()
    }

    fn validate(&self, name: &str) -> Result<()> {
        let m = self.rhs.len();
        let bad = |what: &str| Err(Error::DimensionMismatch(format!("{name}: {what}")));
        if self.a.rows() != m || self.b.rows() != m {
            return bad("constraint row counts differ from rhs length");
        }
        if self.r.len() != self.a.cols() {
            return bad("linear objective length differs from bilinear variable count");
        }
        if self.s.len() != self.b.cols() {
            return bad("extra objective length differs from extra variable count");
        }
        if self.free_bilinear.iter().any(|&j| j >= self.a.cols())
            || self.free_extra.iter().any(|&j| j >= self.b.cols())
        {
            return bad("free index out of range");
        }
        let finite = self.a.is_finite()
            && self.b.is_finite()
            && self.rhs.iter().chain(&self.r).chain(&self.s).all(|v| v.is_finite());
        if !finite {
            return bad("non-finite coefficient");
        }
        Ok(())
    }

    /// Constraint matrix over the stacked variables `[bilinear, extra]`.
    pub fn stacked(&self) -> DenseMatrix {
        self.a.hstack(&self.b)
    }

    /// Indices of free variables in the stacked `[bilinear, extra]` order.
    pub fn stacked_free(&self) -> Vec<usize> {
        let n = self.n_bilinear();
        let mut f: Vec<usize> = self.free_bilinear.clone();
        f.extend(self.free_extra.iter().map(|j| n + j));
        f.sort_unstable();
        f.dedup();
        f
    }

    /// LP over this side's feasible set with objective `c_bilᵀv + c_extraᵀe`.
    pub fn lp(&self, sense: Sense, c_bil: &[f64], c_extra: &[f64]) -> LpProblem {
        let mut c = c_bil.to_vec();
        c.extend_from_slice(c_extra);
        let a = self.stacked();
        match self.sense {
            ConstraintSense::Equality => LpProblem::new(sense, c, a, self.rhs.clone()),
            ConstraintSense::Inequality => {
                let n = c.len();
                LpProblem::new(sense, c, DenseMatrix::zeros(0, n), Vec::new())
                    .with_inequalities(a, self.rhs.clone())
            }
        }
    }

    /// Solves [`Side::lp`], splitting the primal back into `(bilinear, extra)`.
    pub fn optimize(&self, sense: Sense, c_bil: &[f64], c_extra: &[f64]) -> SideSolution {
        let lp = self.lp(sense, c_bil, c_extra);
        let sol = solve_lp_with_free_vars(&lp, &self.stacked_free());
        SideSolution::new(sol, self.n_bilinear())
    }

    /// Whether `(v, e)` satisfies the constraints within `tol`.
    pub fn is_feasible(&self, v: &[f64], e: &[f64], tol: f64) -> bool {
        if v.len() != self.n_bilinear() || e.len() != self.n_extra() {
            return false;
        }
        let nonneg_v = v
            .iter()
            .enumerate()
            .all(|(j, &x)| x >= -tol || self.free_bilinear.contains(&j));
        let nonneg_e = e
            .iter()
            .enumerate()
            .all(|(j, &x)| x >= -tol || self.free_extra.contains(&j));
        if !nonneg_v || !nonneg_e {
            return false;
        }
        let av = self.a.mul_vec(v);
        let be = self.b.mul_vec(e);
        av.iter().zip(&be).zip(&self.rhs).all(|((p, q), b)| {
            let lhs = p + q;
            let scale = 1.0 + b.abs();
            match self.sense {
                ConstraintSense::Equality => (lhs - b).abs() <= tol * scale,
                ConstraintSense::Inequality => lhs <= b + tol * scale,
            }
        })
    }

    /// Equality form with one slack per row appended to the extra variables.
    pub(crate) fn with_slacks(&self) -> Side {
        if self.sense == ConstraintSense::Equality {
            return self.clone();
        }
        let m = self.n_rows();
        let mut s = self.s.clone();
        s.extend(std::iter::repeat_n(0.0, m));
        Side {
            a: self.a.clone(),
            b: self.b.hstack(&DenseMatrix::identity(m)),
            rhs: self.rhs.clone(),
            r: self.r.clone(),
            s,
            sense: ConstraintSense::Equality,
            free_bilinear: self.free_bilinear.clone(),
            free_extra: self.free_extra.clone(),
        }
    }
}

/// LP result over one side.
#[derive(Debug, Clone)]
pub struct SideSolution {
    pub status: LpStatus,
    pub bilinear: Vec<f64>,
    pub extra: Vec<f64>,
    pub objective: f64,
    pub lp: LpSolution,
}

impl SideSolution {
    fn new(lp: LpSolution, n_bilinear: usize) -> Self {
        let (bilinear, extra) = if lp.is_optimal() {
            let (a, b) = lp.x.split_at(n_bilinear);
            (a.to_vec(), b.to_vec())
        } else {
            (Vec::new(), Vec::new())
        };
        Self {
            status: lp.status,
            bilinear,
            extra,
            objective: lp.objective,
            lp,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilinearProgram {
    /// Constraints on `(x, w)`.
    pub side1: Side,
    /// Constraints on `(y, z)`.
    pub side2: Side,
    /// `|x| × |y|` coupling matrix.
    pub c: DenseMatrix,
    /// Constant added to the objective.
    pub offset: f64,
}

/// Variable counts of a program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub w: usize,
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub w: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
}

impl Assignment {
    /// Keeps the leading entries of each block.
    pub fn truncate(&self, dims: Dims) -> Assignment {
        Assignment {
            w: self.w[..dims.w].to_vec(),
            x: self.x[..dims.x].to_vec(),
            y: self.y[..dims.y].to_vec(),
            z: self.z[..dims.z].to_vec(),
        }
    }
}

impl BilinearProgram {
    pub fn new(side1: Side, side2: Side, c: DenseMatrix) -> Result<Self> {
        let p = Self {
            side1,
            side2,
            c,
            offset: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.side1.validate("side 1")?;
        self.side2.validate("side 2")?;
        if self.c.rows() != self.side1.n_bilinear() || self.c.cols() != self.side2.n_bilinear() {
            return Err(Error::DimensionMismatch(format!(
                "coupling matrix is {}x{}, expected {}x{}",
                self.c.rows(),
                self.c.cols(),
                self.side1.n_bilinear(),
                self.side2.n_bilinear()
            )));
        }
        if !self.c.is_finite() || !self.offset.is_finite() {
            return Err(Error::DimensionMismatch("non-finite coupling entry".into()));
        }
        Ok(())
    }

    pub fn dims(&self) -> Dims {
        Dims {
            w: self.side1.n_extra(),
            x: self.side1.n_bilinear(),
            y: self.side2.n_bilinear(),
            z: self.side2.n_extra(),
        }
    }

    /// Dimensionality `|y|`.
    pub fn dimensionality(&self) -> usize {
        self.side2.n_bilinear()
    }

    pub fn form(&self) -> Form {
        let zero = |v: &[f64]| v.iter().all(|&x| x == 0.0);
        match (zero(&self.side1.s), zero(&self.side2.s)) {
            (true, true) => Form::Compact,
            (false, true) => Form::SemiCompact,
            _ => Form::Normal,
        }
    }

    pub fn is_semi_compact(&self) -> bool {
        self.form() != Form::Normal
    }

    pub fn is_equality_form(&self) -> bool {
        self.side1.sense == ConstraintSense::Equality && self.side2.sense == ConstraintSense::Equality
    }

    /// The side-1 objective coefficients when `y` is fixed: `r₁ + C y`.
    pub fn x_objective(&self, y: &[f64]) -> Vec<f64> {
        let mut c = self.c.mul_vec(y);
        for (ci, ri) in c.iter_mut().zip(&self.side1.r) {
            *ci += ri;
        }
        c
    }

    /// The side-2 objective coefficients when `x` is fixed: `r₂ + Cᵀ x`.
    pub fn y_objective(&self, x: &[f64]) -> Vec<f64> {
        let mut c = self.c.tr_mul_vec(x);
        for (ci, ri) in c.iter_mut().zip(&self.side2.r) {
            *ci += ri;
        }
        c
    }

    /// Swaps the roles of the two sides.
    pub fn transpose(&self) -> BilinearProgram {
        BilinearProgram {
            side1: self.side2.clone(),
            side2: self.side1.clone(),
            c: self.c.transpose(),
            offset: self.offset,
        }
    }

    /// Whether the assignment satisfies both sides within `tol`.
    pub fn is_feasible(&self, a: &Assignment, tol: f64) -> bool {
        self.side1.is_feasible(&a.x, &a.w, tol) && self.side2.is_feasible(&a.y, &a.z, tol)
    }
}

/// `s₁ᵀw + r₁ᵀx + xᵀCy + r₂ᵀy + s₂ᵀz + offset`.
pub fn evaluate_objective(p: &BilinearProgram, a: &Assignment) -> Result<f64> {
    let d = p.dims();
    if a.w.len() != d.w || a.x.len() != d.x || a.y.len() != d.y || a.z.len() != d.z {
        return Err(Error::DimensionMismatch(format!(
            "assignment sizes ({}, {}, {}, {}) do not match program ({}, {}, {}, {})",
            a.w.len(),
            a.x.len(),
            a.y.len(),
            a.z.len(),
            d.w,
            d.x,
            d.y,
            d.z
        )));
    }
    Ok(dot(&p.side1.s, &a.w)
        + dot(&p.side1.r, &a.x)
        + dot(&a.x, &p.c.mul_vec(&a.y))
        + dot(&p.side2.r, &a.y)
        + dot(&p.side2.s, &a.z)
        + p.offset)
}

/// Replaces inequality rows by equalities with slack columns appended to `w` / `z`.
///
/// The original assignment is recovered with [`Assignment::truncate`] on the
/// input's [`Dims`].
pub fn to_normal_form(p: &BilinearProgram) -> BilinearProgram {
    BilinearProgram {
        side1: p.side1.with_slacks(),
        side2: p.side2.with_slacks(),
        c: p.c.clone(),
        offset: p.offset,
    }
}

/// Moves `s₂ᵀz` into the bilinear term through `x̂ = 1` and `ŷ = s₂ᵀz`.
///
/// The input is brought to equality form first. Programs that are already
/// semi-compact are returned unchanged (apart from that normalization). The
/// new variables are appended last to `x` and `y`; `ŷ` is free.
pub fn to_semi_compact(p: &BilinearProgram) -> BilinearProgram {
    let p = to_normal_form(p);
    if p.is_semi_compact() {
        return p;
    }
    let d = p.dims();

    let s1 = &p.side1;
    let mut a1 = s1.a.hstack(&DenseMatrix::zeros(s1.n_rows(), 1));
    let mut hat_row = vec![0.0; d.x + 1];
    hat_row[d.x] = 1.0;
    a1 = a1.vstack(&DenseMatrix::from_rows(&[hat_row]));
    let b1 = s1.b.vstack(&DenseMatrix::zeros(1, d.w));
    let mut rhs1 = s1.rhs.clone();
    rhs1.push(1.0);
    let mut r1 = s1.r.clone();
    r1.push(0.0);
    let side1 = Side {
        a: a1,
        b: b1,
        rhs: rhs1,
        r: r1,
        s: s1.s.clone(),
        sense: ConstraintSense::Equality,
        free_bilinear: s1.free_bilinear.clone(),
        free_extra: s1.free_extra.clone(),
    };

    let s2 = &p.side2;
    let mut a2 = s2.a.hstack(&DenseMatrix::zeros(s2.n_rows(), 1));
    let mut hat_row = vec![0.0; d.y + 1];
    hat_row[d.y] = 1.0;
    a2 = a2.vstack(&DenseMatrix::from_rows(&[hat_row]));
    let neg_s2: Vec<f64> = s2.s.iter().map(|v| -v).collect();
    let b2 = s2.b.vstack(&DenseMatrix::from_rows(&[neg_s2]));
    let mut rhs2 = s2.rhs.clone();
    rhs2.push(0.0);
    let mut r2 = s2.r.clone();
    r2.push(0.0);
    let mut free2 = s2.free_bilinear.clone();
    free2.push(d.y);
    let side2 = Side {
        a: a2,
        b: b2,
        rhs: rhs2,
        r: r2,
        s: vec![0.0; d.z],
        sense: ConstraintSense::Equality,
        free_bilinear: free2,
        free_extra: s2.free_extra.clone(),
    };

    let c = p.c.block_diag(&DenseMatrix::identity(1));
    BilinearProgram {
        side1,
        side2,
        c,
        offset: p.offset,
    }
}

/// Maps a feasible assignment of `p` to the matching point of
/// `to_semi_compact(p)` (slacks filled in, `x̂ = 1`, `ŷ = s₂ᵀz`).
pub fn lift_to_semi_compact(p: &BilinearProgram, a: &Assignment) -> Assignment {
    let mut out = lift_to_normal_form(p, a);
    let n = to_normal_form(p);
    if !n.is_semi_compact() {
        out.x.push(1.0);
        out.y.push(dot(&n.side2.s, &out.z));
    }
    out
}

/// Maps a feasible assignment of `p` to `to_normal_form(p)` by filling slacks.
pub fn lift_to_normal_form(p: &BilinearProgram, a: &Assignment) -> Assignment {
    let slacks = |side: &Side, v: &[f64], e: &[f64]| -> Vec<f64> {
        if side.sense == ConstraintSense::Equality {
            return Vec::new();
        }
        let av = side.a.mul_vec(v);
        let be = side.b.mul_vec(e);
        side.rhs
            .iter()
            .zip(av.iter().zip(&be))
            .map(|(b, (p, q))| (b - p - q).max(0.0))
            .collect()
    };
    let mut w = a.w.clone();
    w.extend(slacks(&p.side1, &a.x, &a.w));
    let mut z = a.z.clone();
    z.extend(slacks(&p.side2, &a.y, &a.z));
    Assignment {
        w,
        x: a.x.clone(),
        y: a.y.clone(),
        z,
    }
}

/// One stored best response `(x, w)`, seen as an affine function of `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponsePlane {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    /// `s₁ᵀw + r₁ᵀx + offset`.
    pub offset: f64,
    /// `Cᵀx + r₂`.
    pub slope: Vec<f64>,
    /// The `y` this response was computed for.
    pub source_pivot: Vec<f64>,
}

impl ResponsePlane {
    pub fn from_response(p: &BilinearProgram, x: Vec<f64>, w: Vec<f64>, pivot: Vec<f64>) -> Self {
        let offset = dot(&p.side1.s, &w) + dot(&p.side1.r, &x) + p.offset;
        let slope = p.y_objective(&x);
        Self {
            x,
            w,
            offset,
            slope,
            source_pivot: pivot,
        }
    }

    #[inline]
    pub fn value(&self, y: &[f64]) -> f64 {
        self.offset + dot(&self.slope, y)
    }
}

/// Best response of side 1 to `y` in a semi-compact program, with `g(y)`.
///
/// `y` need not be feasible for side 2.
pub fn best_response(p: &BilinearProgram, y: &[f64]) -> Result<(ResponsePlane, f64)> {
    if !p.is_semi_compact() {
        return Err(Error::NotSemiCompact);
    }
    let (x, w) = side1_response(p, y)?;
    let plane = ResponsePlane::from_response(p, x, w, y.to_vec());
    let g = plane.value(y);
    Ok((plane, g))
}

fn side1_response(p: &BilinearProgram, y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if y.len() != p.dimensionality() {
        return Err(Error::DimensionMismatch(format!(
            "y has length {}, expected {}",
            y.len(),
            p.dimensionality()
        )));
    }
    let sol = p.side1.optimize(Sense::Maximize, &p.x_objective(y), &p.side1.s);
    match sol.status {
        LpStatus::Optimal => Ok((sol.bilinear, sol.extra)),
        LpStatus::Infeasible => Err(Error::XInfeasible),
        LpStatus::Unbounded => Err(Error::XUnbounded),
        LpStatus::IterationLimit => Err(Error::LpIterationLimit),
    }
}

/// Best-response value for any program form: the side-1 optimum against `y`
/// plus the best `s₂ᵀz` compatible with `y`. Returns `-∞` when no `z` makes
/// `(y, z)` feasible.
pub fn best_response_value(p: &BilinearProgram, y: &[f64]) -> Result<f64> {
    let (x, w) = side1_response(p, y)?;
    let g_prime = dot(&p.side1.s, &w) + dot(&p.x_objective(y), &x) + dot(&p.side2.r, y) + p.offset;
    let t = best_extra_value(&p.side2, y)?;
    Ok(g_prime + t)
}

/// `max s₂ᵀz` over `z` with `(y, z)` feasible.
fn best_extra_value(side: &Side, y: &[f64]) -> Result<f64> {
    for (j, &v) in y.iter().enumerate() {
        if v < 0.0 && !side.free_bilinear.contains(&j) {
            return Ok(f64::NEG_INFINITY);
        }
    }
    let ay = side.a.mul_vec(y);
    let rhs: Vec<f64> = side.rhs.iter().zip(&ay).map(|(b, v)| b - v).collect();
    let n = side.n_extra();
    let lp = match side.sense {
        ConstraintSense::Equality => LpProblem::maximize(side.s.clone(), side.b.clone(), rhs),
        ConstraintSense::Inequality => {
            LpProblem::maximize(side.s.clone(), DenseMatrix::zeros(0, n), Vec::new())
                .with_inequalities(side.b.clone(), rhs)
        }
    };
    let sol = solve_lp_with_free_vars(&lp, &side.free_extra);
    match sol.status {
        LpStatus::Optimal => Ok(sol.objective),
        LpStatus::Infeasible => Ok(f64::NEG_INFINITY),
        LpStatus::Unbounded => Ok(f64::INFINITY),
        LpStatus::IterationLimit => Err(Error::LpIterationLimit),
    }
}

/// The best side-2 response to each stored plane; returns the best pair.
///
/// Ties keep the earliest plane.
pub fn extract_incumbent(p: &BilinearProgram, planes: &[ResponsePlane]) -> Result<(Assignment, f64)> {
    let mut best: Option<(Assignment, f64)> = None;
    for plane in planes {
        let (y, z, v) = respond_to_plane(p, plane)?;
        if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
            best = Some((
                Assignment {
                    w: plane.w.clone(),
                    x: plane.x.clone(),
                    y,
                    z,
                },
                v,
            ));
        }
    }
    best.ok_or_else(|| Error::DimensionMismatch("no response planes supplied".into()))
}

/// Side-2 best response `(y, z)` to one plane and the resulting objective.
pub fn respond_to_plane(p: &BilinearProgram, plane: &ResponsePlane) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let sol = p.side2.optimize(Sense::Maximize, &plane.slope, &p.side2.s);
    match sol.status {
        LpStatus::Optimal => {
            let v = plane.value(&sol.bilinear) + dot(&p.side2.s, &sol.extra);
            Ok((sol.bilinear, sol.extra, v))
        }
        LpStatus::Infeasible => Err(Error::YInfeasible),
        LpStatus::Unbounded => Err(Error::YUnbounded),
        LpStatus::IterationLimit => Err(Error::LpIterationLimit),
    }
}

/// Small hand-checkable program whose best response is not convex unless the
/// program is made semi-compact:
///
/// ```text
/// maximize −x + xy − 2z   s.t.  −1 ≤ x ≤ 1,  y − z ≤ 2,  z ≥ 0   (x, y free)
/// ```
///
/// Its best response is `g(y) = |y − 1| − 2·max(0, y − 2)`.
pub fn nonconvex_sample() -> BilinearProgram {
    let side1 = Side::new(
        DenseMatrix::from_rows(&[[1.0], [-1.0]]),
        vec![1.0, 1.0],
        vec![-1.0],
        ConstraintSense::Inequality,
    )
    .with_free(vec![0], vec![]);
    let side2 = Side::new(
        DenseMatrix::from_rows(&[[1.0]]),
        vec![2.0],
        vec![0.0],
        ConstraintSense::Inequality,
    )
    .with_extra(DenseMatrix::from_rows(&[[-1.0]]), vec![-2.0])
    .with_free(vec![0], vec![]);
    BilinearProgram::new(side1, side2, DenseMatrix::from_rows(&[[1.0]])).expect("consistent sample")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn analytic_g(y: f64) -> f64 {
        (y - 1.0).abs() - 2.0 * (y - 2.0).max(0.0)
    }

    #[test]
    fn zero_program_evaluates_to_zero() {
        let side = Side::new(DenseMatrix::from_rows(&[[1.0, 1.0]]), vec![1.0], vec![0.0; 2], ConstraintSense::Equality);
        let p = BilinearProgram::new(side.clone(), side, DenseMatrix::zeros(2, 2)).unwrap();
        let a = Assignment {
            w: vec![],
            x: vec![0.3, 0.7],
            y: vec![0.9, 0.1],
            z: vec![],
        };
        assert_eq!(evaluate_objective(&p, &a).unwrap(), 0.0);
    }

    #[test]
    fn nonconvex_sample_objective() {
        let p = nonconvex_sample();
        let a = Assignment {
            w: vec![],
            x: vec![1.0],
            y: vec![3.0],
            z: vec![1.0],
        };
        assert_eq!(evaluate_objective(&p, &a).unwrap(), 0.0);
        let bad = Assignment { z: vec![], ..a };
        assert!(matches!(evaluate_objective(&p, &bad), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn normal_form_slack_counts() {
        let p = nonconvex_sample();
        let n = to_normal_form(&p);
        assert_eq!(n.dims(), Dims { w: 2, x: 1, y: 1, z: 2 });
        let added = (n.dims().w - p.dims().w) + (n.dims().z - p.dims().z);
        assert_eq!(added, 3);
        assert!(n.is_equality_form());
        assert_eq!(to_normal_form(&n), n);

        let single = BilinearProgram::new(
            Side::new(DenseMatrix::from_rows(&[[1.0, 2.0]]), vec![4.0], vec![1.0, 1.0], ConstraintSense::Inequality),
            Side::new(DenseMatrix::from_rows(&[[1.0]]), vec![1.0], vec![0.0], ConstraintSense::Equality),
            DenseMatrix::zeros(2, 1),
        )
        .unwrap();
        let n = to_normal_form(&single);
        assert_eq!(n.dims().w, 1);
        assert_eq!(n.side1.b, DenseMatrix::identity(1));
    }

    #[test]
    fn semi_compact_shapes() {
        let p = nonconvex_sample();
        let s = to_semi_compact(&p);
        assert_eq!(s.dims().y, 2);
        assert_eq!(s.dims().x, 2);
        assert!(s.is_semi_compact());
        let expect = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(s.c, expect);
        // already semi-compact input only gets normalized
        assert_eq!(to_semi_compact(&s), s);
    }

    #[test]
    fn best_response_on_semi_compact_sample() {
        let s = to_semi_compact(&nonconvex_sample());
        for (y, want) in [(0.0, 1.0), (2.0, 1.0), (1.0, 0.0)] {
            let (plane, g) = best_response(&s, &[y, 0.0]).unwrap();
            assert!((g - want).abs() < 1e-12, "g({y}) = {g}");
            assert!((plane.value(&[y, 0.0]) - g).abs() < 1e-12);
        }
        // the ŷ coordinate enters linearly
        let (_, g) = best_response(&s, &[0.0, -3.0]).unwrap();
        assert!((g - (1.0 - 3.0)).abs() < 1e-12);
        assert_eq!(best_response(&nonconvex_sample(), &[0.0]).unwrap_err(), Error::NotSemiCompact);
    }

    #[test]
    fn general_best_response_matches_analytic_form() {
        let p = nonconvex_sample();
        for k in -8..=16 {
            let y = k as f64 * 0.25;
            let g = best_response_value(&p, &[y]).unwrap();
            assert!((g - analytic_g(y)).abs() < 1e-9, "y={y}: {g}");
        }
        let mid = best_response_value(&p, &[2.0]).unwrap();
        let ends = 0.5 * (best_response_value(&p, &[1.0]).unwrap() + best_response_value(&p, &[3.0]).unwrap());
        assert!((mid - ends - 1.0).abs() < 1e-9);
    }

    #[test]
    fn response_plane_matches_objective() {
        let s = to_semi_compact(&nonconvex_sample());
        let (plane, _) = best_response(&s, &[0.5, 0.0]).unwrap();
        for k in 0..20 {
            let y = vec![k as f64 * 0.37 - 2.0, k as f64 * -0.11];
            let a = Assignment {
                w: plane.w.clone(),
                x: plane.x.clone(),
                y: y.clone(),
                z: vec![0.0; s.dims().z],
            };
            assert!((plane.value(&y) - evaluate_objective(&s, &a).unwrap()).abs() < 1e-9);
        }
    }

    fn simplex_side(n: usize) -> Side {
        Side::new(DenseMatrix::from_rows(&[vec![1.0; n]]), vec![1.0], vec![0.0; n], ConstraintSense::Equality)
    }

    #[test]
    fn incumbent_single_point_and_domination() {
        let single = Side::new(DenseMatrix::identity(1), vec![0.5], vec![0.0], ConstraintSense::Equality);
        let p = BilinearProgram::new(simplex_side(2), single, DenseMatrix::from_rows(&[[1.0], [2.0]])).unwrap();
        let (plane, _) = best_response(&p, &[0.5]).unwrap();
        let (a, v) = extract_incumbent(&p, std::slice::from_ref(&plane)).unwrap();
        assert_eq!(a.y, vec![0.5]);
        assert!((v - plane.value(&[0.5])).abs() < 1e-12);

        let p = BilinearProgram::new(simplex_side(2), simplex_side(2), DenseMatrix::from_rows(&[[1.0, 0.0], [3.0, 2.0]])).unwrap();
        let low = ResponsePlane::from_response(&p, vec![1.0, 0.0], vec![], vec![0.0, 0.0]);
        let high = ResponsePlane::from_response(&p, vec![0.0, 1.0], vec![], vec![0.0, 0.0]);
        let (a, v) = extract_incumbent(&p, &[low, high]).unwrap();
        assert_eq!(a.x, vec![0.0, 1.0]);
        assert_eq!(v, 3.0);
    }

    #[test]
    fn lift_preserves_objective() {
        let p = nonconvex_sample();
        let a = Assignment {
            w: vec![],
            x: vec![0.25],
            y: vec![2.5],
            z: vec![0.75],
        };
        let s = to_semi_compact(&p);
        let l = lift_to_semi_compact(&p, &a);
        assert!(s.is_feasible(&l, 1e-12));
        let f0 = evaluate_objective(&p, &a).unwrap();
        let f1 = evaluate_objective(&s, &l).unwrap();
        assert!((f0 - f1).abs() < 1e-12);
        assert_eq!(l.truncate(p.dims()).x, a.x);
    }

    #[test]
    fn transpose_swaps_sides() {
        let p = nonconvex_sample();
        let t = p.transpose();
        assert_eq!(t.dims(), Dims { w: 1, x: 1, y: 1, z: 0 });
        assert_eq!(t.transpose(), p);
    }

    #[test]
    fn validation_catches_shape_errors() {
        let r = BilinearProgram::new(simplex_side(2), simplex_side(3), DenseMatrix::zeros(2, 2));
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }
}
