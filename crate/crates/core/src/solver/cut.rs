//! Half-spaces that remove parts of a simplex where `g` stays below the
//! incumbent value `h`.
//!
//! Inside a semi-compact program `g` is convex, so `{y | g(y) ≤ h}` is convex.
//! A vertex of the simplex with `g < h` lies in that set; along each edge to a
//! vertex with `g ≥ h` the set ends at a single crossing point. A hyperplane
//! through the crossing points that keeps every crossing on its retained side
//! removes only points with `g ≤ h`.

use crate::bilinear::{best_response, BilinearProgram, ConstraintSense, ResponsePlane};
use crate::error::{Error, Result};
use crate::linalg::{dot, solve_linear, svd, DenseMatrix};
use crate::lp::{solve_lp_with_free_vars, LpProblem, LpStatus, Sense};

const CROSSING_TOL: f64 = 1e-9;
const MAX_NEWTON_STEPS: usize = 64;

/// The retained half-space `σᵀy ≤ τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub sigma: Vec<f64>,
    pub tau: f64,
}

impl Cut {
    #[inline]
    pub fn level(&self, y: &[f64]) -> f64 {
        dot(&self.sigma, y)
    }

    pub fn keeps(&self, y: &[f64], tol: f64) -> bool {
        self.level(y) <= self.tau + tol
    }
}

fn edge_point(from: &[f64], to: &[f64], beta: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| a + beta * (b - a)).collect()
}

/// Largest `β ∈ [0, 1]` with `g(from + β(to − from)) ≤ h`, assuming `g(from) < h`.
///
/// Newton iteration on the convex piecewise-linear restriction of `g` to the
/// edge, started from the best response `start` at `to`. Each tangent plane
/// underestimates `g`, so the iterates decrease monotonically to the crossing.
pub fn edge_crossing(
    p: &BilinearProgram,
    from: &[f64],
    to: &[f64],
    start: &ResponsePlane,
    h: f64,
) -> Result<f64> {
    let tol = CROSSING_TOL * (1.0 + h.abs());
    if start.value(to) <= h + tol {
        return Ok(1.0);
    }
    let dir: Vec<f64> = to.iter().zip(from).map(|(a, b)| a - b).collect();
    let mut plane = start.clone();
    let mut hi = 1.0;
    for _ in 0..MAX_NEWTON_STEPS {
        let a = plane.value(from);
        let s = dot(&plane.slope, &dir);
        if s <= 0.0 {
            return Ok(0.0);
        }
        let beta = ((h - a) / s).clamp(0.0, hi);
        let (next, g) = best_response(p, &edge_point(from, to, beta))?;
        if g <= h + tol || hi - beta <= 1e-15 {
            return Ok(beta);
        }
        hi = beta;
        plane = next;
    }
    Ok(hi)
}

/// Dual system of the best-response LP with `y = from + β(to − from)` substituted:
/// `b₁ᵀλ + r₂ᵀy + offset ≤ h`, `A₁ᵀλ ≥ r₁ + Cy`, `B₁ᵀλ ≥ s₁`, `0 ≤ β ≤ beta_max`.
fn dual_system(p: &BilinearProgram, from: &[f64], to: &[f64], h: f64, beta_max: f64) -> (LpProblem, Vec<usize>) {
    let s1 = &p.side1;
    let m = s1.n_rows();
    let nx = s1.n_bilinear();
    let nw = s1.n_extra();
    let dir: Vec<f64> = to.iter().zip(from).map(|(a, b)| a - b).collect();
    // variables: β, λ (m)
    let nv = 1 + m;
    let mut objective = vec![0.0; nv];
    objective[0] = 1.0;
    let mut eq_rows = Vec::new();
    let mut eq_rhs = Vec::new();
    let mut ub_rows = Vec::new();
    let mut ub_rhs = Vec::new();

    let mut row = vec![0.0; nv];
    row[0] = dot(&p.side2.r, &dir);
    row[1..].copy_from_slice(&s1.rhs);
    ub_rows.push(row);
    ub_rhs.push(h - p.offset - dot(&p.side2.r, from));

    let c_from = p.c.mul_vec(from);
    let c_dir = p.c.mul_vec(&dir);
    for l in 0..nx {
        // −(A₁ᵀλ)ₗ + β(C d)ₗ ≤ −r₁ₗ − (C from)ₗ
        let mut row = vec![0.0; nv];
        row[0] = c_dir[l];
        for i in 0..m {
            row[1 + i] = -s1.a[(i, l)];
        }
        let rhs = -s1.r[l] - c_from[l];
        if s1.free_bilinear.contains(&l) {
            eq_rows.push(row);
            eq_rhs.push(rhs);
        } else {
            ub_rows.push(row);
            ub_rhs.push(rhs);
        }
    }
    for l in 0..nw {
        let mut row = vec![0.0; nv];
        for i in 0..m {
            row[1 + i] = -s1.b[(i, l)];
        }
        let rhs = -s1.s[l];
        if s1.free_extra.contains(&l) {
            eq_rows.push(row);
            eq_rhs.push(rhs);
        } else {
            ub_rows.push(row);
            ub_rhs.push(rhs);
        }
    }
    let mut row = vec![0.0; nv];
    row[0] = 1.0;
    ub_rows.push(row);
    ub_rhs.push(beta_max);

    let mat = |rows: Vec<Vec<f64>>| {
        if rows.is_empty() {
            DenseMatrix::zeros(0, nv)
        } else {
            DenseMatrix::from_rows(&rows)
        }
    };
    let lp = LpProblem::new(Sense::Maximize, objective, mat(eq_rows), eq_rhs).with_inequalities(mat(ub_rows), ub_rhs);
    let free = if s1.sense == ConstraintSense::Equality {
        (1..nv).collect()
    } else {
        Vec::new()
    };
    (lp, free)
}

/// `g(y) ≤ h` decided by feasibility of the dual system, without computing `g`.
pub fn in_complement_lp(p: &BilinearProgram, y: &[f64], h: f64) -> Result<bool> {
    let (lp, free) = dual_system(p, y, y, h, 0.0);
    match solve_lp_with_free_vars(&lp, &free).status {
        LpStatus::Optimal => Ok(true),
        LpStatus::Infeasible => Ok(false),
        LpStatus::Unbounded => Ok(true),
        LpStatus::IterationLimit => Err(Error::LpIterationLimit),
    }
}

/// Largest `β ∈ [0, 1]` with `g(from + β(to − from)) ≤ h`, as a single LP over
/// `(β, λ)`; `None` when `g > h` on the whole edge.
pub fn edge_crossing_lp(p: &BilinearProgram, from: &[f64], to: &[f64], h: f64) -> Result<Option<f64>> {
    let (lp, free) = dual_system(p, from, to, h, 1.0);
    let sol = solve_lp_with_free_vars(&lp, &free);
    match sol.status {
        LpStatus::Optimal => Ok(Some(sol.x[0])),
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Ok(Some(1.0)),
        LpStatus::IterationLimit => Err(Error::LpIterationLimit),
    }
}

/// Cut for one simplex, computing edge crossings with [`edge_crossing`].
pub fn polyhedron_cut(
    p: &BilinearProgram,
    vertices: &[Vec<f64>],
    vertex_g: &[f64],
    planes: &[&ResponsePlane],
    h: f64,
) -> Result<Option<Cut>> {
    polyhedron_cut_with(vertices, vertex_g, h, |j, i| {
        edge_crossing(p, &vertices[j], &vertices[i], planes[i], h)
    })
}

/// Cut construction with a caller-supplied crossing oracle `crossing(j, i)`
/// returning `β` along the edge from vertex `j` (below `h`) to vertex `i`.
pub fn polyhedron_cut_with<F>(vertices: &[Vec<f64>], vertex_g: &[f64], h: f64, mut crossing: F) -> Result<Option<Cut>>
where
    F: FnMut(usize, usize) -> Result<f64>,
{
    if !h.is_finite() {
        return Ok(None);
    }
    let n = vertices.first().map_or(0, Vec::len);
    let inside: Vec<usize> = (0..vertices.len()).filter(|&i| vertex_g[i] < h).collect();
    let outside: Vec<usize> = (0..vertices.len()).filter(|&i| vertex_g[i] >= h).collect();
    if inside.is_empty() || outside.is_empty() || n == 0 {
        return Ok(None);
    }
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(inside.len() * outside.len());
    for &i in &outside {
        for &j in &inside {
            let beta = crossing(j, i)?;
            points.push(edge_point(&vertices[j], &vertices[i], beta));
        }
    }
    if points.len() < n {
        return Ok(None);
    }
    let Some(mut cut) = fit_hyperplane(&points[..n]) else {
        return Ok(None);
    };
    let scale = 1.0 + cut.tau.abs();
    let tol = 1e-9 * scale;
    if outside.iter().any(|&i| cut.level(&vertices[i]) > cut.tau + tol) {
        cut.sigma.iter_mut().for_each(|v| *v = -*v);
        cut.tau = -cut.tau;
    }
    let valid = outside.iter().all(|&i| cut.keeps(&vertices[i], tol))
        && inside.iter().all(|&j| cut.level(&vertices[j]) > cut.tau + tol)
        && points.iter().all(|f| cut.keeps(f, tol));
    Ok(valid.then_some(cut))
}

/// Hyperplane `σᵀf = τ` through `n` points in `ℝⁿ`, normalized by `1ᵀσ = 1`
/// when possible and by `‖σ‖ = 1` otherwise.
pub fn fit_hyperplane(points: &[Vec<f64>]) -> Option<Cut> {
    let n = points.len();
    if n == 0 || points.iter().any(|p| p.len() != n) {
        return None;
    }
    // [fₖᵀ, −1] (σ; τ) = 0 and 1ᵀσ = 1
    let mut m = DenseMatrix::zeros(n + 1, n + 1);
    for (k, f) in points.iter().enumerate() {
        for (j, &v) in f.iter().enumerate() {
            m[(k, j)] = v;
        }
        m[(k, n)] = -1.0;
    }
    for j in 0..n {
        m[(n, j)] = 1.0;
    }
    let mut rhs = vec![0.0; n + 1];
    rhs[n] = 1.0;
    if let Ok(sol) = solve_linear(&m, &rhs) {
        let tau = sol[n];
        let sigma = sol[..n].to_vec();
        if sigma.iter().chain(std::iter::once(&tau)).all(|v| v.is_finite()) {
            return Some(Cut { sigma, tau });
        }
    }
    // null space of the n × (n+1) system
    let sys = m.select_rows(&(0..n).collect::<Vec<_>>());
    let dec = svd(&sys.transpose().matmul(&sys));
    let sv = &dec.singular_values;
    if sv.len() < 2 || sv[0] == 0.0 || sv[sv.len() - 2] <= 1e-18 * sv[0] {
        return None;
    }
    let v = dec.vt.row(n).to_vec();
    let norm = v[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm <= 1e-12 {
        return None;
    }
    Some(Cut {
        sigma: v[..n].iter().map(|x| x / norm).collect(),
        tau: v[n] / norm,
    })
}
