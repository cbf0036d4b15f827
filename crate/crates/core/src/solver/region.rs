//! Simplices covering `Y` and their subdivision.

use crate::bilinear::BilinearProgram;
use crate::error::{Error, Result};
use crate::linalg::{solve_linear, DenseMatrix};
use crate::lp::{LpStatus, Sense};

/// Barycentric coordinates below this count as lying on a face.
pub const INTERIOR_TOL: f64 = 1e-7;

/// One simplex of the triangulation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexRegion {
    pub vertices: Vec<Vec<f64>>,
    /// Keys into the solver's vertex store.
    pub vertex_ids: Vec<usize>,
    pub vertex_g: Vec<f64>,
    pub error_bound: f64,
    pub pivot: Vec<f64>,
    /// Barycentric coordinates of `pivot`.
    pub pivot_weights: Vec<f64>,
    pub active: bool,
}

impl SimplexRegion {
    pub fn dim(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn centroid(&self) -> Vec<f64> {
        centroid(&self.vertices)
    }
}

pub fn centroid(vertices: &[Vec<f64>]) -> Vec<f64> {
    let n = vertices.first().map_or(0, Vec::len);
    let k = vertices.len() as f64;
    let mut c = vec![0.0; n];
    for v in vertices {
        for (ci, vi) in c.iter_mut().zip(v) {
            *ci += vi / k;
        }
    }
    c
}

/// `T t` for vertex columns `T`.
pub fn combine(vertices: &[Vec<f64>], t: &[f64]) -> Vec<f64> {
    let n = vertices.first().map_or(0, Vec::len);
    let mut y = vec![0.0; n];
    for (v, &ti) in vertices.iter().zip(t) {
        if ti == 0.0 {
            continue;
        }
        for (yi, vi) in y.iter_mut().zip(v) {
            *yi += ti * vi;
        }
    }
    y
}

/// The `(n+1) × (n+1)` matrix `[T; 1ᵀ]`.
pub fn homogeneous_matrix(vertices: &[Vec<f64>]) -> DenseMatrix {
    let k = vertices.len();
    let n = k.saturating_sub(1);
    let mut m = DenseMatrix::zeros(n + 1, k);
    for (j, v) in vertices.iter().enumerate() {
        for (i, &x) in v.iter().enumerate() {
            m[(i, j)] = x;
        }
        m[(n, j)] = 1.0;
    }
    m
}

/// Solves `[T; 1ᵀ] t = [y; 1]`.
pub fn barycentric(vertices: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    let mut rhs = y.to_vec();
    rhs.push(1.0);
    solve_linear(&homogeneous_matrix(vertices), &rhs)
}

/// Split weights for a pivot with barycentric coordinates `t`.
///
/// Coordinates below [`INTERIOR_TOL`] are zeroed, so a pivot on a face splits
/// only the vertices spanning that face. A pivot at a vertex falls back to the centroid.
pub fn split_weights(t: &[f64]) -> Vec<f64> {
    let k = t.len();
    let kept: Vec<f64> = t.iter().map(|&v| if v >= INTERIOR_TOL { v } else { 0.0 }).collect();
    let sum: f64 = kept.iter().sum();
    if kept.iter().filter(|&&v| v > 0.0).count() < 2 || !sum.is_finite() {
        return centroid_weights(k);
    }
    kept.into_iter().map(|v| v / sum).collect()
}

pub fn centroid_weights(k: usize) -> Vec<f64> {
    vec![1.0 / k as f64; k]
}

/// Vertex lists of the children obtained by replacing each vertex by `pivot`.
///
/// Children whose replaced vertex has zero weight would be flat and are skipped;
/// the returned pairs hold the index of the replaced vertex.
pub fn split(vertices: &[Vec<f64>], pivot: &[f64], weights: &[f64]) -> Vec<(usize, Vec<Vec<f64>>)> {
    (0..vertices.len())
        .filter(|&k| weights[k] > 0.0)
        .map(|k| {
            let mut child = vertices.to_vec();
            child[k] = pivot.to_vec();
            (k, child)
        })
        .collect()
}

/// Per-coordinate range of `y` over `Y` (`2n` linear programs).
pub fn y_box(p: &BilinearProgram) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = p.dimensionality();
    let side = &p.side2;
    let mut lo = vec![0.0; n];
    let mut hi = vec![0.0; n];
    let zero_extra = vec![0.0; side.n_extra()];
    for j in 0..n {
        let mut c = vec![0.0; n];
        c[j] = 1.0;
        for (sense, out) in [(Sense::Minimize, &mut lo), (Sense::Maximize, &mut hi)] {
            let sol = side.optimize(sense, &c, &zero_extra);
            match sol.status {
                LpStatus::Optimal => out[j] = sol.bilinear[j],
                LpStatus::Infeasible => return Err(Error::YInfeasible),
                LpStatus::Unbounded => return Err(Error::YUnbounded),
                LpStatus::IterationLimit => return Err(Error::LpIterationLimit),
            }
        }
    }
    if n == 0 {
        let sol = side.optimize(Sense::Maximize, &[], &zero_extra);
        if sol.status == LpStatus::Infeasible {
            return Err(Error::YInfeasible);
        }
    }
    Ok((lo, hi))
}

/// A simplex containing `Y`: the per-coordinate box, padded, enclosed by
/// `{ℓ, ℓ + n·wᵢ·eᵢ}`.
pub fn initial_simplex(p: &BilinearProgram) -> Result<Vec<Vec<f64>>> {
    let (lo, hi) = y_box(p)?;
    Ok(simplex_around_box(&lo, &hi))
}

pub fn simplex_around_box(lo: &[f64], hi: &[f64]) -> Vec<Vec<f64>> {
    let n = lo.len();
    let mut l = vec![0.0; n];
    let mut w = vec![0.0; n];
    for j in 0..n {
        let width = hi[j] - lo[j];
        let pad = (0.01 * width).max(1e-3);
        l[j] = lo[j] - pad;
        w[j] = width + 2.0 * pad;
    }
    let mut out = vec![l.clone()];
    for j in 0..n {
        let mut v = l.clone();
        v[j] += n as f64 * w[j];
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilinear::{ConstraintSense, Side};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn planar_split() {
        let s = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let third = 1.0 / 3.0;
        let pivot = vec![third, third];
        let kids = split(&s, &pivot, &[third; 3]);
        assert_eq!(kids.len(), 3);
        assert_eq!(kids[0].1, vec![pivot.clone(), vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(kids[1].1, vec![vec![0.0, 0.0], pivot.clone(), vec![0.0, 1.0]]);
        assert_eq!(kids[2].1, vec![vec![0.0, 0.0], vec![1.0, 0.0], pivot]);
    }

    #[test]
    fn face_pivots_split_the_face() {
        assert_eq!(split_weights(&[0.5, 0.5, 0.0]), vec![0.5, 0.5, 0.0]);
        let w = split_weights(&[0.6, 0.4 - 1e-9, 1e-9]);
        assert_eq!(w[2], 0.0);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(split_weights(&[0.2, 0.3, 0.5]), vec![0.2, 0.3, 0.5]);
        assert_eq!(split_weights(&[1.0, 0.0, 0.0]), centroid_weights(3));
    }

    #[test]
    fn barycentric_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s: Vec<Vec<f64>> = (0..4).map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let t = [0.1, 0.2, 0.3, 0.4];
        let y = combine(&s, &t);
        let back = barycentric(&s, &y).unwrap();
        for (a, b) in back.iter().zip(t) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn enclosing_simplex_for_probability_simplex() {
        let side = Side::new(
            DenseMatrix::from_rows(&[[1.0, 1.0]]),
            vec![1.0],
            vec![0.0; 2],
            ConstraintSense::Inequality,
        );
        let p = BilinearProgram::new(side.clone(), side, DenseMatrix::zeros(2, 2)).unwrap();
        let s = initial_simplex(&p).unwrap();
        for y in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]] {
            let t = barycentric(&s, &y).unwrap();
            assert!(t.iter().all(|&v| v >= 0.0), "{y:?} -> {t:?}");
        }
    }

    #[test]
    fn single_point_region() {
        let side = Side::new(DenseMatrix::identity(1), vec![1.0], vec![0.0], ConstraintSense::Equality);
        let p = BilinearProgram::new(side.clone(), side, DenseMatrix::zeros(1, 1)).unwrap();
        let s = initial_simplex(&p).unwrap();
        let t = barycentric(&s, &[1.0]).unwrap();
        assert!(t.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn unbounded_and_empty_y() {
        let open = Side::new(DenseMatrix::from_rows(&[[1.0, -1.0]]), vec![0.0], vec![0.0; 2], ConstraintSense::Equality);
        let p = BilinearProgram::new(open.clone(), open, DenseMatrix::zeros(2, 2)).unwrap();
        assert_eq!(initial_simplex(&p).unwrap_err(), Error::YUnbounded);
        let empty = Side::new(DenseMatrix::identity(1), vec![-1.0], vec![0.0], ConstraintSense::Equality);
        let p = BilinearProgram::new(empty.clone(), empty, DenseMatrix::zeros(1, 1)).unwrap();
        assert_eq!(initial_simplex(&p).unwrap_err(), Error::YInfeasible);
    }
}
