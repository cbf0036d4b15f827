//! Alternating best responses from a random start.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bilinear::{evaluate_objective, Assignment, BilinearProgram, Side, SideSolution};
use crate::error::{Error, Result};
use crate::lp::{LpStatus, Sense};

const CHANGE_TOL: f64 = 1e-9;
const MAX_ROUNDS: usize = 1000;

/// Local optimum reached by alternating side-2 and side-1 best responses.
///
/// The start is the side-1 vertex maximizing a random objective drawn from
/// `seed`. The returned value is the objective of a feasible point, hence a
/// lower bound on the optimum.
pub fn iterative_best_response(p: &BilinearProgram, seed: u64) -> Result<(Assignment, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    iterative_best_response_with(p, &mut rng)
}

pub fn iterative_best_response_with<R: Rng>(p: &BilinearProgram, rng: &mut R) -> Result<(Assignment, f64)> {
    let s1 = &p.side1;
    let c_x: Vec<f64> = (0..s1.n_bilinear()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let c_w: Vec<f64> = (0..s1.n_extra()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let start = side_or_err(s1, &c_x, &c_w, Error::XInfeasible, Error::XUnbounded)?;
    let (mut x, mut w) = (start.bilinear, start.extra);
    let mut y: Option<Vec<f64>> = None;
    let mut z: Vec<f64> = Vec::new();

    for _ in 0..MAX_ROUNDS {
        let r2 = side_or_err(&p.side2, &p.y_objective(&x), &p.side2.s, Error::YInfeasible, Error::YUnbounded)?;
        let r1 = side_or_err(&p.side1, &p.x_objective(&r2.bilinear), &p.side1.s, Error::XInfeasible, Error::XUnbounded)?;
        let y_same = y.as_ref().is_some_and(|old| max_change(old, &r2.bilinear) < CHANGE_TOL);
        let x_same = max_change(&x, &r1.bilinear) < CHANGE_TOL;
        y = Some(r2.bilinear);
        z = r2.extra;
        x = r1.bilinear;
        w = r1.extra;
        if x_same && y_same {
            break;
        }
    }
    let a = Assignment {
        w,
        x,
        y: y.unwrap_or_default(),
        z,
    };
    let v = evaluate_objective(p, &a)?;
    Ok((a, v))
}

fn side_or_err(side: &Side, c_b: &[f64], c_e: &[f64], infeasible: Error, unbounded: Error) -> Result<SideSolution> {
    let s = side.optimize(Sense::Maximize, c_b, c_e);
    match s.status {
        LpStatus::Optimal => Ok(s),
        LpStatus::Infeasible => Err(infeasible),
        LpStatus::Unbounded => Err(unbounded),
        LpStatus::IterationLimit => Err(Error::LpIterationLimit),
    }
}

fn max_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (p, q)| m.max((p - q).abs()))
}
