use bilinear_core::bilinear::BilinearProgram;
use bilinear_core::linalg::{dot, solve_linear, DenseMatrix};
use bilinear_core::lp::{solve_lp, LpProblem, LpStatus};
use bilinear_core::models::{compile_game, equilibrium_residual, GameSpec};
use bilinear_core::oracle::brute_force_optimum;
use bilinear_core::pipeline::{solve_program, PipelineConfig};
use bilinear_core::random::{random_program, Shape};
use bilinear_core::reduction::{project_objective, projected_lp_objective, reduce, Scale};
use bilinear_core::solver::SolverConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Coupling with quickly decaying singular values.
fn graded_program(rng: &mut ChaCha8Rng) -> BilinearProgram {
    let shape = Shape { x: 3, w: 0, y: 3, z: 1, rows: 2 };
    let mut p = random_program(rng, shape);
    let mut c = DenseMatrix::zeros(3, 3);
    for k in 0..3 {
        let scale = 10f64.powi(-k);
        let u: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        for i in 0..3 {
            for j in 0..3 {
                c[(i, j)] += scale * u[i] * v[j];
            }
        }
    }
    p.c = c;
    p
}

#[test]
fn reduced_optimum_is_within_the_error_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut dropped = 0;
    for i in 0..30 {
        let p = graded_program(&mut rng);
        let epsilon = [0.0, 1e-3, 1e-2, 0.1, 1.0][i % 5];
        let r = reduce(&p, epsilon, Scale::Auto).unwrap();
        let (_, full) = brute_force_optimum(&p).unwrap().unwrap();
        let (a, reduced) = brute_force_optimum(&r.program).unwrap().unwrap();
        assert!(
            (full - reduced).abs() <= r.error_bound + 1e-7,
            "#{i} ε={epsilon}: |{full} − {reduced}| > {}",
            r.error_bound
        );
        let restored = r.restore(&a);
        assert!(p.is_feasible(&restored, 1e-7));
        dropped += p.dimensionality() - r.kept_dims;
    }
    assert!(dropped > 0);
}

#[test]
fn pipeline_bound_covers_the_reduction() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        let p = graded_program(&mut rng);
        let (_, full) = brute_force_optimum(&p).unwrap().unwrap();
        let config = PipelineConfig {
            reduce_epsilon: 0.05,
            solver: SolverConfig { epsilon: 1e-6, ..SolverConfig::default() },
            ..PipelineConfig::default()
        };
        let r = solve_program(&p, &config).unwrap();
        assert!(p.is_feasible(&r.assignment, 1e-7));
        assert!(r.value <= full + 1e-7);
        assert!(r.value + r.bound >= full - 1e-7, "{} + {} < {full}", r.value, r.bound);
    }
}

/// `max cᵀx, Ax = b, x ≥ 0` with a random feasible `b` and bounded feasible set.
fn random_lp(rng: &mut ChaCha8Rng) -> (Vec<f64>, DenseMatrix, Vec<f64>) {
    let n = rng.random_range(3..=6);
    let m = rng.random_range(1..n);
    let mut a = DenseMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            a[(i, j)] = rng.random_range(0.1..1.0);
        }
    }
    let x0: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    let b = a.mul_vec(&x0);
    let c = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    (c, a, b)
}

#[test]
fn projected_lp_objective_shifts_by_a_constant() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for i in 0..20 {
        let (c, a, b) = random_lp(&mut rng);
        let (qc, shift) = projected_lp_objective(&c, &a, &b).unwrap();

        // independent closed form of the shift
        let aat = a.matmul(&a.transpose());
        let expected = dot(&c, &a.tr_mul_vec(&solve_linear(&aat, &b).unwrap()));
        assert!((shift - expected).abs() < 1e-7, "#{i}");

        let original = solve_lp(&LpProblem::maximize(c.clone(), a.clone(), b.clone()));
        let projected = solve_lp(&LpProblem::maximize(qc.clone(), a.clone(), b.clone()));
        assert_eq!(original.status, LpStatus::Optimal);
        assert_eq!(projected.status, LpStatus::Optimal);
        assert!((original.objective - projected.objective - expected).abs() < 1e-7, "#{i}");
        // each solution is optimal for the other objective
        assert!((dot(&c, &projected.x) - original.objective).abs() < 1e-7);
        assert!((dot(&qc, &original.x) - projected.objective).abs() < 1e-7);
        // Qc lies in the null space of A
        assert!(a.mul_vec(&qc).iter().all(|v| v.abs() < 1e-9));
    }
}

fn zero_sum(c1: DenseMatrix) -> GameSpec {
    let c2 = c1.scale(-1.0);
    GameSpec::bimatrix(c1, c2)
}

#[test]
fn zero_sum_games_decouple() {
    // matching pennies has value 0; the second game has value 1/5 at x = y = (2/5, 3/5)
    let cases = [
        (DenseMatrix::from_rows(&[[1.0, -1.0], [-1.0, 1.0]]), 0.0),
        (DenseMatrix::from_rows(&[[2.0, -1.0], [-1.0, 1.0]]), 0.2),
    ];
    for (c1, value) in cases {
        let g = zero_sum(c1.clone());
        let p = compile_game(&g).unwrap();
        let projected = project_objective(&p).unwrap();
        let r = reduce(&projected, 1e-4, Scale::Auto).unwrap();
        assert_eq!(r.kept_dims, 0);

        let config = PipelineConfig {
            project: true,
            solver: SolverConfig { epsilon: 1e-7, ..SolverConfig::default() },
            ..PipelineConfig::default()
        };
        let s = solve_program(&p, &config).unwrap();
        assert_eq!(s.kept_dims, 0);
        assert!(s.value.abs() < 1e-7, "equilibrium program value {}", s.value);
        let (x, y) = (&s.assignment.x, &s.assignment.y);
        assert!(equilibrium_residual(&g, x, y).unwrap() < 1e-7);
        let minimax = dot(x, &c1.mul_vec(y));
        assert!((minimax - value).abs() < 1e-7, "{minimax} vs {value}");
    }
}
