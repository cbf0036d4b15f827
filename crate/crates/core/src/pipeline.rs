//! Full solve: optional objective projection, dimensionality reduction, then
//! successive approximation on the reduced program.

use crate::bilinear::{evaluate_objective, Assignment, BilinearProgram};
use crate::error::Result;
use crate::reduction::{project_objective, reduce, Scale};
use crate::solver::{solve, SolverConfig, TraceRow};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub solver: SolverConfig,
    /// Singular directions at or below this scaled value are dropped.
    pub reduce_epsilon: f64,
    pub project: bool,
    pub scale: Scale,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            reduce_epsilon: 1e-4,
            project: false,
            scale: Scale::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    /// Assignment of the input program.
    pub assignment: Assignment,
    /// Objective of the input program at `assignment`.
    pub value: f64,
    /// The optimum is at most `value + bound`.
    pub bound: f64,
    pub iterations: usize,
    pub converged: bool,
    pub kept_dims: usize,
    pub reduction_error: f64,
    /// Solver trace on the reduced program, with bounds widened by the reduction error.
    pub trace: Vec<TraceRow>,
}

pub fn solve_program(p: &BilinearProgram, config: &PipelineConfig) -> Result<PipelineResult> {
    p.validate()?;
    let projected = if config.project { project_objective(p)? } else { p.clone() };
    let reduction = reduce(&projected, config.reduce_epsilon, config.scale)?;
    let lossless = reduction.kept_dims == p.dimensionality() && reduction.error_bound == 0.0;

    let (assignment, solved, kept_dims, reduction_error) = if lossless {
        let r = solve(&projected, &config.solver)?;
        (r.assignment.clone(), r, p.dimensionality(), 0.0)
    } else {
        let r = solve(&reduction.program, &config.solver)?;
        (reduction.restore(&r.assignment), r, reduction.kept_dims, reduction.error_bound)
    };
    let widen = 2.0 * reduction_error;
    let trace = solved
        .trace
        .iter()
        .map(|row| TraceRow {
            error_bound: row.error_bound + widen,
            upper_bound: row.incumbent_value + row.error_bound + widen,
            ..row.clone()
        })
        .collect();
    let value = evaluate_objective(p, &assignment)?;
    let bound = solved.bound + widen;
    Ok(PipelineResult {
        assignment,
        value,
        bound,
        iterations: solved.iterations,
        converged: bound < config.solver.epsilon,
        kept_dims,
        reduction_error,
        trace,
    })
}
