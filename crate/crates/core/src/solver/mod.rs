//! Successive approximation of the best-response function over a
//! triangulation of `Y`, with an online bound on the remaining gap.

pub mod bound;
pub mod cut;
pub mod ibr;
pub mod region;

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::time::Instant;

use crate::bilinear::{
    best_response, evaluate_objective, respond_to_plane, to_semi_compact, Assignment, BilinearProgram,
    ResponsePlane,
};
use crate::error::{Error, Result};
use crate::linalg::spectral_norm;
use crate::linalg::DenseMatrix;

pub use bound::{polyhedron_error, ErrorEstimate};
pub use cut::{edge_crossing, edge_crossing_lp, fit_hyperplane, in_complement_lp, polyhedron_cut, Cut};
pub use ibr::iterative_best_response;
pub use region::{barycentric, centroid_weights, initial_simplex, split, split_weights, SimplexRegion};

/// How the pivot of a simplex is chosen. Each variant adds constraints to the
/// previous one's search set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PivotMethod {
    /// The whole simplex.
    Basic,
    /// Points of the simplex that are feasible in `Y`.
    Feasible,
    /// Feasible points whose interpolated upper bound reaches the incumbent.
    LinearBound,
    /// As `LinearBound`, minus a half-space where `g` is below the incumbent.
    CuttingPlane,
}

impl PivotMethod {
    pub const ALL: [PivotMethod; 4] = [
        PivotMethod::Basic,
        PivotMethod::Feasible,
        PivotMethod::LinearBound,
        PivotMethod::CuttingPlane,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PivotMethod::Basic => "basic",
            PivotMethod::Feasible => "feasible",
            PivotMethod::LinearBound => "linear-bound",
            PivotMethod::CuttingPlane => "cutting-plane",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Target gap `ε₀`.
    pub epsilon: f64,
    pub max_iter: usize,
    pub method: PivotMethod,
    /// Number of random iterated best-response runs used to seed the incumbent.
    pub presolve: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-4,
            max_iter: 200,
            method: PivotMethod::LinearBound,
            presolve: 0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub incumbent_value: f64,
    pub upper_bound: f64,
    pub error_bound: f64,
    pub region_count: usize,
    pub planes_count: usize,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Assignment in the variables of the program passed to [`solve`].
    pub assignment: Assignment,
    pub value: f64,
    /// Certified gap: the optimum is at most `value + bound`.
    pub bound: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<TraceRow>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry {
    epsilon: f64,
    region: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.epsilon
            .total_cmp(&other.epsilon)
            .then_with(|| other.region.cmp(&self.region))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Evaluated points of `Y`: coordinates, `g` and the index of their plane.
#[derive(Debug, Default)]
struct VertexStore {
    points: Vec<Vec<f64>>,
    g: Vec<f64>,
    plane: Vec<usize>,
    index: HashMap<Vec<u64>, usize>,
}

/// State of the successive-approximation loop for a semi-compact program.
#[derive(Debug)]
pub struct SolverState<'a> {
    program: &'a BilinearProgram,
    config: SolverConfig,
    store: VertexStore,
    planes: Vec<ResponsePlane>,
    regions: Vec<SimplexRegion>,
    heap: BinaryHeap<HeapEntry>,
    active: usize,
    incumbent: Option<(Assignment, f64)>,
    h: f64,
    iterations: usize,
    trace: Vec<TraceRow>,
    crossings: HashMap<(usize, usize), (u64, f64)>,
    started: Instant,
}

impl<'a> SolverState<'a> {
    /// Builds the initial simplex, evaluates its vertices and its error.
    ///
    /// `seed_solution` (a feasible assignment and its value) becomes the
    /// starting incumbent when given.
    pub fn new(
        program: &'a BilinearProgram,
        config: SolverConfig,
        seed_solution: Option<(Assignment, f64)>,
    ) -> Result<Self> {
        if !program.is_semi_compact() {
            return Err(Error::NotSemiCompact);
        }
        let started = Instant::now();
        let h = seed_solution.as_ref().map_or(f64::NEG_INFINITY, |s| s.1);
        let mut state = Self {
            program,
            config,
            store: VertexStore::default(),
            planes: Vec::new(),
            regions: Vec::new(),
            heap: BinaryHeap::new(),
            active: 0,
            incumbent: seed_solution,
            h,
            iterations: 0,
            trace: Vec::new(),
            crossings: HashMap::new(),
            started,
        };
        let vertices = initial_simplex(program)?;
        let mut ids = Vec::with_capacity(vertices.len());
        for v in &vertices {
            ids.push(state.add_vertex(v)?);
        }
        let mut region = state.make_region(vertices, ids)?;
        region.active = true;
        state.push_region(region);
        for k in 0..state.planes.len() {
            state.consider_plane(k)?;
        }
        state.record();
        Ok(state)
    }

    fn known_vertex(&self, y: &[f64]) -> Option<usize> {
        let key: Vec<u64> = y.iter().map(|v| (v + 0.0).to_bits()).collect();
        self.store.index.get(&key).copied()
    }

    fn add_vertex(&mut self, y: &[f64]) -> Result<usize> {
        if let Some(id) = self.known_vertex(y) {
            return Ok(id);
        }
        let key: Vec<u64> = y.iter().map(|v| (v + 0.0).to_bits()).collect();
        let (plane, g) = best_response(self.program, y)?;
        let id = self.store.points.len();
        self.store.points.push(y.to_vec());
        self.store.g.push(g);
        self.store.plane.push(self.planes.len());
        self.planes.push(plane);
        self.store.index.insert(key, id);
        Ok(id)
    }

    /// Offers a stored plane's side-2 best response as the incumbent.
    fn consider_plane(&mut self, k: usize) -> Result<()> {
        let plane = &self.planes[k];
        let (y, z, v) = respond_to_plane(self.program, plane)?;
        if self.incumbent.as_ref().is_none_or(|(_, best)| v > *best) {
            self.incumbent = Some((
                Assignment {
                    w: plane.w.clone(),
                    x: plane.x.clone(),
                    y,
                    z,
                },
                v,
            ));
        }
        if let Some((_, v)) = &self.incumbent {
            self.h = self.h.max(*v);
        }
        Ok(())
    }

    fn make_region(&mut self, vertices: Vec<Vec<f64>>, ids: Vec<usize>) -> Result<SimplexRegion> {
        let vertex_g: Vec<f64> = ids.iter().map(|&i| self.store.g[i]).collect();
        let method = self.config.method;
        let h = self.h;
        let cut = if method == PivotMethod::CuttingPlane {
            self.cut_for(&vertices, &ids, &vertex_g)?
        } else {
            None
        };
        let planes: Vec<&ResponsePlane> = ids.iter().map(|&i| &self.planes[self.store.plane[i]]).collect();
        let est = polyhedron_error(self.program, &vertices, &vertex_g, &planes, method, h, cut.as_ref())?;
        Ok(SimplexRegion {
            vertices,
            vertex_ids: ids,
            vertex_g,
            error_bound: est.epsilon,
            pivot: est.pivot,
            pivot_weights: est.weights,
            active: false,
        })
    }

    fn cut_for(&mut self, vertices: &[Vec<f64>], ids: &[usize], vertex_g: &[f64]) -> Result<Option<Cut>> {
        let h = self.h;
        let program = self.program;
        let store = &self.store;
        let planes = &self.planes;
        let cache = &mut self.crossings;
        cut::polyhedron_cut_with(vertices, vertex_g, h, |j, i| {
            let key = (ids[j], ids[i]);
            if let Some(&(hb, beta)) = cache.get(&key) {
                if hb == h.to_bits() {
                    return Ok(beta);
                }
            }
            let start = &planes[store.plane[ids[i]]];
            let beta = edge_crossing(program, &vertices[j], &vertices[i], start, h)?;
            cache.insert(key, (h.to_bits(), beta));
            Ok(beta)
        })
    }

    fn push_region(&mut self, region: SimplexRegion) {
        let idx = self.regions.len();
        self.heap.push(HeapEntry {
            epsilon: region.error_bound,
            region: idx,
        });
        if region.active {
            self.active += 1;
        }
        self.regions.push(region);
    }

    /// Index of the active region with the largest error.
    pub fn worst_region(&mut self) -> Option<usize> {
        while let Some(top) = self.heap.peek() {
            let r = &self.regions[top.region];
            if r.active && r.error_bound == top.epsilon {
                return Some(top.region);
            }
            self.heap.pop();
        }
        None
    }

    /// Largest error over the active regions.
    pub fn bound(&mut self) -> f64 {
        self.worst_region().map_or(0.0, |i| self.regions[i].error_bound)
    }

    /// Splits region `i` at its pivot.
    pub fn refine(&mut self, i: usize) -> Result<()> {
        if !self.regions[i].active {
            return Err(Error::DimensionMismatch(format!("region {i} is not active")));
        }
        let parent_eps = self.regions[i].error_bound;
        let mut weights = split_weights(&self.regions[i].pivot_weights);
        let mut pivot = region::combine(&self.regions[i].vertices, &weights);
        if self.known_vertex(&pivot).is_some_and(|id| self.regions[i].vertex_ids.contains(&id)) {
            weights = centroid_weights(weights.len());
            pivot = region::combine(&self.regions[i].vertices, &weights);
        }
        let plane_count = self.planes.len();
        let pivot_id = self.add_vertex(&pivot)?;
        if self.planes.len() > plane_count {
            self.consider_plane(self.planes.len() - 1)?;
        }
        let parent_vertices = self.regions[i].vertices.clone();
        let parent_ids = self.regions[i].vertex_ids.clone();
        for (k, child) in split(&parent_vertices, &pivot, &weights) {
            let mut ids = parent_ids.clone();
            ids[k] = pivot_id;
            let mut region = self.make_region(child, ids)?;
            region.error_bound = region.error_bound.min(parent_eps);
            region.active = true;
            self.push_region(region);
        }
        let parent = &mut self.regions[i];
        parent.error_bound = 0.0;
        parent.active = false;
        self.active -= 1;
        self.iterations += 1;
        self.record();
        Ok(())
    }

    fn record(&mut self) {
        let bound = self.bound();
        let value = self.incumbent.as_ref().map_or(f64::NEG_INFINITY, |s| s.1);
        self.trace.push(TraceRow {
            iteration: self.iterations,
            incumbent_value: value,
            upper_bound: value + bound,
            error_bound: bound,
            region_count: self.active,
            planes_count: self.planes.len(),
            elapsed_ms: self.started.elapsed().as_secs_f64() * 1e3,
        });
    }

    /// Refines until the bound drops below `ε₀` or the iteration budget is spent.
    pub fn run(&mut self) -> Result<()> {
        while self.iterations < self.config.max_iter {
            let Some(i) = self.worst_region() else { break };
            if self.regions[i].error_bound < self.config.epsilon {
                break;
            }
            self.refine(i)?;
        }
        Ok(())
    }

    pub fn regions(&self) -> &[SimplexRegion] {
        &self.regions
    }

    pub fn planes(&self) -> &[ResponsePlane] {
        &self.planes
    }

    pub fn incumbent(&self) -> Option<&(Assignment, f64)> {
        self.incumbent.as_ref()
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn trace(&self) -> &[TraceRow] {
        &self.trace
    }

    pub fn threshold(&self) -> f64 {
        self.h
    }
}

/// Best of `runs` iterated best-response runs with seeds derived from `seed`.
pub fn presolve(p: &BilinearProgram, runs: usize, seed: u64) -> Result<Option<(Assignment, f64)>> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Assignment, f64)> = None;
    for _ in 0..runs {
        let (a, v) = ibr::iterative_best_response_with(p, &mut rng)?;
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((a, v));
        }
    }
    Ok(best)
}

/// Solves `p`, converting it to semi-compact form first.
pub fn solve(p: &BilinearProgram, config: &SolverConfig) -> Result<SolveResult> {
    let sc = to_semi_compact(p);
    let seed_solution = presolve(&sc, config.presolve, config.seed)?;
    let mut state = SolverState::new(&sc, config.clone(), seed_solution)?;
    state.run()?;
    let bound = state.bound();
    let (assignment, _) = state.incumbent.clone().expect("incumbent exists after initialization");
    let assignment = assignment.truncate(p.dims());
    let value = evaluate_objective(p, &assignment)?;
    Ok(SolveResult {
        assignment,
        value,
        bound,
        iterations: state.iterations,
        converged: bound < config.epsilon,
        trace: state.trace,
    })
}

/// Smallest grid resolution `k` with `kⁿ ≥ ‖C‖₂·√(nⁿ)/ε`.
pub fn offline_bound(c: &DenseMatrix, n: usize, epsilon: f64) -> usize {
    offline_bound_for_norm(spectral_norm(c), n, epsilon)
}

pub fn offline_bound_for_norm(c_norm: f64, n: usize, epsilon: f64) -> usize {
    assert!(epsilon > 0.0 && n >= 1, "offline_bound needs ε > 0 and n ≥ 1");
    let target = c_norm * (n as f64).powf(n as f64 / 2.0) / epsilon;
    let slack = 1.0 - 1e-12;
    let reaches = |k: usize| (k as f64).powi(n as i32) >= target * slack;
    let mut k = target.powf(1.0 / n as f64).ceil().max(1.0) as usize;
    while k > 1 && reaches(k - 1) {
        k -= 1;
    }
    while !reaches(k) {
        k += 1;
    }
    k
}
