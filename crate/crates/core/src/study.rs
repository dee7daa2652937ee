//! Convergence studies: one problem over a chain of meshes and degrees.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use crate::descent::{steepest_descent, DescentResult, SolverConfig};
use crate::energy::EnergyContext;
use crate::error::{Error, Result};
use crate::ldg::{Discretization, DEFAULT_ETA};
use crate::linsolve::poisson_initial_guess;
use crate::mesh::{build_coarse, Mesh};
use crate::problems::{ProblemId, ProblemSpec};
use crate::report::{
    convergence_orders, error_norms, recover_gradients, write_history_csv, write_table_csv, LevelResult,
};
use crate::space::MAX_DEGREE;

/// Largest number of levels run without `allow_fine` (1792 pentagon elements).
pub const DEFAULT_LEVEL_CAP: usize = 5;

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub problem: ProblemId,
    pub p: Option<f64>,
    pub sigma: Option<f64>,
    pub degrees: Vec<usize>,
    /// Levels `0..levels`.
    pub levels: usize,
    pub eta: f64,
    pub solver: SolverConfig,
    pub out: Option<PathBuf>,
    pub allow_fine: bool,
}

impl StudyConfig {
    pub fn new(problem: ProblemId) -> Self {
        StudyConfig {
            problem,
            p: None,
            sigma: None,
            degrees: vec![1, 2, 3],
            levels: 4,
            eta: DEFAULT_ETA,
            solver: SolverConfig::default(),
            out: None,
            allow_fine: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::Config("at least one level is required".into()));
        }
        if self.levels > DEFAULT_LEVEL_CAP && !self.allow_fine {
            return Err(Error::Config(format!(
                "{} levels requested; more than {DEFAULT_LEVEL_CAP} needs --allow-fine",
                self.levels
            )));
        }
        if self.degrees.is_empty() {
            return Err(Error::Config("no degrees given".into()));
        }
        if let Some(&k) = self.degrees.iter().find(|&&k| k == 0 || k > MAX_DEGREE) {
            return Err(Error::UnsupportedDegree(k));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::Config(format!("eta must be positive, got {}", self.eta)));
        }
        self.solver.validate()?;
        self.problem.build(self.p, self.sigma).map(|_| ())
    }
}

#[derive(Debug, Clone)]
pub struct LevelRun {
    pub result: LevelResult,
    pub descent: DescentResult,
}

#[derive(Debug, Clone)]
pub struct DegreeRun {
    pub degree: usize,
    pub levels: Vec<LevelRun>,
}

impl DegreeRun {
    pub fn table(&self) -> Vec<LevelResult> {
        self.levels.iter().map(|l| l.result.clone()).collect()
    }
}

/// Meshes of levels `0..levels`, each the uniform refinement of the last.
pub fn mesh_chain(spec: &ProblemSpec, levels: usize) -> Result<Vec<Arc<Mesh>>> {
    let mut out = Vec::with_capacity(levels);
    let mut m = build_coarse(&spec.domain)?;
    for l in 0..levels {
        if l > 0 {
            m = m.refine_uniform();
        }
        out.push(Arc::new(m.clone()));
    }
    Ok(out)
}

/// Starting point of the descent. At `p = 2` the Poisson guess is already
/// the discrete solution, so the descent starts from zero instead and the
/// single-step behaviour stays observable.
pub fn initial_guess(ctx: &EnergyContext, cfg: &SolverConfig) -> Result<Vec<f64>> {
    if ctx.p.p() == 2.0 {
        Ok(vec![0.0; ctx.ndof()])
    } else {
        poisson_initial_guess(ctx, cfg.solver)
    }
}

/// Assemble, descend, recover and measure on one mesh.
pub fn solve_level(spec: &ProblemSpec, mesh: Arc<Mesh>, level: usize, k: usize, eta: f64, cfg: &SolverConfig) -> Result<LevelRun> {
    let t0 = Instant::now();
    let disc = Arc::new(Discretization::md_ldg(mesh.clone(), k, eta)?);
    let ctx = EnergyContext::new(disc, spec.p, &spec.data());
    let u0 = initial_guess(&ctx, cfg)?;
    let descent = steepest_descent(&ctx, cfg, u0)?;
    let (q, sigma) = recover_gradients(&ctx, &descent.u);
    let errors = error_norms(&ctx, &descent.u, &q, &sigma, spec);
    let result = LevelResult {
        level,
        ne: mesh.num_elements(),
        ndof: ctx.ndof(),
        errors,
        orders: None,
        iterations: descent.iterations,
        seconds: t0.elapsed().as_secs_f64(),
    };
    Ok(LevelRun { result, descent })
}

pub fn run_degree(spec: &ProblemSpec, meshes: &[Arc<Mesh>], k: usize, eta: f64, cfg: &SolverConfig) -> Result<DegreeRun> {
    let mut levels = Vec::with_capacity(meshes.len());
    for (l, m) in meshes.iter().enumerate() {
        levels.push(solve_level(spec, m.clone(), l, k, eta, cfg)?);
    }
    let mut table: Vec<LevelResult> = levels.iter().map(|r| r.result.clone()).collect();
    convergence_orders(&mut table);
    for (r, t) in levels.iter_mut().zip(table) {
        r.result = t;
    }
    Ok(DegreeRun { degree: k, levels })
}

/// Run every degree and write `table_k{K}.csv` and `history_k{K}_l{L}.csv`
/// when an output directory is set.
pub fn run_study(cfg: &StudyConfig) -> Result<Vec<DegreeRun>> {
    cfg.validate()?;
    let spec = cfg.problem.build(cfg.p, cfg.sigma)?;
    let meshes = mesh_chain(&spec, cfg.levels)?;
    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir)?;
    }
    let mut runs = Vec::with_capacity(cfg.degrees.len());
    for &k in &cfg.degrees {
        let run = run_degree(&spec, &meshes, k, cfg.eta, &cfg.solver)?;
        if let Some(dir) = &cfg.out {
            write_outputs(dir, &run)?;
        }
        runs.push(run);
    }
    Ok(runs)
}

pub fn write_outputs(dir: &Path, run: &DegreeRun) -> Result<()> {
    let k = run.degree;
    write_table_csv(BufWriter::new(File::create(dir.join(format!("table_k{k}.csv")))?), &run.table())?;
    for l in &run.levels {
        let name = format!("history_k{k}_l{}.csv", l.result.level);
        write_history_csv(BufWriter::new(File::create(dir.join(name))?), &l.descent.history)?;
    }
    Ok(())
}
