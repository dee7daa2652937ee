//! Preconditioned steepest descent on `J_h` with a one-sided golden-section
//! line search.

use crate::energy::{dot, EnergyContext, LineEnergy};
use crate::error::{Error, Result};
use crate::linsolve::{assemble_precond_from_state, solve_spd, LinearSolver, DEFAULT_EPS};

/// `(√5 - 1) / 2`
pub const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Safety caps on the line search loops; `δ` near `1e-16` is below the
/// spacing of doubles near 1, so the bracket stops shrinking before it.
const MAX_EXPANSIONS: usize = 200;
const MAX_REFINEMENTS: usize = 200;

/// Result of [`golden_section`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchResult {
    pub x: f64,
    pub y: f64,
    pub evals: usize,
}

/// Minimize a convex `f` on `[0, ∞)` starting from `guess`.
///
/// Brackets by shrinking toward 0 when `f(guess) >= f(0)` and by expanding
/// with factor `1/λ` otherwise, then refines with one new evaluation per
/// step until the bracket is at most `delta` wide. The best evaluated point,
/// `0` included, is returned.
///
/// ```
/// use pldg::descent::golden_section;
/// let r = golden_section(|x| (x - 2.0) * (x - 2.0), 0.5, 1e-6);
/// assert!((r.x - 2.0).abs() < 1e-6);
/// ```
pub fn golden_section(mut f: impl FnMut(f64) -> f64, guess: f64, delta: f64) -> LineSearchResult {
    let lam = GOLDEN;
    let mut evals = 0;
    let mut best = (0.0, f64::INFINITY);
    let mut eval = |x: f64| -> f64 {
        let y = f(x);
        evals += 1;
        if y < best.1 || (y == best.1 && x < best.0) {
            best = (x, y);
        }
        y
    };
    let guess = if guess > 0.0 && guess.is_finite() { guess } else { 1.0 };

    let (mut x1, mut y1) = (0.0, eval(0.0));
    let (mut x2, mut y2);
    let (mut x4, mut y4);
    let g = eval(guess);
    if y1 <= g {
        x4 = guess;
        y4 = g;
        x2 = (1.0 - lam) * x4;
        y2 = eval(x2);
        while x4 > delta {
            if y1 <= y2 {
                x4 = x2;
                y4 = y2;
                x2 = (1.0 - lam) * x4;
                y2 = eval(x2);
            } else {
                break;
            }
        }
        if x4 <= delta {
            let _ = y4;
            return finish(best, evals);
        }
    } else {
        x2 = guess;
        y2 = g;
        x4 = x2 / lam;
        y4 = eval(x4);
        let mut n = 0;
        while y2 > y4 && n < MAX_EXPANSIONS {
            x1 = x2;
            y1 = y2;
            x2 = x4;
            y2 = y4;
            x4 = x2 / lam;
            y4 = eval(x4);
            n += 1;
        }
    }
    let mut x3 = lam * x2 + (1.0 - lam) * x4;
    let mut y3 = eval(x3);
    let mut n = 0;
    while x4 - x1 > delta && n < MAX_REFINEMENTS {
        if y2 > y3 {
            x1 = x2;
            y1 = y2;
            x2 = x3;
            y2 = y3;
            let next = lam * x3 + (1.0 - lam) * x4;
            if next <= x2 || next >= x4 {
                break;
            }
            x3 = next;
            y3 = eval(x3);
        } else {
            x4 = x3;
            y4 = y3;
            x3 = x2;
            y3 = y2;
            let next = (1.0 - lam) * x1 + lam * x2;
            if next <= x1 || next >= x3 {
                break;
            }
            x2 = next;
            y2 = eval(x2);
        }
        n += 1;
    }
    let _ = (y1, y4);
    finish(best, evals)
}

fn finish(best: (f64, f64), evals: usize) -> LineSearchResult {
    LineSearchResult {
        x: best.0,
        y: best.1,
        evals,
    }
}

/// Solver parameters; defaults follow the numerical study
/// (`ε = 1e-14`, `δ_w = δ_ρ = 1e-16`, `N_it = 500`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub eps: f64,
    pub delta_w: f64,
    pub delta_rho: f64,
    pub max_iters: usize,
    /// Line-search bracket width relative to `max(1, ρ_prev)`.
    pub line_delta: f64,
    /// Stop once `‖w‖² <= rel_tol · S(u)`, `S` the sum of the magnitudes of
    /// the energy terms. The predicted decrease is `‖w‖²/2`, so the default
    /// stops when it drops below the rounding level of `J_h` itself.
    pub rel_tol: f64,
    pub solver: LinearSolver,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps: DEFAULT_EPS,
            delta_w: 1e-16,
            delta_rho: 1e-16,
            max_iters: 500,
            line_delta: 1e-16,
            rel_tol: DEFAULT_REL_TOL,
            solver: LinearSolver::default(),
        }
    }
}

pub const DEFAULT_REL_TOL: f64 = 2.0 * f64::EPSILON;

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x > 0.0 && x.is_finite();
        if !(pos(self.delta_w) && pos(self.delta_rho) && pos(self.line_delta) && self.rel_tol >= 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if self.eps < 0.0 || !self.eps.is_finite() {
            return Err(Error::InvalidEps(self.eps));
        }
        Ok(())
    }
}

/// One pass of the descent loop: `energy` and `wnorm` at the iterate before
/// the step, the accepted `rho` (0 when the loop stopped on this pass).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub energy: f64,
    pub wnorm: f64,
    pub rho: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// `‖w‖ < δ_w`.
    SmallDirection,
    /// `‖w‖²` below the resolution of `J_h`.
    Stationary,
    /// Accepted step below `δ_ρ` (including no decrease found).
    SmallStep,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct DescentResult {
    pub u: Vec<f64>,
    pub history: Vec<IterationRecord>,
    /// Accepted steps.
    pub iterations: usize,
    pub stop: StopReason,
    pub energy: f64,
    /// `‖J_h'(u)‖_∞` at the returned iterate.
    pub stationarity: f64,
}

/// Algorithm: `w` solves `A_u w = J_h'(u)`, `u <- u - ρ w` with `ρ` from
/// the line search warm-started at the previous step (`ρ⁰ = 1`).
pub fn steepest_descent(ctx: &EnergyContext, cfg: &SolverConfig, u0: Vec<f64>) -> Result<DescentResult> {
    cfg.validate()?;
    if u0.len() != ctx.ndof() {
        return Err(Error::SpaceMismatch("initial guess length differs from the space dimension"));
    }
    let p = ctx.p.p();
    let mut u = u0;
    let mut rho_prev = 1.0;
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut energy = f64::NAN;
    let mut stop = StopReason::MaxIterations;
    let mut last_r = None;
    for k in 0..cfg.max_iters {
        let st = ctx.state(&u);
        let terms = ctx.terms_of(&st, &u);
        if k == 0 {
            energy = terms.energy(p);
        }
        if !energy.is_finite() {
            return Err(Error::NonFinite("energy"));
        }
        let r = ctx.gradient_of(&st)?;
        let sys = assemble_precond_from_state(ctx, &st, cfg.eps)?;
        let w = solve_spd(&sys, &r, cfg.solver)?;
        let w2 = dot(&r, &w);
        let wnorm = w2.max(0.0).sqrt();
        let mut rec = IterationRecord {
            iter: k,
            energy,
            wnorm,
            rho: 0.0,
            evals: 0,
        };
        if wnorm < cfg.delta_w {
            history.push(rec);
            stop = StopReason::SmallDirection;
            last_r = Some(r);
            break;
        }
        if w2 <= cfg.rel_tol * terms.scale(p) {
            history.push(rec);
            stop = StopReason::Stationary;
            last_r = Some(r);
            break;
        }
        // Centered at the warm start, which is where the minimizer usually is.
        let line = LineEnergy::centered(ctx, &st, &w, rho_prev);
        let ls = golden_section(|x| line.eval(x), rho_prev, cfg.line_delta * rho_prev.max(1.0));
        rec.evals = ls.evals;
        let decrease = ls.y - line.eval(0.0);
        if ls.x < cfg.delta_rho || decrease >= 0.0 {
            history.push(rec);
            stop = StopReason::SmallStep;
            last_r = Some(r);
            break;
        }
        rec.rho = ls.x;
        history.push(rec);
        for (ui, wi) in u.iter_mut().zip(&w) {
            *ui -= ls.x * wi;
        }
        energy += decrease;
        rho_prev = ls.x;
        iterations += 1;
    }
    let r = match last_r {
        Some(r) => r,
        None => ctx.gradient(&u)?,
    };
    let stationarity = r.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    Ok(DescentResult {
        u,
        history,
        iterations,
        stop,
        energy,
        stationarity,
    })
}
