//! Seeded property and oracle suites behind `pldg --checks`.
//!
//! Each suite returns one [`CheckResult`] with the worst observed defect, so
//! two runs with the same seed print identical summaries.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bernstein;
use crate::descent::{steepest_descent, SolverConfig, StopReason};
use crate::energy::{a_inv, a_op, dot, EnergyContext, PExponent, ProblemData};
use crate::ldg::Discretization;
use crate::linsolve::{assemble_precond, DEFAULT_EPS};
use crate::mesh::{build_level, BoundaryTag, DomainKind, DomainSpec, Mesh};
use crate::oracle::{self, DenseGradient, DenseProblem};
use crate::problems::example_neumann_smoke;
use crate::quadrature::{gauss_triangle, moment_defect, QuadRule, MAX_TRIANGLE_DEGREE};
use crate::report::{error_norms, recover_gradients};
use crate::space::MAX_DEGREE;
use crate::study::{initial_guess, mesh_chain};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        CheckResult { name, passed, detail }
    }

    /// Pass when `worst <= tol`.
    fn bound(name: &'static str, worst: f64, tol: f64) -> Self {
        Self::new(name, worst <= tol, format!("worst {worst:.3e} (tol {tol:.0e})"))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CheckSummary {
    pub results: Vec<CheckResult>,
}

impl CheckSummary {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

impl fmt::Display for CheckSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            writeln!(f, "{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail)?;
        }
        let failed = self.results.iter().filter(|r| !r.passed).count();
        writeln!(f, "{} suites, {failed} failed", self.results.len())
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// A smooth random field `c0 + c1 x + c2 y + c3 sin(x + 2y)`.
fn random_field(rng: &mut ChaCha8Rng) -> impl Fn([f64; 2]) -> f64 + Send + Sync + Clone {
    let c: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    move |x: [f64; 2]| c[0] + c[1] * x[0] + c[2] * x[1] + c[3] * (x[0] + 2.0 * x[1]).sin()
}

fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// Two triangles splitting `[1, 2]^2` along the diagonal of slope 1.
pub fn two_element_fixture(tags: Option<Vec<BoundaryTag>>) -> Mesh {
    let kind = DomainKind::UnitSquareShifted;
    let domain = match tags {
        Some(t) => DomainSpec::with_tags(kind, t).expect("valid tags"),
        None => DomainSpec::dirichlet(kind),
    };
    Mesh::from_parts(domain, vec![[1.0, 1.0], [2.0, 1.0], [2.0, 2.0], [1.0, 2.0]], vec![[0, 1, 2], [0, 2, 3]])
        .expect("fixture mesh is valid")
}

fn pentagon(level: usize) -> Arc<Mesh> {
    Arc::new(build_level(&DomainSpec::dirichlet(DomainKind::Pentagon), level).expect("pentagon mesh"))
}

/// Moment exactness, positive weights and interior points of every rule.
pub fn quadrature_moments(rules: &[QuadRule<2>]) -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut bad_points = 0;
    for r in rules {
        worst = worst.max(moment_defect(r, r.degree));
        bad_points += r
            .points
            .iter()
            .zip(&r.weights)
            .filter(|(x, &w)| !(w > 0.0 && x[0] > 0.0 && x[1] > 0.0 && x[0] + x[1] < 1.0))
            .count();
    }
    let tol = 1e-12;
    CheckResult::new(
        "quadrature moments",
        worst <= tol && bad_points == 0,
        format!(
            "{} rules, worst moment defect {worst:.3e} (tol {tol:.0e}), {bad_points} non-positive or exterior points",
            rules.len()
        ),
    )
}

pub fn quadrature_suite() -> CheckResult {
    let rules: Vec<QuadRule<2>> = (1..=MAX_TRIANGLE_DEGREE).map(|d| gauss_triangle(d).expect("tabulated")).collect();
    quadrature_moments(&rules)
}

/// Partition of unity and nonnegativity of the Bernstein basis.
pub fn bernstein_suite(seed: u64, samples: usize) -> CheckResult {
    let mut rng = rng(seed, 1);
    let mut worst: f64 = 0.0;
    let mut negative = 0;
    for _ in 0..samples {
        let (a, b): (f64, f64) = (rng.random(), rng.random());
        let xi = if a + b > 1.0 { [1.0 - a, 1.0 - b] } else { [a, b] };
        for k in 1..=MAX_DEGREE {
            let v = bernstein::values(k, xi);
            worst = worst.max((v.iter().sum::<f64>() - 1.0).abs());
            negative += v.iter().filter(|&&x| x < 0.0).count();
        }
    }
    let tol = 1e-14;
    CheckResult::new(
        "bernstein partition of unity",
        worst <= tol && negative == 0,
        format!("worst {worst:.3e} (tol {tol:.0e}), {negative} negative values"),
    )
}

/// Monotonicity, positive homogeneity and invertibility of `A`.
pub fn a_operator_suite(seed: u64, samples: usize) -> CheckResult {
    let mut rng = rng(seed, 2);
    let mut failures = 0;
    let (mut hom, mut inv): (f64, f64) = (0.0, 0.0);
    for p in [1.2, 1.5, 3.0, 4.0] {
        for _ in 0..samples {
            let t1 = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            let t2 = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            if t1 == t2 {
                continue;
            }
            let (a1, a2) = (a_op(t1, p), a_op(t2, p));
            if (t2[0] - t1[0]) * (a2[0] - a1[0]) + (t2[1] - t1[1]) * (a2[1] - a1[1]) <= 0.0 {
                failures += 1;
            }
            let lam: f64 = rng.random_range(0.0..4.0);
            let al = a_op([lam * t1[0], lam * t1[1]], p);
            let s = lam.powf(p - 1.0);
            hom = hom.max(rel(al[0], s * a1[0]).max(rel(al[1], s * a1[1])));
            let back = a_inv(a1, p);
            inv = inv.max(rel(back[0], t1[0]).max(rel(back[1], t1[1])));
        }
    }
    CheckResult::new(
        "A monotone, homogeneous, invertible",
        failures == 0 && hom <= 1e-12 && inv <= 1e-10,
        format!("{failures} monotonicity failures, homogeneity {hom:.3e} (tol 1e-12), inverse {inv:.3e} (tol 1e-10)"),
    )
}

fn context(mesh: Arc<Mesh>, k: usize, p: f64, data: &ProblemData<'_>) -> EnergyContext {
    let disc = Arc::new(Discretization::md_ldg(mesh, k, 10.0).expect("valid discretization"));
    EnergyContext::new(disc, PExponent::new(p).expect("valid exponent"), data)
}

/// Midpoint convexity of `J_h` along random chords.
pub fn convexity_suite(seed: u64, samples: usize) -> CheckResult {
    let mut rng = rng(seed, 3);
    let mesh = pentagon(0);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for p in [1.2, 1.5, 3.0, 4.0] {
        let f = random_field(&mut rng);
        let g = random_field(&mut rng);
        let ctx = context(mesh.clone(), 2, p, &ProblemData { f: &f, g_d: &g, g_n: None });
        for _ in 0..samples {
            let a = random_vec(&mut rng, ctx.ndof());
            let b = random_vec(&mut rng, ctx.ndof());
            let th: f64 = rng.random();
            let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| th * x + (1.0 - th) * y).collect();
            let (ja, jb, jm) = (ctx.energy(&a).unwrap(), ctx.energy(&b).unwrap(), ctx.energy(&mid).unwrap());
            let gap = (jm - th * ja - (1.0 - th) * jb) / (1.0 + ja.abs() + jb.abs());
            worst = worst.max(gap);
            if gap > 1e-12 {
                violations += 1;
            }
        }
    }
    CheckResult::new(
        "energy convexity",
        violations == 0,
        format!("{violations} violations, largest normalized gap {worst:.3e} (tol 1e-12)"),
    )
}

/// `(D(v; g), ζ)` from the assembled operator.
pub fn ddg_primal_pairing(disc: &Discretization, v: &[f64], g: &dyn Fn([f64; 2]) -> f64, zeta: &[f64]) -> f64 {
    let lift = disc.op.lift(&disc.vector, &disc.op.dirichlet_moments(&disc.mesh, g));
    let d = disc.op.apply(v, Some(&lift));
    dot(&disc.vector.mass_apply(&d), zeta)
}

/// Assembled weak gradient against its integrated-by-parts form.
pub fn ddg_adjoint_suite(seed: u64, samples: usize, max_level: usize, max_k: usize) -> CheckResult {
    let mut rng = rng(seed, 4);
    let mut worst: f64 = 0.0;
    for level in 0..=max_level {
        let mesh = pentagon(level);
        for k in 1..=max_k {
            let disc = Discretization::md_ldg(mesh.clone(), k, 10.0).expect("valid discretization");
            for _ in 0..samples {
                let v = random_vec(&mut rng, disc.scalar.ndof());
                let z = random_vec(&mut rng, disc.vector.ndof());
                let g = random_field(&mut rng);
                let a = ddg_primal_pairing(&disc, &v, &g, &z);
                let b = oracle::ddg_dual_pairing(&disc, &v, &g, &z);
                worst = worst.max(rel(a, b));
            }
        }
    }
    CheckResult::bound("weak gradient primal vs dual", worst, 1e-11)
}

fn max_abs(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

/// Dense brute-force assembly against the sparse one on two elements: the
/// weak gradient moments, the preconditioner and `J_h'`.
pub fn dense_fixture_suite(seed: u64) -> CheckResult {
    use BoundaryTag::{Dirichlet, Neumann};
    let mut rng = rng(seed, 5);
    let mut worst: f64 = 0.0;
    for (tags, k) in [(None, 1), (None, 2), (Some(vec![Dirichlet, Neumann, Dirichlet, Neumann]), 3)] {
        let neumann = tags.is_some();
        let mesh = Arc::new(two_element_fixture(tags));
        let g = random_field(&mut rng);
        let f = random_field(&mut rng);
        let gn = random_field(&mut rng);
        let gn = move |x: [f64; 2], n: [f64; 2]| gn(x) * (n[0] + 2.0 * n[1]);
        let gn_ref: Option<&dyn Fn([f64; 2], [f64; 2]) -> f64> = if neumann { Some(&gn) } else { None };
        for p in [1.5, 2.0, 3.0] {
            let ctx = context(mesh.clone(), k, p, &ProblemData { f: &f, g_d: &g, g_n: gn_ref });
            let disc = &ctx.disc;
            let dense = DenseGradient::new(disc, &g);
            let data = DenseProblem { p, f: &f, g_d: &g, g_n: gn_ref };
            if p == 2.0 {
                let b = oracle::dense_ddg_moments(disc);
                let ns = disc.scalar.ndof();
                let mut sparse = nalgebra::DMatrix::zeros(disc.vector.ndof(), ns);
                for j in 0..ns {
                    let mut e = vec![0.0; ns];
                    e[j] = 1.0;
                    let col = disc.vector.mass_apply(&disc.op.apply(&e, None));
                    sparse.set_column(j, &nalgebra::DVector::from_vec(col));
                }
                worst = worst.max(max_abs(&(&sparse - &b)) / max_abs(&b));
            }
            let u = random_vec(&mut rng, ctx.ndof());
            let a = assemble_precond(&ctx, &u, DEFAULT_EPS).expect("assembly").matrix.to_dense();
            let ad = oracle::dense_precond(disc, &dense, &data, &u, DEFAULT_EPS);
            worst = worst.max(max_abs(&(&a - &ad)) / max_abs(&ad));
            let r = ctx.gradient(&u).expect("finite gradient");
            let rd = oracle::dense_gradient(disc, &dense, &data, &u);
            let scale = rd.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            worst = worst.max(r.iter().zip(&rd).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale);
            worst = worst.max(rel(ctx.energy(&u).unwrap(), oracle::dense_energy(disc, &dense, &data, &u)));
        }
    }
    CheckResult::bound("dense vs sparse assembly (2 elements)", worst, 1e-10)
}

/// Symmetry and definiteness of the preconditioner, and the one-step solve
/// at `p = 2` from random starts.
pub fn precond_suite(seed: u64, samples: usize) -> CheckResult {
    let mut rng = rng(seed, 6);
    let mesh = pentagon(1);
    let mut asym: f64 = 0.0;
    let mut not_pd = 0;
    let mut step_failures = Vec::new();
    let mut worst_rho: f64 = 0.0;
    let mut worst_w: f64 = 0.0;
    for p in [1.5, 2.0, 3.0, 4.0] {
        let f = random_field(&mut rng);
        let g = random_field(&mut rng);
        let ctx = context(mesh.clone(), 2, p, &ProblemData { f: &f, g_d: &g, g_n: None });
        let u = random_vec(&mut rng, ctx.ndof());
        let sys = assemble_precond(&ctx, &u, DEFAULT_EPS).expect("assembly");
        asym = asym.max(sys.matrix.asymmetry());
        for _ in 0..samples {
            let x = random_vec(&mut rng, ctx.ndof());
            if dot(&x, &sys.apply(&x)) <= 0.0 {
                not_pd += 1;
            }
        }
        if p == 2.0 {
            let cfg = SolverConfig { eps: 0.0, ..SolverConfig::default() };
            for _ in 0..3 {
                let u0 = random_vec(&mut rng, ctx.ndof());
                let res = steepest_descent(&ctx, &cfg, u0).expect("descent");
                let rho = res.history[0].rho;
                worst_rho = worst_rho.max((rho - 1.0).abs());
                worst_w = worst_w.max(res.history.last().map_or(f64::NAN, |h| h.wnorm));
                let converged = matches!(res.stop, StopReason::SmallDirection | StopReason::Stationary);
                if res.iterations != 1 || !converged {
                    step_failures.push(format!("{} steps, {:?}", res.iterations, res.stop));
                }
            }
        }
    }
    let passed = asym <= 1e-12 && not_pd == 0 && step_failures.is_empty() && worst_rho <= 1e-6;
    CheckResult::new(
        "preconditioner contract",
        passed,
        format!(
            "asymmetry {asym:.3e} (tol 1e-12), {not_pd} non-positive quadratic forms, p=2 one-step |rho-1| {worst_rho:.3e} (tol 1e-6), final ||w|| {worst_w:.3e}{}",
            if step_failures.is_empty() { String::new() } else { format!(", failures: {}", step_failures.join("; ")) }
        ),
    )
}

/// Directional derivatives of `J_h` against fourth-order differences. The
/// step is small because at p < 2 the higher derivatives of the integrand
/// blow up where a random gradient passes near zero.
pub fn gradient_fd_suite(seed: u64, samples: usize) -> CheckResult {
    let mut rng = rng(seed, 7);
    let mesh = pentagon(1);
    let mut worst: f64 = 0.0;
    for p in [1.5, 2.0, 3.0, 4.0] {
        let f = random_field(&mut rng);
        let g = random_field(&mut rng);
        let ctx = context(mesh.clone(), 2, p, &ProblemData { f: &f, g_d: &g, g_n: None });
        for _ in 0..samples {
            let u = random_vec(&mut rng, ctx.ndof());
            let v = random_vec(&mut rng, ctx.ndof());
            let r = ctx.gradient(&u).expect("finite gradient");
            let exact = dot(&r, &v);
            let fd = oracle::richardson_difference(|x| ctx.energy(x).unwrap(), &u, &v, 1e-5);
            worst = worst.max((fd - exact).abs() / exact.abs());
        }
    }
    CheckResult::bound("gradient vs finite differences", worst, 1e-6)
}

/// The Neumann problem reproduces its in-space exact solution.
pub fn neumann_smoke_suite() -> CheckResult {
    let spec = example_neumann_smoke();
    let mesh = mesh_chain(&spec, 1).expect("mesh").remove(0);
    let disc = Arc::new(Discretization::md_ldg(mesh, 2, 10.0).expect("valid discretization"));
    let ctx = EnergyContext::new(disc, spec.p, &spec.data());
    let cfg = SolverConfig::default();
    let u0 = initial_guess(&ctx, &cfg).expect("guess");
    let res = steepest_descent(&ctx, &cfg, u0).expect("descent");
    let (q, s) = recover_gradients(&ctx, &res.u);
    let err = error_norms(&ctx, &res.u, &q, &s, &spec);
    CheckResult::bound("neumann smoke L2 error", err.u, 1e-8)
}

pub fn run_checks(seed: u64) -> CheckSummary {
    CheckSummary {
        results: vec![
            quadrature_suite(),
            bernstein_suite(seed, 200),
            a_operator_suite(seed, 1000),
            convexity_suite(seed, 1000),
            ddg_adjoint_suite(seed, 20, 2, 3),
            dense_fixture_suite(seed),
            precond_suite(seed, 50),
            gradient_fd_suite(seed, 30),
            neumann_smoke_suite(),
        ],
    }
}
