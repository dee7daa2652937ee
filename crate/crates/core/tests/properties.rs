use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use pldg::bernstein;
use pldg::descent::golden_section;
use pldg::energy::{a_inv, a_op, EnergyContext, PExponent, ProblemData};
use pldg::ldg::Discretization;
use pldg::linsolve::weight;
use pldg::mesh::{build_level, DomainKind, DomainSpec};

fn pentagon_ctx(p: f64) -> EnergyContext {
    let mesh = Arc::new(build_level(&DomainSpec::dirichlet(DomainKind::Pentagon), 0).unwrap());
    let disc = Arc::new(Discretization::md_ldg(mesh, 2, 10.0).unwrap());
    let f = |x: [f64; 2]| 1.0 + x[0];
    let g = |x: [f64; 2]| x[0] * x[0] - x[1];
    EnergyContext::new(disc, PExponent::new(p).unwrap(), &ProblemData { f: &f, g_d: &g, g_n: None })
}

fn ctx_for(p: f64) -> &'static EnergyContext {
    static CTX: OnceLock<Vec<(f64, EnergyContext)>> = OnceLock::new();
    let all = CTX.get_or_init(|| [1.5, 2.0, 3.0].map(|p| (p, pentagon_ctx(p))).into());
    &all.iter().find(|(q, _)| *q == p).unwrap().1
}

fn tau() -> impl Strategy<Value = [f64; 2]> {
    [-10.0..10.0f64, -10.0..10.0f64]
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0..1.0f64, n)
}

proptest! {
    #[test]
    fn a_is_monotone(p in 1.1..5.0f64, s in tau(), t in tau()) {
        let (a, b) = (a_op(s, p), a_op(t, p));
        let m = (a[0] - b[0]) * (s[0] - t[0]) + (a[1] - b[1]) * (s[1] - t[1]);
        prop_assert!(m >= 0.0);
    }

    #[test]
    fn a_is_positively_homogeneous(p in 1.1..5.0f64, s in tau(), lam in 0.0..8.0f64) {
        let a = a_op([lam * s[0], lam * s[1]], p);
        let b = a_op(s, p);
        let c = lam.powf(p - 1.0);
        for i in 0..2 {
            prop_assert!((a[i] - c * b[i]).abs() <= 1e-12 * (c * b[i]).abs().max(1e-300));
        }
    }

    #[test]
    fn a_inverse_round_trip(p in 1.1..5.0f64, s in tau()) {
        let back = a_inv(a_op(s, p), p);
        for i in 0..2 {
            prop_assert!((back[i] - s[i]).abs() <= 1e-10 * s[i].abs().max(1e-12));
        }
    }

    #[test]
    fn weights_are_positive(t in 0.0..1e3f64, p in 1.1..5.0f64, eps in 1e-16..1.0f64) {
        let w = weight(t, p, eps);
        prop_assert!(w > 0.0 && w.is_finite());
    }

    #[test]
    fn bernstein_partition_of_unity(k in 1usize..=6, a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let xi = if a + b > 1.0 { [1.0 - a, 1.0 - b] } else { [a, b] };
        let v = bernstein::values(k, xi);
        prop_assert_eq!(v.len(), bernstein::dim(k));
        prop_assert!(v.iter().all(|&x| x >= 0.0));
        prop_assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let g = bernstein::gradients(k, xi);
        let sx: f64 = g.iter().map(|d| d[0]).sum();
        let sy: f64 = g.iter().map(|d| d[1]).sum();
        prop_assert!(sx.abs() < 1e-11 && sy.abs() < 1e-11);
    }

    #[test]
    fn golden_finds_quadratic_minimum(c in 0.01..50.0f64, a in 0.1..10.0f64, guess in 0.01..10.0f64) {
        let f = |x: f64| a * (x - c) * (x - c);
        let r = golden_section(f, guess, 1e-10);
        prop_assert!(r.y <= f(0.0));
        prop_assert!((r.x - c).abs() <= 1e-6 * c.max(1.0));
    }

    // A minimum at the left end must give a step of (almost) zero, never an increase.
    #[test]
    fn golden_never_increases(slope in 0.1..10.0f64, guess in 0.01..10.0f64) {
        let r = golden_section(|x| slope * x + x * x, guess, 1e-12);
        prop_assert!(r.y <= 0.0);
        prop_assert!(r.x <= 1e-12);
    }

    #[test]
    fn energy_is_convex(pi in 0usize..3, a in coeffs(42), b in coeffs(42), th in 0.0..1.0f64) {
        let ctx = ctx_for([1.5, 2.0, 3.0][pi]);
        prop_assume!(ctx.ndof() == a.len());
        let m: Vec<f64> = a.iter().zip(&b).map(|(x, y)| th * x + (1.0 - th) * y).collect();
        let (ja, jb, jm) = (ctx.energy(&a).unwrap(), ctx.energy(&b).unwrap(), ctx.energy(&m).unwrap());
        prop_assert!(jm <= th * ja + (1.0 - th) * jb + 1e-12 * (1.0 + ja.abs() + jb.abs()));
    }

    #[test]
    fn weak_gradient_is_linear(a in coeffs(42), b in coeffs(42), s in -3.0..3.0f64) {
        let op = &ctx_for(2.0).disc.op;
        prop_assume!(a.len() == 42);
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| s * x + y).collect();
        let (da, db, ds) = (op.apply(&a, None), op.apply(&b, None), op.apply(&sum, None));
        for i in 0..ds.len() {
            prop_assert!((ds[i] - s * da[i] - db[i]).abs() <= 1e-10 * (1.0 + ds[i].abs()));
        }
    }

    #[test]
    fn weak_gradient_exact_on_linears(c in [-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64], k in 1usize..=3) {
        let mesh = Arc::new(build_level(&DomainSpec::dirichlet(DomainKind::Pentagon), 1).unwrap());
        let disc = Discretization::md_ldg(mesh, k, 10.0).unwrap();
        let g = move |x: [f64; 2]| c[0] + c[1] * x[0] + c[2] * x[1];
        let v = disc.scalar.project_scalar(g).coeffs;
        let lift = disc.op.lift(&disc.vector, &disc.op.dirichlet_moments(&disc.mesh, g));
        for d in disc.gradient_at_qp(&v, Some(&lift)) {
            prop_assert!((d[0] - c[1]).abs() < 1e-10 && (d[1] - c[2]).abs() < 1e-10);
        }
    }

    #[test]
    fn line_energy_matches_direct(pi in 0usize..3, u in coeffs(42), w in coeffs(42), rho in 0.0..2.0f64) {
        let ctx = ctx_for([1.5, 2.0, 3.0][pi]);
        prop_assume!(ctx.ndof() == u.len());
        let line = pldg::energy::LineEnergy::new(ctx, &ctx.state(&u), &w);
        let moved: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a - rho * b).collect();
        let direct = ctx.energy(&moved).unwrap() - ctx.energy(&u).unwrap();
        prop_assert!((line.delta(rho) - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
    }
}

#[test]
fn refinement_invariants() {
    for kind in [DomainKind::Pentagon, DomainKind::UnitSquareShifted] {
        let domain = DomainSpec::dirichlet(kind);
        let mut prev = build_level(&domain, 0).unwrap();
        for _ in 0..3 {
            let next = prev.refine_uniform();
            assert_eq!(next.num_elements(), 4 * prev.num_elements());
            assert!((next.total_area() - kind.area()).abs() < 1e-12);
            assert!((next.h() - prev.h() / 2.0).abs() < 1e-12);
            let max_aspect = |m: &pldg::mesh::Mesh| (0..m.num_elements()).map(|e| m.aspect_ratio(e)).fold(0.0, f64::max);
            assert!((max_aspect(&next) - max_aspect(&prev)).abs() < 1e-9);
            prev = next;
        }
    }
}
