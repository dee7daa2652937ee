//! Gradient recovery, error norms, convergence orders and CSV output.

use std::io::{self, Write};

use crate::descent::IterationRecord;
use crate::energy::{a_op, pow_nonneg, EnergyContext};
use crate::ldg::{scalar_at_qp, vector_at_qp};
use crate::problems::ProblemSpec;
use crate::space::DGSpace;

/// Header of the per-degree convergence table.
pub const TABLE_HEADER: &str = "level,Ne,Ndof,err_u,ord_u,err_q,ord_q,err_sigma,ord_sigma,iters,seconds";
/// Header of the per-run iteration history.
pub const HISTORY_HEADER: &str = "iter,J,wnorm,rho,evals";

/// `q_h = D(u_h; g_D)` and `σ_h = Π A(q_h)`, both as vector coefficients.
pub fn recover_gradients(ctx: &EnergyContext, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let disc = &ctx.disc;
    let q = disc.op.apply(u, Some(&ctx.lift));
    let p = ctx.p.p();
    let vals: Vec<[f64; 2]> = vector_at_qp(&disc.vector, &q).into_iter().map(|t| a_op(t, p)).collect();
    let sigma = project_qp_vector(&disc.vector, &vals);
    (q, sigma)
}

/// L2 projection of a vector field given at the element quadrature points.
pub fn project_qp_vector(space: &DGSpace, vals: &[[f64; 2]]) -> Vec<f64> {
    let n = space.n_local();
    let nq = space.rule().len();
    let mut rhs = vec![0.0; space.ndof()];
    for e in 0..space.mesh().num_elements() {
        let o = space.offset(e);
        for q in 0..nq {
            let w = space.weight(e, q);
            let v = vals[e * nq + q];
            for (i, b) in space.basis().value_row(q).iter().enumerate() {
                rhs[o + i] += w * v[0] * b;
                rhs[o + n + i] += w * v[1] * b;
            }
        }
    }
    space.mass_solve(&rhs)
}

/// `‖u - u_h‖_{L^p}` with the element rule of `space`.
pub fn lp_error_scalar(space: &DGSpace, uh: &[f64], exact: impl Fn([f64; 2]) -> f64, p: f64) -> f64 {
    let vals = scalar_at_qp(space, uh);
    lp_sum(space, p, |e, q, x| pow_nonneg((exact(x) - vals[e * space.rule().len() + q]).abs(), p))
}

/// `‖τ - τ_h‖_{L^p}` with the Euclidean pointwise norm.
pub fn lp_error_vector(space: &DGSpace, th: &[f64], exact: impl Fn([f64; 2]) -> [f64; 2], p: f64) -> f64 {
    let vals = vector_at_qp(space, th);
    lp_sum(space, p, |e, q, x| {
        let t = exact(x);
        let v = vals[e * space.rule().len() + q];
        pow_nonneg((t[0] - v[0]).hypot(t[1] - v[1]), p)
    })
}

fn lp_sum(space: &DGSpace, p: f64, mut point: impl FnMut(usize, usize, [f64; 2]) -> f64) -> f64 {
    let mut s = 0.0;
    for e in 0..space.mesh().num_elements() {
        for q in 0..space.rule().len() {
            let x = space.map(e).to_physical(space.rule().points[q]);
            s += space.weight(e, q) * point(e, q, x);
        }
    }
    pow_nonneg(s, 1.0 / p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorTriple {
    /// `L^p`
    pub u: f64,
    /// `L^p`
    pub q: f64,
    /// `L^{p'}`
    pub sigma: f64,
}

impl ErrorTriple {
    pub fn as_array(&self) -> [f64; 3] {
        [self.u, self.q, self.sigma]
    }
}

pub fn error_norms(ctx: &EnergyContext, u: &[f64], q: &[f64], sigma: &[f64], spec: &ProblemSpec) -> ErrorTriple {
    let p = ctx.p.p();
    let d = &ctx.disc;
    ErrorTriple {
        u: lp_error_scalar(&d.scalar, u, &*spec.u, p),
        q: lp_error_vector(&d.vector, q, &*spec.q, p),
        sigma: lp_error_vector(&d.vector, sigma, &*spec.sigma, ctx.p.conjugate()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelResult {
    pub level: usize,
    pub ne: usize,
    pub ndof: usize,
    pub errors: ErrorTriple,
    /// `None` at the coarsest level; NaN entries where undefined.
    pub orders: Option<[f64; 3]>,
    pub iterations: usize,
    pub seconds: f64,
}

/// `log2(prev / cur)`, NaN unless both are positive.
pub fn order(prev: f64, cur: f64) -> f64 {
    if prev > 0.0 && cur > 0.0 {
        (prev / cur).log2()
    } else {
        f64::NAN
    }
}

/// Fill `orders` from consecutive levels.
///
/// ```
/// use pldg::report::order;
/// assert_eq!(order(8e-3, 2e-3), 2.0);
/// ```
pub fn convergence_orders(results: &mut [LevelResult]) {
    for i in 0..results.len() {
        results[i].orders = if i == 0 {
            None
        } else {
            let a = results[i - 1].errors.as_array();
            let b = results[i].errors.as_array();
            Some([order(a[0], b[0]), order(a[1], b[1]), order(a[2], b[2])])
        };
    }
}

/// Ten significant digits in scientific notation; `nan` when undefined.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.9e}")
    } else {
        "nan".to_string()
    }
}

pub fn write_table_csv<W: Write>(mut w: W, results: &[LevelResult]) -> io::Result<()> {
    writeln!(w, "{TABLE_HEADER}")?;
    for r in results {
        let e = r.errors.as_array();
        let o = r.orders.map(|o| o.map(fmt_float)).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.level,
            r.ne,
            r.ndof,
            fmt_float(e[0]),
            o[0],
            fmt_float(e[1]),
            o[1],
            fmt_float(e[2]),
            o[2],
            r.iterations,
            fmt_float(r.seconds)
        )?;
    }
    Ok(())
}

pub fn write_history_csv<W: Write>(mut w: W, history: &[IterationRecord]) -> io::Result<()> {
    writeln!(w, "{HISTORY_HEADER}")?;
    for h in history {
        writeln!(
            w,
            "{},{},{},{},{}",
            h.iter,
            fmt_float(h.energy),
            fmt_float(h.wnorm),
            fmt_float(h.rho),
            h.evals
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{PExponent, ProblemData};
    use crate::ldg::Discretization;
    use crate::mesh::{build_level, DomainKind, DomainSpec};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn level(errors: [f64; 3]) -> LevelResult {
        LevelResult {
            level: 0,
            ne: 1,
            ndof: 1,
            errors: ErrorTriple {
                u: errors[0],
                q: errors[1],
                sigma: errors[2],
            },
            orders: None,
            iterations: 1,
            seconds: 0.0,
        }
    }

    #[test]
    fn order_examples() {
        assert_eq!(order(8e-3, 2e-3), 2.0);
        assert_eq!(order(1e-3, 1e-3), 0.0);
        assert_relative_eq!(order(7.0497e-01, 2.6383e-01), 1.4180, epsilon = 5e-5);
        assert!(order(0.0, 1.0).is_nan() && order(1.0, -1.0).is_nan());
        let mut rs = vec![level([1.0, 1.0, 1.0]), level([0.25, 0.5, 0.0])];
        convergence_orders(&mut rs);
        assert!(rs[0].orders.is_none());
        let o = rs[1].orders.unwrap();
        assert_eq!((o[0], o[1]), (2.0, 1.0));
        assert!(o[2].is_nan());
    }

    #[test]
    fn csv_layout() {
        let mut rs = vec![level([1.0, 2.0, 3.0]), level([0.5, 1.0, 1.5])];
        convergence_orders(&mut rs);
        let mut out = Vec::new();
        write_table_csv(&mut out, &rs).unwrap();
        let s = String::from_utf8(out).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[0], TABLE_HEADER);
        assert_eq!(lines[1].split(',').count(), 11);
        assert_eq!(lines[1].split(',').nth(4), Some(""));
        assert!(lines[2].contains("1.000000000e0"));
    }

    #[test]
    fn norm_examples() {
        let mesh = Arc::new(build_level(&DomainSpec::dirichlet(DomainKind::Pentagon), 1).unwrap());
        let s = DGSpace::scalar(mesh, 2).unwrap();
        let zero = vec![0.0; s.ndof()];
        for p in [1.5, 2.0, 4.0] {
            assert_relative_eq!(lp_error_scalar(&s, &zero, |_| 1.0, p), 3.5f64.powf(1.0 / p), max_relative = 1e-13);
            assert_eq!(lp_error_scalar(&s, &zero, |_| 0.0, p), 0.0);
        }
        let c = s.project_scalar(|x| x[0] * x[1] - x[1]).coeffs;
        assert!(lp_error_scalar(&s, &c, |x| x[0] * x[1] - x[1], 2.0) < 1e-10);
    }

    #[test]
    fn p2_recovery_is_identity() {
        let mesh = Arc::new(build_level(&DomainSpec::dirichlet(DomainKind::Pentagon), 0).unwrap());
        let disc = Arc::new(Discretization::md_ldg(mesh, 2, 10.0).unwrap());
        let g = |x: [f64; 2]| x[0] - 2.0 * x[1];
        let data = ProblemData {
            f: &|_| 0.0,
            g_d: &g,
            g_n: None,
        };
        let ctx = EnergyContext::new(disc.clone(), PExponent::new(2.0).unwrap(), &data);
        let u: Vec<f64> = (0..ctx.ndof()).map(|i| (i as f64 * 0.37).sin()).collect();
        let (q, s) = recover_gradients(&ctx, &u);
        for (a, b) in q.iter().zip(&s) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
        let lin = disc.scalar.project_scalar(g).coeffs;
        let (q, _) = recover_gradients(&ctx, &lin);
        let vals = vector_at_qp(&disc.vector, &q);
        for v in vals {
            assert!((v[0] - 1.0).abs() < 1e-11 && (v[1] + 2.0).abs() < 1e-11);
        }
    }
}
