//! The flux nonlinearity `A(τ) = |τ|^{p-2} τ`, the discrete energy
//!
//! `J_h(u) = 1/p ‖D(u; g_D)‖_p^p + 1/p Σ_{Γ°} η h_e^{1-p} ∫|u1 - u2|^p
//!         + 1/p Σ_{Γ_D} η h_e^{1-p} ∫|u - g_D|^p - (f, u) - ⟨g_N·n, u⟩_{Γ_N}`
//!
//! with its derivative and the mesh-dependent norms built from the same terms.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ldg::Discretization;
use crate::mesh::BoundaryTag;

const TINY: f64 = 1e-300;

/// An exponent `1 < p < ∞` with its conjugate `p' = p / (p - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PExponent {
    p: f64,
    conj: f64,
}

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        Ok(PExponent { p, conj: p / (p - 1.0) })
    }

    pub fn p(self) -> f64 {
        self.p
    }

    pub fn conjugate(self) -> f64 {
        self.conj
    }
}

/// `x^e` for `x >= 0`, computed as `exp(e ln x)`; `0^e = 0` for `e > 0`.
pub fn pow_nonneg(x: f64, e: f64) -> f64 {
    if x < TINY {
        if e > 0.0 {
            0.0
        } else if e == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        (e * x.ln()).exp()
    }
}

/// `A(τ) = |τ|^{p-2} τ` with `A(0) = 0`.
pub fn a_op(tau: [f64; 2], p: f64) -> [f64; 2] {
    let n = tau[0].hypot(tau[1]);
    if n < TINY {
        return [0.0, 0.0];
    }
    let s = pow_nonneg(n, p - 2.0);
    [s * tau[0], s * tau[1]]
}

/// `A^{-1}(τ) = |τ|^{p'-2} τ`.
pub fn a_inv(tau: [f64; 2], p: f64) -> [f64; 2] {
    a_op(tau, p / (p - 1.0))
}

/// One-dimensional `|s|^{p-2} s`.
pub fn a_scalar(s: f64, p: f64) -> f64 {
    if s.abs() < TINY {
        0.0
    } else {
        pow_nonneg(s.abs(), p - 2.0) * s
    }
}

/// Pointwise state of `u`: `D(u; g_D)` at element points and the face
/// mismatch (`u1 - u2` inside, `u - g_D` on Dirichlet faces) at face points.
#[derive(Debug, Clone)]
pub struct State {
    pub grad: Vec<[f64; 2]>,
    pub jumps: Vec<Vec<f64>>,
}

/// Raw integrals making up the energy: `∫|D|^p`, the weighted face sums, and
/// the load pairing `(f, u) + ⟨g_N·n, u⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyTerms {
    pub volume: f64,
    pub interior: f64,
    pub dirichlet: f64,
    pub load: f64,
}

impl EnergyTerms {
    pub fn energy(&self, p: f64) -> f64 {
        (self.volume + self.interior + self.dirichlet) / p - self.load
    }

    /// Sum of term magnitudes, the size against which `J_h` changes are
    /// resolved in floating point.
    pub fn scale(&self, p: f64) -> f64 {
        (self.volume + self.interior + self.dirichlet) / p + self.load.abs()
    }
}

/// Data of one boundary value problem.
pub struct ProblemData<'a> {
    pub f: &'a dyn Fn([f64; 2]) -> f64,
    pub g_d: &'a dyn Fn([f64; 2]) -> f64,
    /// `g_N·n` as a function of the point and the outward normal.
    pub g_n: Option<&'a dyn Fn([f64; 2], [f64; 2]) -> f64>,
}

/// Everything needed to evaluate `J_h` and its derivative.
#[derive(Debug, Clone)]
pub struct EnergyContext {
    pub disc: Arc<Discretization>,
    pub p: PExponent,
    /// `D(0; g_D)` coefficients.
    pub lift: Vec<f64>,
    /// `g_D` at the points of Dirichlet faces (empty elsewhere).
    pub g_face: Vec<Vec<f64>>,
    /// `(f, φ_i) + ⟨g_N·n, φ_i⟩_{Γ_N}`.
    pub load: Vec<f64>,
    /// `η h_e^{1-p}` per face.
    pub face_weight: Vec<f64>,
}

impl EnergyContext {
    pub fn new(disc: Arc<Discretization>, p: PExponent, data: &ProblemData<'_>) -> Self {
        let mesh = disc.mesh.clone();
        let s = &disc.scalar;
        let n = s.n_local();
        let lift = disc.op.lift(&disc.vector, &disc.op.dirichlet_moments(&mesh, data.g_d));
        let ft = disc.faces();
        let mut g_face = vec![Vec::new(); mesh.faces().len()];
        let mut load = vec![0.0; s.ndof()];
        for e in 0..mesh.num_elements() {
            for q in 0..s.rule().len() {
                let x = s.map(e).to_physical(s.rule().points[q]);
                let wf = s.weight(e, q) * (data.f)(x);
                for (i, b) in s.basis().value_row(q).iter().enumerate() {
                    load[e * n + i] += wf * b;
                }
            }
        }
        for (fid, face) in mesh.faces().iter().enumerate() {
            let fq = &ft.faces[fid];
            match face.boundary_tag() {
                Some(BoundaryTag::Dirichlet) => {
                    g_face[fid] = fq.points.iter().map(|&x| (data.g_d)(x)).collect();
                }
                Some(BoundaryTag::Neumann) => {
                    if let Some(gn) = data.g_n {
                        for q in 0..fq.weights.len() {
                            let wg = fq.weights[q] * gn(fq.points[q], face.normal);
                            for i in 0..n {
                                load[face.left * n + i] += wg * fq.left[q * n + i];
                            }
                        }
                    }
                }
                None => {}
            }
        }
        let face_weight = mesh
            .faces()
            .iter()
            .zip(&disc.flux.eta)
            .map(|(f, eta)| eta * pow_nonneg(f.h_e, 1.0 - p.p()))
            .collect();
        EnergyContext {
            disc,
            p,
            lift,
            g_face,
            load,
            face_weight,
        }
    }

    /// Same discretization and data with another exponent.
    pub fn with_exponent(&self, p: PExponent) -> Self {
        let face_weight = self
            .disc
            .mesh
            .faces()
            .iter()
            .zip(&self.disc.flux.eta)
            .map(|(f, eta)| eta * pow_nonneg(f.h_e, 1.0 - p.p()))
            .collect();
        EnergyContext {
            p,
            face_weight,
            ..self.clone()
        }
    }

    pub fn ndof(&self) -> usize {
        self.disc.scalar.ndof()
    }

    fn face_mismatch(&self, u: &[f64], with_data: bool) -> Vec<Vec<f64>> {
        let mesh = &self.disc.mesh;
        let ft = self.disc.faces();
        let n = self.disc.n_local();
        mesh.faces()
            .iter()
            .enumerate()
            .map(|(fid, face)| {
                let nq = ft.faces[fid].weights.len();
                let ul = &u[face.left * n..(face.left + 1) * n];
                match face.right() {
                    Some(r) => {
                        let ur = &u[r * n..(r + 1) * n];
                        (0..nq).map(|q| ft.trace(fid, false, ul, q) - ft.trace(fid, true, ur, q)).collect()
                    }
                    None if face.boundary_tag() == Some(BoundaryTag::Dirichlet) => (0..nq)
                        .map(|q| ft.trace(fid, false, ul, q) - if with_data { self.g_face[fid][q] } else { 0.0 })
                        .collect(),
                    None => Vec::new(),
                }
            })
            .collect()
    }

    /// State of `u` including boundary data.
    pub fn state(&self, u: &[f64]) -> State {
        State {
            grad: self.disc.gradient_at_qp(u, Some(&self.lift)),
            jumps: self.face_mismatch(u, true),
        }
    }

    /// State of a direction `v` (homogeneous data).
    pub fn direction_state(&self, v: &[f64]) -> State {
        State {
            grad: self.disc.gradient_at_qp(v, None),
            jumps: self.face_mismatch(v, false),
        }
    }

    fn qp_weights(&self) -> impl Iterator<Item = f64> + '_ {
        let s = &self.disc.scalar;
        let nq = s.rule().len();
        (0..self.disc.mesh.num_elements()).flat_map(move |e| (0..nq).map(move |q| s.weight(e, q)))
    }

    fn face_sums(&self, jumps: &[Vec<f64>], p: f64) -> (f64, f64) {
        let ft = self.disc.faces();
        let (mut interior, mut dirichlet) = (0.0, 0.0);
        for (fid, face) in self.disc.mesh.faces().iter().enumerate() {
            if jumps[fid].is_empty() {
                continue;
            }
            let s: f64 = ft.faces[fid]
                .weights
                .iter()
                .zip(&jumps[fid])
                .map(|(w, d)| w * pow_nonneg(d.abs(), p))
                .sum::<f64>()
                * self.face_weight[fid];
            if face.is_interior() {
                interior += s;
            } else {
                dirichlet += s;
            }
        }
        (interior, dirichlet)
    }

    pub fn terms_of(&self, st: &State, u: &[f64]) -> EnergyTerms {
        let p = self.p.p();
        let volume = st
            .grad
            .iter()
            .zip(self.qp_weights())
            .map(|(d, w)| w * pow_nonneg(d[0].hypot(d[1]), p))
            .sum();
        let (interior, dirichlet) = self.face_sums(&st.jumps, p);
        EnergyTerms {
            volume,
            interior,
            dirichlet,
            load: dot(&self.load, u),
        }
    }

    pub fn terms(&self, u: &[f64]) -> EnergyTerms {
        self.terms_of(&self.state(u), u)
    }

    /// `J_h(u)`.
    pub fn energy(&self, u: &[f64]) -> Result<f64> {
        let j = self.terms(u).energy(self.p.p());
        if j.is_finite() {
            Ok(j)
        } else {
            Err(Error::NonFinite("energy"))
        }
    }

    /// `E_h(u; g_D)`.
    pub fn energy_norm(&self, u: &[f64]) -> f64 {
        let t = self.terms(u);
        pow_nonneg(t.volume + t.interior + t.dirichlet, 1.0 / self.p.p())
    }

    /// `‖v‖_{J,p}` with jumps on interior and Dirichlet faces.
    pub fn jnorm(&self, v: &[f64]) -> f64 {
        let st = self.direction_state(v);
        let t = self.terms_of(&st, v);
        pow_nonneg(t.volume + t.interior + t.dirichlet, 1.0 / self.p.p())
    }

    /// `r_i = J_h'(u)(φ_i)`.
    pub fn gradient(&self, u: &[f64]) -> Result<Vec<f64>> {
        let st = self.state(u);
        self.gradient_of(&st)
    }

    pub fn gradient_of(&self, st: &State) -> Result<Vec<f64>> {
        let p = self.p.p();
        let s = &self.disc.scalar;
        let n = s.n_local();
        let nq = s.rule().len();
        let mut m = vec![0.0; self.disc.vector.ndof()];
        for e in 0..self.disc.mesh.num_elements() {
            for q in 0..nq {
                let a = a_op(st.grad[e * nq + q], p);
                let w = s.weight(e, q);
                let psi = s.basis().value_row(q);
                for j in 0..n {
                    m[2 * n * e + j] += w * a[0] * psi[j];
                    m[2 * n * e + n + j] += w * a[1] * psi[j];
                }
            }
        }
        let mut r = self.disc.op.apply_transpose(&m);
        let ft = self.disc.faces();
        for (fid, face) in self.disc.mesh.faces().iter().enumerate() {
            if st.jumps[fid].is_empty() {
                continue;
            }
            let fq = &ft.faces[fid];
            for q in 0..fq.weights.len() {
                let c = self.face_weight[fid] * fq.weights[q] * a_scalar(st.jumps[fid][q], p);
                for i in 0..n {
                    r[face.left * n + i] += c * fq.left[q * n + i];
                }
                if let (Some(rt), Some(tab)) = (face.right(), &fq.right) {
                    for i in 0..n {
                        r[rt * n + i] -= c * tab[q * n + i];
                    }
                }
            }
        }
        for (ri, li) in r.iter_mut().zip(&self.load) {
            *ri -= li;
        }
        if r.iter().all(|x| x.is_finite()) {
            Ok(r)
        } else {
            Err(Error::NonFinite("energy gradient"))
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `|b - ρ c|^p - |b|^p` without cancellation, given `|b|²`, `b·c`, `|c|²`.
fn power_change(bb: f64, bc: f64, cc: f64, rho: f64, p: f64) -> f64 {
    let d = rho * (rho * cc - 2.0 * bc);
    if bb < TINY {
        return pow_nonneg((rho * rho * cc).sqrt(), p);
    }
    let x = (d / bb).max(-1.0);
    pow_nonneg(bb, 0.5 * p) * (0.5 * p * x.ln_1p()).exp_m1()
}

/// `ρ ↦ J_h(u - ρ w)` up to a constant, with the pointwise data of `u` and
/// `w` cached so each evaluation costs one pass over the quadrature points.
///
/// Values are computed relative to a reference step `ρ_r`: rounding errors
/// scale with `|ρ - ρ_r|` rather than with `J_h`, so a line search started
/// near the minimizer resolves it far below `sqrt(ε)`.
#[derive(Debug, Clone)]
pub struct LineEnergy {
    p: f64,
    rho_ref: f64,
    /// `(weight, |b_r|², b_r·c, |c|²)` per quadrature point of every term,
    /// `b_r` the data of `u - ρ_r w` and `c` that of `w`.
    points: Vec<[f64; 4]>,
    load_w: f64,
}

impl LineEnergy {
    pub fn new(ctx: &EnergyContext, u_state: &State, w: &[f64]) -> Self {
        Self::centered(ctx, u_state, w, 0.0)
    }

    pub fn centered(ctx: &EnergyContext, u_state: &State, w: &[f64], rho_ref: f64) -> Self {
        let ws = ctx.direction_state(w);
        let mut points = Vec::with_capacity(u_state.grad.len());
        for ((b, c), wt) in u_state.grad.iter().zip(&ws.grad).zip(ctx.qp_weights()) {
            let b = [b[0] - rho_ref * c[0], b[1] - rho_ref * c[1]];
            points.push([
                wt,
                b[0] * b[0] + b[1] * b[1],
                b[0] * c[0] + b[1] * c[1],
                c[0] * c[0] + c[1] * c[1],
            ]);
        }
        let ft = ctx.disc.faces();
        for fid in 0..ctx.disc.mesh.faces().len() {
            for (q, (b, c)) in u_state.jumps[fid].iter().zip(&ws.jumps[fid]).enumerate() {
                let b = b - rho_ref * c;
                points.push([ctx.face_weight[fid] * ft.faces[fid].weights[q], b * b, b * c, c * c]);
            }
        }
        LineEnergy {
            p: ctx.p.p(),
            rho_ref,
            points,
            load_w: dot(&ctx.load, w),
        }
    }

    pub fn reference(&self) -> f64 {
        self.rho_ref
    }

    /// `J_h(u - ρ w) - J_h(u - ρ_r w)`.
    pub fn eval(&self, rho: f64) -> f64 {
        let t = rho - self.rho_ref;
        if t == 0.0 {
            return 0.0;
        }
        let s: f64 = self
            .points
            .iter()
            .map(|&[w, bb, bc, cc]| w * power_change(bb, bc, cc, t, self.p))
            .sum();
        s / self.p + t * self.load_w
    }

    /// `J_h(u - ρ w) - J_h(u)`.
    pub fn delta(&self, rho: f64) -> f64 {
        self.eval(rho) - self.eval(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_level, DomainKind, DomainSpec};
    use approx::assert_relative_eq;

    fn ctx(kind: DomainKind, level: usize, k: usize, p: f64, f: &dyn Fn([f64; 2]) -> f64, g: &dyn Fn([f64; 2]) -> f64) -> EnergyContext {
        let mesh = Arc::new(build_level(&DomainSpec::dirichlet(kind), level).unwrap());
        let disc = Arc::new(Discretization::md_ldg(mesh, k, 10.0).unwrap());
        EnergyContext::new(disc, PExponent::new(p).unwrap(), &ProblemData { f, g_d: g, g_n: None })
    }

    #[test]
    fn exponent_and_a_examples() {
        let e = PExponent::new(3.0).unwrap();
        assert_relative_eq!(1.0 / e.p() + 1.0 / e.conjugate(), 1.0, epsilon = 1e-15);
        assert!(PExponent::new(1.0).is_err());
        assert!(PExponent::new(f64::INFINITY).is_err());
        assert_eq!(a_op([3.0, 4.0], 2.0), [3.0, 4.0]);
        let a = a_op([3.0, 4.0], 3.0);
        assert_relative_eq!(a[0], 15.0, epsilon = 1e-13);
        assert_relative_eq!(a[1], 20.0, epsilon = 1e-13);
        assert_eq!(a_op([0.0, 0.0], 1.5), [0.0, 0.0]);
        let t = [0.3, -1.7];
        let back = a_inv(a_op(t, 1.5), 1.5);
        assert_relative_eq!(back[0], t[0], max_relative = 1e-12);
        assert_relative_eq!(back[1], t[1], max_relative = 1e-12);
        assert_relative_eq!(a_scalar(-2.0, 3.0), -4.0, epsilon = 1e-14);
    }

    #[test]
    fn energy_examples() {
        let c = ctx(DomainKind::UnitSquareShifted, 0, 1, 2.0, &|_| 0.0, &|x| x[0]);
        let u = c.disc.scalar.project_scalar(|x| x[0]).coeffs;
        assert_relative_eq!(c.energy(&u).unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(c.energy_norm(&u), 1.0, epsilon = 1e-12);

        let z = ctx(DomainKind::Pentagon, 1, 2, 3.0, &|_| 0.0, &|_| 0.0);
        let zero = vec![0.0; z.ndof()];
        assert_eq!(z.energy(&zero).unwrap(), 0.0);
        assert_eq!(z.jnorm(&zero), 0.0);
        assert_eq!(z.energy_norm(&zero), 0.0);

        let one = ctx(DomainKind::Pentagon, 1, 2, 2.0, &|_| 0.0, &|_| 1.0);
        let zero = vec![0.0; one.ndof()];
        let mesh = &one.disc.mesh;
        // Penalty sum plus ½‖D(0; 1)‖², which is nonzero: the lifting of
        // the boundary data survives even for u = 0.
        let penalty: f64 = mesh.faces().iter().filter(|f| !f.is_interior()).map(|f| f.length / f.h_e).sum::<f64>() * 0.5 * 10.0;
        let b = one.disc.op.dirichlet_moments(mesh, |_| 1.0);
        let expect = penalty + 0.5 * dot(&b, &one.disc.vector.mass_solve(&b));
        assert_relative_eq!(one.energy(&zero).unwrap(), expect, max_relative = 1e-12);
    }

    #[test]
    fn energy_norm_identity_and_homogeneity() {
        let c = ctx(DomainKind::Pentagon, 1, 2, 1.5, &|x| x[0] + 1.0, &|x| x[1] * x[1]);
        let u = c.disc.scalar.project_scalar(|x| (x[0] * x[1]).sin() + 0.3).coeffs;
        let p = c.p.p();
        let load = dot(&c.load, &u);
        assert_relative_eq!(c.energy_norm(&u).powf(p), p * (c.energy(&u).unwrap() + load), max_relative = 1e-12);
        let scaled: Vec<f64> = u.iter().map(|x| -2.5 * x).collect();
        assert_relative_eq!(c.jnorm(&scaled), 2.5 * c.jnorm(&u), max_relative = 1e-12);
    }

    #[test]
    fn line_energy_matches_direct_differences() {
        let c = ctx(DomainKind::Pentagon, 1, 2, 3.0, &|x| x[0], &|x| x[1]);
        let u = c.disc.scalar.project_scalar(|x| (2.0 * x[0]).cos()).coeffs;
        let w = c.disc.scalar.project_scalar(|x| x[0] * x[1] - 0.2).coeffs;
        let line = LineEnergy::new(&c, &c.state(&u), &w);
        let j0 = c.energy(&u).unwrap();
        for rho in [0.0, 1e-3, 0.1, 1.0, 7.5] {
            let moved: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a - rho * b).collect();
            let direct = c.energy(&moved).unwrap() - j0;
            assert!((line.delta(rho) - direct).abs() <= 1e-11 * (1.0 + j0.abs()), "rho {rho}");
        }
        // Resolution below the rounding of J itself.
        let tiny = line.delta(1e-14);
        let g = c.gradient(&u).unwrap();
        assert_relative_eq!(tiny, -1e-14 * dot(&g, &w), max_relative = 1e-6);
        let mid = LineEnergy::centered(&c, &c.state(&u), &w, 0.7);
        for rho in [0.0, 0.5, 1.0] {
            assert!((mid.delta(rho) - line.delta(rho)).abs() <= 1e-11 * (1.0 + j0.abs()));
        }
        // Near the reference, differences resolve steps far below sqrt(ε).
        let u7: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a - 0.7 * b).collect();
        let g7 = c.gradient(&u7).unwrap();
        assert_relative_eq!(mid.eval(0.7 + 1e-12), -1e-12 * dot(&g7, &w), max_relative = 1e-4);
    }

    #[test]
    fn linear_problem_gradient_vanishes_at_linear_field() {
        // For p < 2, A(s) ~ |s|^{p-1} turns rounding-level face mismatches
        // (~1e-16) into ~1e-8 residual entries.
        for (p, tol) in [(1.5, 1e-6), (2.0, 1e-10), (3.0, 1e-10), (4.0, 1e-10)] {
            let c = ctx(DomainKind::Pentagon, 1, 1, p, &|_| 0.0, &|x| 2.0 * x[0] - x[1] + 0.5);
            let u = c.disc.scalar.project_scalar(|x| 2.0 * x[0] - x[1] + 0.5).coeffs;
            let r = c.gradient(&u).unwrap();
            let worst = r.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            assert!(worst < tol, "p {p}: {worst}");
        }
    }
}
