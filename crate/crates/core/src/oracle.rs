//! Slow reference evaluations used to check the assembled operators.
//!
//! Nothing here touches the precomputed tables of [`crate::ldg`] or
//! [`crate::linsolve`]: fields are evaluated pointwise from coefficients and
//! integrated with freshly built rules, and the weak gradient is taken from
//! its integrated-by-parts form.

use nalgebra::{DMatrix, DVector};

use crate::bernstein;
use crate::energy::{a_op, pow_nonneg};
use crate::ldg::Discretization;
use crate::linsolve::weight;
use crate::mesh::{BoundaryTag, Neighbor};
use crate::quadrature::{gauss_segment, gauss_triangle, QuadRule};
use crate::space::DGSpace;

/// Quadrature points of a face: physical point and weight (length included).
fn face_points(disc: &Discretization, fid: usize) -> Vec<([f64; 2], f64)> {
    let mesh = &disc.mesh;
    let f = mesh.face(fid);
    let a = mesh.vertices()[f.vertices[0]];
    let b = mesh.vertices()[f.vertices[1]];
    let rule = gauss_segment(disc.degree() + 1);
    rule.points
        .iter()
        .zip(&rule.weights)
        .map(|(s, w)| ([a[0] + s[0] * (b[0] - a[0]), a[1] + s[0] * (b[1] - a[1])], w * f.length))
        .collect()
}

fn element_rule(disc: &Discretization) -> QuadRule<2> {
    gauss_triangle(2 * disc.degree()).expect("degree within the table")
}

fn scalar_at(space: &DGSpace, c: &[f64], e: usize, x: [f64; 2]) -> f64 {
    space.eval_physical(c, e, x)[0]
}

fn vector_at(space: &DGSpace, c: &[f64], e: usize, x: [f64; 2]) -> [f64; 2] {
    let v = space.eval_physical(c, e, x);
    [v[0], v[1]]
}

/// `∇·ζ` at a reference point of element `e`.
fn divergence(space: &DGSpace, zeta: &[f64], e: usize, xi: [f64; 2]) -> f64 {
    let n = space.n_local();
    let blk = space.block(zeta, e);
    let map = space.map(e);
    bernstein::gradients(space.degree(), xi)
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let g = map.physical_gradient(*g);
            g[0] * blk[i] + g[1] * blk[n + i]
        })
        .sum()
}

/// `(D(v; g), ζ)` from the integrated-by-parts form
/// `-(v, ∇·ζ) + ⟨{v} + C12·⟦v⟧, ⟦ζ⟧⟩_{Γo} + ⟨v, ζ·n⟩_{ΓN} + ⟨g, ζ·n⟩_{ΓD}`.
pub fn ddg_dual_pairing(disc: &Discretization, v: &[f64], g: &dyn Fn([f64; 2]) -> f64, zeta: &[f64]) -> f64 {
    let mesh = &disc.mesh;
    let (s, vs) = (&disc.scalar, &disc.vector);
    let rule = element_rule(disc);
    let mut total = 0.0;
    for e in 0..mesh.num_elements() {
        let map = s.map(e);
        for (xi, w) in rule.points.iter().zip(&rule.weights) {
            let x = map.to_physical(*xi);
            total -= 2.0 * map.area * w * scalar_at(s, v, e, x) * divergence(vs, zeta, e, *xi);
        }
    }
    for (fid, f) in mesh.faces().iter().enumerate() {
        let n = f.normal;
        for (x, w) in face_points(disc, fid) {
            let vl = scalar_at(s, v, f.left, x);
            let zl = vector_at(vs, zeta, f.left, x);
            let zn = zl[0] * n[0] + zl[1] * n[1];
            total += w * match f.neighbor {
                Neighbor::Element(r) => {
                    let vr = scalar_at(s, v, r, x);
                    let zr = vector_at(vs, zeta, r, x);
                    let c = disc.flux.c12[fid];
                    let hat = 0.5 * (vl + vr) + (c[0] * n[0] + c[1] * n[1]) * (vl - vr);
                    hat * (zn - (zr[0] * n[0] + zr[1] * n[1]))
                }
                Neighbor::Boundary(BoundaryTag::Neumann) => vl * zn,
                Neighbor::Boundary(BoundaryTag::Dirichlet) => g(x) * zn,
            };
        }
    }
    total
}

/// Dense matrix `B` with `B[i][j] = (D(φ_j; 0), ψ_i)` by unit-vector probing
/// of [`ddg_dual_pairing`].
pub fn dense_ddg_moments(disc: &Discretization) -> DMatrix<f64> {
    let ns = disc.scalar.ndof();
    let nv = disc.vector.ndof();
    let mut b = DMatrix::zeros(nv, ns);
    let zero = |_: [f64; 2]| 0.0;
    let mut v = vec![0.0; ns];
    let mut z = vec![0.0; nv];
    for j in 0..ns {
        v[j] = 1.0;
        for i in 0..nv {
            z[i] = 1.0;
            b[(i, j)] = ddg_dual_pairing(disc, &v, &zero, &z);
            z[i] = 0.0;
        }
        v[j] = 0.0;
    }
    b
}

/// Dense vector mass matrix by pointwise quadrature.
pub fn dense_vector_mass(disc: &Discretization) -> DMatrix<f64> {
    let vs = &disc.vector;
    let nv = vs.ndof();
    let rule = element_rule(disc);
    let mut m = DMatrix::zeros(nv, nv);
    let (n, bs) = (vs.n_local(), vs.block_size());
    for e in 0..disc.mesh.num_elements() {
        let o = vs.offset(e);
        let area = vs.map(e).area;
        for (xi, w) in rule.points.iter().zip(&rule.weights) {
            let phi = bernstein::values(vs.degree(), *xi);
            for c in 0..2 {
                for i in 0..n {
                    for j in 0..n {
                        m[(o + c * n + i, o + c * n + j)] += 2.0 * area * w * phi[i] * phi[j];
                    }
                }
            }
        }
        debug_assert_eq!(bs, 2 * n);
    }
    m
}

/// Dense gradient operator `G = M⁻¹ B` and lifting `M⁻¹ b_g`.
pub struct DenseGradient {
    pub g: DMatrix<f64>,
    pub lift: DVector<f64>,
}

impl DenseGradient {
    pub fn new(disc: &Discretization, gd: &dyn Fn([f64; 2]) -> f64) -> Self {
        let m = dense_vector_mass(disc);
        let chol = m.cholesky().expect("mass matrix is SPD");
        let b = dense_ddg_moments(disc);
        let nv = disc.vector.ndof();
        let zero = vec![0.0; disc.scalar.ndof()];
        let mut z = vec![0.0; nv];
        let mut bg = DVector::zeros(nv);
        for i in 0..nv {
            z[i] = 1.0;
            bg[i] = ddg_dual_pairing(disc, &zero, gd, &z);
            z[i] = 0.0;
        }
        DenseGradient {
            g: chol.solve(&b),
            lift: chol.solve(&bg),
        }
    }

    /// Coefficients of `D(v; g)`, or of `D(v; 0)` when `with_lift` is false.
    pub fn apply(&self, v: &[f64], with_lift: bool) -> Vec<f64> {
        let mut d = &self.g * DVector::from_column_slice(v);
        if with_lift {
            d += &self.lift;
        }
        d.as_slice().to_vec()
    }
}

/// Pointwise energy data for brute-force evaluations.
pub struct DenseProblem<'a> {
    pub p: f64,
    pub f: &'a dyn Fn([f64; 2]) -> f64,
    pub g_d: &'a dyn Fn([f64; 2]) -> f64,
    pub g_n: Option<&'a dyn Fn([f64; 2], [f64; 2]) -> f64>,
}

/// `u_l - u_r` on interior faces and `u - g_D` on Dirichlet faces at a point.
fn face_jump(disc: &Discretization, u: &[f64], gd: &dyn Fn([f64; 2]) -> f64, fid: usize, x: [f64; 2]) -> Option<f64> {
    let f = disc.mesh.face(fid);
    let ul = scalar_at(&disc.scalar, u, f.left, x);
    match f.neighbor {
        Neighbor::Element(r) => Some(ul - scalar_at(&disc.scalar, u, r, x)),
        Neighbor::Boundary(BoundaryTag::Dirichlet) => Some(ul - gd(x)),
        Neighbor::Boundary(BoundaryTag::Neumann) => None,
    }
}

/// `J_h(u)` evaluated term by term with the dense gradient operator.
pub fn dense_energy(disc: &Discretization, dg: &DenseGradient, data: &DenseProblem<'_>, u: &[f64]) -> f64 {
    let p = data.p;
    let mesh = &disc.mesh;
    let d = dg.apply(u, true);
    let rule = element_rule(disc);
    let mut quad = 0.0;
    let mut load = 0.0;
    for e in 0..mesh.num_elements() {
        let map = disc.scalar.map(e);
        for (xi, w) in rule.points.iter().zip(&rule.weights) {
            let x = map.to_physical(*xi);
            let wt = 2.0 * map.area * w;
            let q = vector_at(&disc.vector, &d, e, x);
            quad += wt * pow_nonneg(q[0].hypot(q[1]), p);
            load += wt * (data.f)(x) * scalar_at(&disc.scalar, u, e, x);
        }
    }
    for (fid, f) in mesh.faces().iter().enumerate() {
        let fw = disc.flux.eta[fid] * f.h_e.powf(1.0 - p);
        for (x, w) in face_points(disc, fid) {
            if let Some(j) = face_jump(disc, u, data.g_d, fid, x) {
                quad += fw * w * pow_nonneg(j.abs(), p);
            } else if let Some(gn) = data.g_n {
                load += w * gn(x, f.normal) * scalar_at(&disc.scalar, u, f.left, x);
            }
        }
    }
    quad / p - load
}

/// Dense preconditioner `a_u(φ_i, φ_j)` of the linearized energy norm.
pub fn dense_precond(disc: &Discretization, dg: &DenseGradient, data: &DenseProblem<'_>, u: &[f64], eps: f64) -> DMatrix<f64> {
    let p = data.p;
    let ns = disc.scalar.ndof();
    let mesh = &disc.mesh;
    let du = dg.apply(u, true);
    let cols: Vec<Vec<f64>> = (0..ns)
        .map(|j| {
            let mut v = vec![0.0; ns];
            v[j] = 1.0;
            dg.apply(&v, false)
        })
        .collect();
    let mut a = DMatrix::zeros(ns, ns);
    let rule = element_rule(disc);
    for e in 0..mesh.num_elements() {
        let map = disc.scalar.map(e);
        for (xi, w) in rule.points.iter().zip(&rule.weights) {
            let x = map.to_physical(*xi);
            let q = vector_at(&disc.vector, &du, e, x);
            let wt = 2.0 * map.area * w * weight(q[0].hypot(q[1]), p, eps);
            let vals: Vec<[f64; 2]> = cols.iter().map(|c| vector_at(&disc.vector, c, e, x)).collect();
            for i in 0..ns {
                for j in 0..ns {
                    a[(i, j)] += wt * (vals[i][0] * vals[j][0] + vals[i][1] * vals[j][1]);
                }
            }
        }
    }
    let unit = |j: usize| {
        let mut v = vec![0.0; ns];
        v[j] = 1.0;
        v
    };
    let units: Vec<Vec<f64>> = (0..ns).map(unit).collect();
    let zero = |_: [f64; 2]| 0.0;
    for (fid, f) in mesh.faces().iter().enumerate() {
        let hinv = 1.0 / f.h_e;
        for (x, w) in face_points(disc, fid) {
            let Some(j) = face_jump(disc, u, data.g_d, fid, x) else {
                continue;
            };
            let wt = w * disc.flux.eta[fid] * hinv * weight(j.abs() * hinv, p, eps);
            let jumps: Vec<f64> = units.iter().map(|v| face_jump(disc, v, &zero, fid, x).unwrap_or(0.0)).collect();
            for i in 0..ns {
                for k in 0..ns {
                    a[(i, k)] += wt * jumps[i] * jumps[k];
                }
            }
        }
    }
    a
}

/// `J_h'(u)` by brute force: the derivative formula evaluated pointwise.
pub fn dense_gradient(disc: &Discretization, dg: &DenseGradient, data: &DenseProblem<'_>, u: &[f64]) -> Vec<f64> {
    let p = data.p;
    let ns = disc.scalar.ndof();
    let mesh = &disc.mesh;
    let du = dg.apply(u, true);
    let mut r = vec![0.0; ns];
    let rule = element_rule(disc);
    let units: Vec<Vec<f64>> = (0..ns)
        .map(|j| {
            let mut v = vec![0.0; ns];
            v[j] = 1.0;
            v
        })
        .collect();
    let cols: Vec<Vec<f64>> = units.iter().map(|v| dg.apply(v, false)).collect();
    for e in 0..mesh.num_elements() {
        let map = disc.scalar.map(e);
        for (xi, w) in rule.points.iter().zip(&rule.weights) {
            let x = map.to_physical(*xi);
            let wt = 2.0 * map.area * w;
            let a = a_op(vector_at(&disc.vector, &du, e, x), p);
            let fx = (data.f)(x);
            for i in 0..ns {
                let d = vector_at(&disc.vector, &cols[i], e, x);
                r[i] += wt * (a[0] * d[0] + a[1] * d[1] - fx * scalar_at(&disc.scalar, &units[i], e, x));
            }
        }
    }
    let zero = |_: [f64; 2]| 0.0;
    for (fid, f) in mesh.faces().iter().enumerate() {
        let hinv = 1.0 / f.h_e;
        for (x, w) in face_points(disc, fid) {
            match face_jump(disc, u, data.g_d, fid, x) {
                Some(j) => {
                    let a = disc.flux.eta[fid] * pow_nonneg((j * hinv).abs(), p - 2.0) * j * hinv;
                    for i in 0..ns {
                        r[i] += w * a * face_jump(disc, &units[i], &zero, fid, x).unwrap_or(0.0);
                    }
                }
                None => {
                    if let Some(gn) = data.g_n {
                        let g = gn(x, f.normal);
                        for i in 0..ns {
                            r[i] -= w * g * scalar_at(&disc.scalar, &units[i], f.left, x);
                        }
                    }
                }
            }
        }
    }
    r
}

/// Central difference `(J(u + t v) - J(u - t v)) / 2t`.
pub fn central_difference(j: impl Fn(&[f64]) -> f64, u: &[f64], v: &[f64], t: f64) -> f64 {
    let plus: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + t * b).collect();
    let minus: Vec<f64> = u.iter().zip(v).map(|(a, b)| a - t * b).collect();
    (j(&plus) - j(&minus)) / (2.0 * t)
}

/// Fourth-order difference from steps `t` and `2t`.
pub fn richardson_difference(j: impl Fn(&[f64]) -> f64, u: &[f64], v: &[f64], t: f64) -> f64 {
    let d1 = central_difference(&j, u, v, t);
    let d2 = central_difference(&j, u, v, 2.0 * t);
    (4.0 * d1 - d2) / 3.0
}
