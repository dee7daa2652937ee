//! Broken polynomial spaces `P^k(K)` (scalar) and `(P^k(K))^2` (vector) with
//! an element-major Bernstein coefficient layout:
//! `dof = (element * components + component) * n_local + i`.

use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::bernstein::{self, bernstein_eval, BernsteinBasis};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::quadrature::{gauss_triangle, QuadRule};

pub const MAX_DEGREE: usize = 6;

/// Affine map from the reference triangle onto an element.
#[derive(Debug, Clone, Copy)]
pub struct ElementMap {
    pub origin: [f64; 2],
    /// Columns are `v1 - v0` and `v2 - v0`.
    pub jac: [[f64; 2]; 2],
    /// `J^{-T}`, maps reference gradients to physical ones.
    pub inv_t: [[f64; 2]; 2],
    pub area: f64,
}

impl ElementMap {
    pub fn new(v: [[f64; 2]; 3]) -> Self {
        let c0 = [v[1][0] - v[0][0], v[1][1] - v[0][1]];
        let c1 = [v[2][0] - v[0][0], v[2][1] - v[0][1]];
        let det = c0[0] * c1[1] - c1[0] * c0[1];
        // J = [[c0x, c1x], [c0y, c1y]]; J^{-1} = [[c1y, -c1x], [-c0y, c0x]] / det
        let inv = [[c1[1] / det, -c1[0] / det], [-c0[1] / det, c0[0] / det]];
        ElementMap {
            origin: v[0],
            jac: [[c0[0], c1[0]], [c0[1], c1[1]]],
            inv_t: [[inv[0][0], inv[1][0]], [inv[0][1], inv[1][1]]],
            area: 0.5 * det,
        }
    }

    pub fn to_physical(&self, xi: [f64; 2]) -> [f64; 2] {
        [
            self.origin[0] + self.jac[0][0] * xi[0] + self.jac[0][1] * xi[1],
            self.origin[1] + self.jac[1][0] * xi[0] + self.jac[1][1] * xi[1],
        ]
    }

    pub fn to_reference(&self, x: [f64; 2]) -> [f64; 2] {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        // J^{-1} = (J^{-T})^T
        [
            self.inv_t[0][0] * d[0] + self.inv_t[1][0] * d[1],
            self.inv_t[0][1] * d[0] + self.inv_t[1][1] * d[1],
        ]
    }

    pub fn physical_gradient(&self, g: [f64; 2]) -> [f64; 2] {
        [
            self.inv_t[0][0] * g[0] + self.inv_t[0][1] * g[1],
            self.inv_t[1][0] * g[0] + self.inv_t[1][1] * g[1],
        ]
    }
}

/// `V_h` (one component) or `Q_h`/`Σ_h` (two components) on a mesh.
#[derive(Debug, Clone)]
pub struct DGSpace {
    mesh: Arc<Mesh>,
    degree: usize,
    components: usize,
    n_local: usize,
    maps: Vec<ElementMap>,
    rule: QuadRule<2>,
    basis: BernsteinBasis,
    ref_mass: DMatrix<f64>,
    ref_chol: Cholesky<f64, Dyn>,
}

impl DGSpace {
    pub fn new(mesh: Arc<Mesh>, degree: usize, components: usize) -> Result<Self> {
        if !(1..=MAX_DEGREE).contains(&degree) {
            return Err(Error::UnsupportedDegree(degree));
        }
        if !(1..=2).contains(&components) {
            return Err(Error::SpaceMismatch("a DG space has one or two components"));
        }
        let rule = gauss_triangle(2 * degree)?;
        let basis = bernstein_eval(degree, &rule.points);
        let n_local = basis.len;
        let mut ref_mass = DMatrix::zeros(n_local, n_local);
        for (q, &w) in rule.weights.iter().enumerate() {
            let row = basis.value_row(q);
            for i in 0..n_local {
                for j in 0..n_local {
                    ref_mass[(i, j)] += w * row[i] * row[j];
                }
            }
        }
        let ref_chol = ref_mass.clone().cholesky().expect("Bernstein Gram matrix is SPD");
        let maps = (0..mesh.num_elements()).map(|e| ElementMap::new(mesh.element_vertices(e))).collect();
        Ok(DGSpace {
            mesh,
            degree,
            components,
            n_local,
            maps,
            rule,
            basis,
            ref_mass,
            ref_chol,
        })
    }

    pub fn scalar(mesh: Arc<Mesh>, degree: usize) -> Result<Self> {
        Self::new(mesh, degree, 1)
    }

    pub fn vector(mesh: Arc<Mesh>, degree: usize) -> Result<Self> {
        Self::new(mesh, degree, 2)
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// Basis functions per element and component.
    pub fn n_local(&self) -> usize {
        self.n_local
    }

    /// Degrees of freedom per element.
    pub fn block_size(&self) -> usize {
        self.components * self.n_local
    }

    pub fn ndof(&self) -> usize {
        self.mesh.num_elements() * self.block_size()
    }

    pub fn offset(&self, e: usize) -> usize {
        e * self.block_size()
    }

    pub fn block<'c>(&self, coeffs: &'c [f64], e: usize) -> &'c [f64] {
        &coeffs[self.offset(e)..self.offset(e + 1)]
    }

    pub fn map(&self, e: usize) -> &ElementMap {
        &self.maps[e]
    }

    /// Element rule (exact to degree `2k`) on the reference triangle.
    pub fn rule(&self) -> &QuadRule<2> {
        &self.rule
    }

    /// Basis tabulated at [`Self::rule`] points.
    pub fn basis(&self) -> &BernsteinBasis {
        &self.basis
    }

    /// Physical quadrature weights (reference weights times `2 |K|`).
    pub fn weight(&self, e: usize, q: usize) -> f64 {
        2.0 * self.maps[e].area * self.rule.weights[q]
    }

    pub fn ref_mass(&self) -> &DMatrix<f64> {
        &self.ref_mass
    }

    /// Element mass matrix of one component.
    pub fn element_mass(&self, e: usize) -> DMatrix<f64> {
        &self.ref_mass * (2.0 * self.maps[e].area)
    }

    pub fn zero(&self) -> DGFunction<'_> {
        DGFunction {
            space: self,
            coeffs: vec![0.0; self.ndof()],
        }
    }

    pub fn function(&self, coeffs: Vec<f64>) -> Result<DGFunction<'_>> {
        if coeffs.len() != self.ndof() {
            return Err(Error::SpaceMismatch("coefficient length differs from the space dimension"));
        }
        Ok(DGFunction { space: self, coeffs })
    }

    /// Apply the block-diagonal mass matrix.
    pub fn mass_apply(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.n_local;
        let mut out = vec![0.0; coeffs.len()];
        for e in 0..self.mesh.num_elements() {
            let scale = 2.0 * self.maps[e].area;
            for c in 0..self.components {
                let o = self.offset(e) + c * n;
                let x = DVector::from_column_slice(&coeffs[o..o + n]);
                let y = &self.ref_mass * x * scale;
                out[o..o + n].copy_from_slice(y.as_slice());
            }
        }
        out
    }

    /// Solve `M x = rhs` block by block.
    pub fn mass_solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut out = rhs.to_vec();
        self.mass_solve_in_place(&mut out);
        out
    }

    pub fn mass_solve_in_place(&self, v: &mut [f64]) {
        let n = self.n_local;
        for e in 0..self.mesh.num_elements() {
            let scale = 2.0 * self.maps[e].area;
            for c in 0..self.components {
                let o = self.offset(e) + c * n;
                self.solve_local(&mut v[o..o + n], scale);
            }
        }
    }

    /// `x <- (scale * M_ref)^{-1} x` for one component block.
    pub(crate) fn solve_local(&self, x: &mut [f64], scale: f64) {
        let mut b = DVector::from_column_slice(x);
        self.ref_chol.solve_mut(&mut b);
        for (xi, bi) in x.iter_mut().zip(b.iter()) {
            *xi = bi / scale;
        }
    }

    /// L2 projection of a pointwise field; `field(x, out)` writes one value
    /// per component.
    pub fn l2_project(&self, field: impl Fn([f64; 2], &mut [f64])) -> DGFunction<'_> {
        let n = self.n_local;
        let nc = self.components;
        let mut rhs = vec![0.0; self.ndof()];
        let mut val = vec![0.0; nc];
        for e in 0..self.mesh.num_elements() {
            let o = self.offset(e);
            for q in 0..self.rule.len() {
                let x = self.maps[e].to_physical(self.rule.points[q]);
                field(x, &mut val);
                let w = self.weight(e, q);
                let row = self.basis.value_row(q);
                for c in 0..nc {
                    for i in 0..n {
                        rhs[o + c * n + i] += w * val[c] * row[i];
                    }
                }
            }
        }
        self.mass_solve_in_place(&mut rhs);
        DGFunction {
            space: self,
            coeffs: rhs,
        }
    }

    pub fn project_scalar(&self, f: impl Fn([f64; 2]) -> f64) -> DGFunction<'_> {
        self.l2_project(|x, out| out[0] = f(x))
    }

    pub fn project_vector(&self, f: impl Fn([f64; 2]) -> [f64; 2]) -> DGFunction<'_> {
        self.l2_project(|x, out| out.copy_from_slice(&f(x)))
    }

    /// Evaluate coefficients at a reference point of element `e`.
    pub fn eval(&self, coeffs: &[f64], e: usize, xi: [f64; 2]) -> Vec<f64> {
        let phi = bernstein::values(self.degree, xi);
        let blk = self.block(coeffs, e);
        (0..self.components)
            .map(|c| phi.iter().zip(&blk[c * self.n_local..]).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Evaluate at a physical point known to lie in element `e`.
    pub fn eval_physical(&self, coeffs: &[f64], e: usize, x: [f64; 2]) -> Vec<f64> {
        self.eval(coeffs, e, self.maps[e].to_reference(x))
    }

    pub(crate) fn same_layout(&self, other: &DGSpace) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh) && self.degree == other.degree
    }
}

/// A coefficient vector tied to its space.
#[derive(Debug, Clone)]
pub struct DGFunction<'s> {
    pub space: &'s DGSpace,
    pub coeffs: Vec<f64>,
}

impl<'s> DGFunction<'s> {
    pub fn eval(&self, e: usize, xi: [f64; 2]) -> Vec<f64> {
        self.space.eval(&self.coeffs, e, xi)
    }

    /// `(x, y, values)` at the Lobatto point set of every element.
    pub fn sample_lobatto(&self) -> Vec<([f64; 2], Vec<f64>)> {
        let pts = crate::quadrature::lobatto_triangle_points(self.space.degree);
        (0..self.space.mesh.num_elements())
            .flat_map(|e| pts.iter().map(move |&xi| (self.space.maps[e].to_physical(xi), self.eval(e, xi))))
            .collect()
    }
}
