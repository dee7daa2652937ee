//! Trace algebra, MD-LDG flux parameters and the discrete weak gradient
//!
//! `(D(v; g), ζ) = (∇_h v, ζ) − ⟨⟦v⟧, {ζ} − C12 ⟦ζ⟧⟩_{Γ°} − ⟨v − g, ζ·n⟩_{Γ_D}`
//!
//! assembled as element-block rows `D(v; 0)|_K = Σ_{L ∈ S(K)} G_{K,L} v_L`
//! where `S(K)` is `K` followed by its face neighbours.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::bernstein;
use crate::error::{Error, Result};
use crate::mesh::{BoundaryTag, Face, Mesh, Neighbor};
use crate::quadrature::gauss_segment;
use crate::space::DGSpace;

pub const DEFAULT_ETA: f64 = 10.0;
pub const DEFAULT_V0: [f64; 2] = [1.0, 0.0];

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// `⟦u⟧ = u1 n1 + u2 n2`; on a boundary face `u n`.
pub fn scalar_jump(face: &Face, left: f64, right: Option<f64>) -> [f64; 2] {
    let d = left - right.unwrap_or(0.0);
    [d * face.normal[0], d * face.normal[1]]
}

/// `{u}`; undefined on boundary faces.
pub fn scalar_average(face_id: usize, face: &Face, left: f64, right: Option<f64>) -> Result<f64> {
    match (face.is_interior(), right) {
        (true, Some(r)) => Ok(0.5 * (left + r)),
        _ => Err(Error::BoundaryFace {
            face: face_id,
            what: "scalar average",
        }),
    }
}

/// `⟦φ⟧ = φ1·n1 + φ2·n2`; undefined on boundary faces.
pub fn vector_jump(face_id: usize, face: &Face, left: [f64; 2], right: Option<[f64; 2]>) -> Result<f64> {
    match (face.is_interior(), right) {
        (true, Some(r)) => Ok(dot([left[0] - r[0], left[1] - r[1]], face.normal)),
        _ => Err(Error::BoundaryFace {
            face: face_id,
            what: "vector jump",
        }),
    }
}

/// `{φ}`; on a boundary face the interior trace.
pub fn vector_average(face: &Face, left: [f64; 2], right: Option<[f64; 2]>) -> [f64; 2] {
    match right {
        Some(r) if face.is_interior() => [0.5 * (left[0] + r[0]), 0.5 * (left[1] + r[1])],
        _ => left,
    }
}

/// `C12 = ½ sign(v0·n1) n1` with `sign(0) = +1`.
pub fn mdldg_c12(face_id: usize, face: &Face, v0: [f64; 2]) -> Result<[f64; 2]> {
    if !face.is_interior() {
        return Err(Error::BoundaryFace {
            face: face_id,
            what: "C12",
        });
    }
    let s = if dot(v0, face.normal) >= 0.0 { 0.5 } else { -0.5 };
    Ok([s * face.normal[0], s * face.normal[1]])
}

/// Penalty `η` and `C12` per face (`C12 = 0` on boundary faces).
#[derive(Debug, Clone, PartialEq)]
pub struct FluxParams {
    pub eta: Vec<f64>,
    pub c12: Vec<[f64; 2]>,
}

impl FluxParams {
    pub fn md_ldg(mesh: &Mesh, eta: f64, v0: [f64; 2]) -> Self {
        let c12 = mesh
            .faces()
            .iter()
            .enumerate()
            .map(|(i, f)| mdldg_c12(i, f, v0).unwrap_or([0.0, 0.0]))
            .collect();
        FluxParams {
            eta: vec![eta; mesh.faces().len()],
            c12,
        }
    }

    /// Central flux, `C12 = 0` everywhere.
    pub fn central(mesh: &Mesh, eta: f64) -> Self {
        FluxParams {
            eta: vec![eta; mesh.faces().len()],
            c12: vec![[0.0, 0.0]; mesh.faces().len()],
        }
    }
}

/// Gauss points on one face with the basis of each adjacent element
/// tabulated there.
#[derive(Debug, Clone)]
pub struct FaceQuad {
    pub points: Vec<[f64; 2]>,
    /// Physical weights (include the face length).
    pub weights: Vec<f64>,
    /// `left[q * n_local + i]`
    pub left: Vec<f64>,
    pub right: Option<Vec<f64>>,
}

/// Face quadrature for every face of a mesh, `k + 1` Gauss points each.
#[derive(Debug, Clone)]
pub struct FaceTables {
    pub n_local: usize,
    pub faces: Vec<FaceQuad>,
}

impl FaceTables {
    pub fn new(space: &DGSpace) -> Self {
        let mesh = space.mesh();
        let rule = gauss_segment(space.degree() + 1);
        let k = space.degree();
        let tab = |e: usize, pts: &[[f64; 2]]| -> Vec<f64> {
            pts.iter()
                .flat_map(|&x| bernstein::values(k, space.map(e).to_reference(x)))
                .collect()
        };
        let faces = mesh
            .faces()
            .iter()
            .map(|f| {
                let a = mesh.vertices()[f.vertices[0]];
                let b = mesh.vertices()[f.vertices[1]];
                let points: Vec<[f64; 2]> = rule
                    .points
                    .iter()
                    .map(|t| [a[0] + t[0] * (b[0] - a[0]), a[1] + t[0] * (b[1] - a[1])])
                    .collect();
                FaceQuad {
                    weights: rule.weights.iter().map(|w| w * f.length).collect(),
                    left: tab(f.left, &points),
                    right: f.right().map(|r| tab(r, &points)),
                    points,
                }
            })
            .collect();
        FaceTables {
            n_local: space.n_local(),
            faces,
        }
    }

    pub fn num_points(&self) -> usize {
        self.faces.first().map_or(0, |f| f.weights.len())
    }

    /// Trace of one scalar component from element-local coefficients `c`.
    pub fn trace(&self, face: usize, right: bool, c: &[f64], q: usize) -> f64 {
        let f = &self.faces[face];
        let tab = if right { f.right.as_deref().expect("interior face") } else { &f.left };
        tab[q * self.n_local..(q + 1) * self.n_local].iter().zip(c).map(|(a, b)| a * b).sum()
    }
}

/// Assembled `v ↦ D(v; 0)` plus the Dirichlet lifting channel.
#[derive(Debug, Clone)]
pub struct GradOperator {
    n_local: usize,
    /// `stencils[K] = [K, neighbours...]`
    stencils: Vec<Vec<usize>>,
    /// Right-hand side blocks `B_K` (`2 n_local × |S(K)| n_local`).
    b: Vec<DMatrix<f64>>,
    /// `G_K = M_K^{-1} B_K`.
    g: Vec<DMatrix<f64>>,
    face_tables: FaceTables,
}

impl GradOperator {
    pub fn assemble(scalar: &DGSpace, vector: &DGSpace, flux: &FluxParams) -> Result<Self> {
        if !scalar.same_layout(vector) || scalar.components() != 1 || vector.components() != 2 {
            return Err(Error::SpaceMismatch("D_DG maps a scalar space into the vector space of equal degree"));
        }
        let mesh = scalar.mesh();
        if flux.eta.len() != mesh.faces().len() || flux.c12.len() != mesh.faces().len() {
            return Err(Error::SpaceMismatch("flux parameters sized for another mesh"));
        }
        let n = scalar.n_local();
        let ft = FaceTables::new(scalar);
        let basis = scalar.basis();
        let mut stencils = Vec::with_capacity(mesh.num_elements());
        let mut bs = Vec::with_capacity(mesh.num_elements());
        let mut gs = Vec::with_capacity(mesh.num_elements());
        for e in 0..mesh.num_elements() {
            let mut stencil = vec![e];
            stencil.extend(mesh.neighbors(e));
            let mut b = DMatrix::zeros(2 * n, stencil.len() * n);
            let map = scalar.map(e);
            for q in 0..scalar.rule().len() {
                let w = scalar.weight(e, q);
                let psi = basis.value_row(q);
                let grads = basis.grad_row(q);
                for i in 0..n {
                    let gp = map.physical_gradient(grads[i]);
                    for j in 0..n {
                        b[(j, i)] += w * gp[0] * psi[j];
                        b[(n + j, i)] += w * gp[1] * psi[j];
                    }
                }
            }
            for fid in mesh.element_faces(e) {
                let face = mesh.face(fid);
                let fq = &ft.faces[fid];
                let is_left = face.left == e;
                let nk = mesh.outward_normal(fid, e);
                let own = |q: usize| -> &[f64] {
                    let t = if is_left { &fq.left } else { fq.right.as_ref().unwrap() };
                    &t[q * n..(q + 1) * n]
                };
                match face.neighbor {
                    Neighbor::Element(_) => {
                        let other = if is_left { face.right().unwrap() } else { face.left };
                        let slot = stencil.iter().position(|&s| s == other).unwrap();
                        let alpha = 0.5 - dot(flux.c12[fid], nk);
                        if alpha == 0.0 {
                            continue;
                        }
                        let oth = |q: usize| -> &[f64] {
                            let t = if is_left { fq.right.as_ref().unwrap() } else { &fq.left };
                            &t[q * n..(q + 1) * n]
                        };
                        for q in 0..fq.weights.len() {
                            let w = fq.weights[q] * alpha;
                            let (vk, vo) = (own(q), oth(q));
                            for j in 0..n {
                                for c in 0..2 {
                                    let s = w * vk[j] * nk[c];
                                    for i in 0..n {
                                        b[(c * n + j, i)] -= s * vk[i];
                                        b[(c * n + j, slot * n + i)] += s * vo[i];
                                    }
                                }
                            }
                        }
                    }
                    Neighbor::Boundary(BoundaryTag::Dirichlet) => {
                        for q in 0..fq.weights.len() {
                            let vk = own(q);
                            for j in 0..n {
                                for c in 0..2 {
                                    let s = fq.weights[q] * vk[j] * nk[c];
                                    for i in 0..n {
                                        b[(c * n + j, i)] -= s * vk[i];
                                    }
                                }
                            }
                        }
                    }
                    Neighbor::Boundary(BoundaryTag::Neumann) => {}
                }
            }
            let mut g = b.clone();
            let scale = 2.0 * map.area;
            for col in 0..g.ncols() {
                for c in 0..2 {
                    let mut x: Vec<f64> = (0..n).map(|j| g[(c * n + j, col)]).collect();
                    scalar.solve_local(&mut x, scale);
                    for j in 0..n {
                        g[(c * n + j, col)] = x[j];
                    }
                }
            }
            stencils.push(stencil);
            bs.push(b);
            gs.push(g);
        }
        Ok(GradOperator {
            n_local: n,
            stencils,
            b: bs,
            g: gs,
            face_tables: ft,
        })
    }

    pub fn n_local(&self) -> usize {
        self.n_local
    }

    pub fn num_elements(&self) -> usize {
        self.stencils.len()
    }

    pub fn stencil(&self, e: usize) -> &[usize] {
        &self.stencils[e]
    }

    pub fn b_block(&self, e: usize) -> &DMatrix<f64> {
        &self.b[e]
    }

    pub fn g_block(&self, e: usize) -> &DMatrix<f64> {
        &self.g[e]
    }

    pub fn face_tables(&self) -> &FaceTables {
        &self.face_tables
    }

    /// Moments `b_g = ⟨g, ψ_j e_c · n⟩_{Γ_D}` in vector-space layout.
    pub fn dirichlet_moments(&self, mesh: &Mesh, g: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        let n = self.n_local;
        let mut out = vec![0.0; 2 * n * self.num_elements()];
        for (fid, face) in mesh.faces().iter().enumerate() {
            if face.boundary_tag() != Some(BoundaryTag::Dirichlet) {
                continue;
            }
            let fq = &self.face_tables.faces[fid];
            let o = 2 * n * face.left;
            for q in 0..fq.weights.len() {
                let s = fq.weights[q] * g(fq.points[q]);
                let psi = &fq.left[q * n..(q + 1) * n];
                for j in 0..n {
                    out[o + j] += s * psi[j] * face.normal[0];
                    out[o + n + j] += s * psi[j] * face.normal[1];
                }
            }
        }
        out
    }

    /// `D(0; g) = M^{-1} b_g`.
    pub fn lift(&self, space: &DGSpace, g_moments: &[f64]) -> Vec<f64> {
        space.mass_solve(g_moments)
    }

    /// `D(v; g)` coefficients; `lift` is [`Self::lift`] of the data or `None`
    /// for `g = 0`.
    pub fn apply(&self, v: &[f64], lift: Option<&[f64]>) -> Vec<f64> {
        let n = self.n_local;
        let mut out = vec![0.0; 2 * n * self.num_elements()];
        let mut local = vec![0.0; 0];
        for e in 0..self.num_elements() {
            let st = &self.stencils[e];
            local.clear();
            for &s in st {
                local.extend_from_slice(&v[s * n..(s + 1) * n]);
            }
            let g = &self.g[e];
            let blk = &mut out[2 * n * e..2 * n * (e + 1)];
            for (col, &x) in local.iter().enumerate() {
                if x != 0.0 {
                    for (r, o) in blk.iter_mut().enumerate() {
                        *o += g[(r, col)] * x;
                    }
                }
            }
        }
        if let Some(l) = lift {
            out.iter_mut().zip(l).for_each(|(o, l)| *o += l);
        }
        out
    }

    /// `Gᵀ m`: for element moments `m_K` of a vector field against the
    /// vector basis, the scalar vector `Σ_K (m_K, D(φ_i; 0)|_K)`.
    pub fn apply_transpose(&self, m: &[f64]) -> Vec<f64> {
        let n = self.n_local;
        let mut out = vec![0.0; n * self.num_elements()];
        for e in 0..self.num_elements() {
            let mk = &m[2 * n * e..2 * n * (e + 1)];
            let g = &self.g[e];
            for (slot, &s) in self.stencils[e].iter().enumerate() {
                for i in 0..n {
                    let col = slot * n + i;
                    out[s * n + i] += (0..2 * n).map(|r| g[(r, col)] * mk[r]).sum::<f64>();
                }
            }
        }
        out
    }
}

/// Spaces, flux parameters and the assembled gradient operator of one mesh.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: Arc<Mesh>,
    pub scalar: DGSpace,
    pub vector: DGSpace,
    pub flux: FluxParams,
    pub op: GradOperator,
}

impl Discretization {
    pub fn new(mesh: Arc<Mesh>, degree: usize, flux: FluxParams) -> Result<Self> {
        let scalar = DGSpace::scalar(mesh.clone(), degree)?;
        let vector = DGSpace::vector(mesh.clone(), degree)?;
        let op = GradOperator::assemble(&scalar, &vector, &flux)?;
        Ok(Discretization {
            mesh,
            scalar,
            vector,
            flux,
            op,
        })
    }

    /// MD-LDG fluxes with `v0 = (1, 0)`.
    pub fn md_ldg(mesh: Arc<Mesh>, degree: usize, eta: f64) -> Result<Self> {
        let flux = FluxParams::md_ldg(&mesh, eta, DEFAULT_V0);
        Self::new(mesh, degree, flux)
    }

    pub fn degree(&self) -> usize {
        self.scalar.degree()
    }

    pub fn n_local(&self) -> usize {
        self.scalar.n_local()
    }

    pub fn faces(&self) -> &FaceTables {
        self.op.face_tables()
    }

    /// `D(v; 0)` (or `D(v; g)` with a lift) at every element quadrature
    /// point, indexed `e * nq + q`.
    pub fn gradient_at_qp(&self, v: &[f64], lift: Option<&[f64]>) -> Vec<[f64; 2]> {
        let d = self.op.apply(v, lift);
        vector_at_qp(&self.vector, &d)
    }
}

/// Values of a two-component field at the element quadrature points.
pub fn vector_at_qp(space: &DGSpace, c: &[f64]) -> Vec<[f64; 2]> {
    let n = space.n_local();
    let nq = space.rule().len();
    let mut out = Vec::with_capacity(space.mesh().num_elements() * nq);
    for e in 0..space.mesh().num_elements() {
        let blk = space.block(c, e);
        for q in 0..nq {
            let phi = space.basis().value_row(q);
            let mut v = [0.0; 2];
            for i in 0..n {
                v[0] += phi[i] * blk[i];
                v[1] += phi[i] * blk[n + i];
            }
            out.push(v);
        }
    }
    out
}

/// Values of a scalar field at the element quadrature points.
pub fn scalar_at_qp(space: &DGSpace, c: &[f64]) -> Vec<f64> {
    let nq = space.rule().len();
    let mut out = Vec::with_capacity(space.mesh().num_elements() * nq);
    for e in 0..space.mesh().num_elements() {
        let blk = space.block(c, e);
        for q in 0..nq {
            out.push(space.basis().value_row(q).iter().zip(blk).map(|(a, b)| a * b).sum());
        }
    }
    out
}
