//! The weighted preconditioner
//!
//! `a_u(w, v) = (W D(w; 0), D(v; 0)) + Σ_{Γ°} η h_e^{-1} ∫ ω ⟦w⟧·⟦v⟧
//!            + Σ_{Γ_D} η h_e^{-1} ∫ ω w v`
//!
//! with weights frozen at `u`, its SPD solve, and the linear (`p = 2`) LDG
//! solve used as the initial guess.

use std::collections::BTreeMap;

use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::energy::{pow_nonneg, EnergyContext, PExponent, State};
use crate::error::{Error, Result};

pub const DEFAULT_EPS: f64 = 1e-14;
pub const SOLVE_RTOL: f64 = 1e-12;

/// Weight of the linearized norm at a point where the frozen field has
/// magnitude `t`.
pub fn weight(t: f64, p: f64, eps: f64) -> f64 {
    if p == 2.0 {
        1.0
    } else if p < 2.0 {
        pow_nonneg(eps + t, p - 2.0)
    } else {
        eps + pow_nonneg(t, p - 2.0)
    }
}

/// Square matrix of `nb × nb` blocks with a sparse block pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSparse {
    nb: usize,
    /// Per block row, `(block column, index into blocks)` sorted by column.
    rows: Vec<Vec<(usize, usize)>>,
    /// Row-major `nb × nb` blocks.
    blocks: Vec<Vec<f64>>,
}

impl BlockSparse {
    fn from_map(n_blocks: usize, nb: usize, map: BTreeMap<(usize, usize), DMatrix<f64>>) -> Self {
        let mut rows = vec![Vec::new(); n_blocks];
        let mut blocks = Vec::with_capacity(map.len());
        for ((i, j), m) in map {
            rows[i].push((j, blocks.len()));
            blocks.push((0..nb * nb).map(|k| m[(k / nb, k % nb)]).collect());
        }
        BlockSparse { nb, rows, blocks }
    }

    pub fn block_size(&self) -> usize {
        self.nb
    }

    pub fn dim(&self) -> usize {
        self.rows.len() * self.nb
    }

    pub fn nnz_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, i: usize, j: usize) -> Option<&[f64]> {
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .ok()
            .map(|k| self.blocks[self.rows[i][k].1].as_slice())
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let nb = self.nb;
        let mut y = vec![0.0; x.len()];
        for (i, row) in self.rows.iter().enumerate() {
            let yi = &mut y[i * nb..(i + 1) * nb];
            for &(j, b) in row {
                let blk = &self.blocks[b];
                let xj = &x[j * nb..(j + 1) * nb];
                for r in 0..nb {
                    yi[r] += blk[r * nb..(r + 1) * nb].iter().zip(xj).map(|(a, b)| a * b).sum::<f64>();
                }
            }
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let nb = self.nb;
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, b) in row {
                for k in 0..nb * nb {
                    m[(i * nb + k / nb, j * nb + k % nb)] = self.blocks[b][k];
                }
            }
        }
        m
    }

    /// Largest `|A_ij - A_ji| / max(|A_ij|, |A_ji|)` over nonzero pairs.
    pub fn asymmetry(&self) -> f64 {
        let nb = self.nb;
        let mut worst: f64 = 0.0;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, b) in row {
                let t = self.block(j, i).expect("symmetric pattern");
                for r in 0..nb {
                    for c in 0..nb {
                        let (a, at) = (self.blocks[b][r * nb + c], t[c * nb + r]);
                        let s = a.abs().max(at.abs());
                        if s > 0.0 {
                            worst = worst.max((a - at).abs() / s);
                        }
                    }
                }
            }
        }
        worst
    }

    fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let nb = self.nb;
        let mut trip = Vec::with_capacity(self.blocks.len() * nb * nb);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, b) in row {
                for k in 0..nb * nb {
                    trip.push(Triplet::new(i * nb + k / nb, j * nb + k % nb, self.blocks[b][k]));
                }
            }
        }
        SparseColMat::try_new_from_triplets(self.dim(), self.dim(), &trip)
            .map_err(|e| Error::Config(format!("sparse pattern: {e:?}")))
    }
}

/// Inner linear solver for the preconditioner equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearSolver {
    /// Fill-reducing sparse Cholesky with iterative refinement.
    #[default]
    Cholesky,
    /// Conjugate gradients with element-block Jacobi preconditioning.
    Cg,
}

/// The assembled weighted preconditioner at a frozen `u`.
#[derive(Debug, Clone)]
pub struct PrecondSystem {
    pub matrix: BlockSparse,
    pub p: f64,
    pub eps: f64,
}

impl PrecondSystem {
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.matrix.matvec(v)
    }
}

/// Assemble the preconditioner with weights taken from `u`.
pub fn assemble_precond(ctx: &EnergyContext, u: &[f64], eps: f64) -> Result<PrecondSystem> {
    assemble_precond_from_state(ctx, &ctx.state(u), eps)
}

pub fn assemble_precond_from_state(ctx: &EnergyContext, st: &State, eps: f64) -> Result<PrecondSystem> {
    let p = ctx.p.p();
    if p != 2.0 && !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidEps(eps));
    }
    let disc = &ctx.disc;
    let s = &disc.scalar;
    let n = s.n_local();
    let nq = s.rule().len();
    let mesh = &disc.mesh;
    let mut map: BTreeMap<(usize, usize), DMatrix<f64>> = BTreeMap::new();
    let mut add = |i: usize, j: usize, m: DMatrix<f64>| {
        map.entry((i, j)).and_modify(|b| *b += &m).or_insert(m);
    };
    for e in 0..mesh.num_elements() {
        // Weighted mass of one component on K.
        let mut mw = DMatrix::zeros(n, n);
        for q in 0..nq {
            let d = st.grad[e * nq + q];
            let w = s.weight(e, q) * weight(d[0].hypot(d[1]), p, eps);
            let psi = s.basis().value_row(q);
            for i in 0..n {
                for j in 0..n {
                    mw[(i, j)] += w * (psi[i] * psi[j]);
                }
            }
        }
        let g = disc.op.g_block(e);
        let stencil = disc.op.stencil(e);
        let gx = g.rows(0, n);
        let gy = g.rows(n, n);
        let mut local = gx.transpose() * &mw * gx + gy.transpose() * &mw * gy;
        // Exact symmetry; the products above differ from their transposes
        // by rounding.
        local = (&local + local.transpose()) * 0.5;
        for (a, &sa) in stencil.iter().enumerate() {
            for (b, &sb) in stencil.iter().enumerate() {
                add(sa, sb, local.view((a * n, b * n), (n, n)).into_owned());
            }
        }
    }
    let ft = disc.faces();
    for (fid, face) in mesh.faces().iter().enumerate() {
        if st.jumps[fid].is_empty() {
            continue;
        }
        let fq = &ft.faces[fid];
        let hinv = 1.0 / face.h_e;
        let eta = disc.flux.eta[fid];
        let l = face.left;
        let mut ll = DMatrix::zeros(n, n);
        let mut rr = DMatrix::zeros(n, n);
        let mut lr = DMatrix::zeros(n, n);
        for q in 0..fq.weights.len() {
            let w = fq.weights[q] * eta * hinv * weight(st.jumps[fid][q].abs() * hinv, p, eps);
            let vl = &fq.left[q * n..(q + 1) * n];
            for i in 0..n {
                for j in 0..n {
                    ll[(i, j)] += w * (vl[i] * vl[j]);
                }
            }
            if let Some(tab) = &fq.right {
                let vr = &tab[q * n..(q + 1) * n];
                for i in 0..n {
                    for j in 0..n {
                        rr[(i, j)] += w * (vr[i] * vr[j]);
                        lr[(i, j)] -= w * vl[i] * vr[j];
                    }
                }
            }
        }
        add(l, l, ll);
        if let Some(r) = face.right() {
            add(r, r, rr);
            add(r, l, lr.transpose());
            add(l, r, lr);
        }
    }
    let matrix = BlockSparse::from_map(mesh.num_elements(), n, map);
    if matrix.blocks.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("preconditioner"));
    }
    Ok(PrecondSystem { matrix, p, eps })
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn residual(a: &BlockSparse, x: &[f64], b: &[f64]) -> Vec<f64> {
    a.matvec(x).iter().zip(b).map(|(ax, bi)| bi - ax).collect()
}

/// Solve `A x = rhs` to relative residual [`SOLVE_RTOL`].
pub fn solve_spd(sys: &PrecondSystem, rhs: &[f64], solver: LinearSolver) -> Result<Vec<f64>> {
    if rhs.len() != sys.matrix.dim() {
        return Err(Error::SpaceMismatch("right-hand side length differs from the system"));
    }
    let bn = norm(rhs);
    if bn == 0.0 {
        return Ok(vec![0.0; rhs.len()]);
    }
    match solver {
        LinearSolver::Cholesky => solve_cholesky(&sys.matrix, rhs, bn),
        LinearSolver::Cg => solve_cg(&sys.matrix, rhs, bn, 20 * rhs.len()),
    }
}

fn solve_cholesky(a: &BlockSparse, rhs: &[f64], bn: f64) -> Result<Vec<f64>> {
    let fa = a.to_faer()?;
    let llt = fa.sp_cholesky(Side::Lower).map_err(|_| Error::SolveFailed {
        iterations: 0,
        residual: f64::NAN,
    })?;
    let solve = |b: &[f64]| -> Vec<f64> {
        let m = Mat::<f64>::from_fn(b.len(), 1, |i, _| b[i]);
        let x = llt.solve(&m);
        (0..b.len()).map(|i| x[(i, 0)]).collect()
    };
    let mut x = solve(rhs);
    let mut rel = norm(&residual(a, &x, rhs)) / bn;
    // Iterative refinement recovers the residual lost to ill-conditioning.
    for _ in 0..5 {
        if rel <= SOLVE_RTOL || !rel.is_finite() {
            break;
        }
        let r = residual(a, &x, rhs);
        let dx = solve(&r);
        let cand: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let cr = norm(&residual(a, &cand, rhs)) / bn;
        if cr >= rel {
            break;
        }
        x = cand;
        rel = cr;
    }
    if !rel.is_finite() {
        return Err(Error::SolveFailed {
            iterations: 0,
            residual: rel,
        });
    }
    Ok(x)
}

fn solve_cg(a: &BlockSparse, rhs: &[f64], bn: f64, max_iter: usize) -> Result<Vec<f64>> {
    let nb = a.nb;
    let diag: Vec<Cholesky<f64, Dyn>> = (0..a.rows.len())
        .map(|i| {
            let b = a.block(i, i).expect("diagonal block");
            DMatrix::from_row_slice(nb, nb, b).cholesky()
        })
        .collect::<Option<_>>()
        .ok_or(Error::SolveFailed {
            iterations: 0,
            residual: f64::NAN,
        })?;
    let precond = |r: &[f64]| -> Vec<f64> {
        let mut z = vec![0.0; r.len()];
        for (i, c) in diag.iter().enumerate() {
            let v = c.solve(&DVector::from_column_slice(&r[i * nb..(i + 1) * nb]));
            z[i * nb..(i + 1) * nb].copy_from_slice(v.as_slice());
        }
        z
    };
    let n = rhs.len();
    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut z = precond(&r);
    let mut d = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    for it in 0..max_iter {
        let ad = a.matvec(&d);
        let dad: f64 = d.iter().zip(&ad).map(|(a, b)| a * b).sum();
        if dad <= 0.0 {
            break;
        }
        let alpha = rz / dad;
        for i in 0..n {
            x[i] += alpha * d[i];
            r[i] -= alpha * ad[i];
        }
        if norm(&r) <= SOLVE_RTOL * bn {
            // Confirm against the true residual.
            let true_r = residual(a, &x, rhs);
            if norm(&true_r) <= SOLVE_RTOL * bn {
                return Ok(x);
            }
            r = true_r;
        }
        z = precond(&r);
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            d[i] = z[i] + beta * d[i];
        }
        if it + 1 == max_iter {
            break;
        }
    }
    Err(Error::SolveFailed {
        iterations: max_iter,
        residual: norm(&residual(a, &x, rhs)) / bn,
    })
}

/// Solve the problem with `p` replaced by 2: the linear LDG solution with
/// the same fluxes and data.
pub fn poisson_initial_guess(ctx: &EnergyContext, solver: LinearSolver) -> Result<Vec<f64>> {
    let lin = ctx.with_exponent(PExponent::new(2.0)?);
    let zero = vec![0.0; lin.ndof()];
    let sys = assemble_precond(&lin, &zero, 0.0)?;
    let r0 = lin.gradient(&zero)?;
    let rhs: Vec<f64> = r0.iter().map(|v| -v).collect();
    solve_spd(&sys, &rhs, solver)
}
