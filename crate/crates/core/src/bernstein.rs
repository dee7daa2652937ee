//! Bernstein polynomials on the reference triangle.
//!
//! With barycentric coordinates `λ = (1 - x - y, x, y)` the basis of degree
//! `k` is `B_abc(λ) = k!/(a! b! c!) λ1^a λ2^b λ3^c` for `a + b + c = k`.
//! Functions are ordered by decreasing `a`, then decreasing `b`, so index 0 is
//! the vertex function of local vertex 0.

/// Multi-indices `(a, b, c)` of the degree-`k` basis in storage order.
pub fn indices(k: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity(dim(k));
    for a in (0..=k).rev() {
        for b in (0..=(k - a)).rev() {
            out.push([a, b, k - a - b]);
        }
    }
    out
}

/// Number of basis functions, `(k + 1)(k + 2) / 2`.
pub const fn dim(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn pow(x: f64, n: usize) -> f64 {
    x.powi(n as i32)
}

/// Values of every basis function at reference point `xi`.
pub fn values(k: usize, xi: [f64; 2]) -> Vec<f64> {
    let lam = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
    let kf = factorial(k);
    indices(k)
        .into_iter()
        .map(|[a, b, c]| kf / (factorial(a) * factorial(b) * factorial(c)) * pow(lam[0], a) * pow(lam[1], b) * pow(lam[2], c))
        .collect()
}

/// Reference-coordinate gradients `(d/dx, d/dy)` of every basis function.
pub fn gradients(k: usize, xi: [f64; 2]) -> Vec<[f64; 2]> {
    let lam = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
    let kf = factorial(k);
    indices(k)
        .into_iter()
        .map(|[a, b, c]| {
            let coef = kf / (factorial(a) * factorial(b) * factorial(c));
            let d = |i: usize, e: [usize; 3]| -> f64 {
                if e[i] == 0 {
                    return 0.0;
                }
                let mut v = e[i] as f64;
                for (j, &ej) in e.iter().enumerate() {
                    v *= pow(lam[j], if j == i { ej - 1 } else { ej });
                }
                v
            };
            let e = [a, b, c];
            let (d1, d2, d3) = (d(0, e), d(1, e), d(2, e));
            // dλ1 = -(dx + dy), dλ2 = dx, dλ3 = dy
            [coef * (d2 - d1), coef * (d3 - d1)]
        })
        .collect()
}

/// Basis values and reference gradients tabulated at a point set.
#[derive(Debug, Clone)]
pub struct BernsteinBasis {
    pub degree: usize,
    pub len: usize,
    /// `values[q * len + i]`
    pub values: Vec<f64>,
    /// `grads[q * len + i]`
    pub grads: Vec<[f64; 2]>,
}

impl BernsteinBasis {
    pub fn value_row(&self, q: usize) -> &[f64] {
        &self.values[q * self.len..(q + 1) * self.len]
    }

    pub fn grad_row(&self, q: usize) -> &[[f64; 2]] {
        &self.grads[q * self.len..(q + 1) * self.len]
    }

    pub fn num_points(&self) -> usize {
        self.values.len() / self.len
    }
}

/// Tabulate the degree-`k` basis at `pts`.
pub fn bernstein_eval(k: usize, pts: &[[f64; 2]]) -> BernsteinBasis {
    let len = dim(k);
    let mut values = Vec::with_capacity(len * pts.len());
    let mut grads = Vec::with_capacity(len * pts.len());
    for &p in pts {
        values.extend(self::values(k, p));
        grads.extend(self::gradients(k, p));
    }
    BernsteinBasis {
        degree: k,
        len,
        values,
        grads,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_triangle;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    #[test]
    fn small_cases() {
        let b = bernstein_eval(0, &[[0.2, 0.3]]);
        assert_eq!(b.values, vec![1.0]);
        assert_eq!(b.grads, vec![[0.0, 0.0]]);
        assert_eq!(values(1, [0.0, 0.0]), vec![1.0, 0.0, 0.0]);
        let c = values(2, [1.0 / 3.0, 1.0 / 3.0]);
        let idx = indices(2);
        let at = |m: [usize; 3]| c[idx.iter().position(|&i| i == m).unwrap()];
        assert_relative_eq!(at([2, 0, 0]), 1.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(at([1, 1, 0]), 2.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn partition_of_unity_and_range() {
        for k in 0..=6 {
            let rule = gauss_triangle(13).unwrap();
            let b = bernstein_eval(k, &rule.points);
            for q in 0..b.num_points() {
                let s: f64 = b.value_row(q).iter().sum();
                assert_relative_eq!(s, 1.0, epsilon = 1e-14);
                assert!(b.value_row(q).iter().all(|&v| (0.0..=1.0).contains(&v)));
                let g = b.grad_row(q).iter().fold([0.0, 0.0], |a, g| [a[0] + g[0], a[1] + g[1]]);
                assert!(g[0].abs() < 1e-13 && g[1].abs() < 1e-13);
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let h = 1e-6;
        for k in 1..=6 {
            let p = [0.21, 0.37];
            let g = gradients(k, p);
            let (xp, xm) = (values(k, [p[0] + h, p[1]]), values(k, [p[0] - h, p[1]]));
            let (yp, ym) = (values(k, [p[0], p[1] + h]), values(k, [p[0], p[1] - h]));
            for i in 0..dim(k) {
                assert_relative_eq!(g[i][0], (xp[i] - xm[i]) / (2.0 * h), epsilon = 1e-7);
                assert_relative_eq!(g[i][1], (yp[i] - ym[i]) / (2.0 * h), epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn mass_matrix_is_spd() {
        for k in 0..=6 {
            let rule = gauss_triangle(2 * k).unwrap();
            let b = bernstein_eval(k, &rule.points);
            let n = b.len;
            let mut m = DMatrix::<f64>::zeros(n, n);
            for (q, &w) in rule.weights.iter().enumerate() {
                let row = b.value_row(q);
                for i in 0..n {
                    for j in 0..n {
                        m[(i, j)] += w * row[i] * row[j];
                    }
                }
            }
            assert!((&m - m.transpose()).amax() < 1e-16);
            assert!(m.cholesky().is_some(), "k = {k}");
        }
    }
}
