//! Positive-weight quadrature on the reference segment `[0, 1]` and the
//! reference triangle `{(x, y): x, y >= 0, x + y <= 1}`.
//!
//! Triangle rules are fully symmetric (invariant under every permutation of
//! the barycentric coordinates) with strictly positive weights and interior
//! points. They are stored by symmetry orbit in [`triangle_table`].

mod triangle_table;

use crate::error::{Error, Result};

pub use triangle_table::{TriangleOrbits, MAX_TRIANGLE_DEGREE, TRIANGLE_RULES};

/// A quadrature rule on a `DIM`-dimensional reference domain.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule<const DIM: usize> {
    pub points: Vec<[f64; DIM]>,
    pub weights: Vec<f64>,
    /// Total polynomial degree integrated exactly.
    pub degree: usize,
}

impl<const DIM: usize> QuadRule<DIM> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn([f64; DIM]) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss–Legendre rule with `n` points on `[0, 1]`, exact to degree `2n - 1`.
pub fn gauss_segment(n: usize) -> QuadRule<1> {
    assert!(n >= 1, "a Gauss rule needs at least one point");
    let mut points = vec![[0.0]; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton iteration on P_n from the Tricomi initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1, 1] -> [0, 1].
        points[i] = [0.5 * (1.0 - x)];
        points[n - 1 - i] = [0.5 * (1.0 + x)];
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    if n % 2 == 1 {
        points[n / 2] = [0.5];
    }
    QuadRule {
        points,
        weights,
        degree: 2 * n - 1,
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Lobatto nodes on `[0, 1]` (endpoints included), ascending.
pub fn lobatto_nodes(n: usize) -> Vec<f64> {
    assert!(n >= 2, "Lobatto nodes need both endpoints");
    // Interior nodes are the roots of P'_{n-1}; Newton on (1 - x^2) P'_{n-1}.
    let m = n - 1;
    let mut nodes = vec![0.0; n];
    nodes[n - 1] = 1.0;
    for (i, node) in nodes.iter_mut().enumerate().take(m).skip(1) {
        let mut x = -(std::f64::consts::PI * i as f64 / m as f64).cos();
        for _ in 0..100 {
            // q = (1 - x^2) P'_m = m (P_{m-1} - x P_m); q' = -m (m + 1) P_m
            let (p, _) = legendre(m, x);
            let (pm1, _) = legendre(m - 1, x);
            let q = m as f64 * (pm1 - x * p);
            let dq = -(m as f64) * (m as f64 + 1.0) * p;
            let dx = q / dq;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        *node = 0.5 * (1.0 + x);
    }
    nodes
}

/// Lobatto-based point set on the reference triangle for degree `k`
/// (Blyth–Pozrikidis construction), one point per Bernstein index.
/// Useful for sampling solutions; the solver itself never interpolates.
pub fn lobatto_triangle_points(k: usize) -> Vec<[f64; 2]> {
    if k == 0 {
        return vec![[1.0 / 3.0, 1.0 / 3.0]];
    }
    let v = lobatto_nodes(k + 1);
    let mut pts = Vec::with_capacity((k + 1) * (k + 2) / 2);
    for i in 0..=k {
        for j in 0..=(k - i) {
            let l = k - i - j;
            let x = (1.0 + 2.0 * v[i] - v[j] - v[l]) / 3.0;
            let y = (1.0 + 2.0 * v[j] - v[i] - v[l]) / 3.0;
            pts.push([x, y]);
        }
    }
    pts
}

/// Symmetric positive rule on the reference triangle exact to at least
/// `degree` (weights sum to 1/2).
pub fn gauss_triangle(degree: usize) -> Result<QuadRule<2>> {
    let degree = degree.max(1);
    let orbits = TRIANGLE_RULES.get(degree - 1).ok_or(Error::QuadratureDegree(degree))?;
    Ok(orbits.expand())
}

impl TriangleOrbits {
    /// Expand the orbit description into explicit points and weights.
    pub fn expand(&self) -> QuadRule<2> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut push = |l: [f64; 3], w: f64| {
            points.push([l[1], l[2]]);
            weights.push(w);
        };
        if let Some(w) = self.centroid {
            push([1.0 / 3.0; 3], w);
        }
        for &(w, a) in self.s21 {
            let b = 1.0 - 2.0 * a;
            push([b, a, a], w);
            push([a, b, a], w);
            push([a, a, b], w);
        }
        for &(w, a, b) in self.s111 {
            let c = 1.0 - a - b;
            for l in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                push(l, w);
            }
        }
        QuadRule {
            points,
            weights,
            degree: self.degree,
        }
    }
}

/// `∫_T x^a y^b dA = a! b! / (a + b + 2)!` over the reference triangle.
pub fn triangle_monomial_integral(a: u32, b: u32) -> f64 {
    let mut v = 1.0;
    // a! b! / (a+b+2)! = 1 / ((a+b+2)(a+b+1) binom(a+b, a))
    let n = a + b;
    for i in 1..=a {
        v *= i as f64 / (b + i) as f64;
    }
    v / ((n + 1) as f64 * (n + 2) as f64)
}

/// Largest relative error over all monomials `x^a y^b` with `a + b <= degree`.
pub fn moment_defect(rule: &QuadRule<2>, degree: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..=degree as u32 {
        for b in 0..=(degree as u32 - a) {
            let exact = triangle_monomial_integral(a, b);
            let approx = rule.integrate(|p| p[0].powi(a as i32) * p[1].powi(b as i32));
            worst = worst.max(((approx - exact) / exact).abs());
        }
    }
    worst
}
