//! Manufactured test problems with known exact solutions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::energy::{a_op, PExponent, ProblemData};
use crate::error::{Error, Result};
use crate::mesh::{BoundaryTag, DomainKind, DomainSpec};

pub type ScalarField = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync>;
/// `g_N·n` as a function of the point and the outward normal.
pub type FluxField = Arc<dyn Fn([f64; 2], [f64; 2]) -> f64 + Send + Sync>;

/// Radius of the flat region in the degenerate example.
pub const DEGENERATE_RADIUS: f64 = 0.3;

#[derive(Clone)]
pub struct ProblemSpec {
    pub id: String,
    pub domain: DomainSpec,
    pub p: PExponent,
    pub u: ScalarField,
    pub q: VectorField,
    pub sigma: VectorField,
    pub f: ScalarField,
    pub g_d: ScalarField,
    pub g_n: Option<FluxField>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .field("p", &self.p.p())
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    /// Borrowed view used to build an [`crate::energy::EnergyContext`].
    pub fn data(&self) -> ProblemData<'_> {
        ProblemData {
            f: &*self.f,
            g_d: &*self.g_d,
            g_n: self.g_n.as_deref().map(|g| g as &dyn Fn([f64; 2], [f64; 2]) -> f64),
        }
    }
}

fn radius(x: [f64; 2]) -> f64 {
    x[0].hypot(x[1])
}

/// `s(r) * x / r`, zero at the origin.
fn radial(x: [f64; 2], s: f64) -> [f64; 2] {
    let r = radius(x);
    if r == 0.0 {
        [0.0, 0.0]
    } else {
        [s * x[0] / r, s * x[1] / r]
    }
}

/// `u = exp(sin πx) cos(π(x + y))` on the pentagon, `p = 2`.
pub fn example_linear() -> ProblemSpec {
    let u: ScalarField = Arc::new(|x: [f64; 2]| (PI * x[0]).sin().exp() * (PI * (x[0] + x[1])).cos());
    let q: VectorField = Arc::new(|x: [f64; 2]| {
        let e = (PI * x[0]).sin().exp();
        let (s, c) = (PI * (x[0] + x[1])).sin_cos();
        [PI * e * ((PI * x[0]).cos() * c - s), -PI * e * s]
    });
    let f: ScalarField = Arc::new(|x: [f64; 2]| {
        let e = (PI * x[0]).sin().exp();
        let (sx, cx) = (PI * x[0]).sin_cos();
        let (s, c) = (PI * (x[0] + x[1])).sin_cos();
        PI * PI * e * (c * (2.0 - cx * cx + sx) + 2.0 * cx * s)
    });
    ProblemSpec {
        id: "linear".into(),
        domain: DomainSpec::dirichlet(DomainKind::Pentagon),
        p: PExponent::new(2.0).expect("valid exponent"),
        g_d: u.clone(),
        u,
        sigma: q.clone(),
        q,
        f,
        g_n: None,
    }
}

/// Radial solution with source `r^σ` on the pentagon.
pub fn example_regular(sigma: f64, p: f64) -> Result<ProblemSpec> {
    let pe = PExponent::new(p)?;
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::Config(format!("radial exponent must be >= 0, got {sigma}")));
    }
    let c = (sigma + 2.0).powf(1.0 / (p - 1.0));
    let u: ScalarField =
        Arc::new(move |x| (p - 1.0) / c * (1.0 - radius(x).powf((sigma + p) / (p - 1.0))) / (sigma + p));
    let q: VectorField = Arc::new(move |x| radial(x, -radius(x).powf((sigma + 1.0) / (p - 1.0)) / c));
    let s: VectorField = Arc::new(move |x| {
        let w = -radius(x).powf(sigma) / (sigma + 2.0);
        [w * x[0], w * x[1]]
    });
    let f: ScalarField = Arc::new(move |x| radius(x).powf(sigma));
    Ok(ProblemSpec {
        id: "regular".into(),
        domain: DomainSpec::dirichlet(DomainKind::Pentagon),
        p: pe,
        g_d: u.clone(),
        u,
        q,
        sigma: s,
        f,
        g_n: None,
    })
}

/// `u = (r - a)^4` outside `B_a(0)`, zero inside, `a = 0.3`.
pub fn example_degenerate(p: f64) -> Result<ProblemSpec> {
    let pe = PExponent::new(p)?;
    let a = DEGENERATE_RADIUS;
    let u: ScalarField = Arc::new(move |x| {
        let r = radius(x);
        if r < a {
            0.0
        } else {
            (r - a).powi(4)
        }
    });
    let q: VectorField = Arc::new(move |x| {
        let r = radius(x);
        if r < a {
            [0.0, 0.0]
        } else {
            radial(x, 4.0 * (r - a).powi(3))
        }
    });
    let s: VectorField = Arc::new(move |x| {
        let r = radius(x);
        if r < a {
            [0.0, 0.0]
        } else {
            radial(x, 4f64.powf(p - 1.0) * (r - a).powf(3.0 * p - 3.0))
        }
    });
    let f: ScalarField = Arc::new(move |x| {
        let r = radius(x);
        if r < a {
            0.0
        } else {
            4f64.powf(p - 1.0) * (r - a).powf(3.0 * p - 4.0) * (2.0 - 3.0 * p + a / r)
        }
    });
    Ok(ProblemSpec {
        id: "degenerate".into(),
        domain: DomainSpec::dirichlet(DomainKind::Pentagon),
        p: pe,
        g_d: u.clone(),
        u,
        q,
        sigma: s,
        f,
        g_n: None,
    })
}

/// p-harmonic `u = r^{(p-2)/(p-1)}` on `[1, 2]^2`.
pub fn example_smooth(p: f64) -> Result<ProblemSpec> {
    let pe = PExponent::new(p)?;
    let beta = (p - 2.0) / (p - 1.0);
    let u: ScalarField = Arc::new(move |x| radius(x).powf(beta));
    let q: VectorField = Arc::new(move |x| {
        let w = beta * radius(x).powf(-p / (p - 1.0));
        [w * x[0], w * x[1]]
    });
    let s: VectorField = Arc::new(move |x| {
        let r2 = x[0] * x[0] + x[1] * x[1];
        let w = (p - 2.0).signum() * beta.abs().powf(p - 1.0) / r2;
        [w * x[0], w * x[1]]
    });
    Ok(ProblemSpec {
        id: "smooth".into(),
        domain: DomainSpec::dirichlet(DomainKind::UnitSquareShifted),
        p: pe,
        g_d: u.clone(),
        u,
        q,
        sigma: s,
        f: Arc::new(|_| 0.0),
        g_n: None,
    })
}

/// `u = x^2` on `[1, 2]^2`, `p = 2`, Neumann on `x = 2`, Dirichlet elsewhere.
pub fn example_neumann_smoke() -> ProblemSpec {
    use BoundaryTag::{Dirichlet, Neumann};
    let domain = DomainSpec::with_tags(DomainKind::UnitSquareShifted, vec![Dirichlet, Neumann, Dirichlet, Dirichlet])
        .expect("one Dirichlet segment at least");
    let u: ScalarField = Arc::new(|x| x[0] * x[0]);
    let q: VectorField = Arc::new(|x| [2.0 * x[0], 0.0]);
    let gq = q.clone();
    ProblemSpec {
        id: "neumann-smoke".into(),
        domain,
        p: PExponent::new(2.0).expect("valid exponent"),
        g_d: u.clone(),
        u,
        sigma: q.clone(),
        q,
        f: Arc::new(|_| -2.0),
        g_n: Some(Arc::new(move |x, n| {
            let s = gq(x);
            s[0] * n[0] + s[1] * n[1]
        })),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemId {
    Linear,
    Regular,
    Degenerate,
    Smooth,
    NeumannSmoke,
}

impl ProblemId {
    pub const ALL: [ProblemId; 5] = [
        ProblemId::Linear,
        ProblemId::Regular,
        ProblemId::Degenerate,
        ProblemId::Smooth,
        ProblemId::NeumannSmoke,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::Linear => "linear",
            ProblemId::Regular => "regular",
            ProblemId::Degenerate => "degenerate",
            ProblemId::Smooth => "smooth",
            ProblemId::NeumannSmoke => "neumann-smoke",
        }
    }

    /// Exponent used when none is given.
    pub fn default_p(self) -> f64 {
        match self {
            ProblemId::Linear | ProblemId::NeumannSmoke => 2.0,
            ProblemId::Regular => 1.5,
            ProblemId::Degenerate => 4.0,
            ProblemId::Smooth => 3.0,
        }
    }

    /// Build the problem; `p` and `sigma` fall back to the defaults. The
    /// linear and Neumann problems only exist for `p = 2`.
    pub fn build(self, p: Option<f64>, sigma: Option<f64>) -> Result<ProblemSpec> {
        let p = p.unwrap_or(self.default_p());
        match self {
            ProblemId::Linear | ProblemId::NeumannSmoke => {
                if p != 2.0 {
                    return Err(Error::Config(format!("problem `{}` requires p = 2", self.name())));
                }
                Ok(if self == ProblemId::Linear {
                    example_linear()
                } else {
                    example_neumann_smoke()
                })
            }
            ProblemId::Regular => example_regular(sigma.unwrap_or(0.0), p),
            ProblemId::Degenerate => example_degenerate(p),
            ProblemId::Smooth => example_smooth(p),
        }
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown problem `{s}`")))
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Relative pointwise mismatch `|σ - A(q)| / max(1, |σ|)`.
pub fn constitutive_defect(spec: &ProblemSpec, x: [f64; 2]) -> f64 {
    let s = (spec.sigma)(x);
    let a = a_op((spec.q)(x), spec.p.p());
    (s[0] - a[0]).hypot(s[1] - a[1]) / s[0].hypot(s[1]).max(1.0)
}
