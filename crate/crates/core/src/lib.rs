//! High-order LDG discretization of the p-Laplace equation on triangles,
//! solved by steepest descent in a metric that freezes the `|.|^(p-2)`
//! weights at the current iterate.
//!
//! The pipeline is [`mesh`] -> [`space`] -> [`ldg`] -> [`energy`] ->
//! [`descent`], and [`study`] runs it over refinement levels and degrees and
//! writes the tables in [`report`]. [`checks`] holds the seeded property and
//! oracle suites; [`oracle`] holds the independent dense formulas they compare
//! against.
//!
//! ```
//! use pldg::problems::example_neumann_smoke;
//! use pldg::study::{mesh_chain, solve_level};
//! use pldg::descent::SolverConfig;
//!
//! let spec = example_neumann_smoke();
//! let mesh = mesh_chain(&spec, 1).unwrap().remove(0);
//! let run = solve_level(&spec, mesh, 0, 2, 10.0, &SolverConfig::default()).unwrap();
//! assert!(run.result.errors.u < 1e-8);
//! ```

pub mod bernstein;
pub mod checks;
pub mod descent;
pub mod energy;
pub mod error;
pub mod ldg;
pub mod linsolve;
pub mod mesh;
pub mod oracle;
pub mod problems;
pub mod quadrature;
pub mod report;
pub mod space;
pub mod study;

pub use error::{Error, Result};
