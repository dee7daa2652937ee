//! Compiles the guide's snippets as doctests; mdbook cannot link `pldg`.

#[doc = include_str!("../../../book/src/index.md")]
pub mod overview {}
#[doc = include_str!("../../../book/src/meshes.md")]
pub mod meshes {}
#[doc = include_str!("../../../book/src/basis.md")]
pub mod basis {}
#[doc = include_str!("../../../book/src/weak-gradient.md")]
pub mod weak_gradient {}
#[doc = include_str!("../../../book/src/energy.md")]
pub mod energy {}
#[doc = include_str!("../../../book/src/descent.md")]
pub mod descent {}
#[doc = include_str!("../../../book/src/studies.md")]
pub mod studies {}
#[doc = include_str!("../../../book/src/checks.md")]
pub mod checks {}
