//! Exact symbolic calculator for equivariant Chern classes of Real bundles
//! over conjugation spaces.
//!
//! The building blocks are truncated graded polynomial rings over the
//! integers and over F2 (`algebra`), Steenrod square actions with a
//! splitting-principle cross-check (`steenrod`, `splitting`), space models
//! carrying the degree-halving frame (kappa, sigma) of a conjugation space
//! (`conjugation`), the bigraded twisted-coefficient Borel cohomology with
//! its Z[a]/(2a) coordinates (`equivariant`), Real bundle models with their
//! equivariant Chern classes (`chern`), and closed-manifold models with Wu
//! classes and characteristic numbers (`manifolds`).  A small definition-file
//! format (`deffile`) and a command-line front end (`cli`) sit on top.

pub mod algebra;
pub mod chern;
#[cfg(test)]
pub(crate) mod fixtures;
pub mod cli;
pub mod conjugation;
pub mod deffile;
pub mod equivariant;
pub mod manifolds;
pub mod report;
pub mod splitting;
pub mod steenrod;
pub mod workspace;
