//! Exact computation of the local invariants of a rank-2 bundle on the
//! blown-up plane: the lengths of the cokernel `Q` of `π_*Ṽ → (π_*Ṽ)^∨∨`
//! and of `R¹π_*Ṽ`, whose sum is the second Chern class gap.

pub mod algebra;
pub mod cech;
pub mod invariants;
pub mod laurent;
pub mod linalg;
pub mod sections;
