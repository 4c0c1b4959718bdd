//! Exact integral homology of Oeljeklaus–Toma threefolds `X_{m,n}` attached to `Q(2^{1/4})`.
//!
//! The pipeline builds Koszul resolutions over `Z[Z^4]` and `Z[Z^2]`, twists them into
//! a free resolution over `Z[Z^4 ⋊ Z^2]`, augments, and reads off homology from Smith
//! normal forms. A separate abelianization path computes `H_1` directly and drives the
//! `β(m, n)` machinery for odd `m`.

pub mod arith;
pub mod cli;
pub mod group_ring;
pub mod h1;
pub mod linalg;
pub mod ot;
pub mod resolution;
pub mod verify;
pub mod wall;

pub use linalg::{AbelianGroup, IntChainComplex, IntMatrix, SmithForm};
