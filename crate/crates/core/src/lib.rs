//! Counting and enumerating polynomial maps with prescribed fixed-point
//! multiplicities and holomorphic fixed-point indices.
//!
//! Given a multiplicity profile `(d_1, ..., d_l)` and indices `(m_1, ..., m_l)`
//! summing to zero, the affine conjugacy classes of polynomials
//! `f(z) = z + rho * prod (z - zeta_i)^{d_i}` with `iota(f, zeta_i) = m_i`
//! correspond to the nondegenerate zeros of a homogeneous system in
//! `zeta_1, ..., zeta_{l-1}` (with `zeta_l = 0`). This crate assembles that
//! system, solves it numerically, lifts the solutions to monic centered
//! polynomials and re-checks every output with an independent residue
//! computation.

pub mod error;
pub mod fiber;
pub mod index;
pub mod matrices;
pub mod poly;
pub mod problem;
pub mod psi;
pub mod report;
pub mod scalar;
pub mod selftest;
pub mod series;
pub mod solver;
pub mod sweep;

pub use error::{Error, Result};
