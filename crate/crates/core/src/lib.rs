//! Exact computational toolkit for the metabelian groups
//! `Gamma(S) = <a_1, ..., a_k, b | a_i b a_i^-1 = b^{n_i}, [a_i, a_j] = 1>`
//! with pairwise coprime `S = (n_1, ..., n_k)`, realized as `Z[1/N] x| Z^k`.
//!
//! - [`ring`]: arithmetic in `Z[1/N]`, valuations, norms, primitive roots.
//! - [`group`]: elements, normal forms, words, matrices for `Gamma_n`.
//! - [`tree`]: the trees `T^n`, projections and heights.
//! - [`geometry`]: the warped product model, horocycles and hyperplanes.
//! - [`explore`]: Cayley graph balls, word length, quasi-isometry fitting.
//! - [`classify`]: quasi-isometry and commensurability decisions.

pub mod classify;
pub mod error;
pub mod explore;
pub mod geometry;
pub mod group;
pub mod ring;
pub mod tree;

pub use error::{Error, Result};
pub use group::{GroupElement, GroupSpec};
pub use ring::NRational;
