//! Quasi-isometry and commensurability decisions.
//!
//! - `Gamma_n` and `Gamma_m` are quasi-isometric iff `n` and `m` have the same
//!   prime divisors; exponents play no role.
//! - `Gamma(n_1..n_k)` and `Gamma(m_1..m_l)` are quasi-isometric iff `k = l`
//!   and, after reordering, each `n_i` is a rational power of `m_i`.
//! - `BS(1, m)` and `BS(1, n)` are quasi-isometric iff commensurable iff
//!   `m = r^j` and `n = r^k` for some integer `r`.
//!
//! Two integers `>= 2` are rational powers of one another exactly when they
//! share a primitive root, which is how every test here is decided.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::ring::{factorize, primitive_root, PrimitiveRoot};

fn check(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("expected an integer >= 2, got {n}")));
    }
    Ok(())
}

/// `n_i` matched to `m_j` through a common root `r`: `n_i = r^a`, `m_j = r^b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootMatch {
    pub left: u64,
    pub right: u64,
    pub root: u64,
    pub left_exponent: u32,
    pub right_exponent: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Prime supports of `n` and `m`.
    PrimeSupports { left: Vec<u64>, right: Vec<u64> },
    /// Primitive roots of both factor lists, and the matched pairs.
    PrimitiveRoots {
        left: Vec<PrimitiveRoot>,
        right: Vec<PrimitiveRoot>,
        pairs: Vec<RootMatch>,
    },
    /// Different numbers of factors.
    RankMismatch { left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationVerdict {
    pub equivalent: bool,
    /// Index pairs `[i, j]` into the two factor lists; present iff equivalent.
    pub matching: Option<Vec<[usize; 2]>>,
    pub witness: Witness,
}

pub fn gamma_n_spec(n: u64) -> Result<Arc<GroupSpec>> {
    check(n)?;
    GroupSpec::gamma_n(n)
}

pub fn qi_gamma(n: u64, m: u64) -> Result<ClassificationVerdict> {
    check(n)?;
    check(m)?;
    let left = factorize(n)?.prime_list();
    let right = factorize(m)?.prime_list();
    let equivalent = left == right;
    let matching = equivalent.then(|| (0..left.len()).map(|i| [i, i]).collect());
    Ok(ClassificationVerdict {
        equivalent,
        matching,
        witness: Witness::PrimeSupports { left, right },
    })
}

pub fn rational_power_equivalent(a: u64, b: u64) -> Result<bool> {
    check(a)?;
    check(b)?;
    Ok(primitive_root(a)?.root == primitive_root(b)?.root)
}

pub fn commensurable_bs(m: u64, n: u64) -> Result<bool> {
    rational_power_equivalent(m, n)
}

pub fn qi_gamma_s(s1: &GroupSpec, s2: &GroupSpec) -> Result<ClassificationVerdict> {
    let (k, l) = (s1.rank(), s2.rank());
    if k != l {
        return Ok(ClassificationVerdict {
            equivalent: false,
            matching: None,
            witness: Witness::RankMismatch { left: k, right: l },
        });
    }
    let roots = |s: &GroupSpec| {
        s.factors()
            .iter()
            .map(|&n| primitive_root(n))
            .collect::<Result<Vec<_>>>()
    };
    let left = roots(s1)?;
    let right = roots(s2)?;
    let order = |r: &[PrimitiveRoot]| {
        let mut idx: Vec<usize> = (0..r.len()).collect();
        idx.sort_by_key(|&i| (r[i].root, i));
        idx
    };
    let (lo, ro) = (order(&left), order(&right));
    let equivalent = lo
        .iter()
        .zip(&ro)
        .all(|(&i, &j)| left[i].root == right[j].root);
    let (matching, pairs) = if equivalent {
        let mut m: Vec<[usize; 2]> = lo.iter().zip(&ro).map(|(&i, &j)| [i, j]).collect();
        m.sort();
        let pairs = m
            .iter()
            .map(|&[i, j]| RootMatch {
                left: s1.factors()[i],
                right: s2.factors()[j],
                root: left[i].root,
                left_exponent: left[i].exponent,
                right_exponent: right[j].exponent,
            })
            .collect();
        (Some(m), pairs)
    } else {
        (None, Vec::new())
    };
    Ok(ClassificationVerdict {
        equivalent,
        matching,
        witness: Witness::PrimitiveRoots { left, right, pairs },
    })
}
