//! The trees `T^n` on which `BS(1, n)` acts, and the projection of `Gamma(S)`
//! onto their product.
//!
//! For `n = prod p^e`, the branching line meets the grid family of `p` at the
//! phases `(1/e) Z`. One period of `T^n` is the list of distinct phases in
//! `[0, 1)`; the crossing at phase `t` branches by the product of the primes
//! whose family passes through `t`. So `T^6` branches 6-fold everywhere and
//! `T^12` alternates 6-fold and 2-fold.
//!
//! Levels are integers. The edge from level `l - 1` down to level `l` uses
//! crossing `(l - 1) mod c` (with `c` crossings per period), so period
//! boundaries sit at multiples of `c` and the phase-0 crossing is the first
//! branching below each boundary. The vertex at level `l` with residue `r` is
//! the coset `r + M_l Z_(n)`, where `M_l` is the product of the edge factors
//! from level 1 to `l` (reciprocal for negative levels). Children refine the
//! coset; the parent coarsens it. The fixed end lies at level `-inf`.
//!
//! Trees are never materialized; vertices are values.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_rational::{BigRational, Ratio};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::ring::{self, factorize, NRational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crossing {
    pub phase: Ratio<u64>,
    pub factor: u64,
}

/// One period of crossings of `T^n`; the factors multiply to `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchingSequence {
    n: u64,
    primes: Vec<u64>,
    crossings: Vec<Crossing>,
}

pub fn branching_sequence(n: u64) -> Result<Arc<BranchingSequence>> {
    let fac = factorize(n)?;
    let mut by_phase: BTreeMap<Ratio<u64>, u64> = BTreeMap::new();
    for &(p, e) in fac.primes() {
        for j in 0..e as u64 {
            *by_phase.entry(Ratio::new(j, e as u64)).or_insert(1) *= p;
        }
    }
    let crossings = by_phase
        .into_iter()
        .map(|(phase, factor)| Crossing { phase, factor })
        .collect();
    Ok(Arc::new(BranchingSequence {
        n,
        primes: fac.prime_list(),
        crossings,
    }))
}

impl BranchingSequence {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    /// Crossings per period.
    pub fn period(&self) -> i64 {
        self.crossings.len() as i64
    }

    /// Branching factor of the edge joining level `level - 1` to `level`.
    pub fn edge_factor(&self, level: i64) -> u64 {
        self.crossings[(level - 1).rem_euclid(self.period()) as usize].factor
    }

    /// Out-degree of every vertex at `level`.
    pub fn branching_at(&self, level: i64) -> u64 {
        self.edge_factor(level + 1)
    }

    /// `M_level`, the coset modulus at `level`.
    pub fn modulus(&self, level: i64) -> BigRational {
        let (q, s) = (level.div_euclid(self.period()), level.rem_euclid(self.period()));
        let partial: u64 = self.crossings[..s as usize].iter().map(|c| c.factor).product();
        ring::rational_pow(self.n, q) * BigRational::from_integer(partial.into())
    }

    /// `ln M_level`, the height of a level in natural-log units.
    pub fn level_height(&self, level: i64) -> f64 {
        let (q, s) = (level.div_euclid(self.period()), level.rem_euclid(self.period()));
        let partial: f64 = self.crossings[..s as usize]
            .iter()
            .map(|c| (c.factor as f64).ln())
            .sum();
        q as f64 * (self.n as f64).ln() + partial
    }

    fn residue(&self, x: &BigRational, level: i64) -> BigRational {
        ring::residue_mod(x, &self.modulus(level), &self.primes)
    }

    pub fn base_vertex(self: &Arc<Self>) -> TreeVertex {
        TreeVertex {
            tree: Arc::clone(self),
            level: 0,
            coset: NRational::zero(self.n),
        }
    }

    /// Vertex at `level` containing `x`. Any rational names some vertex,
    /// since primes outside `n` are units in `Z_(n)`.
    pub fn vertex(self: &Arc<Self>, level: i64, x: &BigRational) -> TreeVertex {
        let r = self.residue(x, level);
        TreeVertex {
            tree: Arc::clone(self),
            level,
            coset: NRational::from_ratio(r, self.n).expect("residues lie in Z[1/n]"),
        }
    }
}

impl fmt::Display for BranchingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .crossings
            .iter()
            .map(|c| format!("({}, {})", c.phase, c.factor))
            .collect();
        write!(f, "T^{}: [{}]", self.n, parts.join(", "))
    }
}

/// Vertex of `T^n`: a level and the canonical residue of its coset.
#[derive(Clone)]
pub struct TreeVertex {
    tree: Arc<BranchingSequence>,
    level: i64,
    coset: NRational,
}

impl PartialEq for TreeVertex {
    fn eq(&self, other: &Self) -> bool {
        self.tree.n == other.tree.n && self.level == other.level && self.coset == other.coset
    }
}

impl Eq for TreeVertex {}

impl Hash for TreeVertex {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.tree.n.hash(state);
        self.level.hash(state);
        self.coset.hash(state);
    }
}

impl fmt::Debug for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T^{}({}, {})", self.tree.n, self.level, self.coset)
    }
}

impl fmt::Display for TreeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.level, self.coset)
    }
}

impl TreeVertex {
    pub fn tree(&self) -> &Arc<BranchingSequence> {
        &self.tree
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn coset(&self) -> &NRational {
        &self.coset
    }

    pub fn modulus(&self) -> BigRational {
        self.tree.modulus(self.level)
    }

    pub fn children(&self) -> Vec<TreeVertex> {
        let step = self.modulus();
        let factor = self.tree.branching_at(self.level);
        (0..factor)
            .map(|j| {
                let r = self.coset.as_ratio() + &step * BigRational::from_integer(j.into());
                TreeVertex {
                    tree: Arc::clone(&self.tree),
                    level: self.level + 1,
                    coset: NRational::from_ratio(r, self.tree.n).expect("residues lie in Z[1/n]"),
                }
            })
            .collect()
    }

    pub fn parent(&self) -> TreeVertex {
        self.ancestor(self.level - 1)
    }

    /// The ancestor at `level`; `self` when `level >= self.level()`.
    pub fn ancestor(&self, level: i64) -> TreeVertex {
        if level >= self.level {
            return self.clone();
        }
        self.tree.vertex(level, self.coset.as_ratio())
    }

    pub fn is_ancestor_of(&self, other: &TreeVertex) -> bool {
        self.tree.n == other.tree.n
            && self.level <= other.level
            && other.ancestor(self.level) == *self
    }

    pub fn height(&self) -> f64 {
        self.tree.level_height(self.level)
    }

    fn same_tree(&self, other: &TreeVertex) -> Result<()> {
        if self.tree.n == other.tree.n {
            Ok(())
        } else {
            Err(Error::TreeMismatch(self.tree.n, other.tree.n))
        }
    }
}

pub fn height_of_vertex(v: &TreeVertex) -> f64 {
    v.height()
}

/// Deepest common ancestor of two vertices.
pub fn meet(u: &TreeVertex, w: &TreeVertex) -> Result<TreeVertex> {
    u.same_tree(w)?;
    let mut level = u.level.min(w.level);
    loop {
        let a = u.ancestor(level);
        if a == w.ancestor(level) {
            return Ok(a);
        }
        level -= 1;
    }
}

/// Edge count of the geodesic between `u` and `w`.
pub fn tree_distance(u: &TreeVertex, w: &TreeVertex) -> Result<u64> {
    let m = meet(u, w)?;
    Ok((u.level - m.level + w.level - m.level) as u64)
}

/// Geodesic length with every edge weighted by the log of its branching factor.
pub fn weighted_tree_distance(u: &TreeVertex, w: &TreeVertex) -> Result<f64> {
    let m = meet(u, w)?;
    Ok(u.height() + w.height() - 2.0 * m.height())
}

/// Per-tree heights `h_i = v_i ln n_i` and their sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightValue {
    pub per_tree: Vec<f64>,
    pub total: f64,
}

pub fn height(g: &GroupElement) -> HeightValue {
    let per_tree: Vec<f64> = g
        .spec()
        .factors()
        .iter()
        .zip(g.v())
        .map(|(&n, &e)| e as f64 * (n as f64).ln())
        .collect();
    let total = per_tree.iter().sum();
    HeightValue { per_tree, total }
}

/// The trees `T^{n_1}, ..., T^{n_k}` of a group, with the projection of
/// group elements and the induced action on vertices.
#[derive(Debug, Clone)]
pub struct TreeProduct {
    spec: Arc<GroupSpec>,
    trees: Vec<Arc<BranchingSequence>>,
}

impl TreeProduct {
    pub fn new(spec: &Arc<GroupSpec>) -> Result<Self> {
        let trees = spec
            .factors()
            .iter()
            .map(|&n| branching_sequence(n))
            .collect::<Result<Vec<_>>>()?;
        Ok(TreeProduct {
            spec: Arc::clone(spec),
            trees,
        })
    }

    pub fn spec(&self) -> &Arc<GroupSpec> {
        &self.spec
    }

    pub fn trees(&self) -> &[Arc<BranchingSequence>] {
        &self.trees
    }

    pub fn tree(&self, i: usize) -> Result<&Arc<BranchingSequence>> {
        self.trees.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.trees.len(),
        })
    }

    /// Vertex `(v_i c_i, q + n_i^{v_i} Z_(n_i))` of `T^{n_i}`.
    pub fn project(&self, g: &GroupElement, i: usize) -> Result<TreeVertex> {
        let tree = self.tree(i)?;
        Ok(tree.vertex(g.v()[i] * tree.period(), g.q().as_ratio()))
    }

    pub fn project_all(&self, g: &GroupElement) -> Vec<TreeVertex> {
        (0..self.trees.len())
            .map(|i| self.project(g, i).expect("index in range"))
            .collect()
    }

    /// `g` maps the coset `r + M_l Z` to `q + lambda r + M_{l + c v_i} Z`.
    pub fn act(&self, g: &GroupElement, i: usize, vertex: &TreeVertex) -> Result<TreeVertex> {
        let tree = self.tree(i)?;
        vertex.same_tree(&tree.base_vertex())?;
        let level = vertex.level + g.v()[i] * tree.period();
        let image = g.act(vertex.coset.as_ratio());
        Ok(tree.vertex(level, &image))
    }
}

/// Projection of `g` onto `T^{n_i}`.
pub fn project(g: &GroupElement, i: usize) -> Result<TreeVertex> {
    let n = g.spec().factor(i)?;
    let tree = branching_sequence(n)?;
    Ok(tree.vertex(g.v()[i] * tree.period(), g.q().as_ratio()))
}

/// Graphviz rendering of the subtree of depth `depth` below `root`.
/// Children appear in ascending residue order.
pub fn subtree_dot(root: &TreeVertex, depth: u32) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph T{} {{", root.tree.n);
    let _ = writeln!(out, "  node [shape=circle, fontsize=10];");
    let id = |v: &TreeVertex| format!("\"{}:{}\"", v.level, v.coset);
    let mut frontier = vec![root.clone()];
    let _ = writeln!(out, "  {} [label=\"{}\"];", id(root), root);
    for _ in 0..depth {
        let mut next = Vec::new();
        for v in &frontier {
            for c in v.children() {
                let _ = writeln!(out, "  {} [label=\"{}\"];", id(&c), c);
                let _ = writeln!(out, "  {} -> {};", id(v), id(&c));
                next.push(c);
            }
        }
        frontier = next;
    }
    out.push_str("}\n");
    out
}

/// Vertices of the subtree below `root`, level by level.
pub fn subtree_levels(root: &TreeVertex, depth: u32) -> Vec<Vec<TreeVertex>> {
    let mut levels = vec![vec![root.clone()]];
    for _ in 0..depth {
        let next: Vec<TreeVertex> = levels
            .last()
            .expect("nonempty")
            .iter()
            .flat_map(TreeVertex::children)
            .collect();
        levels.push(next);
    }
    levels
}
