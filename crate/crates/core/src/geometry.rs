//! The warped product model `X(S) = R x T^{n_1} x ... x T^{n_k}`.
//!
//! A point is a real coordinate `x` together with one tree vertex per factor.
//! Tree edges have length `ln(branching factor)`; a horizontal move by `dx`
//! at total height `H = sum h_i` has length `e^{-H} |dx|`. Lengths of tree
//! moves add up in `l^1` across factors.
//!
//! The group element `(q, v)` sits at `x = q` over its projected vertices, so
//! the action `x -> lambda x + q` together with the tree action is isometric.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::ring::NRational;
use crate::tree::{meet, weighted_tree_distance, BranchingSequence, TreeProduct, TreeVertex};

/// Points closer than this in every coordinate are treated as equal.
pub const POINT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelPoint {
    pub x: f64,
    pub vertices: Vec<TreeVertex>,
}

impl ModelPoint {
    pub fn new(x: f64, vertices: Vec<TreeVertex>) -> Self {
        ModelPoint { x, vertices }
    }

    pub fn of_element(trees: &TreeProduct, g: &GroupElement) -> Self {
        ModelPoint {
            x: g.q().to_f64(),
            vertices: trees.project_all(g),
        }
    }

    /// `H = sum_i h_i`.
    pub fn total_height(&self) -> f64 {
        self.vertices.iter().map(TreeVertex::height).sum()
    }

    pub fn shifted(&self, dx: f64) -> Self {
        ModelPoint {
            x: self.x + dx,
            vertices: self.vertices.clone(),
        }
    }

    fn compatible(&self, other: &ModelPoint) -> Result<()> {
        let same = self.vertices.len() == other.vertices.len()
            && self
                .vertices
                .iter()
                .zip(&other.vertices)
                .all(|(a, b)| a.tree().n() == b.tree().n());
        if same {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    pub fn approx_eq(&self, other: &ModelPoint) -> bool {
        self.vertices == other.vertices && (self.x - other.x).abs() <= POINT_TOLERANCE
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeMove {
    Parent,
    Child(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Tree { factor: usize, step: TreeMove },
    Horizontal { dx: f64 },
}

/// A discrete path: a start point and a chain of moves.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedPath {
    pub start: ModelPoint,
    pub segments: Vec<Segment>,
}

impl WarpedPath {
    pub fn new(start: ModelPoint) -> Self {
        WarpedPath {
            start,
            segments: Vec::new(),
        }
    }

    pub fn push(mut self, segment: Segment) -> Self {
        self.segments.push(segment);
        self
    }

    /// `count` steps toward the children (always child 0).
    pub fn ascend(mut self, factor: usize, count: usize) -> Self {
        for _ in 0..count {
            self.segments.push(Segment::Tree {
                factor,
                step: TreeMove::Child(0),
            });
        }
        self
    }

    pub fn descend(mut self, factor: usize, count: usize) -> Self {
        for _ in 0..count {
            self.segments.push(Segment::Tree {
                factor,
                step: TreeMove::Parent,
            });
        }
        self
    }

    pub fn across(self, dx: f64) -> Self {
        self.push(Segment::Horizontal { dx })
    }

    /// Walks the chain, returning `(end point, length)`.
    fn walk(&self) -> Result<(ModelPoint, f64)> {
        let mut at = self.start.clone();
        let mut length = 0.0;
        for (idx, seg) in self.segments.iter().enumerate() {
            match *seg {
                Segment::Horizontal { dx } => {
                    if !dx.is_finite() {
                        return Err(Error::MalformedPath(format!("segment {idx}: non-finite dx")));
                    }
                    length += (-at.total_height()).exp() * dx.abs();
                    at.x += dx;
                }
                Segment::Tree { factor, step } => {
                    let v = at.vertices.get(factor).ok_or_else(|| {
                        Error::MalformedPath(format!("segment {idx}: no tree factor {factor}"))
                    })?;
                    let next = match step {
                        TreeMove::Parent => v.parent(),
                        TreeMove::Child(j) => v.children().into_iter().nth(j).ok_or_else(|| {
                            Error::MalformedPath(format!("segment {idx}: vertex has no child {j}"))
                        })?,
                    };
                    let edge_level = v.level().max(next.level());
                    length += (v.tree().edge_factor(edge_level) as f64).ln();
                    at.vertices[factor] = next;
                }
            }
        }
        Ok((at, length))
    }

    pub fn end_point(&self) -> Result<ModelPoint> {
        Ok(self.walk()?.0)
    }

    pub fn length(&self) -> Result<f64> {
        Ok(self.walk()?.1)
    }

    /// Joins two paths; `other` must start where `self` ends.
    pub fn concat(&self, other: &WarpedPath) -> Result<WarpedPath> {
        let end = self.end_point()?;
        if !end.approx_eq(&other.start) {
            return Err(Error::MalformedPath(
                "second path does not start at the end of the first".into(),
            ));
        }
        let mut segments = self.segments.clone();
        segments.extend_from_slice(&other.segments);
        Ok(WarpedPath {
            start: self.start.clone(),
            segments,
        })
    }
}

pub fn path_length(p: &WarpedPath) -> Result<f64> {
    p.length()
}

/// Search slack, in levels, above the first level where horizontal travel
/// becomes cheaper than one unit.
pub const LEVEL_SLACK: i64 = 2;

/// Length of the best "up, over, down" path between two points.
///
/// In each tree the route follows the geodesic between the two vertices and
/// may detour upward from its higher endpoint to a meeting level `L_i`; the
/// horizontal move happens there. The meeting levels range from the higher
/// endpoint up to `ceil(log_{n_i}(1 + D)) * c_i + LEVEL_SLACK` further levels,
/// where `D` is the horizontal offset measured at the endpoints' height.
/// The result is the length of an actual path, hence an upper bound for the
/// warped distance; it is symmetric and invariant under the group action.
pub fn coarse_distance(p: &ModelPoint, q: &ModelPoint) -> Result<f64> {
    p.compatible(q)?;
    let mut tree_part = 0.0;
    let mut tops: Vec<(Arc<BranchingSequence>, i64)> = Vec::with_capacity(p.vertices.len());
    for (u, w) in p.vertices.iter().zip(&q.vertices) {
        tree_part += weighted_tree_distance(u, w)?;
        tops.push((Arc::clone(u.tree()), u.level().max(w.level())));
    }
    let top_height: f64 = tops.iter().map(|(t, l)| t.level_height(*l)).sum();
    let offset = (p.x - q.x).abs() * (-top_height).exp();
    if offset == 0.0 {
        return Ok(tree_part);
    }

    // extra height gained at each candidate level, per tree
    let windows: Vec<Vec<f64>> = tops
        .iter()
        .map(|(t, top)| {
            let periods = ((1.0 + offset).ln() / (t.n() as f64).ln()).ceil() as i64;
            let reach = periods * t.period() + LEVEL_SLACK;
            let base = t.level_height(*top);
            (0..=reach).map(|j| t.level_height(top + j) - base).collect()
        })
        .collect();

    let mut best = f64::INFINITY;
    let mut idx = vec![0usize; windows.len()];
    loop {
        let gain: f64 = windows.iter().zip(&idx).map(|(w, &j)| w[j]).sum();
        let cost = 2.0 * gain + offset * (-gain).exp();
        best = best.min(cost);
        // odometer over the product of windows
        let mut k = 0;
        while k < idx.len() {
            idx[k] += 1;
            if idx[k] < windows[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == idx.len() {
            break;
        }
    }
    Ok(tree_part + best)
}

/// The horocycle through a point: its tree coordinates.
pub fn horocycle_of(p: &ModelPoint) -> Vec<TreeVertex> {
    p.vertices.clone()
}

pub fn same_horocycle(p: &ModelPoint, q: &ModelPoint) -> bool {
    p.vertices == q.vertices
}

/// A bi-infinite geodesic in `T^n`, described by its ends. Every element
/// `xi` of `Z[1/n]` names the ascending ray `{(l, xi mod M_l)}`.
#[derive(Debug, Clone)]
pub enum GeodesicLine {
    /// Joins the fixed end at level `-inf` to the end `xi`.
    Vertical {
        tree: Arc<BranchingSequence>,
        end: NRational,
    },
    /// Joins two ascending ends through their deepest common vertex.
    Arc {
        tree: Arc<BranchingSequence>,
        ends: [NRational; 2],
        apex: TreeVertex,
    },
}

impl GeodesicLine {
    pub fn vertical(tree: &Arc<BranchingSequence>, end: NRational) -> Result<Self> {
        let end = end.with_context(tree.n())?;
        Ok(GeodesicLine::Vertical {
            tree: Arc::clone(tree),
            end,
        })
    }

    pub fn between(tree: &Arc<BranchingSequence>, a: NRational, b: NRational) -> Result<Self> {
        let a = a.with_context(tree.n())?;
        let b = b.with_context(tree.n())?;
        if a == b {
            return Err(Error::InvalidParameter("a geodesic needs two distinct ends".into()));
        }
        // the ends separate at some level: residues of distinct Z[1/n] points
        // differ once the modulus is below their n-adic distance
        let mut level = 0i64;
        while tree.vertex(level, a.as_ratio()) != tree.vertex(level, b.as_ratio()) {
            level -= 1;
        }
        while tree.vertex(level + 1, a.as_ratio()) == tree.vertex(level + 1, b.as_ratio()) {
            level += 1;
        }
        let apex = tree.vertex(level, a.as_ratio());
        Ok(GeodesicLine::Arc {
            tree: Arc::clone(tree),
            ends: [a, b],
            apex,
        })
    }

    pub fn tree(&self) -> &Arc<BranchingSequence> {
        match self {
            GeodesicLine::Vertical { tree, .. } | GeodesicLine::Arc { tree, .. } => tree,
        }
    }

    pub fn contains(&self, v: &TreeVertex) -> bool {
        if v.tree().n() != self.tree().n() {
            return false;
        }
        match self {
            GeodesicLine::Vertical { tree, end } => tree.vertex(v.level(), end.as_ratio()) == *v,
            GeodesicLine::Arc { tree, ends, apex } => {
                v.level() >= apex.level()
                    && ends
                        .iter()
                        .any(|e| tree.vertex(v.level(), e.as_ratio()) == *v)
            }
        }
    }

    /// Vertices of the line with level in `lo..=hi`, ordered along the line.
    pub fn vertices(&self, lo: i64, hi: i64) -> Vec<TreeVertex> {
        match self {
            GeodesicLine::Vertical { tree, end } => {
                (lo..=hi).map(|l| tree.vertex(l, end.as_ratio())).collect()
            }
            GeodesicLine::Arc { tree, ends, apex } => {
                let start = lo.max(apex.level());
                let mut out: Vec<TreeVertex> = (start + 1..=hi)
                    .rev()
                    .map(|l| tree.vertex(l, ends[0].as_ratio()))
                    .collect();
                if start <= hi {
                    out.push(tree.vertex(start, ends[0].as_ratio()));
                }
                if start == apex.level() {
                    out.extend((start + 1..=hi).map(|l| tree.vertex(l, ends[1].as_ratio())));
                }
                out
            }
        }
    }
}

/// Preimage of a product of tree geodesics.
#[derive(Debug, Clone)]
pub struct Hyperplane {
    pub lines: Vec<GeodesicLine>,
}

impl Hyperplane {
    pub fn new(lines: Vec<GeodesicLine>) -> Self {
        Hyperplane { lines }
    }

    pub fn contains(&self, p: &ModelPoint) -> Result<bool> {
        hyperplane_contains(self, p)
    }
}

pub fn hyperplane_contains(h: &Hyperplane, p: &ModelPoint) -> Result<bool> {
    if h.lines.len() != p.vertices.len()
        || h
            .lines
            .iter()
            .zip(&p.vertices)
            .any(|(l, v)| l.tree().n() != v.tree().n())
    {
        return Err(Error::SpecMismatch);
    }
    Ok(h.lines.iter().zip(&p.vertices).all(|(l, v)| l.contains(v)))
}

/// Upper-half-plane distance between `(x, e^h)` and `(x', e^h')`.
pub fn hyperbolic_distance(x: f64, h: f64, x2: f64, h2: f64) -> f64 {
    let (y, y2) = (h.exp(), h2.exp());
    let arg = 1.0 + ((x - x2).powi(2) + (y - y2).powi(2)) / (2.0 * y * y2);
    arg.acosh()
}

/// One row of the distance comparison report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceRecord {
    pub pair: [usize; 2],
    pub word_distance: u32,
    pub model_distance: f64,
}

/// Tree meeting level of two points, per factor. Exposed for diagnostics.
pub fn meeting_levels(p: &ModelPoint, q: &ModelPoint) -> Result<Vec<i64>> {
    p.compatible(q)?;
    p.vertices
        .iter()
        .zip(&q.vertices)
        .map(|(u, w)| Ok(meet(u, w)?.level()))
        .collect()
}
