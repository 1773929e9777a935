//! Brute-force Cayley graph exploration over the generators
//! `a_1^{+-1}, ..., a_k^{+-1}, b^{+-1}`.
//!
//! Balls are exact: visited elements are keyed by their canonical `(q, v)`.
//! Each BFS level is expanded in parallel and merged in frontier order, so
//! the element order, parent pointers and counts are all deterministic.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{coarse_distance, DistanceRecord, ModelPoint};
use crate::group::{parse_word, ElementRepr, Generator, GroupElement, GroupSpec, Letter};
use crate::tree::TreeProduct;

/// Default bound on the number of stored elements.
pub const DEFAULT_ELEMENT_CAP: usize = 4_000_000;

/// Largest BFS radius accepted for a group of the given rank.
pub fn radius_cap(rank: usize) -> u32 {
    match rank {
        1 => 20,
        2 => 12,
        _ => 8,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_radius: u32,
    pub max_elements: usize,
}

impl Limits {
    pub fn for_spec(spec: &GroupSpec) -> Self {
        Limits {
            max_radius: radius_cap(spec.rank()),
            max_elements: DEFAULT_ELEMENT_CAP,
        }
    }

    pub fn with_max_elements(mut self, max_elements: usize) -> Self {
        self.max_elements = max_elements;
        self
    }
}

/// The symmetric generating set in BFS order.
pub fn generating_set(spec: &Arc<GroupSpec>) -> Vec<(Letter, GroupElement)> {
    spec.generators()
        .into_iter()
        .flat_map(|g| [Letter::new(g, 1), Letter::new(g, -1)])
        .map(|l| {
            let x = GroupElement::generator(spec, l.generator)
                .expect("generator in range")
                .pow(l.power);
            (l, x)
        })
        .collect()
}

fn describe_generators(spec: &GroupSpec) -> String {
    let names: Vec<String> = spec.generators().iter().map(Generator::to_string).collect();
    format!("{{{}}}^+-1", names.join(", "))
}

/// Sphere and ball sizes up to a radius.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallTable {
    pub radius: u32,
    pub spheres: Vec<usize>,
    pub balls: Vec<usize>,
    pub generators: String,
}

impl BallTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("radius,sphere,ball\n");
        for (r, (s, b)) in self.spheres.iter().zip(&self.balls).enumerate() {
            let _ = writeln!(out, "{r},{s},{b}");
        }
        out
    }
}

/// Every element within a radius, with its word length and a BFS parent.
#[derive(Debug, Clone)]
pub struct Ball {
    spec: Arc<GroupSpec>,
    radius: u32,
    elements: Vec<GroupElement>,
    lengths: Vec<u32>,
    parents: Vec<Option<(usize, Letter)>>,
    index: HashMap<GroupElement, usize>,
}

impl Ball {
    fn seed(spec: &Arc<GroupSpec>) -> Self {
        let e = GroupElement::identity(spec);
        let mut index = HashMap::new();
        index.insert(e.clone(), 0);
        Ball {
            spec: Arc::clone(spec),
            radius: 0,
            elements: vec![e],
            lengths: vec![0],
            parents: vec![None],
            index,
        }
    }

    /// Adds the next sphere.
    fn grow(&mut self, gens: &[(Letter, GroupElement)], limits: &Limits) -> Result<()> {
        let r = self.radius;
        let start = self.lengths.partition_point(|&l| l < r);
        let frontier: Vec<usize> = (start..self.elements.len()).collect();
        let candidates: Vec<Vec<(GroupElement, usize, Letter)>> = frontier
            .par_iter()
            .map(|&i| {
                let g = &self.elements[i];
                gens.iter()
                    .map(|(l, x)| (g * x, i, *l))
                    .filter(|(h, _, _)| !self.index.contains_key(h))
                    .collect()
            })
            .collect();
        for (h, parent, letter) in candidates.into_iter().flatten() {
            if self.index.contains_key(&h) {
                continue;
            }
            if self.elements.len() >= limits.max_elements {
                return Err(Error::CapExceeded(format!(
                    "ball of radius {} in {} has more than {} elements",
                    r + 1,
                    self.spec,
                    limits.max_elements
                )));
            }
            self.index.insert(h.clone(), self.elements.len());
            self.elements.push(h);
            self.lengths.push(r + 1);
            self.parents.push(Some((parent, letter)));
        }
        self.radius = r + 1;
        Ok(())
    }

    pub fn spec(&self) -> &Arc<GroupSpec> {
        &self.spec
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements in BFS order (nondecreasing word length).
    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    pub fn sphere(&self, r: u32) -> &[GroupElement] {
        let lo = self.lengths.partition_point(|&l| l < r);
        let hi = self.lengths.partition_point(|&l| l <= r);
        &self.elements[lo..hi]
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index.contains_key(g)
    }

    pub fn length_of(&self, g: &GroupElement) -> Option<u32> {
        self.index.get(g).map(|&i| self.lengths[i])
    }

    /// A geodesic word for the element at `idx`.
    pub fn witness(&self, mut idx: usize) -> Vec<Letter> {
        let mut word = Vec::new();
        while let Some((parent, letter)) = self.parents[idx] {
            word.push(letter);
            idx = parent;
        }
        word.reverse();
        word
    }

    pub fn table(&self) -> BallTable {
        let mut spheres = vec![0usize; self.radius as usize + 1];
        for &l in &self.lengths {
            spheres[l as usize] += 1;
        }
        let balls = spheres
            .iter()
            .scan(0usize, |acc, &s| {
                *acc += s;
                Some(*acc)
            })
            .collect();
        BallTable {
            radius: self.radius,
            spheres,
            balls,
            generators: describe_generators(&self.spec),
        }
    }
}

fn check_radius(spec: &GroupSpec, r: u32, limits: &Limits) -> Result<()> {
    if r > limits.max_radius {
        return Err(Error::CapExceeded(format!(
            "radius {r} exceeds the cap {} for {spec}",
            limits.max_radius
        )));
    }
    Ok(())
}

pub fn bfs_ball(spec: &Arc<GroupSpec>, r: u32) -> Result<Ball> {
    bfs_ball_with(spec, r, &Limits::for_spec(spec))
}

pub fn bfs_ball_with(spec: &Arc<GroupSpec>, r: u32, limits: &Limits) -> Result<Ball> {
    check_radius(spec, r, limits)?;
    let gens = generating_set(spec);
    let mut ball = Ball::seed(spec);
    for _ in 0..r {
        ball.grow(&gens, limits)?;
    }
    Ok(ball)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordLengthRecord {
    pub element: GroupElement,
    pub length: u32,
    pub witness: Vec<Letter>,
}

/// Minimal word length of `g` if it is at most `cap`.
pub fn word_length(g: &GroupElement, cap: u32) -> Result<Option<WordLengthRecord>> {
    let spec = g.spec();
    let limits = Limits::for_spec(spec);
    check_radius(spec, cap, &limits)?;
    let gens = generating_set(spec);
    let mut ball = Ball::seed(spec);
    loop {
        if let Some(&idx) = ball.index.get(g) {
            return Ok(Some(WordLengthRecord {
                element: g.clone(),
                length: ball.lengths[idx],
                witness: ball.witness(idx),
            }));
        }
        if ball.radius == cap {
            return Ok(None);
        }
        ball.grow(&gens, &limits)?;
    }
}

/// Default additive slack allowed when fitting the multiplicative constant.
pub const DEFAULT_ADDITIVE_BUDGET: f64 = 1.0;

/// Constants `(K, C)` with `d_w / K - C <= d_X <= K d_w + C` on every sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QiFit {
    pub k: f64,
    pub c: f64,
    pub additive_budget: f64,
}

impl QiFit {
    /// Smallest `K >= 1` for which an additive constant `<= budget` works,
    /// then the smallest such constant. Samples are `(word, model)` distances.
    pub fn fit(samples: &[(u32, f64)], budget: f64) -> Self {
        let mut k = 1.0f64;
        for &(dw, dx) in samples {
            if dw == 0 {
                continue;
            }
            let dw = dw as f64;
            if dx + budget > 0.0 {
                k = k.max(dw / (dx + budget));
            }
            k = k.max((dx - budget) / dw);
        }
        QiFit {
            k,
            c: additive_constant(samples, k),
            additive_budget: budget,
        }
    }

    pub fn holds_for(&self, dw: u32, dx: f64) -> bool {
        let dw = dw as f64;
        let eps = 1e-9 * (1.0 + dw + dx);
        dw / self.k - self.c <= dx + eps && dx <= self.k * dw + self.c + eps
    }
}

/// Least `C >= 0` making both inequalities hold at multiplicative constant `k`.
pub fn additive_constant(samples: &[(u32, f64)], k: f64) -> f64 {
    samples
        .iter()
        .map(|&(dw, dx)| {
            let dw = dw as f64;
            (dw / k - dx).max(dx - k * dw)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QiReport {
    pub spec: Vec<u64>,
    pub radius: u32,
    pub ball_size: usize,
    pub pair_count: usize,
    pub fit: QiFit,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub pairs: Vec<DistanceRecord>,
}

impl QiReport {
    pub fn samples(&self) -> Vec<(u32, f64)> {
        self.pairs
            .iter()
            .map(|p| (p.word_distance, p.model_distance))
            .collect()
    }
}

pub fn qi_compare(spec: &Arc<GroupSpec>, r: u32) -> Result<QiReport> {
    qi_compare_with(spec, r, DEFAULT_ADDITIVE_BUDGET, &Limits::for_spec(spec))
}

/// Compares word distance with [`coarse_distance`] on every pair of `B(r)`.
/// Word distances come from the ball of radius `2r`.
pub fn qi_compare_with(
    spec: &Arc<GroupSpec>,
    r: u32,
    budget: f64,
    limits: &Limits,
) -> Result<QiReport> {
    check_radius(spec, 2 * r, limits).map_err(|_| {
        Error::CapExceeded(format!(
            "quasi-isometry fit at radius {r} needs a ball of radius {} but the cap is {}",
            2 * r,
            limits.max_radius
        ))
    })?;
    let big = bfs_ball_with(spec, 2 * r, limits)?;
    let n = big.lengths.partition_point(|&l| l <= r);
    let trees = TreeProduct::new(spec)?;
    let points: Vec<ModelPoint> = big.elements[..n]
        .par_iter()
        .map(|g| ModelPoint::of_element(&trees, g))
        .collect();
    let inverses: Vec<GroupElement> = big.elements[..n].iter().map(GroupElement::inverse).collect();

    let pairs: Vec<DistanceRecord> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| {
                    let h = &inverses[i] * &big.elements[j];
                    let word_distance = big.length_of(&h).expect("g^-1 h lies in B(2r)");
                    let model_distance =
                        coarse_distance(&points[i], &points[j]).expect("points of one group");
                    DistanceRecord {
                        pair: [i, j],
                        word_distance,
                        model_distance,
                    }
                })
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();
    let samples: Vec<(u32, f64)> = pairs
        .iter()
        .map(|p| (p.word_distance, p.model_distance))
        .collect();
    Ok(QiReport {
        spec: spec.factors().to_vec(),
        radius: r,
        ball_size: n,
        pair_count: pairs.len(),
        fit: QiFit::fit(&samples, budget),
        pairs,
    })
}

/// Version tag of the on-disk ball cache.
pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CachedElement {
    #[serde(flatten)]
    element: ElementRepr,
    length: u32,
    parent: Option<usize>,
    letter: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BallCache {
    format_version: u32,
    spec: Vec<u64>,
    radius: u32,
    elements: Vec<CachedElement>,
}

pub fn save_ball(ball: &Ball, path: &Path) -> Result<()> {
    let elements = (0..ball.len())
        .map(|i| CachedElement {
            element: ball.elements[i].to_repr(),
            length: ball.lengths[i],
            parent: ball.parents[i].map(|(p, _)| p),
            letter: ball.parents[i].map(|(_, l)| l.to_string()),
        })
        .collect();
    let cache = BallCache {
        format_version: CACHE_FORMAT_VERSION,
        spec: ball.spec.factors().to_vec(),
        radius: ball.radius,
        elements,
    };
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer(file, &cache)?;
    Ok(())
}

/// Loads a cached ball; `Ok(None)` when the file is for another group,
/// radius or format version.
pub fn load_ball(spec: &Arc<GroupSpec>, r: u32, path: &Path) -> Result<Option<Ball>> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let cache: BallCache = serde_json::from_reader(file)?;
    if cache.format_version != CACHE_FORMAT_VERSION || cache.spec != spec.factors() || cache.radius != r
    {
        return Ok(None);
    }
    let mut ball = Ball::seed(spec);
    ball.elements.clear();
    ball.lengths.clear();
    ball.parents.clear();
    ball.index.clear();
    ball.radius = r;
    for (i, c) in cache.elements.into_iter().enumerate() {
        let g = GroupElement::from_repr(spec, &c.element)?;
        let parent = match (c.parent, c.letter) {
            (Some(p), Some(l)) => {
                let letter = *parse_word(spec, &l)?.first().ok_or_else(|| Error::Parse {
                    input: l.clone(),
                    reason: "empty letter".into(),
                })?;
                Some((p, letter))
            }
            _ => None,
        };
        ball.index.insert(g.clone(), i);
        ball.elements.push(g);
        ball.lengths.push(c.length);
        ball.parents.push(parent);
    }
    Ok(Some(ball))
}

/// Ball of radius `r`, read from `path` when it holds a matching cache and
/// computed and written there otherwise.
pub fn cached_ball(spec: &Arc<GroupSpec>, r: u32, path: &Path) -> Result<Ball> {
    if path.exists() {
        if let Some(ball) = load_ball(spec, r, path)? {
            return Ok(ball);
        }
    }
    let ball = bfs_ball(spec, r)?;
    save_ball(&ball, path)?;
    Ok(ball)
}
