use std::sync::atomic::{AtomicU64, Ordering};
use std::collections::HashMap;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kdtree::KdTree;
use super::sphere::{chordal_dist, SpherePoint};
use crate::error::{Error, Result};

/// Relative slack applied to index queries before the exact distance test.
const QUERY_SLACK: f64 = 1e-9;
const FAR_CELL: f64 = (1u64 << 50) as f64;
/// Cell pairs with at most this many point pairs are compared directly.
const BRUTE_PAIRS: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
    Chordal,
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "chordal" => Ok(Metric::Chordal),
            other => Err(Error::invalid(format!("unknown metric {other:?}"))),
        }
    }
}

/// A finite set of sphere points with a lazily built chordal index.
#[derive(Clone, Debug, Default)]
pub struct PointSet {
    points: Vec<SpherePoint>,
    /// Sampling resolution of the set, when it discretizes a continuum.
    resolution: Option<f64>,
    index: OnceLock<KdTree<3>>,
}

impl PointSet {
    pub fn new(points: Vec<SpherePoint>) -> Self {
        PointSet {
            points,
            resolution: None,
            index: OnceLock::new(),
        }
    }

    pub fn with_resolution(mut self, delta: f64) -> Self {
        self.resolution = Some(delta);
        self
    }

    pub fn from_complex(points: impl IntoIterator<Item = Complex64>) -> Result<Self> {
        let pts = points.into_iter().map(SpherePoint::from_complex).collect::<Result<Vec<_>>>()?;
        Ok(PointSet::new(pts))
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<SpherePoint> {
        self.points
    }

    pub fn resolution(&self) -> Option<f64> {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Appends the point at infinity unless already present.
    pub fn with_infinity(mut self) -> Self {
        if !self.points.iter().any(SpherePoint::is_infinite) {
            self.points.push(SpherePoint::Infinity);
            self.index = OnceLock::new();
        }
        self
    }

    pub fn finite_points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.points.iter().filter_map(SpherePoint::finite)
    }

    fn chordal_index(&self) -> &KdTree<3> {
        self.index
            .get_or_init(|| KdTree::new(self.points.iter().map(SpherePoint::to_unit_sphere)))
    }

    /// Chordal distance from `p` to the nearest point of the set.
    pub fn nearest_chordal(&self, p: SpherePoint) -> Option<f64> {
        let tree = self.chordal_index();
        let q = p.to_unit_sphere();
        let (_, d2) = tree.nearest(&q)?;
        let radius = d2.sqrt() * (1.0 + QUERY_SLACK) + 1e-15;
        let mut best = f64::INFINITY;
        tree.within(&q, radius, |i| best = best.min(chordal_dist(p, self.points[i])));
        Some(best)
    }
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.resolution == other.resolution
    }
}

/// Stride through the points in a scrambled order so that large nearest
/// distances are found early and prune the rest.
const SCRAMBLE: usize = 2_654_435_761;

/// `max_p min_q d(p, q)`. A point is skipped once some target lies strictly
/// closer than the running maximum, so the result is the exact maximum
/// whatever the schedule.
fn directed_hausdorff(from: &PointSet, to: &PointSet) -> f64 {
    let tree = to.chordal_index();
    let n = from.points.len();
    let stride = if n > 1 && gcd(SCRAMBLE % n, n) == 1 { SCRAMBLE % n } else { 1 };
    let best = AtomicU64::new(0f64.to_bits());
    (0..n).into_par_iter().with_min_len(256).for_each(|i| {
        let p = from.points[(i * stride) % n];
        let current = f64::from_bits(best.load(Ordering::Relaxed));
        if current > 0.0 && tree.any_within(&p.to_unit_sphere(), current * (1.0 - 1e-9)) {
            return;
        }
        let d = to.nearest_chordal(p).unwrap_or(f64::INFINITY);
        best.fetch_max(d.to_bits(), Ordering::Relaxed);
    });
    f64::from_bits(best.into_inner())
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Discrete Hausdorff distance in the chordal metric.
pub fn hausdorff_discrete(a: &PointSet, b: &PointSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let (ab, ba) = rayon::join(|| directed_hausdorff(a, b), || directed_hausdorff(b, a));
    Ok(ab.max(ba))
}

/// Discrete Hausdorff value together with the sampling resolutions of the
/// inputs; the distance between the sampled continua lies within
/// `discrete ± (resolution_a + resolution_b)` when both are known.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HausdorffEstimate {
    pub discrete: f64,
    pub resolution_a: Option<f64>,
    pub resolution_b: Option<f64>,
}

pub fn hausdorff_estimate(a: &PointSet, b: &PointSet) -> Result<HausdorffEstimate> {
    Ok(HausdorffEstimate {
        discrete: hausdorff_discrete(a, b)?,
        resolution_a: a.resolution(),
        resolution_b: b.resolution(),
    })
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    /// Classes as sorted index lists, ordered by their smallest member.
    pub fn classes(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut slot = vec![usize::MAX; n];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let r = self.find(i);
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(i);
        }
        out
    }
}

/// Partition of `set` into ε-chain classes: two points share a class iff
/// they are joined by a chain whose consecutive distances are at most `eps`.
/// Classes are sorted index lists ordered by smallest member.
pub fn eps_components(set: &PointSet, eps: f64, metric: Metric) -> Result<Vec<Vec<usize>>> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidEpsilon(eps));
    }
    match metric {
        Metric::Euclidean => {
            let pts = set
                .points()
                .iter()
                .enumerate()
                .map(|(i, p)| p.finite().ok_or(Error::InfiniteInEuclidean { index: i }))
                .collect::<Result<Vec<_>>>()?;
            let coords: Vec<[f64; 2]> = pts.iter().map(|z| [z.re, z.im]).collect();
            Ok(grid_components(&coords, eps, |i, j| (pts[i] - pts[j]).norm()))
        }
        Metric::Chordal => {
            let pts = set.points();
            let coords: Vec<[f64; 3]> = pts.iter().map(SpherePoint::to_unit_sphere).collect();
            Ok(grid_components(&coords, eps, |i, j| chordal_dist(pts[i], pts[j])))
        }
    }
}

/// ε-chain classes via a cell grid of side `ε/√D`. Points sharing a cell
/// are within ε of each other; pairs of nearby cells are compared point by
/// point only while they still lie in different classes.
fn grid_components<const D: usize>(
    coords: &[[f64; D]],
    eps: f64,
    dist: impl Fn(usize, usize) -> f64,
) -> Vec<Vec<usize>> {
    let side = eps / (D as f64).sqrt() * (1.0 - QUERY_SLACK);
    let mut uf = UnionFind::new(coords.len());
    let radius = eps * (1.0 + QUERY_SLACK) + 1e-15;
    let mut keyed: Vec<([i64; D], usize)> = Vec::with_capacity(coords.len());
    let mut far = Vec::new();
    for (i, c) in coords.iter().enumerate() {
        // beyond 2^50 cells the division no longer pins down the cell
        if c.iter().any(|x| (x / side).abs() >= FAR_CELL) {
            far.push(i);
        } else {
            keyed.push((c.map(|x| (x / side).floor() as i64), i));
        }
    }
    if !far.is_empty() {
        let tree = KdTree::new(coords.iter().copied());
        for &i in &far {
            tree.within(&coords[i], radius, |j| {
                if dist(i, j) <= eps {
                    uf.union(i, j);
                }
            });
        }
    }
    keyed.sort_unstable();
    let members: Vec<usize> = keyed.iter().map(|k| k.1).collect();
    // cells as runs of `members`
    let mut runs: Vec<([i64; D], std::ops::Range<usize>)> = Vec::new();
    for (pos, (key, _)) in keyed.iter().enumerate() {
        match runs.last_mut() {
            Some((k, r)) if k == key => r.end = pos + 1,
            _ => runs.push((*key, pos..pos + 1)),
        }
    }
    drop(keyed);
    for (_, r) in &runs {
        for &j in &members[r.start + 1..r.end] {
            uf.union(members[r.start], j);
        }
    }
    // ε < 2·side in every coordinate, so only offsets up to 2 can connect
    let reach = 2i64;
    let span = (2 * reach + 1) as usize;
    let offsets: Vec<[i64; D]> = (0..span.pow(D as u32))
        .map(|mut n| {
            std::array::from_fn(|_| {
                let o = (n % span) as i64 - reach;
                n /= span;
                o
            })
        })
        .filter(|o: &[i64; D]| o.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0))
        .collect();
    let lookup: HashMap<[i64; D], usize> = runs.iter().enumerate().map(|(n, c)| (c.0, n)).collect();
    // per-cell trees, built only for large cells that get compared
    let trees: Vec<OnceLock<KdTree<D>>> = (0..runs.len()).map(|_| OnceLock::new()).collect();
    for (n, (key, r)) in runs.iter().enumerate() {
        let here = &members[r.clone()];
        for off in &offsets {
            let other: [i64; D] = std::array::from_fn(|d| key[d] + off[d]);
            let Some(&m) = lookup.get(&other) else { continue };
            let there = &members[runs[m].1.clone()];
            if uf.find(here[0]) == uf.find(there[0]) {
                continue;
            }
            let (small, big, b, big_key) = if here.len() <= there.len() {
                (here, there, m, other)
            } else {
                (there, here, n, *key)
            };
            // only points within ε of the other cell's box can link to it
            let near = |i: usize| {
                let c = &coords[i];
                let d2: f64 = (0..D)
                    .map(|d| {
                        let lo = big_key[d] as f64 * side;
                        let gap = (lo - c[d]).max(c[d] - (lo + side)).max(0.0);
                        gap * gap
                    })
                    .sum();
                d2 <= radius * radius
            };
            let hit = if small.len() * big.len() <= BRUTE_PAIRS {
                small
                    .iter()
                    .filter(|&&i| near(i))
                    .find_map(|&i| big.iter().find(|&&j| dist(i, j) <= eps).map(|&j| (i, j)))
            } else {
                let tree = trees[b].get_or_init(|| KdTree::new(big.iter().map(|&j| coords[j])));
                small.iter().filter(|&&i| near(i)).find_map(|&i| {
                    tree.find_within(&coords[i], radius, |l| dist(i, big[l]) <= eps)
                        .map(|l| (i, big[l]))
                })
            };
            if let Some((i, j)) = hit {
                uf.union(i, j);
            }
        }
    }
    uf.classes()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reals(xs: &[f64]) -> PointSet {
        PointSet::from_complex(xs.iter().map(|&x| Complex64::new(x, 0.0))).unwrap()
    }

    #[test]
    fn hausdorff_examples() {
        let a = reals(&[0.0, 1.0, -3.5]);
        assert_eq!(hausdorff_discrete(&a, &a).unwrap(), 0.0);

        let zero = reals(&[0.0]);
        let inf = PointSet::new(vec![SpherePoint::Infinity]);
        assert_eq!(hausdorff_discrete(&zero, &inf).unwrap(), 2.0);

        let d = hausdorff_discrete(&reals(&[0.0, 1.0]), &zero).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn hausdorff_rejects_empty() {
        let e = PointSet::default();
        assert!(matches!(hausdorff_discrete(&e, &reals(&[1.0])), Err(Error::EmptyPointSet)));
        assert!(matches!(hausdorff_discrete(&reals(&[1.0]), &e), Err(Error::EmptyPointSet)));
    }

    #[test]
    fn estimate_carries_resolutions() {
        let a = reals(&[0.0]).with_resolution(0.01);
        let est = hausdorff_estimate(&a, &reals(&[0.0])).unwrap();
        assert_eq!(est.resolution_a, Some(0.01));
        assert_eq!(est.resolution_b, None);
    }

    #[test]
    fn eps_component_examples() {
        let p = reals(&[0.0, 1.0, 2.5]);
        assert_eq!(eps_components(&p, 1.2, Metric::Euclidean).unwrap(), vec![vec![0, 1], vec![2]]);
        assert_eq!(eps_components(&p, 1.6, Metric::Euclidean).unwrap(), vec![vec![0, 1, 2]]);
        let single = reals(&[4.0]);
        assert_eq!(eps_components(&single, 1e-9, Metric::Chordal).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn eps_component_errors() {
        let p = PointSet::new(vec![SpherePoint::Infinity, SpherePoint::new(0.0, 0.0).unwrap()]);
        assert!(matches!(
            eps_components(&p, 1.0, Metric::Euclidean),
            Err(Error::InfiniteInEuclidean { index: 0 })
        ));
        assert!(matches!(eps_components(&p, 0.0, Metric::Chordal), Err(Error::InvalidEpsilon(_))));
        // chordally, far points join infinity
        let far = PointSet::new(vec![
            SpherePoint::new(1e6, 0.0).unwrap(),
            SpherePoint::new(-1e6, 0.0).unwrap(),
            SpherePoint::Infinity,
        ]);
        assert_eq!(eps_components(&far, 1e-3, Metric::Chordal).unwrap().len(), 1);
    }

    fn brute_classes(set: &PointSet, eps: f64, metric: Metric) -> Vec<Vec<usize>> {
        let pts = set.points();
        let mut uf = UnionFind::new(pts.len());
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d = match metric {
                    Metric::Euclidean => (pts[i].finite().unwrap() - pts[j].finite().unwrap()).norm(),
                    Metric::Chordal => chordal_dist(pts[i], pts[j]),
                };
                if d <= eps {
                    uf.union(i, j);
                }
            }
        }
        uf.classes()
    }

    #[test]
    fn grid_components_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for round in 0..40 {
            let scale = [1e-3, 1.0, 1e3, 1e17][round % 4];
            let mut pts: Vec<Complex64> = (0..150)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale)
                .collect();
            // a tight cluster and an exact duplicate
            pts.extend((0..20).map(|i| Complex64::new(0.3 + 1e-4 * i as f64, 0.2)));
            pts.push(pts[0]);
            let set = PointSet::from_complex(pts).unwrap();
            for eps in [0.01, 0.1, 0.3] {
                let eps = eps * scale;
                for metric in [Metric::Euclidean, Metric::Chordal] {
                    assert_eq!(
                        eps_components(&set, eps, metric).unwrap(),
                        brute_classes(&set, eps, metric),
                        "round {round} eps {eps} {metric:?}"
                    );
                }
            }
        }
    }
}
