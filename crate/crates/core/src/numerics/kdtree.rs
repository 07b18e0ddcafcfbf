//! Static kd-tree over small fixed-dimension points.
//!
//! The tree is implicit: after construction the point array is arranged so
//! that the median of every range `[lo, hi)` sits at `(lo + hi) / 2`, with
//! smaller coordinates (along that node's split axis) to the left.

const LEAF: usize = 8;

#[derive(Clone, Debug)]
pub struct KdTree<const D: usize> {
    points: Vec<[f64; D]>,
    ids: Vec<usize>,
    axes: Vec<u8>,
}

fn dist2<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    let mut s = 0.0;
    for i in 0..D {
        let d = a[i] - b[i];
        s += d * d;
    }
    s
}

impl<const D: usize> KdTree<D> {
    pub fn new(coords: impl IntoIterator<Item = [f64; D]>) -> Self {
        let mut pairs: Vec<([f64; D], usize)> = coords.into_iter().enumerate().map(|(i, p)| (p, i)).collect();
        let n = pairs.len();
        let mut axes = vec![0u8; n];
        build(&mut pairs, 0, &mut axes);
        let (points, ids) = pairs.into_iter().unzip();
        KdTree { points, ids, axes }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Nearest stored point to `q`: `(original index, squared distance)`.
    pub fn nearest(&self, q: &[f64; D]) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        self.nearest_in(0, self.points.len(), q, &mut best);
        Some(best)
    }

    fn nearest_in(&self, lo: usize, hi: usize, q: &[f64; D], best: &mut (usize, f64)) {
        if hi - lo <= LEAF {
            for i in lo..hi {
                let d = dist2(&self.points[i], q);
                if d < best.1 || (d == best.1 && self.ids[i] < best.0) {
                    *best = (self.ids[i], d);
                }
            }
            return;
        }
        let mid = (lo + hi) / 2;
        let axis = self.axes[mid] as usize;
        let p = &self.points[mid];
        let d = dist2(p, q);
        if d < best.1 || (d == best.1 && self.ids[mid] < best.0) {
            *best = (self.ids[mid], d);
        }
        let diff = q[axis] - p[axis];
        let (near, far) = if diff <= 0.0 { ((lo, mid), (mid + 1, hi)) } else { ((mid + 1, hi), (lo, mid)) };
        self.nearest_in(near.0, near.1, q, best);
        if diff * diff <= best.1 {
            self.nearest_in(far.0, far.1, q, best);
        }
    }

    /// Calls `visit` with the original index of every point within
    /// euclidean distance `radius` of `q` (inclusive).
    pub fn within(&self, q: &[f64; D], radius: f64, mut visit: impl FnMut(usize)) {
        if self.points.is_empty() {
            return;
        }
        let r2 = radius * radius;
        self.within_in(0, self.points.len(), q, radius, r2, &mut visit);
    }

    /// True if some stored point lies within euclidean distance `radius`
    /// of `q` (inclusive); stops at the first hit.
    pub fn any_within(&self, q: &[f64; D], radius: f64) -> bool {
        !self.points.is_empty() && self.any_in(0, self.points.len(), q, radius, radius * radius)
    }

    /// First point within `radius` of `q` (in tree order) that `accept`
    /// approves; stops searching once one is found.
    pub fn find_within(&self, q: &[f64; D], radius: f64, mut accept: impl FnMut(usize) -> bool) -> Option<usize> {
        if self.points.is_empty() {
            return None;
        }
        self.find_in(0, self.points.len(), q, radius, radius * radius, &mut accept)
    }

    fn find_in(
        &self,
        lo: usize,
        hi: usize,
        q: &[f64; D],
        r: f64,
        r2: f64,
        accept: &mut impl FnMut(usize) -> bool,
    ) -> Option<usize> {
        if hi - lo <= LEAF {
            return (lo..hi)
                .find(|&i| dist2(&self.points[i], q) <= r2 && accept(self.ids[i]))
                .map(|i| self.ids[i]);
        }
        let mid = (lo + hi) / 2;
        let axis = self.axes[mid] as usize;
        let p = &self.points[mid];
        if dist2(p, q) <= r2 && accept(self.ids[mid]) {
            return Some(self.ids[mid]);
        }
        let diff = q[axis] - p[axis];
        let (near, far) = if diff <= 0.0 { ((lo, mid), (mid + 1, hi)) } else { ((mid + 1, hi), (lo, mid)) };
        let far_ok = if diff <= 0.0 { diff >= -r } else { diff <= r };
        self.find_in(near.0, near.1, q, r, r2, accept)
            .or_else(|| if far_ok { self.find_in(far.0, far.1, q, r, r2, accept) } else { None })
    }

    fn any_in(&self, lo: usize, hi: usize, q: &[f64; D], r: f64, r2: f64) -> bool {
        if hi - lo <= LEAF {
            return (lo..hi).any(|i| dist2(&self.points[i], q) <= r2);
        }
        let mid = (lo + hi) / 2;
        let axis = self.axes[mid] as usize;
        let p = &self.points[mid];
        if dist2(p, q) <= r2 {
            return true;
        }
        let diff = q[axis] - p[axis];
        let (near, far) = if diff <= 0.0 { ((lo, mid), (mid + 1, hi)) } else { ((mid + 1, hi), (lo, mid)) };
        let far_ok = if diff <= 0.0 { diff >= -r } else { diff <= r };
        self.any_in(near.0, near.1, q, r, r2) || (far_ok && self.any_in(far.0, far.1, q, r, r2))
    }

    fn within_in(&self, lo: usize, hi: usize, q: &[f64; D], r: f64, r2: f64, visit: &mut impl FnMut(usize)) {
        if hi - lo <= LEAF {
            for i in lo..hi {
                if dist2(&self.points[i], q) <= r2 {
                    visit(self.ids[i]);
                }
            }
            return;
        }
        let mid = (lo + hi) / 2;
        let axis = self.axes[mid] as usize;
        let p = &self.points[mid];
        if dist2(p, q) <= r2 {
            visit(self.ids[mid]);
        }
        let diff = q[axis] - p[axis];
        if diff <= r {
            self.within_in(lo, mid, q, r, r2, visit);
        }
        if diff >= -r {
            self.within_in(mid + 1, hi, q, r, r2, visit);
        }
    }
}

fn build<const D: usize>(pairs: &mut [([f64; D], usize)], offset: usize, axes: &mut [u8]) {
    let n = pairs.len();
    if n <= LEAF {
        return;
    }
    let mut lo = [f64::INFINITY; D];
    let mut hi = [f64::NEG_INFINITY; D];
    for (p, _) in pairs.iter() {
        for k in 0..D {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let axis = (0..D)
        .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
        .unwrap_or(0);
    let mid = n / 2;
    pairs.select_nth_unstable_by(mid, |a, b| a.0[axis].total_cmp(&b.0[axis]).then(a.1.cmp(&b.1)));
    axes[offset + mid] = axis as u8;
    let (left, rest) = pairs.split_at_mut(mid);
    build(left, offset, axes);
    build(&mut rest[1..], offset + mid + 1, axes);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn nearest_and_within_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<[f64; 3]> = (0..500).map(|_| [rng.gen(), rng.gen(), rng.gen()]).collect();
        let tree = KdTree::new(pts.iter().copied());
        for _ in 0..200 {
            let q = [rng.gen(), rng.gen(), rng.gen()];
            let (_, d) = tree.nearest(&q).unwrap();
            let brute = pts.iter().map(|p| dist2(p, &q)).fold(f64::INFINITY, f64::min);
            assert_eq!(d, brute);

            let r = 0.15;
            assert_eq!(tree.any_within(&q, r), (0..pts.len()).any(|i| dist2(&pts[i], &q) <= r * r));
            let mut got = Vec::new();
            tree.within(&q, r, |i| got.push(i));
            got.sort_unstable();
            let want: Vec<usize> = (0..pts.len()).filter(|&i| dist2(&pts[i], &q) <= r * r).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn empty_tree() {
        let tree: KdTree<2> = KdTree::new(std::iter::empty());
        assert!(tree.nearest(&[0.0, 0.0]).is_none());
        tree.within(&[0.0, 0.0], 1.0, |_| panic!("no points"));
    }
}
