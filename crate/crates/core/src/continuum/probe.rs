//! ε-chain connectivity and preimage-density experiments.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::ExpMap;
use crate::error::{Error, Result};
use crate::numerics::{eps_components, Metric, PointSet, SpherePoint};
use crate::window::Window;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityEntry {
    pub eps: f64,
    pub components: usize,
    /// Fraction of the points in the largest component.
    pub largest_share: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    /// Points of the set inside the window.
    pub points: usize,
    pub resolution: Option<f64>,
    pub entries: Vec<ConnectivityEntry>,
    /// Smallest `c` such that every listed `ε >= c·δ` gives one component;
    /// `None` without a resolution or if the largest ε already splits.
    pub c: Option<f64>,
}

impl ConnectivityReport {
    pub fn components_at(&self, eps: f64) -> Option<usize> {
        self.entries.iter().find(|e| e.eps == eps).map(|e| e.components)
    }
}

/// Euclidean ε-components of the finite points of `set` inside `window`,
/// for each ε of a strictly decreasing list.
pub fn connectivity_probe(set: &PointSet, eps_list: &[f64], window: Window) -> Result<ConnectivityReport> {
    if eps_list.is_empty() {
        return Err(Error::invalid("epsilon list is empty"));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("epsilon list must be strictly decreasing"));
    }
    let inside = PointSet::new(
        set.finite_points()
            .filter(|&z| window.contains(z))
            .map(SpherePoint::Finite)
            .collect(),
    );
    let n = inside.len();
    let entries = eps_list
        .iter()
        .map(|&eps| {
            let classes = eps_components(&inside, eps, Metric::Euclidean)?;
            let largest = classes.iter().map(Vec::len).max().unwrap_or(0);
            Ok(ConnectivityEntry {
                eps,
                components: classes.len(),
                largest_share: if n == 0 { 0.0 } else { largest as f64 / n as f64 },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let c = set.resolution().and_then(|delta| {
        entries
            .iter()
            .take_while(|e| e.components == 1)
            .last()
            .map(|e| e.eps / delta)
    });
    Ok(ConnectivityReport {
        points: n,
        resolution: set.resolution(),
        entries,
        c,
    })
}

pub const DENSITY_MAX_DEPTH: usize = 8;
pub const DENSITY_MAX_GRID: usize = 512;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub seed: Complex64,
    pub k_max: i64,
    pub grid: usize,
    /// `coverage[d]`: fraction of grid cells holding a preimage of depth
    /// at most `d`.
    pub coverage: Vec<f64>,
    /// Preimages computed, the seed included.
    pub points: u64,
    /// Branch applications rejected because the point sat on the slit.
    pub slit_hits: u64,
}

impl DensityReport {
    pub fn fraction(&self) -> f64 {
        *self.coverage.last().expect("coverage has depth 0")
    }
}

struct Grid {
    window: Window,
    n: usize,
    depth: Vec<u8>,
}

impl Grid {
    fn new(window: Window, n: usize) -> Self {
        Grid {
            window,
            n,
            depth: vec![u8::MAX; n * n],
        }
    }

    fn mark(&mut self, z: Complex64, d: u8) {
        if !self.window.contains(z) {
            return;
        }
        let w = &self.window;
        let cell = |t: f64| ((t * self.n as f64) as usize).min(self.n - 1);
        let i = cell((z.re - w.x_min) / w.width());
        let j = cell((z.im - w.y_min) / w.height());
        let slot = &mut self.depth[j * self.n + i];
        *slot = (*slot).min(d);
    }
}

struct Walk<'a> {
    f: &'a ExpMap,
    k_max: i64,
    depth: u8,
    grid: Grid,
    points: u64,
    slit_hits: u64,
}

impl Walk<'_> {
    fn visit(&mut self, z: Complex64, d: u8) {
        self.points += 1;
        self.grid.mark(z, d);
        if d == self.depth {
            return;
        }
        for k in -self.k_max..=self.k_max {
            match self.f.inv_strip(k, z) {
                Ok(w) => self.visit(w, d + 1),
                Err(_) => self.slit_hits += 1,
            }
        }
    }
}

/// Pulls `seed` back through every branch word of length at most `depth`
/// with letters `|k| <= k_max` and reports grid coverage of the window per
/// depth. Preimages outside the window are still pulled back further.
pub fn density_probe(
    f: &ExpMap,
    seed: Complex64,
    depth: usize,
    k_max: i64,
    window: Window,
    grid_n: usize,
) -> Result<DensityReport> {
    if depth > DENSITY_MAX_DEPTH {
        return Err(Error::invalid(format!("density depth must be at most {DENSITY_MAX_DEPTH}")));
    }
    if grid_n == 0 || grid_n > DENSITY_MAX_GRID {
        return Err(Error::invalid(format!("grid size must be in 1..={DENSITY_MAX_GRID}")));
    }
    if k_max < 0 {
        return Err(Error::invalid("k_max must be nonnegative"));
    }
    if !(seed.re.is_finite() && seed.im.is_finite()) {
        return Err(Error::invalid("seed must be finite"));
    }
    let mut grid = Grid::new(window, grid_n);
    grid.mark(seed, 0);
    let (mut points, mut slit_hits) = (1, 0);
    // one subtree per first branch; merging by minimum is order-independent
    let subtrees: Vec<Option<Walk>> = if depth == 0 {
        Vec::new()
    } else {
        (-k_max..=k_max)
            .into_par_iter()
            .map(|k| {
                let z = f.inv_strip(k, seed).ok()?;
                let mut w = Walk {
                    f,
                    k_max,
                    depth: depth as u8,
                    grid: Grid::new(window, grid_n),
                    points: 0,
                    slit_hits: 0,
                };
                w.visit(z, 1);
                Some(w)
            })
            .collect()
    };
    for s in subtrees {
        let Some(s) = s else {
            slit_hits += 1;
            continue;
        };
        points += s.points;
        slit_hits += s.slit_hits;
        for (a, b) in grid.depth.iter_mut().zip(&s.grid.depth) {
            *a = (*a).min(*b);
        }
    }
    let cells = (grid_n * grid_n) as f64;
    let coverage = (0..=depth)
        .map(|d| grid.depth.iter().filter(|&&m| (m as usize) <= d).count() as f64 / cells)
        .collect();
    Ok(DensityReport {
        seed,
        k_max,
        grid: grid_n,
        coverage,
        points,
        slit_hits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn line_is_one_component() {
        let pts = PointSet::from_complex((0..=800).map(|i| Complex64::new(-4.0 + 0.01 * i as f64, PI)))
            .unwrap()
            .with_resolution(0.01);
        let w = Window::new(-4.0, 4.0, -1.0, 4.0).unwrap();
        let r = connectivity_probe(&pts, &[0.05, 0.03, 0.005], w).unwrap();
        assert_eq!(r.points, 801);
        assert_eq!(r.components_at(0.03), Some(1));
        assert_eq!(r.components_at(0.005), Some(801));
        assert_eq!(r.c, Some(3.0));
    }

    #[test]
    fn two_lines_split() {
        let line = |y: f64| (0..=80).map(move |i| Complex64::new(-4.0 + 0.1 * i as f64, y));
        let pts = PointSet::from_complex(line(PI).chain(line(-PI))).unwrap();
        let w = Window::new(-4.0, 4.0, -4.0, 4.0).unwrap();
        let r = connectivity_probe(&pts, &[1.0], w).unwrap();
        assert_eq!(r.entries[0].components, 2);
        assert!((r.entries[0].largest_share - 0.5).abs() < 1e-12);
        assert_eq!(r.c, None);
    }

    #[test]
    fn probe_rejects_bad_lists() {
        let pts = PointSet::from_complex([Complex64::new(0.0, 0.0)]).unwrap();
        let w = Window::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        assert!(connectivity_probe(&pts, &[0.1, 0.2], w).is_err());
        assert!(connectivity_probe(&pts, &[], w).is_err());
        assert!(connectivity_probe(&pts, &[0.1, -0.1], w).is_err());
    }

    #[test]
    fn depth_zero_density_is_one_cell() {
        let f = ExpMap::new(0.0).unwrap();
        let w = Window::new(-4.0, 4.0, -4.0, 4.0).unwrap();
        let r = density_probe(&f, Complex64::new(-1.0, 0.0), 0, 6, w, 16).unwrap();
        assert_eq!(r.coverage, vec![1.0 / 256.0]);
        let off = Window::new(0.0, 4.0, 0.0, 4.0).unwrap();
        let r = density_probe(&f, Complex64::new(-1.0, 0.0), 0, 6, off, 16).unwrap();
        assert_eq!(r.coverage, vec![0.0]);
    }

    #[test]
    fn density_is_monotone_and_counts_words() {
        let f = ExpMap::new(0.0).unwrap();
        let w = Window::new(-4.0, 4.0, -4.0, 4.0).unwrap();
        let r = density_probe(&f, Complex64::new(-1.0, 0.0), 3, 2, w, 32).unwrap();
        assert!(r.coverage.windows(2).all(|c| c[0] <= c[1]));
        assert_eq!(r.points + r.slit_hits, 1 + 5 + 25 + 125);
        // depth 1 preimages of -1 are the points (2k+1)πi
        let r1 = density_probe(&f, Complex64::new(-1.0, 0.0), 1, 2, w, 32).unwrap();
        assert_eq!(r1.coverage[1] * 1024.0, 3.0);
    }

    #[test]
    fn density_limits() {
        let f = ExpMap::new(0.0).unwrap();
        let w = Window::new(-4.0, 4.0, -4.0, 4.0).unwrap();
        let s = Complex64::new(-1.0, 0.0);
        assert!(density_probe(&f, s, 9, 1, w, 16).is_err());
        assert!(density_probe(&f, s, 1, 1, w, 513).is_err());
        assert!(density_probe(&f, s, 1, 1, w, 0).is_err());
    }
}
