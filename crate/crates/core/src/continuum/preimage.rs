//! The set `Y = ⋃_{σ,k} (Γ^σ + 2πik)` and its iterated preimages.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::build_continuum;
use crate::dynamics::{ExpMap, Sign};
use crate::error::{Error, Result};
use crate::numerics::{PointSet, SpherePoint};
use crate::window::Window;

/// Default branch range `|k| <= 8` for strip preimages.
pub const DEFAULT_K_MAX: i64 = 8;

/// Samples of `Y` inside `window`: `Γ^+` and `Γ^-` (depth `k_max`,
/// resolution `delta`) translated by `2πik` for `|k| <= m_translates`.
pub fn build_y(f: &ExpMap, k_max: u32, delta: f64, window: Window, m_translates: u32) -> Result<PointSet> {
    let upper = Window::new(window.x_min, window.x_max, 0.0, PI)?;
    let lower = Window::new(window.x_min, window.x_max, -PI, 0.0)?;
    let (plus, minus) = rayon::join(
        || build_continuum(f, Sign::Plus, k_max, delta, upper),
        || build_continuum(f, Sign::Minus, k_max, delta, lower),
    );
    let (plus, minus) = (plus?, minus?);
    let m = m_translates as i64;
    let mut points = Vec::new();
    for k in -m..=m {
        let shift = Complex64::new(0.0, 2.0 * PI * k as f64);
        for family in [&plus, &minus] {
            for c in &family.curves {
                points.extend(
                    c.finite_points()
                        .map(|z| z + shift)
                        .filter(|&z| window.contains(z))
                        .map(SpherePoint::Finite),
                );
            }
        }
    }
    Ok(PointSet::new(points).with_resolution(delta))
}

/// One point of a preimage forest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestPoint {
    pub z: Complex64,
    /// Index of the image point one level up; `None` at depth 0 and for
    /// inserted gluing points.
    pub parent: Option<usize>,
    /// Strip branch `k` with `z = L_k(parent)`; `None` at depth 0.
    pub branch: Option<i64>,
}

/// `Y_j` built from `Y_0` by repeated strip preimages, level by level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreimageForest {
    pub window: Window,
    pub k_max: i64,
    pub levels: Vec<Vec<ForestPoint>>,
    /// Per level: parents on the slit `[a, ∞)`, which have no preimage.
    pub dropped_slit: Vec<usize>,
    /// Per level: preimages that fell outside the window.
    pub dropped_outside: Vec<usize>,
    pub resolution: Option<f64>,
}

/// Branch word of a forest point: the branch of the point itself first,
/// then those of its ancestors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchWord {
    pub branches: Vec<i64>,
    /// The word ends at an inserted gluing point rather than at `Y_0`.
    pub glued: bool,
}

impl std::fmt::Display for BranchWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.branches.iter().map(i64::to_string).collect();
        write!(f, "{}{}", parts.join(";"), if self.glued { "*" } else { "" })
    }
}

impl std::str::FromStr for BranchWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (body, glued) = match s.strip_suffix('*') {
            Some(b) => (b, true),
            None => (s, false),
        };
        let branches = if body.is_empty() {
            Vec::new()
        } else {
            body.split(';')
                .map(|p| p.trim().parse::<i64>().map_err(|e| Error::invalid(format!("branch word {s:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?
        };
        Ok(BranchWord { branches, glued })
    }
}

impl PreimageForest {
    pub fn depth(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn word(&self, depth: usize, index: usize) -> BranchWord {
        let mut branches = Vec::with_capacity(depth);
        let (mut d, mut i) = (depth, index);
        let mut glued = false;
        while d > 0 {
            let p = self.levels[d][i];
            branches.extend(p.branch);
            match p.parent {
                Some(parent) => {
                    i = parent;
                    d -= 1;
                }
                None => {
                    glued = true;
                    break;
                }
            }
        }
        BranchWord { branches, glued }
    }

    /// All points of all levels.
    pub fn point_set(&self) -> PointSet {
        let pts = self
            .levels
            .iter()
            .flatten()
            .map(|p| SpherePoint::Finite(p.z))
            .collect();
        let set = PointSet::new(pts);
        match self.resolution {
            Some(d) => set.with_resolution(d),
            None => set,
        }
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Gluing point `z_k = (2k+1)πi`, which lies in `Y` and in `L_k(Y)`.
pub fn gluing_point(k: i64) -> Complex64 {
    Complex64::new(0.0, (2 * k + 1) as f64 * PI)
}

/// Builds `Y_0 ⊂ Y_1 ⊂ … ⊂ Y_depth` by applying `L_k`, `|k| <= k_max`, to
/// every point of the previous level. Preimages outside the window are
/// dropped and counted; gluing points in the window are added at every
/// level from 1 on.
pub fn build_preimage_forest(
    f: &ExpMap,
    y0: &PointSet,
    depth: usize,
    k_max: i64,
    window: Window,
) -> Result<PreimageForest> {
    if k_max < 0 {
        return Err(Error::invalid("k_max must be nonnegative"));
    }
    let root: Vec<ForestPoint> = y0
        .finite_points()
        .map(|z| ForestPoint {
            z,
            parent: None,
            branch: None,
        })
        .collect();
    let mut levels = vec![root];
    let mut dropped_slit = vec![0];
    let mut dropped_outside = vec![0];
    for _ in 0..depth {
        let prev = levels.last().expect("level 0 exists");
        let results: Vec<(Vec<ForestPoint>, usize, usize)> = prev
            .par_iter()
            .enumerate()
            .with_min_len(1024)
            .map(|(i, p)| {
                let mut out = Vec::new();
                let mut outside = 0;
                if !window.contains(p.z) {
                    return (out, 0, 0);
                }
                for k in -k_max..=k_max {
                    match f.inv_strip(k, p.z) {
                        Ok(z) if window.contains(z) => out.push(ForestPoint {
                            z,
                            parent: Some(i),
                            branch: Some(k),
                        }),
                        Ok(_) => outside += 1,
                        Err(_) => return (Vec::new(), 1, 0),
                    }
                }
                (out, 0, outside)
            })
            .collect();
        let mut level = Vec::new();
        let (mut slit, mut outside) = (0, 0);
        for (pts, s, o) in results {
            level.extend(pts);
            slit += s;
            outside += o;
        }
        for k in -k_max..=k_max {
            let z = gluing_point(k);
            if window.contains(z) {
                level.push(ForestPoint {
                    z,
                    parent: None,
                    branch: Some(k),
                });
            }
        }
        levels.push(level);
        dropped_slit.push(slit);
        dropped_outside.push(outside);
    }
    Ok(PreimageForest {
        window,
        k_max,
        levels,
        dropped_slit,
        dropped_outside,
        resolution: y0.resolution(),
    })
}
