use serde::{Deserialize, Serialize};

use super::gamma::{GammaBuilder, SampledCurve};
use crate::dynamics::{ExpMap, Sign};
use crate::error::{Error, Result};
use crate::numerics::{hausdorff_discrete, PointSet, SpherePoint};
use crate::window::Window;

/// The curves `γ_0 … γ_K` of one sign, sampled at a shared resolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuumApprox {
    /// Parameter of the map the curves belong to.
    pub a: f64,
    pub curves: Vec<SampledCurve>,
    pub sign: Sign,
    pub window: Window,
    pub delta: f64,
}

impl ContinuumApprox {
    pub fn depth(&self) -> u32 {
        self.curves.len().saturating_sub(1) as u32
    }

    /// All samples of all curves.
    pub fn union(&self) -> PointSet {
        PointSet::new(self.curves.iter().flat_map(|c| c.points()).collect()).with_resolution(self.delta)
    }

    /// Finite samples inside the window.
    pub fn window_points(&self) -> PointSet {
        let pts = self
            .curves
            .iter()
            .flat_map(|c| c.finite_points())
            .filter(|&z| self.window.contains(z))
            .map(SpherePoint::Finite)
            .collect();
        PointSet::new(pts).with_resolution(self.delta)
    }

    pub fn conj(&self) -> ContinuumApprox {
        ContinuumApprox {
            curves: self.curves.iter().map(SampledCurve::conj).collect(),
            sign: self.sign.flip(),
            ..self.clone()
        }
    }
}

/// Samples `γ_0 … γ_K` by successive pullback of one sample list.
pub fn build_continuum(f: &ExpMap, sign: Sign, k_max: u32, delta: f64, window: Window) -> Result<ContinuumApprox> {
    if k_max < 1 {
        return Err(Error::invalid("continuum depth K must be at least 1"));
    }
    let mut b = GammaBuilder::new(f, sign, delta, window)?;
    let mut curves = vec![b.curve()];
    while b.generation() < k_max {
        b.advance()?;
        curves.push(b.curve());
    }
    Ok(ContinuumApprox {
        a: f.a(),
        curves,
        sign,
        window,
        delta,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HausdorffEntry {
    pub k: u32,
    pub distance: f64,
}

/// Chordal distances from each `γ_k ∪ {∞}` to the whole family `∪ {∞}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HausdorffReport {
    pub delta: f64,
    pub entries: Vec<HausdorffEntry>,
}

impl HausdorffReport {
    pub fn distance(&self, k: u32) -> Option<f64> {
        self.entries.iter().find(|e| e.k == k).map(|e| e.distance)
    }
}

pub fn hausdorff_report(approx: &ContinuumApprox) -> Result<HausdorffReport> {
    if approx.depth() < 3 {
        return Err(Error::invalid("hausdorff report needs K >= 3"));
    }
    let all = approx.union().with_infinity();
    let entries = approx
        .curves
        .iter()
        .map(|c| {
            let curve = PointSet::new(c.points().collect()).with_infinity();
            Ok(HausdorffEntry {
                k: c.generation,
                distance: hausdorff_discrete(&curve, &all)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HausdorffReport {
        delta: approx.delta,
        entries,
    })
}

/// Structural features of a curve family, read from sample metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    /// `γ_0` is real and lies left of `a`.
    pub real_ray: bool,
    /// `γ_1` is the horizontal line at `σπ`.
    pub pi_line: bool,
    /// Generations `k ≥ 2` whose two ends both leave the window to the right.
    pub folded: Vec<u32>,
    /// For `k ≥ 2`: largest chordal distance from an in-window sample of
    /// `γ_0 ∪ γ_1` to the in-window part of `γ_k`.
    pub approach: Vec<f64>,
    /// Folded generations that approach `γ_0 ∪ γ_1` strictly closer than
    /// the generation before them.
    pub folded_accumulating: Vec<u32>,
}

impl FamilySummary {
    pub fn folded_count(&self) -> usize {
        self.folded_accumulating.len()
    }
}

fn is_folded(c: &SampledCurve, window: &Window) -> bool {
    let right = |s: Option<&super::CurveSample>| s.and_then(|s| s.point.finite()).is_some_and(|z| z.re > window.x_max);
    right(c.samples.first()) && right(c.samples.last()) && c.finite_points().any(|z| window.contains(z))
}

pub fn family_summary(approx: &ContinuumApprox) -> Result<FamilySummary> {
    let w = approx.window;
    let f = approx.sign.factor();
    let real_ray = approx
        .curves
        .first()
        .is_some_and(|c| c.finite_points().all(|z| z.im == 0.0 && z.re < approx.a));
    let pi_line = approx.curves.get(1).is_some_and(|c| {
        c.finite_points()
            .all(|z| (z.im - f * std::f64::consts::PI).abs() <= 1e-9)
    });
    let base: Vec<SpherePoint> = approx
        .curves
        .iter()
        .take(2)
        .flat_map(|c| c.finite_points())
        .filter(|&z| w.contains(z))
        .map(SpherePoint::Finite)
        .collect();
    let mut folded = Vec::new();
    let mut approach = Vec::new();
    let mut folded_accumulating = Vec::new();
    let mut previous = f64::INFINITY;
    for c in approx.curves.iter().skip(2) {
        let inside = PointSet::new(
            c.finite_points()
                .filter(|&z| w.contains(z))
                .map(SpherePoint::Finite)
                .collect(),
        );
        let d = if inside.is_empty() || base.is_empty() {
            f64::INFINITY
        } else {
            base.iter()
                .map(|&p| inside.nearest_chordal(p).unwrap_or(f64::INFINITY))
                .fold(0.0, f64::max)
        };
        let fold = is_folded(c, &w);
        if fold {
            folded.push(c.generation);
            if d < previous {
                folded_accumulating.push(c.generation);
            }
        }
        approach.push(d);
        previous = d;
    }
    Ok(FamilySummary {
        real_ray,
        pi_line,
        folded,
        approach,
        folded_accumulating,
    })
}
