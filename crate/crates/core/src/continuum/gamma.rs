//! Sampling of the pullback curves `γ_k^σ`.
//!
//! `γ_0 = (-∞, a)` is sampled as `a - e^t`. `γ_1 = L_σ(γ_0)` is the line
//! `t + σπi` (closed form, which avoids the cancellation in `(a - e^t) - a`).
//! Every later generation is the image of the previous sample list under
//! `L_σ`, followed by midpoint refinement.
//!
//! Deep generations have tails that creep to infinity like iterated
//! logarithms, so a pullback chain started from float-representable points
//! cannot reach them. From generation 3 on each curve gets two tail charts:
//! the tail at real part `x` is `x + iσθ_k(x)`, with `θ_k` obtained from
//! the requirement that `f(x + iθ)` lies on the tail of `γ_{k-1}`.
//!
//! Each sample remembers the chart and chart parameter it came from, so a
//! midpoint can be evaluated in any later generation by pulling back the
//! chart point.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{ExpMap, Sign};
use crate::error::{Error, Result};
use crate::numerics::{chordal_dist, chordal_finite, SpherePoint};
use crate::window::Window;

/// Total sample count at which a build is abandoned.
pub const SAMPLE_BUDGET: usize = 10_000_000;

/// Generation-1 parameters cover `|t| <= T_MAX`; generation 2 then
/// reaches real part `ln T_MAX ≈ 690.8`.
const T_MAX: f64 = 1e300;
const CHAIN_STEP: f64 = 0.25;
const RAY_STEP: f64 = 0.1;
/// Tails are extended out to this real part; one pullback maps it to
/// about `ln 690 ≈ 6.54`, where the next tail chart starts.
const TAIL_EXTENT: f64 = 690.0;
const TAIL_GROWTH: f64 = 1.05;
const MAX_BISECTIONS: u32 = 64;

/// Which end of a curve a tail chart continues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    /// The end inherited from `t → -∞` on `γ_1`.
    Start,
    /// The end inherited from `t → +∞` on `γ_1`.
    Finish,
}

/// Parametrization a sample was generated in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "chart", rename_all = "lowercase")]
pub enum Chart {
    /// `a - e^t` on generation 0.
    Ray,
    /// `L_σ^{k-1}(t + σπi)`.
    Chain,
    /// `L_σ^{k-j}(x + iσθ_j(x))` for the tail of generation `j`.
    Tail { generation: u32, end: End },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub chart: Chart,
    pub param: f64,
    pub point: SpherePoint,
}

/// Ordered polyline approximating one `γ_k^σ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledCurve {
    pub samples: Vec<CurveSample>,
    pub generation: u32,
    pub sign: Sign,
    /// Target resolution δ.
    pub resolution: f64,
    /// Largest chordal gap between consecutive samples actually achieved.
    pub max_gap: f64,
    /// Chordal distance of the first and last sample to infinity.
    pub truncation: [f64; 2],
    /// Pairs whose gap exceeded δ but could not be bisected further.
    pub unresolved: usize,
}

impl SampledCurve {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = SpherePoint> + '_ {
        self.samples.iter().map(|s| s.point)
    }

    pub fn finite_points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.samples.iter().filter_map(|s| s.point.finite())
    }

    pub fn conj(&self) -> SampledCurve {
        SampledCurve {
            samples: self
                .samples
                .iter()
                .map(|s| CurveSample { point: s.point.conj(), ..*s })
                .collect(),
            sign: self.sign.flip(),
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Node {
    chart: Chart,
    param: f64,
    z: Complex64,
    /// False for samples copied from an earlier generation by a splice.
    own: bool,
    /// Index of the splice inserted after this sample.
    splice: Option<usize>,
}

/// Imaginary part of the tail of `γ_k^+` (k ≥ 2) at real part `x`.
///
/// Generation 2 is exact: `f(z)` lies on `im = π` iff `e^x sin θ = π`.
/// Later generations solve `e^x sin θ = θ_{k-1}(e^x cos θ + a)`.
fn tail_theta(a: f64, generation: u32, end: End, x: f64) -> f64 {
    debug_assert!(generation >= 2);
    if generation == 2 {
        let t = (PI * (-x).exp()).min(1.0).asin();
        return match end {
            End::Finish => t,
            End::Start => PI - t,
        };
    }
    let ex = x.exp();
    if !ex.is_finite() {
        let limit = if generation == 3 && end == End::Start { PI } else { 0.0 };
        return limit * (-x).exp();
    }
    let solve = |big_x: f64| (tail_theta_inner(a, generation - 1, end, big_x) / ex).min(1.0).asin();
    let first = solve(ex + a);
    solve(ex * first.cos() + a)
}

/// Single-pass variant used below the top level; the `cos θ` correction is
/// far below float resolution once `x` exceeds the tail start.
fn tail_theta_inner(a: f64, generation: u32, end: End, x: f64) -> f64 {
    if generation == 2 {
        return tail_theta(a, 2, end, x);
    }
    let ex = x.exp();
    if !ex.is_finite() {
        let limit = if generation == 3 && end == End::Start { PI } else { 0.0 };
        return limit * (-x).exp();
    }
    (tail_theta_inner(a, generation - 1, end, ex + a) / ex).min(1.0).asin()
}

fn chain_midpoint(t0: f64, t1: f64) -> f64 {
    (0.5 * (t0.asinh() + t1.asinh())).sinh()
}

/// Arcs to insert between two samples whose parameters cannot be bisected
/// further because some ancestor pair passed within float resolution of `a`.
///
/// Just left of `a` the map `L_σ` sends the curve onto `γ_1`, just right
/// of it onto `γ_0` (its image passes `∞` in between). `r` generations
/// later the same stretch is an arc of `γ_{r+1}` or `γ_r`, which is taken
/// from the stored generations. Parameters are chain parameters at the
/// generation right after the passage.
#[derive(Clone, Copy, Debug)]
enum SpliceArc {
    Line(f64, f64),
    Ray(f64, f64),
    /// Line side first when the flag is set.
    Straddle { t_line: f64, t_ray: f64, line_first: bool },
}

#[derive(Clone, Copy, Debug)]
struct Splice {
    born: u32,
    arc: SpliceArc,
}

/// Real part below which a stuck pair counts as a passage near `a`
/// (`|f(z) - a| < 1e-6`).
const PASSAGE_LOG_RADIUS: f64 = -13.8;

pub(crate) struct GammaBuilder<'a> {
    f: &'a ExpMap,
    sign: Sign,
    delta: f64,
    window: Window,
    generation: u32,
    /// Samples pulled back from the previous generation, plus new tails.
    nodes: Vec<Node>,
    splices: Vec<Splice>,
    /// Expanded sample lists of all finished generations.
    history: Vec<Vec<Node>>,
    unresolved: usize,
}

impl<'a> GammaBuilder<'a> {
    pub(crate) fn new(f: &'a ExpMap, sign: Sign, delta: f64, window: Window) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::invalid(format!("resolution δ = {delta} must be positive")));
        }
        let mut b = GammaBuilder {
            f,
            sign,
            delta,
            window,
            generation: 0,
            nodes: Vec::new(),
            splices: Vec::new(),
            history: Vec::new(),
            unresolved: 0,
        };
        b.nodes = b.generation_zero();
        b.refine()?;
        b.finish_generation();
        Ok(b)
    }

    fn lift(&self, z: Complex64) -> Option<Complex64> {
        self.f.inv_halfplane(self.sign, z).ok()
    }

    fn node(chart: Chart, param: f64, z: Complex64) -> Node {
        Node {
            chart,
            param,
            z,
            own: true,
            splice: None,
        }
    }

    fn generation_zero(&self) -> Vec<Node> {
        let a = self.f.a();
        // near a: within δ/4; far end: modulus beyond 2/δ, chordally within δ of ∞
        let t_lo = (self.delta / 4.0).ln();
        let t_hi = (2.0 / self.delta + a.abs() + 1.0).ln();
        let n = ((t_hi - t_lo) / RAY_STEP).ceil() as usize;
        (0..=n)
            .map(|i| {
                let t = t_lo + (t_hi - t_lo) * i as f64 / n as f64;
                Self::node(Chart::Ray, t, self.ray_point(t))
            })
            .collect()
    }

    fn ray_point(&self, t: f64) -> Complex64 {
        Complex64::new(self.f.a() - t.exp(), 0.0 * self.sign.factor())
    }

    fn generation_one(&self) -> Vec<Node> {
        let s_max = T_MAX.asinh();
        let n = (2.0 * s_max / CHAIN_STEP).ceil() as usize;
        (0..=n)
            .map(|i| {
                let t = (-s_max + 2.0 * s_max * i as f64 / n as f64).sinh();
                Self::node(Chart::Chain, t, Complex64::new(t, PI * self.sign.factor()))
            })
            .collect()
    }

    fn tail_point(&self, generation: u32, end: End, x: f64) -> Complex64 {
        Complex64::new(x, self.sign.factor() * tail_theta(self.f.a(), generation, end, x))
    }

    fn base_generation(chart: Chart) -> u32 {
        match chart {
            Chart::Ray => 0,
            Chart::Chain => 1,
            Chart::Tail { generation, .. } => generation,
        }
    }

    /// Evaluates a chart point in generation `g`.
    fn eval_at(&self, chart: Chart, param: f64, g: u32) -> Option<Complex64> {
        let (mut z, from) = match chart {
            Chart::Ray => return (g == 0).then(|| self.ray_point(param)),
            Chart::Chain => (Complex64::new(param, PI * self.sign.factor()), 1),
            Chart::Tail { generation, end } => (self.tail_point(generation, end, param), generation),
        };
        if g < from {
            return None;
        }
        for _ in from..g {
            z = self.lift(z)?;
        }
        Some(z)
    }

    fn eval(&self, chart: Chart, param: f64) -> Option<Complex64> {
        self.eval_at(chart, param, self.generation)
    }

    fn midpoint(chart: Chart, p0: f64, p1: f64) -> f64 {
        match chart {
            Chart::Chain => chain_midpoint(p0, p1),
            Chart::Ray | Chart::Tail { .. } => 0.5 * (p0 + p1),
        }
    }

    fn needs_refinement(&self, p: Complex64, q: Complex64) -> bool {
        if chordal_finite(p, q) > self.delta {
            return true;
        }
        (self.window.contains(p) || self.window.contains(q)) && (p - q).norm() > 0.5 * self.delta
    }

    fn refine(&mut self) -> Result<()> {
        let nodes = std::mem::take(&mut self.nodes);
        let mut out = Vec::with_capacity(nodes.len() * 5 / 4);
        let mut stuck = Stuck::default();
        for pair in nodes.windows(2) {
            out.push(pair[0]);
            if pair[0].splice.is_none() {
                self.bisect(pair[0], pair[1], 0, &mut out, &mut stuck)?;
            }
        }
        if let Some(&last) = nodes.last() {
            out.push(last);
        }
        self.nodes = out;
        self.unresolved = stuck.unresolved;
        self.splices.extend(stuck.splices);
        Ok(())
    }

    /// Finds the generation right after an ancestor passage near `a`
    /// and the arc it implies between `p` and `q`.
    fn passage(&self, p: Node, q: Node) -> Option<Splice> {
        if p.chart != q.chart {
            return None;
        }
        let lowest = Self::base_generation(p.chart).max(2);
        let line_side = |z: Complex64| self.sign.factor() * z.im > 0.5 * PI;
        let ray_param = |z: Complex64| (self.f.a() - z.re).ln();
        for born in (lowest..=self.generation).rev() {
            let u = self.eval_at(p.chart, p.param, born)?;
            let v = self.eval_at(q.chart, q.param, born)?;
            if u.re >= PASSAGE_LOG_RADIUS || v.re >= PASSAGE_LOG_RADIUS {
                continue;
            }
            let arc = match (line_side(u), line_side(v)) {
                (true, true) => SpliceArc::Line(u.re, v.re),
                (false, false) => SpliceArc::Ray(ray_param(u), ray_param(v)),
                (true, false) => SpliceArc::Straddle {
                    t_line: u.re,
                    t_ray: ray_param(v),
                    line_first: true,
                },
                (false, true) => SpliceArc::Straddle {
                    t_line: v.re,
                    t_ray: ray_param(u),
                    line_first: false,
                },
            };
            return Some(Splice { born, arc });
        }
        None
    }

    /// Records an unbisectable pair, as a splice when an ancestor pair
    /// passed `a`.
    fn give_up(&self, p: Node, q: Node, out: &mut [Node], stuck: &mut Stuck) {
        let slot = out.last_mut().filter(|n| n.own && n.param == p.param && n.chart == p.chart);
        match (slot, self.passage(p, q)) {
            (Some(slot), Some(splice)) => {
                slot.splice = Some(self.splices.len() + stuck.splices.len());
                stuck.splices.push(splice);
            }
            _ => stuck.unresolved += 1,
        }
    }

    fn bisect(&self, p: Node, q: Node, depth: u32, out: &mut Vec<Node>, stuck: &mut Stuck) -> Result<()> {
        if !self.needs_refinement(p.z, q.z) {
            return Ok(());
        }
        if p.chart != q.chart || depth >= MAX_BISECTIONS {
            self.give_up(p, q, out, stuck);
            return Ok(());
        }
        let m = Self::midpoint(p.chart, p.param, q.param);
        if m == p.param || m == q.param || !m.is_finite() {
            self.give_up(p, q, out, stuck);
            return Ok(());
        }
        let Some(z) = self.eval(p.chart, m) else {
            self.give_up(p, q, out, stuck);
            return Ok(());
        };
        if out.len() >= SAMPLE_BUDGET {
            return Err(Error::RefinementBudget {
                samples: out.len(),
                partial: Box::new(self.snapshot(out)),
            });
        }
        let mid = Self::node(p.chart, m, z);
        self.bisect(p, mid, depth + 1, out, stuck)?;
        out.push(mid);
        self.bisect(mid, q, depth + 1, out, stuck)
    }

    /// Tail samples for the current generation beyond the end node `from`,
    /// ordered outward and starting at the end node's own real part.
    fn tail_samples(&self, end: End, from: Complex64) -> Vec<Node> {
        let chart = Chart::Tail {
            generation: self.generation,
            end,
        };
        let mut xs = vec![from.re];
        let mut x = from.re.max(1.0);
        while x * TAIL_GROWTH < TAIL_EXTENT {
            x *= TAIL_GROWTH;
            if x > from.re {
                xs.push(x);
            }
        }
        if from.re < TAIL_EXTENT {
            xs.push(TAIL_EXTENT);
        }
        xs.into_iter()
            .map(|x| Self::node(chart, x, self.tail_point(self.generation, end, x)))
            .collect()
    }

    /// Advances to the next generation.
    pub(crate) fn advance(&mut self) -> Result<()> {
        self.generation += 1;
        if self.generation == 1 {
            self.nodes = self.generation_one();
        } else {
            let prev = std::mem::take(&mut self.nodes);
            let mut nodes: Vec<Node> = prev
                .iter()
                .filter_map(|n| self.lift(n.z).map(|z| Node { z, ..*n }))
                .collect();
            if self.generation >= 3 && !nodes.is_empty() {
                let head = self.tail_samples(End::Start, nodes[0].z);
                let tail = self.tail_samples(End::Finish, nodes[nodes.len() - 1].z);
                let mut joined = Vec::with_capacity(nodes.len() + head.len() + tail.len());
                joined.extend(head.into_iter().rev());
                joined.append(&mut nodes);
                joined.extend(tail);
                nodes = joined;
            }
            self.nodes = nodes;
        }
        self.refine()?;
        self.finish_generation();
        Ok(())
    }

    pub(crate) fn generation(&self) -> u32 {
        self.generation
    }

    fn near_infinity(&self, z: Complex64) -> bool {
        chordal_dist(SpherePoint::Finite(z), SpherePoint::Infinity) <= self.delta
    }

    /// Samples of stored generation `m` strictly between chain parameters
    /// `lo < hi`; `None` bounds extend to the curve ends.
    fn arc(&self, m: u32, lo: Option<f64>, hi: Option<f64>) -> &[Node] {
        let list = &self.history[m as usize];
        let chart = if m == 0 { Chart::Ray } else { Chart::Chain };
        let first_past = |bound: f64, strict: bool| {
            list.iter()
                .position(|n| n.own && n.chart == chart && if strict { n.param > bound } else { n.param >= bound })
                .unwrap_or(list.len())
        };
        let start = lo.map_or(0, |t| first_past(t, true));
        let stop = hi.map_or(list.len(), |t| first_past(t, false));
        &list[start..stop.max(start)]
    }

    /// Arc between `t0` and `t1` in stored generation `m`, ordered from
    /// `t0` towards `t1`.
    fn oriented_arc(&self, m: u32, t0: Option<f64>, t1: Option<f64>, forward: bool) -> Vec<Node> {
        let copy = |n: &Node| Node {
            own: false,
            splice: None,
            ..*n
        };
        let arc = self.arc(m, t0, t1);
        if forward {
            arc.iter().map(copy).collect()
        } else {
            arc.iter().rev().map(copy).collect()
        }
    }

    fn splice_nodes(&self, s: Splice) -> Vec<Node> {
        let r = self.generation - s.born;
        match s.arc {
            SpliceArc::Line(t0, t1) => self.oriented_arc(r + 1, Some(t0.min(t1)), Some(t0.max(t1)), t0 <= t1),
            SpliceArc::Ray(t0, t1) => self.oriented_arc(r, Some(t0.min(t1)), Some(t0.max(t1)), t0 <= t1),
            SpliceArc::Straddle {
                t_line,
                t_ray,
                line_first,
            } => {
                // line side runs to the Start end, ray side comes back from the Finish end
                let mut seq = self.oriented_arc(r + 1, None, Some(t_line), false);
                seq.extend(self.oriented_arc(r, Some(t_ray), None, false));
                if !line_first {
                    seq.reverse();
                }
                seq
            }
        }
    }

    /// Inserts spliced arcs and thins runs of samples near `∞`, then stores
    /// the result as the finished generation.
    fn finish_generation(&mut self) {
        let mut full = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            full.push(*n);
            if let Some(id) = n.splice {
                full.extend(self.splice_nodes(self.splices[id]));
            }
        }
        let far: Vec<bool> = full.iter().map(|n| self.near_infinity(n.z)).collect();
        let thinned: Vec<Node> = (0..full.len())
            .filter(|&i| full[i].own || !(far[i - 1] && far[i] && far[i + 1]))
            .map(|i| full[i])
            .collect();
        self.history.push(thinned);
    }

    fn snapshot(&self, nodes: &[Node]) -> SampledCurve {
        let samples: Vec<CurveSample> = nodes
            .iter()
            .map(|n| CurveSample {
                chart: n.chart,
                param: n.param,
                point: SpherePoint::Finite(n.z),
            })
            .collect();
        finish_curve(samples, self.generation, self.sign, self.delta, self.unresolved)
    }

    /// The current generation, with tails cut at the first sample within
    /// chordal δ of infinity and interior runs near `∞` thinned.
    pub(crate) fn curve(&self) -> SampledCurve {
        let nodes = &self.history[self.generation as usize];
        let far: Vec<bool> = nodes.iter().map(|n| self.near_infinity(n.z)).collect();
        let mut lo = 0;
        while lo + 1 < nodes.len() && far[lo + 1] {
            lo += 1;
        }
        let mut hi = nodes.len();
        while hi >= 2 && hi - 1 > lo + 1 && far[hi - 2] {
            hi -= 1;
        }
        let kept: Vec<Node> = (lo..hi)
            .filter(|&i| i == lo || i + 1 == hi || !(far[i - 1] && far[i] && far[i + 1]))
            .map(|i| nodes[i])
            .collect();
        self.snapshot(&kept)
    }
}

#[derive(Default)]
struct Stuck {
    unresolved: usize,
    splices: Vec<Splice>,
}

fn finish_curve(samples: Vec<CurveSample>, generation: u32, sign: Sign, delta: f64, unresolved: usize) -> SampledCurve {
    let max_gap = samples
        .windows(2)
        .map(|w| chordal_dist(w[0].point, w[1].point))
        .fold(0.0, f64::max);
    let to_inf = |s: Option<&CurveSample>| s.map_or(0.0, |s| chordal_dist(s.point, SpherePoint::Infinity));
    let truncation = [to_inf(samples.first()), to_inf(samples.last())];
    SampledCurve {
        samples,
        generation,
        sign,
        resolution: delta,
        max_gap,
        truncation,
        unresolved,
    }
}

/// Samples `γ_k^σ` at chordal resolution `delta`.
pub fn build_gamma(f: &ExpMap, sign: Sign, k: u32, delta: f64, window: Window) -> Result<SampledCurve> {
    let mut b = GammaBuilder::new(f, sign, delta, window)?;
    while b.generation() < k {
        b.advance()?;
    }
    Ok(b.curve())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_window() -> Window {
        Window::new(-4.0, 4.0, -1.0, 4.0).unwrap()
    }

    #[test]
    fn generation_zero_is_the_negative_ray() {
        let f = ExpMap::new(0.5).unwrap();
        let g = build_gamma(&f, Sign::Plus, 0, 0.01, std_window()).unwrap();
        assert!(g.samples.iter().all(|s| {
            let z = s.point.finite().unwrap();
            z.im == 0.0 && z.re < 0.5
        }));
        assert!(g.max_gap <= 0.01);
        assert!(g.truncation[1] <= 0.01);
    }

    #[test]
    fn generation_one_is_the_line_at_pi() {
        let f = ExpMap::new(0.0).unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let g = build_gamma(&f, sign, 1, 0.01, std_window()).unwrap();
            for s in &g.samples {
                assert!((s.point.finite().unwrap().im - sign.factor() * PI).abs() <= 1e-9);
            }
            assert!(g.truncation.iter().all(|&d| d <= 0.01));
            assert!(g.max_gap <= 0.01);
        }
    }

    #[test]
    fn generation_two_matches_closed_form() {
        // γ_2^+ = {x + iθ : e^x sin θ = π, 0 < θ < π}
        let f = ExpMap::new(0.0).unwrap();
        let g = build_gamma(&f, Sign::Plus, 2, 0.01, std_window()).unwrap();
        for z in g.finite_points() {
            let r = z.re.exp() * z.im.sin();
            assert!((r - PI).abs() <= 1e-9 * PI.max(z.re.exp()), "{z}");
        }
    }

    #[test]
    fn tail_chart_agrees_with_pullback() {
        for a in [0.0, 0.8, -0.6] {
            let f = ExpMap::new(a).unwrap();
            // the generation-3 image of the chain endpoints
            for (t, end) in [(-T_MAX, End::Start), (T_MAX, End::Finish)] {
                let mut z = Complex64::new(t, PI);
                for _ in 0..2 {
                    z = f.inv_halfplane(Sign::Plus, z).unwrap();
                }
                let theta = tail_theta(a, 3, end, z.re);
                assert!((theta - z.im).abs() <= 1e-12 * z.im.abs().max(1e-300), "{a} {end:?} {z} {theta}");
            }
        }
    }

    #[test]
    fn tail_chart_satisfies_map_equation() {
        let f = ExpMap::new(0.0).unwrap();
        for x in [7.0, 20.0, 200.0] {
            let z = Complex64::new(x, tail_theta(0.0, 3, End::Start, x));
            // f(z) is on the tail of γ_2: e^X sin θ_2 = π
            let w = f.apply(z).finite().unwrap();
            let theta2 = tail_theta(0.0, 2, End::Start, w.re);
            assert!((w.im - theta2).abs() <= 1e-9 * theta2, "{x}: {w} vs {theta2}");
        }
    }

    #[test]
    fn deep_tails_reach_infinity() {
        let f = ExpMap::new(0.0).unwrap();
        let g = build_gamma(&f, Sign::Plus, 5, 0.01, std_window()).unwrap();
        assert!(g.truncation.iter().all(|&d| d <= 0.01), "{:?}", g.truncation);
    }

    #[test]
    fn rejects_bad_delta() {
        let f = ExpMap::new(0.0).unwrap();
        assert!(build_gamma(&f, Sign::Plus, 1, 0.0, std_window()).is_err());
    }
}
