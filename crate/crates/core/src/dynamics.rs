//! The exponential family `f(z) = exp(z) + a`: forward orbits, inverse
//! branches and itineraries.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{safe_exp, LogMagnitude, MapValue, SpherePoint};

pub const DEFAULT_ESCAPE_RADIUS: f64 = 50.0;
pub const DEFAULT_N_MAX: usize = 64;
/// Distance from an odd multiple of π at which itinerary recording stops.
pub const TOL_BOUNDARY: f64 = 1e-9;
/// Forward error bound on `im f^n(z)` beyond which strip indices are noise.
pub const PRECISION_LIMIT: f64 = 1e-3;

const TWO_PI: f64 = 2.0 * PI;

/// Which half-plane / strip pair an inverse branch works on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" | "p" => Ok(Sign::Plus),
            "-" | "minus" | "m" => Ok(Sign::Minus),
            other => Err(Error::invalid(format!("unknown sign {other:?}"))),
        }
    }
}

/// `f(z) = exp(z) + a` together with the numerical escape settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpMap {
    a: f64,
    r_escape: f64,
    n_max_default: usize,
    /// `a > -1`: the real axis escapes and the connectivity results apply.
    strict: bool,
}

impl ExpMap {
    /// Standard mode; requires `a > -1`.
    pub fn new(a: f64) -> Result<Self> {
        if !(a.is_finite() && a > -1.0) {
            return Err(Error::invalid(format!(
                "parameter a = {a} must satisfy a > -1 (use the override to explore a <= -1)"
            )));
        }
        Ok(ExpMap {
            a,
            r_escape: DEFAULT_ESCAPE_RADIUS,
            n_max_default: DEFAULT_N_MAX,
            strict: true,
        })
    }

    /// Accepts any finite `a`. For `a <= -1` the real-axis escape
    /// guarantees no longer hold and [`ExpMap::is_standard`] is false.
    pub fn with_override(a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::invalid(format!("parameter a = {a} must be finite")));
        }
        Ok(ExpMap {
            a,
            r_escape: DEFAULT_ESCAPE_RADIUS,
            n_max_default: DEFAULT_N_MAX,
            strict: a > -1.0,
        })
    }

    pub fn with_escape_radius(mut self, r: f64) -> Result<Self> {
        if !(r >= 10.0 && r.is_finite()) {
            return Err(Error::invalid(format!("escape threshold {r} must be >= 10")));
        }
        self.r_escape = r;
        Ok(self)
    }

    pub fn with_n_max(mut self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n_max must be at least 1"));
        }
        self.n_max_default = n;
        Ok(self)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn r_escape(&self) -> f64 {
        self.r_escape
    }

    pub fn n_max(&self) -> usize {
        self.n_max_default
    }

    pub fn is_standard(&self) -> bool {
        self.strict
    }

    /// The asymptotic value `a` as a complex number.
    pub fn asymptotic_value(&self) -> Complex64 {
        Complex64::new(self.a, 0.0)
    }

    /// `exp(z) + a`. In log form the additive `a` is dropped: its relative
    /// effect is below `|a| e^{-690}`.
    pub fn apply(&self, z: Complex64) -> MapValue {
        match safe_exp(z) {
            MapValue::Finite(w) => MapValue::Finite(Complex64::new(w.re + self.a, w.im)),
            huge => huge,
        }
    }

    /// Iterates at most `n_max` times, stopping at the first iterate with
    /// real part above the escape threshold.
    ///
    /// Escape is only a candidate certificate off the real axis: a point of
    /// large modulus can map back near `a`.
    pub fn orbit(&self, z: Complex64, n_max: usize) -> EscapeResult {
        let mut orbit = vec![z];
        if z.re > self.r_escape {
            return EscapeResult {
                outcome: Outcome::Escaped { n: 0 },
                orbit,
            };
        }
        let mut cur = z;
        for n in 1..=n_max {
            match self.apply(cur) {
                MapValue::Huge(value) => {
                    return EscapeResult {
                        outcome: Outcome::Overflowed { n, value },
                        orbit,
                    }
                }
                MapValue::Finite(w) => {
                    orbit.push(w);
                    cur = w;
                    if w.re > self.r_escape {
                        return EscapeResult {
                            outcome: Outcome::Escaped { n },
                            orbit,
                        };
                    }
                }
            }
        }
        EscapeResult {
            outcome: Outcome::Bounded {
                n_max,
                last: SpherePoint::from(cur),
            },
            orbit,
        }
    }

    fn offset(&self, w: Complex64) -> Result<Complex64> {
        if w.re.is_nan() || w.im.is_nan() || w.re.is_infinite() || w.im.is_infinite() {
            return Err(Error::invalid(format!("inverse branch needs a finite point, got {w}")));
        }
        let d = Complex64::new(w.re - self.a, w.im);
        if d.re == 0.0 && d.im == 0.0 {
            return Err(Error::AsymptoticValue);
        }
        Ok(d)
    }

    /// Branch `L_σ` of `f^{-1}` from the closed half-plane `{σ·im w ≥ 0}`
    /// (minus `a`) onto the closed strip between 0 and `σπ`.
    pub fn inv_halfplane(&self, sign: Sign, w: Complex64) -> Result<Complex64> {
        let outside = match sign {
            Sign::Plus => w.im < 0.0,
            Sign::Minus => w.im > 0.0,
        };
        if outside {
            return Err(Error::WrongHalfPlane { sign, w });
        }
        let mut d = self.offset(w)?;
        if d.im == 0.0 {
            // pick the side of the real axis the branch extends to
            d.im = 0.0 * sign.factor();
        }
        Ok(Complex64::new(d.norm().ln(), d.im.atan2(d.re)))
    }

    /// Branch `L_k` of `f^{-1}` on `ℂ ∖ [a, ∞)` with imaginary parts in
    /// `(2πk, 2π(k+1))`.
    pub fn inv_strip(&self, k: i64, w: Complex64) -> Result<Complex64> {
        if w.im == 0.0 && w.re >= self.a {
            return Err(Error::BranchCut { w });
        }
        let d = self.offset(w)?;
        let mut theta = d.im.atan2(d.re);
        if theta <= 0.0 {
            theta += TWO_PI;
        }
        Ok(Complex64::new(d.norm().ln(), theta + TWO_PI * k as f64))
    }

    /// Strip-centered branch with imaginary part in `((2s-1)π, (2s+1)π]`;
    /// the cut is `(-∞, a)`.
    pub(crate) fn inv_strip_centered(&self, s: i64, w: Complex64) -> Result<Complex64> {
        let d = self.offset(w)?;
        let mut theta = d.im.atan2(d.re);
        if theta == -PI {
            theta = PI;
        }
        Ok(Complex64::new(d.norm().ln(), theta + TWO_PI * s as f64))
    }

    /// Strip indices `s_n = round(im f^n(z) / 2π)` along the forward orbit.
    pub fn itinerary(&self, z: Complex64, n_max: usize) -> Itinerary {
        let mut entries = Vec::new();
        let mut cur = z;
        let mut err = f64::EPSILON * z.norm();
        let mut exact_real = z.im == 0.0;
        for n in 0..n_max {
            if !exact_real && err > PRECISION_LIMIT {
                return Itinerary::new(entries, TerminatedBy::PrecisionLoss { n });
            }
            if odd_pi_distance(cur.im) <= TOL_BOUNDARY {
                return Itinerary::new(entries, TerminatedBy::BoundaryHit { n });
            }
            entries.push(strip_index(cur.im));
            if n + 1 == n_max {
                break;
            }
            match self.apply(cur) {
                MapValue::Huge(_) => return Itinerary::new(entries, TerminatedBy::Overflow { n: n + 1 }),
                MapValue::Finite(w) => {
                    let scale = Complex64::new(w.re - self.a, w.im).norm();
                    err = scale * err + f64::EPSILON * w.norm();
                    exact_real &= w.im == 0.0;
                    cur = w;
                }
            }
        }
        Itinerary::new(entries, TerminatedBy::CapReached)
    }
}

/// Nearest integer to `im / 2π`.
pub fn strip_index(im: f64) -> i64 {
    (im / TWO_PI).round() as i64
}

/// Distance from `y` to the nearest odd multiple of π.
pub fn odd_pi_distance(y: f64) -> f64 {
    let m = y / PI;
    let odd = 2.0 * ((m - 1.0) / 2.0).round() + 1.0;
    (y - odd * PI).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum Outcome {
    Escaped { n: usize },
    Bounded { n_max: usize, last: SpherePoint },
    Overflowed { n: usize, value: LogMagnitude },
}

/// Outcome of bounded-horizon iteration plus the iterates actually computed
/// (starting with the input point).
#[derive(Clone, Debug, PartialEq)]
pub struct EscapeResult {
    pub outcome: Outcome,
    pub orbit: Vec<Complex64>,
}

impl EscapeResult {
    pub fn escaped(&self) -> bool {
        !matches!(self.outcome, Outcome::Bounded { .. })
    }

    /// Step at which escape or overflow was detected.
    pub fn escape_step(&self) -> Option<usize> {
        match self.outcome {
            Outcome::Escaped { n } | Outcome::Overflowed { n, .. } => Some(n),
            Outcome::Bounded { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum TerminatedBy {
    CapReached,
    Overflow { n: usize },
    BoundaryHit { n: usize },
    PrecisionLoss { n: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Itinerary {
    pub entries: Vec<i64>,
    pub terminated_by: TerminatedBy,
}

impl Itinerary {
    fn new(entries: Vec<i64>, terminated_by: TerminatedBy) -> Self {
        Itinerary { entries, terminated_by }
    }
}

/// JSON export of orbit and itinerary results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub input: SpherePoint,
    pub tag: String,
    /// Escape/overflow step, or the iteration cap for bounded orbits.
    pub n: Option<usize>,
    pub steps: Vec<SpherePoint>,
    pub entries: Vec<i64>,
    pub terminated_by: Option<TerminatedBy>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub overflow: Option<LogMagnitude>,
}

impl OrbitRecord {
    pub fn from_orbit(result: &EscapeResult) -> Self {
        let (tag, n, overflow) = match result.outcome {
            Outcome::Escaped { n } => ("escaped", Some(n), None),
            Outcome::Bounded { n_max, .. } => ("bounded", Some(n_max), None),
            Outcome::Overflowed { n, value } => ("overflowed", Some(n), Some(value)),
        };
        OrbitRecord {
            input: SpherePoint::from(result.orbit[0]),
            tag: tag.to_owned(),
            n,
            steps: result.orbit.iter().map(|&z| SpherePoint::from(z)).collect(),
            entries: Vec::new(),
            terminated_by: None,
            overflow,
        }
    }

    pub fn from_itinerary(input: Complex64, it: &Itinerary) -> Self {
        OrbitRecord {
            input: SpherePoint::from(input),
            tag: "itinerary".to_owned(),
            n: None,
            steps: Vec::new(),
            entries: it.entries.clone(),
            terminated_by: Some(it.terminated_by),
            overflow: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn construction_rules() {
        assert!(ExpMap::new(-1.0).is_err());
        assert!(ExpMap::new(f64::NAN).is_err());
        let f = ExpMap::with_override(-2.0).unwrap();
        assert!(!f.is_standard());
        assert!(ExpMap::new(0.0).unwrap().with_escape_radius(9.0).is_err());
        assert!(ExpMap::new(0.0).unwrap().with_n_max(0).is_err());
        assert_eq!(ExpMap::new(0.5).unwrap().n_max(), 64);
    }

    #[test]
    fn apply_examples() {
        let f0 = ExpMap::new(0.0).unwrap();
        assert_eq!(f0.apply(c(0.0, 0.0)), MapValue::Finite(c(1.0, 0.0)));
        let f1 = ExpMap::new(1.0).unwrap();
        assert!(close(f1.apply(c(0.0, PI)).finite().unwrap(), c(0.0, 0.0), 1e-15));
        for a in [-0.5, 0.0, 2.0] {
            let f = ExpMap::new(a).unwrap();
            for k in -3..=3 {
                let zk = c(0.0, (2 * k + 1) as f64 * PI);
                assert!(close(f.apply(zk).finite().unwrap(), c(a - 1.0, 0.0), 1e-14));
            }
        }
        assert!(matches!(f0.apply(c(700.0, 1.0)), MapValue::Huge(_)));
    }

    #[test]
    fn orbit_examples() {
        let f = ExpMap::new(0.0).unwrap();
        let r = f.orbit(c(1.0, 0.0), 10);
        assert_eq!(r.outcome, Outcome::Escaped { n: 3 });
        let expected = [1.0, std::f64::consts::E, 15.154262241479262, 3814279.1047602175];
        assert_eq!(r.orbit.len(), 4);
        for (z, want) in r.orbit.iter().zip(expected) {
            assert!((z.re - want).abs() <= 1e-12 * want, "{z} vs {want}");
        }

        let r0 = f.orbit(c(0.0, 0.0), 10);
        assert_eq!(r0.outcome, Outcome::Escaped { n: 4 });

        let b = f.orbit(c(0.0, 0.0), 3);
        match b.outcome {
            Outcome::Bounded { n_max: 3, last: SpherePoint::Finite(z) } => {
                assert!((z.re - 15.154262241479262).abs() < 1e-12)
            }
            other => panic!("{other:?}"),
        }

        let g = ExpMap::new(-0.5).unwrap();
        assert!(g.orbit(c(-100.0, 0.0), 64).escaped());
        assert_eq!(f.orbit(c(60.0, 0.0), 5).outcome, Outcome::Escaped { n: 0 });
    }

    #[test]
    fn orbit_overflow_with_large_threshold() {
        let f = ExpMap::new(0.0).unwrap().with_escape_radius(1e300).unwrap();
        let r = f.orbit(c(1.0, 0.0), 10);
        match r.outcome {
            Outcome::Overflowed { n: 4, value } => assert!(value.log_abs > 690.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn halfplane_examples() {
        let f = ExpMap::new(0.7).unwrap();
        let a = f.a();
        assert!(close(f.inv_halfplane(Sign::Plus, c(a - 1.0, 0.0)).unwrap(), c(0.0, PI), 1e-15));
        assert!(close(f.inv_halfplane(Sign::Plus, c(a, 1.0)).unwrap(), c(0.0, PI / 2.0), 1e-15));
        assert!(close(f.inv_halfplane(Sign::Minus, c(a - 1.0, 0.0)).unwrap(), c(0.0, -PI), 1e-15));
        // real w > a: both branches give the real logarithm
        let p = f.inv_halfplane(Sign::Plus, c(a + 2.0, 0.0)).unwrap();
        let m = f.inv_halfplane(Sign::Minus, c(a + 2.0, 0.0)).unwrap();
        assert_eq!(p, m);
        assert_eq!(p, c(2f64.ln(), 0.0));
    }

    #[test]
    fn halfplane_errors() {
        let f = ExpMap::new(0.0).unwrap();
        assert!(matches!(f.inv_halfplane(Sign::Plus, c(0.0, 0.0)), Err(Error::AsymptoticValue)));
        assert!(matches!(f.inv_halfplane(Sign::Plus, c(1.0, -0.1)), Err(Error::WrongHalfPlane { .. })));
        assert!(matches!(f.inv_halfplane(Sign::Minus, c(1.0, 0.1)), Err(Error::WrongHalfPlane { .. })));
        let msg = f.inv_halfplane(Sign::Minus, c(0.0, 0.0)).unwrap_err().to_string();
        assert_eq!(msg, "asymptotic value has no preimage under this branch");
        // negative zero counts as the closed upper half-plane boundary
        assert!(close(f.inv_halfplane(Sign::Plus, c(-1.0, -0.0)).unwrap(), c(0.0, PI), 1e-15));
    }

    #[test]
    fn strip_examples() {
        let f = ExpMap::new(0.3).unwrap();
        let w = c(f.a() - 1.0, 0.0);
        assert!(close(f.inv_strip(0, w).unwrap(), c(0.0, PI), 1e-15));
        assert_eq!(f.inv_strip(0, w).unwrap(), f.inv_halfplane(Sign::Plus, w).unwrap());
        assert!(close(f.inv_strip(-1, w).unwrap(), c(0.0, -PI), 1e-15));
        let w2 = c(-3.0, -0.4);
        for k in [-5, 2, 7] {
            let base = f.inv_strip(0, w2).unwrap();
            assert_eq!(f.inv_strip(k, w2).unwrap(), base + c(0.0, 2.0 * PI * k as f64));
        }
        assert!(matches!(f.inv_strip(0, c(0.3, 0.0)), Err(Error::BranchCut { .. })));
        assert!(matches!(f.inv_strip(3, c(5.0, 0.0)), Err(Error::BranchCut { .. })));
        assert_eq!(f.inv_strip(0, c(5.0, 0.0)).unwrap_err().to_string(), "branch-cut point 5+0i");
        // just below the slit lands near the top of the strip
        let below = f.inv_strip(0, c(5.0, -1e-12)).unwrap();
        assert!(below.im < 2.0 * PI && below.im > 2.0 * PI - 1e-11);
    }

    #[test]
    fn centered_branch_range() {
        let f = ExpMap::new(0.0).unwrap();
        let z = f.inv_strip_centered(2, c(3.0, 0.5)).unwrap();
        assert!(z.im > 3.0 * PI && z.im < 5.0 * PI);
        assert!(close(f.inv_strip_centered(0, c(-1.0, 0.0)).unwrap(), c(0.0, PI), 1e-15));
        assert!(close(f.inv_strip_centered(0, c(-1.0, -0.0)).unwrap(), c(0.0, PI), 1e-15));
    }

    #[test]
    fn itinerary_examples() {
        let f = ExpMap::new(0.0).unwrap();
        let it = f.itinerary(c(2.0, 0.0), 64);
        assert!(it.entries.iter().all(|&s| s == 0));
        assert_eq!(it.terminated_by, TerminatedBy::Overflow { n: 3 });
        assert_eq!(it.entries.len(), 3);

        let it = f.itinerary(c(0.0, PI / 2.0), 3);
        assert_eq!(it.entries, vec![0, 0, 0]);
        assert_eq!(it.terminated_by, TerminatedBy::CapReached);

        for a in [-0.5, 0.0, 3.0] {
            let g = ExpMap::new(a).unwrap();
            let it = g.itinerary(c(0.4, PI), 10);
            assert_eq!(it.terminated_by, TerminatedBy::BoundaryHit { n: 0 });
            assert!(it.entries.is_empty());
        }

        let it = f.itinerary(c(0.0, 2.0 * PI * 3.0 + 0.2), 1);
        assert_eq!(it.entries, vec![3]);
    }

    #[test]
    fn itinerary_stops_on_precision_loss() {
        let f = ExpMap::new(0.0).unwrap();
        // grows through ~1e21 before overflowing
        let it = f.itinerary(c(3.9, 0.3), 64);
        assert!(matches!(it.terminated_by, TerminatedBy::PrecisionLoss { .. } | TerminatedBy::Overflow { .. }));
        assert!(!it.entries.is_empty());
    }

    #[test]
    fn odd_multiple_distance() {
        assert!(odd_pi_distance(PI) < 1e-15);
        assert!(odd_pi_distance(-3.0 * PI) < 1e-15);
        assert!((odd_pi_distance(0.0) - PI).abs() < 1e-15);
        assert!((odd_pi_distance(2.0 * PI) - PI).abs() < 1e-15);
    }

    #[test]
    fn record_roundtrip() {
        let f = ExpMap::new(0.0).unwrap();
        let rec = OrbitRecord::from_orbit(&f.orbit(c(1.0, 0.5), 10));
        let s = serde_json::to_string(&rec).unwrap();
        assert_eq!(serde_json::from_str::<OrbitRecord>(&s).unwrap(), rec);
        let it = f.itinerary(c(0.2, 0.1), 8);
        let rec = OrbitRecord::from_itinerary(c(0.2, 0.1), &it);
        let s = serde_json::to_string(&rec).unwrap();
        assert!(s.contains("\"terminated_by\""));
        assert_eq!(serde_json::from_str::<OrbitRecord>(&s).unwrap(), rec);
    }
}
