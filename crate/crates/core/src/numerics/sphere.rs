//! Points of the Riemann sphere, the chordal metric, and an exponential that
//! switches to log-polar form instead of overflowing.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Real parts above this are returned in log form by [`safe_exp`].
pub const OVERFLOW_LEDGE: f64 = 690.0;

/// A point of the Riemann sphere: a finite complex number or the single
/// point at infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub const INFINITY: SpherePoint = SpherePoint::Infinity;

    /// Builds a finite point. NaN components are rejected; an infinite
    /// component collapses to the canonical point at infinity.
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if re.is_nan() || im.is_nan() {
            return Err(Error::NanComponent { re, im });
        }
        if re.is_infinite() || im.is_infinite() {
            return Ok(SpherePoint::Infinity);
        }
        Ok(SpherePoint::Finite(Complex64::new(re, im)))
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            SpherePoint::Finite(z) => Some(z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn conj(&self) -> Self {
        match *self {
            SpherePoint::Finite(z) => SpherePoint::Finite(z.conj()),
            SpherePoint::Infinity => SpherePoint::Infinity,
        }
    }

    /// Image on the unit sphere under inverse stereographic projection
    /// (0 goes to the south pole, infinity to the north pole). Euclidean
    /// distance between images equals [`chordal_dist`].
    pub fn to_unit_sphere(&self) -> [f64; 3] {
        let z = match *self {
            SpherePoint::Infinity => return [0.0, 0.0, 1.0],
            SpherePoint::Finite(z) => z,
        };
        let r = z.norm();
        if r <= 1.0 {
            let s = 1.0 + r * r;
            [2.0 * z.re / s, 2.0 * z.im / s, (r * r - 1.0) / s]
        } else {
            let rho = 1.0 / r;
            let s = 1.0 + rho * rho;
            let (u, v) = (z.re / r, z.im / r);
            [2.0 * u * rho / s, 2.0 * v * rho / s, (1.0 - rho * rho) / s]
        }
    }
}

impl From<Complex64> for SpherePoint {
    /// Unchecked conversion for values known to be finite; infinite
    /// components map to the point at infinity.
    fn from(z: Complex64) -> Self {
        debug_assert!(!z.re.is_nan() && !z.im.is_nan());
        if z.re.is_finite() && z.im.is_finite() {
            SpherePoint::Finite(z)
        } else {
            SpherePoint::Infinity
        }
    }
}

impl fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpherePoint::Finite(z) => write!(f, "{}", z),
            SpherePoint::Infinity => f.write_str("inf"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SpherePointRepr {
    Finite { re: f64, im: f64 },
    Token(String),
}

impl Serialize for SpherePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            SpherePoint::Finite(z) => SpherePointRepr::Finite { re: z.re, im: z.im },
            SpherePoint::Infinity => SpherePointRepr::Token("inf".to_owned()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match SpherePointRepr::deserialize(deserializer)? {
            SpherePointRepr::Finite { re, im } => SpherePoint::new(re, im).map_err(D::Error::custom),
            SpherePointRepr::Token(t) if t == "inf" => Ok(SpherePoint::Infinity),
            SpherePointRepr::Token(t) => Err(D::Error::custom(format!("unknown point token {t:?}"))),
        }
    }
}

/// A complex number stored as `exp(log_abs + i*arg)`, used once the modulus
/// no longer fits in a float.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogMagnitude {
    pub log_abs: f64,
    pub arg: f64,
}

impl LogMagnitude {
    pub fn new(log_abs: f64, arg: f64) -> Self {
        LogMagnitude {
            log_abs,
            arg: normalize_arg(arg),
        }
    }
}

/// Result of evaluating the exponential (or the map built on it).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MapValue {
    Finite(Complex64),
    Huge(LogMagnitude),
}

impl MapValue {
    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            MapValue::Finite(z) => Some(z),
            MapValue::Huge(_) => None,
        }
    }

    pub fn to_sphere(&self) -> SpherePoint {
        match *self {
            MapValue::Finite(z) => SpherePoint::from(z),
            MapValue::Huge(_) => SpherePoint::Infinity,
        }
    }
}

/// Reduces an angle to (-pi, pi].
pub fn normalize_arg(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let r = theta.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// `exp(z)`, or its log-polar form when `re z` exceeds [`OVERFLOW_LEDGE`].
pub fn safe_exp(z: Complex64) -> MapValue {
    if z.re <= OVERFLOW_LEDGE {
        MapValue::Finite(z.exp())
    } else {
        MapValue::Huge(LogMagnitude::new(z.re, z.im))
    }
}

/// `1/z` without squaring the modulus.
fn stable_inv(z: Complex64) -> Complex64 {
    let r = z.norm();
    Complex64::new((z.re / r) / r, -(z.im / r) / r)
}

/// Chordal distance on the Riemann sphere (unit-sphere normalization, so
/// the diameter is 2).
pub fn chordal_dist(p: SpherePoint, q: SpherePoint) -> f64 {
    match (p, q) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
        (SpherePoint::Finite(z), SpherePoint::Infinity) | (SpherePoint::Infinity, SpherePoint::Finite(z)) => {
            2.0 / 1f64.hypot(z.norm())
        }
        (SpherePoint::Finite(z), SpherePoint::Finite(w)) => chordal_finite(z, w),
    }
}

/// Chordal distance between two finite points.
pub fn chordal_finite(z: Complex64, w: Complex64) -> f64 {
    if z == w {
        return 0.0;
    }
    // canonical order makes the result exactly symmetric
    let (mut z, mut w) = if (z.re, z.im) <= (w.re, w.im) { (z, w) } else { (w, z) };
    // inversion z -> 1/z is a chordal isometry; use it to keep moduli small
    if z.norm() > 1.0 && w.norm() > 1.0 {
        z = stable_inv(z);
        w = stable_inv(w);
    }
    let d = 2.0 * (z - w).norm() / 1f64.hypot(z.norm()) / 1f64.hypot(w.norm());
    d.min(2.0)
}
