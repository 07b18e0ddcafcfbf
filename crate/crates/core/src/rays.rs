//! Dynamic rays `g_s` for bounded addresses, traced by pulling a far-right
//! seed back along the address.
//!
//! Potentials are transported by `E(t) = max(e^t + a, t + 1 + a)`. For a
//! potential `t` let `D` be the last index with `t_D <= 690`. The point
//! `t_{D+1} + 2πi s_{D+1}` is still a float; one level further the seed is
//! only representable in log form, and pulled back once it becomes
//! `t_{D+1} + 2πi s_{D+1} + log(1 + 2πi s_{D+2} e^{-t_{D+1}})`. Both seeds
//! are pulled back to level 0 with the strip-centered branches `s_j`; the
//! deeper one is reported and their distance is the convergence gap.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::continuum::io::read_table;
use crate::dynamics::{ExpMap, TerminatedBy, PRECISION_LIMIT};
use crate::error::{Error, Result};
use crate::numerics::io::parse_coord;
use crate::numerics::{chordal_finite, MapValue, OVERFLOW_LEDGE};

pub const DEFAULT_RAY_TOL: f64 = 1e-10;
/// Distance to the real axis that counts as landing on it.
pub const REAL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "entries", rename_all = "lowercase")]
pub enum Tail {
    Zeros,
    Periodic(Vec<i64>),
}

/// Address `s_0 s_1 …`: a finite head followed by zeros or a periodic block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Address {
    head: Vec<i64>,
    tail: Tail,
}

impl Address {
    pub fn new(head: Vec<i64>, tail: Tail) -> Result<Self> {
        if matches!(&tail, Tail::Periodic(p) if p.is_empty()) {
            return Err(Error::invalid("periodic tail must be nonempty"));
        }
        Ok(Address { head, tail })
    }

    pub fn zeros() -> Self {
        Address {
            head: Vec::new(),
            tail: Tail::Zeros,
        }
    }

    pub fn periodic(block: Vec<i64>) -> Result<Self> {
        Address::new(Vec::new(), Tail::Periodic(block))
    }

    pub fn head(&self) -> &[i64] {
        &self.head
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn entry(&self, n: usize) -> i64 {
        match (self.head.get(n), &self.tail) {
            (Some(&s), _) => s,
            (None, Tail::Zeros) => 0,
            (None, Tail::Periodic(p)) => p[(n - self.head.len()) % p.len()],
        }
    }

    pub fn prefix(&self, n: usize) -> Vec<i64> {
        (0..n).map(|i| self.entry(i)).collect()
    }

    /// The address `s_1 s_2 …`.
    pub fn shift(&self) -> Address {
        match (&self.head[..], &self.tail) {
            ([_, rest @ ..], tail) => Address {
                head: rest.to_vec(),
                tail: tail.clone(),
            },
            ([], Tail::Zeros) => self.clone(),
            ([], Tail::Periodic(p)) => {
                let mut p = p.clone();
                p.rotate_left(1);
                Address {
                    head: Vec::new(),
                    tail: Tail::Periodic(p),
                }
            }
        }
    }

    /// The address `(-s_0)(-s_1)…` of the mirrored ray.
    pub fn neg(&self) -> Address {
        Address {
            head: self.head.iter().map(|s| -s).collect(),
            tail: match &self.tail {
                Tail::Zeros => Tail::Zeros,
                Tail::Periodic(p) => Tail::Periodic(p.iter().map(|s| -s).collect()),
            },
        }
    }

    /// `max |s_n|`.
    pub fn bound(&self) -> u64 {
        let tail: &[i64] = match &self.tail {
            Tail::Zeros => &[],
            Tail::Periodic(p) => p,
        };
        self.head.iter().chain(tail).map(|s| s.unsigned_abs()).max().unwrap_or(0)
    }
}

fn join(entries: &[i64]) -> String {
    entries.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

fn parse_entries(text: &str) -> Result<Vec<i64>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|e| {
            e.trim()
                .parse::<i64>()
                .map_err(|err| Error::invalid(format!("address entry {e:?}: {err}")))
        })
        .collect()
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.tail {
            Tail::Zeros => write!(f, "{}|zeros", join(&self.head)),
            Tail::Periodic(p) => write!(f, "{}|periodic:{}", join(&self.head), join(p)),
        }
    }
}

/// Syntax `HEAD|zeros` or `HEAD|periodic:BLOCK`, entries comma-separated,
/// e.g. `1,0,-2|periodic:1,0` or `0|zeros`.
impl FromStr for Address {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, tail) = s
            .split_once('|')
            .ok_or_else(|| Error::invalid(format!("address {s:?} needs `|zeros` or `|periodic:…`")))?;
        let head = parse_entries(head)?;
        let tail = match tail.trim() {
            "zeros" => Tail::Zeros,
            t => match t.strip_prefix("periodic:") {
                Some(block) => Tail::Periodic(parse_entries(block)?),
                None => return Err(Error::invalid(format!("unknown address tail {t:?}"))),
            },
        };
        Address::new(head, tail)
    }
}

/// The potential transport `E(t) = max(e^t + a, t + 1 + a)`.
pub fn transport(f: &ExpMap, t: f64) -> f64 {
    (t.exp() + f.a()).max(t + 1.0 + f.a())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayPoint {
    pub t: f64,
    pub z: Complex64,
    /// Number of pullbacks applied to the reported seed.
    pub depth: usize,
    /// Chordal distance to the approximation one level shallower.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayTrace {
    pub address: Address,
    pub points: Vec<RayPoint>,
}

impl RayTrace {
    pub fn potentials(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.t)
    }

    pub fn max_gap(&self) -> f64 {
        self.points.iter().map(|p| p.gap).fold(0.0, f64::max)
    }
}

/// `g_s(t)` with its depth and convergence gap.
pub fn ray_point(f: &ExpMap, s: &Address, t: f64) -> Result<RayPoint> {
    if !(t > 0.0 && t <= OVERFLOW_LEDGE) {
        return Err(Error::invalid(format!("ray potential must lie in (0, {OVERFLOW_LEDGE}], got {t}")));
    }
    let mut potentials = vec![t];
    loop {
        let next = transport(f, *potentials.last().expect("nonempty"));
        potentials.push(next);
        if next > OVERFLOW_LEDGE {
            break;
        }
    }
    // potentials = t_0 … t_{D+1}, with t_{D+1} > 690 finite
    let top = potentials.len() - 1;
    let t_top = potentials[top];
    let shallow = Complex64::new(t_top, std::f64::consts::TAU * s.entry(top) as f64);
    let v = std::f64::consts::TAU * s.entry(top + 1) as f64 * (-t_top).exp();
    let deep = shallow + Complex64::new(0.5 * (v * v).ln_1p(), v.atan());
    let pull = |mut z: Complex64| -> Result<Complex64> {
        for j in (0..top).rev() {
            z = f.inv_strip_centered(s.entry(j), z)?;
        }
        Ok(z)
    };
    let (z, z_shallow) = (pull(deep)?, pull(shallow)?);
    Ok(RayPoint {
        t,
        z,
        depth: top + 1,
        gap: chordal_finite(z, z_shallow),
    })
}

/// Traces `g_s` on a positive increasing potential grid; fails if some
/// point's convergence gap exceeds `ray_tol`.
pub fn trace_ray(f: &ExpMap, s: &Address, t_grid: &[f64], ray_tol: f64) -> Result<RayTrace> {
    if t_grid.is_empty() {
        return Err(Error::invalid("potential grid is empty"));
    }
    if t_grid[0] <= 0.0 || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("potential grid must be positive and increasing"));
    }
    if ray_tol.is_nan() || ray_tol <= 0.0 {
        return Err(Error::invalid("ray tolerance must be positive"));
    }
    let points = t_grid
        .par_iter()
        .map(|&t| {
            let p = ray_point(f, s, t)?;
            if p.gap > ray_tol {
                return Err(Error::RayDepthInsufficient {
                    t,
                    gap: p.gap,
                    tol: ray_tol,
                    depth: p.depth,
                });
            }
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RayTrace {
        address: s.clone(),
        points,
    })
}

/// Evenly spaced potentials `lo, …, hi`.
pub fn potential_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(Error::invalid("potential grid needs 0 < lo < hi and n >= 2"));
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

/// Partial classification of the path component of `I(f)` through `z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathClass {
    /// `f^n(z)` lies within `1e-9` of the real axis.
    RealPreimage { n: usize },
    /// The orbit escapes off the real axis. Whether the address has
    /// infinitely many nonzero entries cannot be decided from a finite
    /// prefix, so this is only a candidate.
    HairCandidate { prefix: Vec<i64> },
    BoundedOrbit,
}

/// Iterates `z` while the forward error bound stays below `1e-3`, looking
/// for a landing on the real axis (trusted only while the error bound is
/// below `1e-9`) or for escape past the escape radius.
pub fn classify_path_component(f: &ExpMap, z: Complex64, n_max: usize) -> PathClass {
    let mut cur = z;
    let mut err = f64::EPSILON * z.norm();
    let mut prefix = Vec::new();
    let mut escaped = false;
    for n in 0..=n_max {
        if cur.im.abs() <= REAL_TOL && err <= REAL_TOL {
            return PathClass::RealPreimage { n };
        }
        if err > PRECISION_LIMIT {
            break;
        }
        prefix.push(crate::dynamics::strip_index(cur.im));
        escaped |= cur.re > f.r_escape();
        if n == n_max {
            break;
        }
        match f.apply(cur) {
            MapValue::Huge(_) => {
                escaped = true;
                break;
            }
            MapValue::Finite(w) => {
                err = Complex64::new(w.re - f.a(), w.im).norm() * err + f64::EPSILON * w.norm();
                cur = w;
            }
        }
    }
    if escaped {
        PathClass::HairCandidate { prefix }
    } else {
        PathClass::BoundedOrbit
    }
}

/// True if the itinerary entries agree with the address on their whole
/// length (which ends at overflow, precision loss or the cap).
pub fn itinerary_matches(f: &ExpMap, s: &Address, z: Complex64, n_max: usize) -> (bool, usize, TerminatedBy) {
    let it = f.itinerary(z, n_max);
    let ok = it.entries.iter().enumerate().all(|(n, &e)| e == s.entry(n));
    (ok, it.entries.len(), it.terminated_by)
}

pub const RAY_HEADER: [&str; 5] = ["t", "re", "im", "depth", "gap"];

pub fn write_ray_csv<W: Write>(trace: &RayTrace, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RAY_HEADER)?;
    for p in &trace.points {
        w.write_record([
            p.t.to_string(),
            p.z.re.to_string(),
            p.z.im.to_string(),
            p.depth.to_string(),
            p.gap.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_ray_csv<R: Read>(input: R) -> Result<Vec<RayPoint>> {
    read_table(input, &RAY_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            Ok(RayPoint {
                t: parse_coord(&f[0], line)?,
                z: Complex64::new(parse_coord(&f[1], line)?, parse_coord(&f[2], line)?),
                depth: f[3]
                    .parse()
                    .map_err(|e| Error::parse(line, format!("bad depth {:?}: {e}", f[3])))?,
                gap: parse_coord(&f[4], line)?,
            })
        })
        .collect()
}
