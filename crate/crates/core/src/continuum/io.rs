//! Curve files (`generation,sign,param,re,im`) and forest files
//! (`depth,branch_word,re,im`). Numbers are written in shortest round-trip
//! form, so reading a written file gives back identical values.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gamma::SampledCurve;
use super::preimage::{BranchWord, PreimageForest};
use crate::dynamics::Sign;
use crate::error::{Error, Result};
use crate::numerics::io::parse_coord;
use crate::numerics::SpherePoint;

pub const CURVE_HEADER: [&str; 5] = ["generation", "sign", "param", "re", "im"];
pub const FOREST_HEADER: [&str; 4] = ["depth", "branch_word", "re", "im"];

/// One row of a curve file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub generation: u32,
    pub sign: Sign,
    pub param: f64,
    pub point: SpherePoint,
}

/// One row of a forest file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestRow {
    pub depth: usize,
    pub word: BranchWord,
    pub z: Complex64,
}

pub fn curve_rows(curves: &[SampledCurve]) -> Vec<CurveRow> {
    curves
        .iter()
        .flat_map(|c| {
            c.samples.iter().map(move |s| CurveRow {
                generation: c.generation,
                sign: c.sign,
                param: s.param,
                point: s.point,
            })
        })
        .collect()
}

pub fn forest_rows(forest: &PreimageForest) -> Vec<ForestRow> {
    forest
        .levels
        .iter()
        .enumerate()
        .flat_map(|(d, level)| {
            (0..level.len()).map(move |i| ForestRow {
                depth: d,
                word: forest.word(d, i),
                z: level[i].z,
            })
        })
        .collect()
}

fn point_fields(p: SpherePoint) -> [String; 2] {
    match p {
        SpherePoint::Finite(z) => [z.re.to_string(), z.im.to_string()],
        SpherePoint::Infinity => ["inf".into(), "inf".into()],
    }
}

pub fn write_curves_csv<W: Write>(rows: &[CurveRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_HEADER)?;
    for r in rows {
        let [re, im] = point_fields(r.point);
        w.write_record([r.generation.to_string(), r.sign.to_string(), r.param.to_string(), re, im])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_forest_csv<W: Write>(rows: &[ForestRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FOREST_HEADER)?;
    for r in rows {
        w.write_record([r.depth.to_string(), r.word.to_string(), r.z.re.to_string(), r.z.im.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of a headed CSV file with their 1-based line numbers; the header
/// must match `header` exactly.
pub(crate) fn read_table<R: Read>(input: R, header: &[&str]) -> Result<Vec<(usize, Vec<String>)>> {
    let mut r = csv::ReaderBuilder::new().flexible(true).has_headers(false).from_reader(input);
    let mut rows = Vec::new();
    let mut headed = false;
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::parse(i + 1, e.to_string()))?;
        // physical line, blank lines included
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        let fields: Vec<String> = rec.iter().map(|f| f.trim().to_string()).collect();
        if i == 0 {
            if fields.iter().map(String::as_str).ne(header.iter().copied()) {
                return Err(Error::parse(line, format!("expected header `{}`", header.join(","))));
            }
            headed = true;
            continue;
        }
        if fields.len() != header.len() {
            return Err(Error::parse(
                line,
                format!("expected {} fields, found {}", header.len(), fields.len()),
            ));
        }
        rows.push((line, fields));
    }
    if !headed {
        return Err(Error::parse(1, format!("missing header `{}`", header.join(","))));
    }
    Ok(rows)
}

fn parse_point(re: &str, im: &str, line: usize) -> Result<SpherePoint> {
    match (re, im) {
        ("inf", "inf") => Ok(SpherePoint::Infinity),
        _ => SpherePoint::new(parse_coord(re, line)?, parse_coord(im, line)?)
            .map_err(|e| Error::parse(line, e.to_string())),
    }
}

fn parse_int<T: std::str::FromStr>(field: &str, what: &str, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    field
        .parse::<T>()
        .map_err(|e| Error::parse(line, format!("bad {what} {field:?}: {e}")))
}

pub fn read_curves_csv<R: Read>(input: R) -> Result<Vec<CurveRow>> {
    read_table(input, &CURVE_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            Ok(CurveRow {
                generation: parse_int(&f[0], "generation", line)?,
                sign: f[1].parse().map_err(|e: Error| Error::parse(line, e.to_string()))?,
                param: parse_coord(&f[2], line)?,
                point: parse_point(&f[3], &f[4], line)?,
            })
        })
        .collect()
}

pub fn read_forest_csv<R: Read>(input: R) -> Result<Vec<ForestRow>> {
    read_table(input, &FOREST_HEADER)?
        .into_iter()
        .map(|(line, f)| {
            let z = parse_point(&f[2], &f[3], line)?
                .finite()
                .ok_or_else(|| Error::parse(line, "forest points must be finite"))?;
            Ok(ForestRow {
                depth: parse_int(&f[0], "depth", line)?,
                word: f[1].parse().map_err(|e: Error| Error::parse(line, e.to_string()))?,
                z,
            })
        })
        .collect()
}
