//! Point-set files: CSV with header `re,im` (`inf` marks the point at
//! infinity) and JSON arrays of `{re, im}` objects or `"inf"`.

use std::io::{Read, Write};

use super::pointset::PointSet;
use super::sphere::SpherePoint;
use crate::error::{Error, Result};

pub(crate) fn parse_coord(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::parse(line, format!("bad number {field:?}: {e}")))
}

pub fn write_points_csv<W: Write>(set: &PointSet, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["re", "im"])?;
    for p in set.points() {
        match p {
            SpherePoint::Finite(z) => w.write_record([z.re.to_string(), z.im.to_string()])?,
            SpherePoint::Infinity => w.write_record(["inf", "inf"])?,
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_points_csv<R: Read>(input: R) -> Result<PointSet> {
    let mut r = csv::ReaderBuilder::new().flexible(true).has_headers(false).from_reader(input);
    let mut points = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 1;
        if i == 0 {
            if rec.len() != 2 || rec[0].trim() != "re" || rec[1].trim() != "im" {
                return Err(Error::parse(line, "expected header `re,im`"));
            }
            continue;
        }
        let fields: Vec<&str> = rec.iter().map(str::trim).collect();
        if fields.contains(&"inf") {
            if !fields.iter().all(|f| *f == "inf" || f.is_empty()) {
                return Err(Error::parse(line, "`inf` row must not carry numeric fields"));
            }
            points.push(SpherePoint::Infinity);
            continue;
        }
        if fields.len() != 2 {
            return Err(Error::parse(line, format!("expected 2 fields, found {}", fields.len())));
        }
        let (re, im) = (parse_coord(fields[0], line)?, parse_coord(fields[1], line)?);
        points.push(SpherePoint::new(re, im).map_err(|e| Error::parse(line, e.to_string()))?);
    }
    Ok(PointSet::new(points))
}

pub fn write_points_json<W: Write>(set: &PointSet, out: W) -> Result<()> {
    serde_json::to_writer(out, set.points())?;
    Ok(())
}

pub fn read_points_json<R: Read>(input: R) -> Result<PointSet> {
    let points: Vec<SpherePoint> = serde_json::from_reader(input)?;
    Ok(PointSet::new(points))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PointSet {
        PointSet::new(vec![
            SpherePoint::new(0.1, -2.5).unwrap(),
            SpherePoint::Infinity,
            SpherePoint::new(-1e-300, 7e12).unwrap(),
        ])
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let mut buf = Vec::new();
        write_points_csv(&sample(), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("re,im\n"));
        assert!(text.contains("inf,inf"));
        assert_eq!(read_points_csv(&buf[..]).unwrap(), sample());
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let mut buf = Vec::new();
        write_points_json(&sample(), &mut buf).unwrap();
        assert_eq!(read_points_json(&buf[..]).unwrap(), sample());
    }

    #[test]
    fn csv_errors_name_the_line() {
        let err = read_points_csv("re,im\n1,2\n3,oops\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = read_points_csv("x,y\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = read_points_csv("re,im\nNaN,0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert_eq!(read_points_csv("re,im\ninf\n".as_bytes()).unwrap().points(), &[SpherePoint::Infinity]);
    }
}
