//! Escape-time images with curve, forest and ray overlays.
//!
//! Pixels sample the orbit of their center; row 0 is the top of the window.
//! Colors depend only on the integer escape step, so output bytes do not
//! depend on tiling or thread count.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::continuum::io::{read_curves_csv, read_forest_csv, CURVE_HEADER, FOREST_HEADER};
use crate::dynamics::ExpMap;
use crate::error::{Error, Result};
use crate::numerics::SpherePoint;
use crate::rays::{read_ray_csv, RAY_HEADER};
use crate::window::Window;

pub const MAX_SIDE: usize = 8192;
pub const DEFAULT_TILE: usize = 64;
/// Environment variable capping render threads; `0` or unset means automatic.
pub const THREADS_ENV: &str = "EXPDYN_THREADS";

pub type Rgb = [u8; 3];

pub const BOUNDED_COLOR: Rgb = [0, 0, 0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Palette {
    /// Sixteen-color cycle indexed by step.
    #[default]
    Classic,
    /// Brightness falling linearly with step.
    Gray,
}

const CLASSIC: [Rgb; 16] = [
    [66, 30, 15],
    [25, 7, 26],
    [9, 1, 47],
    [4, 4, 73],
    [0, 7, 100],
    [12, 44, 138],
    [24, 82, 177],
    [57, 125, 209],
    [134, 181, 229],
    [211, 236, 248],
    [241, 233, 191],
    [248, 201, 95],
    [255, 170, 0],
    [204, 128, 0],
    [153, 87, 0],
    [106, 52, 3],
];

impl Palette {
    pub fn color(self, step: Option<usize>, n_max: usize) -> Rgb {
        let Some(step) = step else { return BOUNDED_COLOR };
        match self {
            Palette::Classic => CLASSIC[step % CLASSIC.len()],
            Palette::Gray => {
                let v = (255 - 200 * step.min(n_max) / n_max.max(1)) as u8;
                [v, v, v]
            }
        }
    }
}

impl FromStr for Palette {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classic" => Ok(Palette::Classic),
            "gray" | "grey" => Ok(Palette::Gray),
            other => Err(Error::invalid(format!("unknown palette {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImageFormat {
    #[default]
    Ppm,
    Png,
}

impl FromStr for ImageFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ppm" => Ok(ImageFormat::Ppm),
            "png" => Ok(ImageFormat::Png),
            other => Err(Error::invalid(format!("unknown image format {other:?}"))),
        }
    }
}

/// An overlay file and the color to draw it in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlaySpec {
    pub path: PathBuf,
    pub color: Rgb,
}

impl FromStr for OverlaySpec {
    type Err = Error;

    /// `PATH` or `PATH@#rrggbb`.
    fn from_str(s: &str) -> Result<Self> {
        let (path, color) = match s.rsplit_once("@#") {
            Some((p, hex)) => (p, parse_hex(hex)?),
            None => (s, [255, 255, 255]),
        };
        Ok(OverlaySpec {
            path: PathBuf::from(path),
            color,
        })
    }
}

fn parse_hex(hex: &str) -> Result<Rgb> {
    let bad = || Error::invalid(format!("color must be #rrggbb, got #{hex}"));
    if hex.len() != 6 || !hex.is_ascii() {
        return Err(bad());
    }
    let byte = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|_| bad());
    Ok([byte(0)?, byte(2)?, byte(4)?])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderConfig {
    pub window: Window,
    pub width: usize,
    pub height: usize,
    pub n_max: usize,
    pub r_escape: f64,
    pub palette: Palette,
    pub overlays: Vec<OverlaySpec>,
    pub format: ImageFormat,
    pub tile: usize,
    /// Draw the escape coloring under the overlays; black otherwise.
    pub background: bool,
}

impl RenderConfig {
    pub fn new(window: Window, width: usize, height: usize) -> Self {
        RenderConfig {
            window,
            width,
            height,
            n_max: crate::dynamics::DEFAULT_N_MAX,
            r_escape: crate::dynamics::DEFAULT_ESCAPE_RADIUS,
            palette: Palette::default(),
            overlays: Vec::new(),
            format: ImageFormat::default(),
            tile: DEFAULT_TILE,
            background: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_SIDE).contains(&self.width) || !(1..=MAX_SIDE).contains(&self.height) {
            return Err(Error::invalid(format!("image sides must be in 1..={MAX_SIDE}")));
        }
        if self.tile == 0 {
            return Err(Error::invalid("tile size must be positive"));
        }
        if self.n_max == 0 {
            return Err(Error::invalid("n_max must be positive"));
        }
        if !(self.r_escape > 0.0 && self.r_escape.is_finite()) {
            return Err(Error::invalid("escape radius must be positive and finite"));
        }
        Window::new(self.window.x_min, self.window.x_max, self.window.y_min, self.window.y_max)?;
        Ok(())
    }

    /// Complex coordinate of the center of pixel `(col, row)`.
    pub fn pixel_center(&self, col: usize, row: usize) -> Complex64 {
        let w = &self.window;
        Complex64::new(
            w.x_min + (col as f64 + 0.5) * w.width() / self.width as f64,
            w.y_max - (row as f64 + 0.5) * w.height() / self.height as f64,
        )
    }

    /// Continuous pixel coordinates with pixel centers at integers.
    pub fn to_pixel(&self, z: Complex64) -> (f64, f64) {
        let w = &self.window;
        (
            (z.re - w.x_min) / w.width() * self.width as f64 - 0.5,
            (w.y_max - z.im) / w.height() * self.height as f64 - 0.5,
        )
    }
}

/// Row-major RGB pixel buffer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<Rgb>,
}

impl Image {
    pub fn filled(width: usize, height: usize, color: Rgb) -> Self {
        Image {
            width,
            height,
            pixels: vec![color; width * height],
        }
    }

    pub fn get(&self, col: usize, row: usize) -> Rgb {
        self.pixels[row * self.width + col]
    }

    fn blend(&mut self, col: i64, row: i64, color: Rgb, alpha: u32) {
        if col < 0 || row < 0 || col as usize >= self.width || row as usize >= self.height || alpha == 0 {
            return;
        }
        let p = &mut self.pixels[row as usize * self.width + col as usize];
        for c in 0..3 {
            p[c] = ((p[c] as u32 * (255 - alpha) + color[c] as u32 * alpha + 127) / 255) as u8;
        }
    }

    pub fn raw_bytes(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.raw_bytes());
        out
    }

    pub fn write<W: Write>(&self, format: ImageFormat, mut out: W) -> Result<()> {
        match format {
            ImageFormat::Ppm => out.write_all(&self.to_ppm())?,
            ImageFormat::Png => {
                use image::ImageEncoder;
                image::codecs::png::PngEncoder::new(&mut out).write_image(
                    &self.raw_bytes(),
                    self.width as u32,
                    self.height as u32,
                    image::ExtendedColorType::Rgb8,
                )?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path, format: ImageFormat) -> Result<()> {
        self.write(format, BufWriter::new(File::create(path)?))
    }

    /// Reads a binary PPM with maximum value 255.
    pub fn read_ppm<R: Read>(mut input: R) -> Result<Image> {
        let mut data = Vec::new();
        input.read_to_end(&mut data)?;
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < data.len() && data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while pos < data.len() && !data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(Error::invalid("truncated PPM header"));
            }
            fields.push(String::from_utf8_lossy(&data[start..pos]).into_owned());
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| Error::invalid(format!("bad PPM header field {s:?}")));
        if fields[0] != "P6" || num(&fields[3])? != 255 {
            return Err(Error::invalid("expected a P6 PPM with maximum 255"));
        }
        let (width, height) = (num(&fields[1])?, num(&fields[2])?);
        let body = &data[pos + 1..];
        if body.len() != width * height * 3 {
            return Err(Error::invalid("PPM pixel data has the wrong length"));
        }
        Ok(Image {
            width,
            height,
            pixels: body.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    Serial,
    /// Tiles rendered on the rayon pool sized by `EXPDYN_THREADS`.
    Tiled,
}

/// Threads requested through `EXPDYN_THREADS` (`0` = automatic).
pub fn requested_threads() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("{THREADS_ENV} must be a nonnegative integer, got {v:?}"))),
        Err(_) => Ok(0),
    }
}

fn escape_map(f: &ExpMap, cfg: &RenderConfig) -> Result<ExpMap> {
    ExpMap::with_override(f.a())?.with_escape_radius(cfg.r_escape)?.with_n_max(cfg.n_max)
}

fn pixel_color(f: &ExpMap, cfg: &RenderConfig, col: usize, row: usize) -> Rgb {
    if !cfg.background {
        return BOUNDED_COLOR;
    }
    let step = f.orbit(cfg.pixel_center(col, row), cfg.n_max).escape_step();
    cfg.palette.color(step, cfg.n_max)
}

fn render_tile(f: &ExpMap, cfg: &RenderConfig, tile: (usize, usize)) -> Vec<Rgb> {
    let (c0, r0) = (tile.0 * cfg.tile, tile.1 * cfg.tile);
    let (c1, r1) = ((c0 + cfg.tile).min(cfg.width), (r0 + cfg.tile).min(cfg.height));
    let mut out = Vec::with_capacity((c1 - c0) * (r1 - r0));
    for row in r0..r1 {
        for col in c0..c1 {
            out.push(pixel_color(f, cfg, col, row));
        }
    }
    out
}

/// Escape coloring of the window; `Tiled` and `Serial` give identical bytes.
pub fn render_escape(f: &ExpMap, cfg: &RenderConfig, schedule: Schedule) -> Result<Image> {
    cfg.validate()?;
    let g = escape_map(f, cfg)?;
    let mut img = Image::filled(cfg.width, cfg.height, BOUNDED_COLOR);
    match schedule {
        Schedule::Serial => {
            for row in 0..cfg.height {
                for col in 0..cfg.width {
                    img.pixels[row * cfg.width + col] = pixel_color(&g, cfg, col, row);
                }
            }
        }
        Schedule::Tiled => {
            let (tx, ty) = (cfg.width.div_ceil(cfg.tile), cfg.height.div_ceil(cfg.tile));
            let tiles: Vec<(usize, usize)> = (0..ty).flat_map(|j| (0..tx).map(move |i| (i, j))).collect();
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(requested_threads()?)
                .build()
                .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
            let rendered: Vec<Vec<Rgb>> = pool.install(|| tiles.par_iter().map(|&t| render_tile(&g, cfg, t)).collect());
            // merge in tile order
            for (&(i, j), buf) in tiles.iter().zip(rendered) {
                let (c0, r0) = (i * cfg.tile, j * cfg.tile);
                let w = (c0 + cfg.tile).min(cfg.width) - c0;
                for (k, line) in buf.chunks_exact(w).enumerate() {
                    let start = (r0 + k) * cfg.width + c0;
                    img.pixels[start..start + w].copy_from_slice(line);
                }
            }
        }
    }
    Ok(img)
}

/// Overlay geometry in the complex plane.
#[derive(Clone, Debug, PartialEq)]
pub enum OverlayData {
    /// Polylines; a curve is split wherever it passes through infinity.
    Polylines(Vec<Vec<Complex64>>),
    /// Isolated points, drawn one pixel each.
    Points(Vec<Complex64>),
}

/// Reads a curve, forest or ray CSV, recognized by its header line.
pub fn load_overlay(path: &Path) -> Result<OverlayData> {
    let mut text = String::new();
    BufReader::new(File::open(path)?).read_to_string(&mut text)?;
    parse_overlay(&text)
}

pub fn parse_overlay(text: &str) -> Result<OverlayData> {
    let header: Vec<&str> = text.lines().next().unwrap_or("").split(',').map(str::trim).collect();
    if header == CURVE_HEADER {
        let rows = read_curves_csv(text.as_bytes())?;
        let mut lines: Vec<Vec<Complex64>> = Vec::new();
        let mut key = None;
        for r in rows {
            let k = Some((r.generation, r.sign));
            if k != key {
                lines.push(Vec::new());
                key = k;
            }
            match r.point {
                SpherePoint::Finite(z) => lines.last_mut().expect("pushed").push(z),
                SpherePoint::Infinity => lines.push(Vec::new()),
            }
        }
        lines.retain(|l| !l.is_empty());
        Ok(OverlayData::Polylines(lines))
    } else if header == FOREST_HEADER {
        Ok(OverlayData::Points(read_forest_csv(text.as_bytes())?.into_iter().map(|r| r.z).collect()))
    } else if header == RAY_HEADER {
        Ok(OverlayData::Polylines(vec![read_ray_csv(text.as_bytes())?
            .into_iter()
            .map(|p| p.z)
            .collect()]))
    } else {
        Err(Error::parse(
            1,
            format!(
                "unrecognized overlay header; expected `{}`, `{}` or `{}`",
                CURVE_HEADER.join(","),
                FOREST_HEADER.join(","),
                RAY_HEADER.join(",")
            ),
        ))
    }
}

/// Clips the segment `p + u(q - p)`, `u ∈ [0, 1]`, to the box.
fn liang_barsky(p: (f64, f64), q: (f64, f64), lo: (f64, f64), hi: (f64, f64)) -> Option<((f64, f64), (f64, f64))> {
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    let (mut u0, mut u1) = (0.0f64, 1.0f64);
    for (pk, qk) in [(-dx, p.0 - lo.0), (dx, hi.0 - p.0), (-dy, p.1 - lo.1), (dy, hi.1 - p.1)] {
        if pk == 0.0 {
            if qk < 0.0 {
                return None;
            }
        } else {
            let r = qk / pk;
            if pk < 0.0 {
                u0 = u0.max(r);
            } else {
                u1 = u1.min(r);
            }
        }
    }
    (u0 <= u1).then_some(((p.0 + u0 * dx, p.1 + u0 * dy), (p.0 + u1 * dx, p.1 + u1 * dy)))
}

fn alpha(coverage: f64) -> u32 {
    (coverage.clamp(0.0, 1.0) * 255.0).round() as u32
}

/// Xiaolin Wu's anti-aliased line between pixel coordinates.
fn wu_line(img: &mut Image, p: (f64, f64), q: (f64, f64), color: Rgb) {
    let (mut x0, mut y0, mut x1, mut y1) = (p.0, p.1, q.0, q.1);
    let steep = (y1 - y0).abs() > (x1 - x0).abs();
    if steep {
        std::mem::swap(&mut x0, &mut y0);
        std::mem::swap(&mut x1, &mut y1);
    }
    if x0 > x1 {
        std::mem::swap(&mut x0, &mut x1);
        std::mem::swap(&mut y0, &mut y1);
    }
    let dx = x1 - x0;
    let gradient = if dx == 0.0 { 1.0 } else { (y1 - y0) / dx };
    let mut plot = |x: i64, y: i64, c: f64| {
        if steep {
            img.blend(y, x, color, alpha(c));
        } else {
            img.blend(x, y, color, alpha(c));
        }
    };
    let fpart = |v: f64| v - v.floor();
    // endpoints
    let xend = x0.round();
    let yend = y0 + gradient * (xend - x0);
    let xgap = 1.0 - fpart(x0 + 0.5);
    let (xpx1, ypx1) = (xend as i64, yend.floor() as i64);
    plot(xpx1, ypx1, (1.0 - fpart(yend)) * xgap);
    plot(xpx1, ypx1 + 1, fpart(yend) * xgap);
    let mut intery = yend + gradient;
    let xend = x1.round();
    let yend = y1 + gradient * (xend - x1);
    let xgap = fpart(x1 + 0.5);
    let (xpx2, ypx2) = (xend as i64, yend.floor() as i64);
    plot(xpx2, ypx2, (1.0 - fpart(yend)) * xgap);
    plot(xpx2, ypx2 + 1, fpart(yend) * xgap);
    for x in xpx1 + 1..xpx2 {
        let y = intery.floor() as i64;
        plot(x, y, 1.0 - fpart(intery));
        plot(x, y + 1, fpart(intery));
        intery += gradient;
    }
}

/// Draws overlay geometry onto `img` in order.
pub fn draw_overlay(img: &mut Image, cfg: &RenderConfig, data: &OverlayData, color: Rgb) {
    let lo = (-1.0, -1.0);
    let hi = (img.width as f64, img.height as f64);
    match data {
        OverlayData::Points(points) => {
            for &z in points {
                let (x, y) = cfg.to_pixel(z);
                if x.is_finite() && y.is_finite() {
                    img.blend(x.round() as i64, y.round() as i64, color, 255);
                }
            }
        }
        OverlayData::Polylines(lines) => {
            for line in lines {
                for seg in line.windows(2) {
                    let (p, q) = (cfg.to_pixel(seg[0]), cfg.to_pixel(seg[1]));
                    if ![p.0, p.1, q.0, q.1].iter().all(|v| v.is_finite()) {
                        continue;
                    }
                    if let Some((a, b)) = liang_barsky(p, q, lo, hi) {
                        wu_line(img, a, b, color);
                    }
                }
            }
        }
    }
}

/// Escape background (if enabled) with every overlay of `cfg` drawn on top.
pub fn render_overlay(f: &ExpMap, cfg: &RenderConfig, schedule: Schedule) -> Result<Image> {
    let layers = cfg
        .overlays
        .iter()
        .map(|o| {
            load_overlay(&o.path)
                .map(|d| (d, o.color))
                .map_err(|e| match e {
                    Error::Parse { line, message } => Error::Parse {
                        line,
                        message: format!("{}: {message}", o.path.display()),
                    },
                    other => other,
                })
        })
        .collect::<Result<Vec<_>>>()?;
    render_layers(f, cfg, &layers, schedule)
}

/// Like [`render_overlay`] with overlay geometry already in memory.
pub fn render_layers(f: &ExpMap, cfg: &RenderConfig, layers: &[(OverlayData, Rgb)], schedule: Schedule) -> Result<Image> {
    let mut img = render_escape(f, cfg, schedule)?;
    for (data, color) in layers {
        draw_overlay(&mut img, cfg, data, *color);
    }
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn f0() -> ExpMap {
        ExpMap::new(0.0).unwrap()
    }

    #[test]
    fn single_pixel_at_origin_escapes_at_step_four() {
        let mut cfg = RenderConfig::new(Window::new(-1.0, 1.0, -1.0, 1.0).unwrap(), 1, 1);
        cfg.n_max = 10;
        let img = render_escape(&f0(), &cfg, Schedule::Serial).unwrap();
        assert_eq!(img.pixels, vec![Palette::Classic.color(Some(4), 10)]);
        assert_eq!(cfg.pixel_center(0, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn real_row_always_escapes() {
        for a in [-0.9, 0.0, 1.0] {
            let f = ExpMap::new(a).unwrap();
            let mut cfg = RenderConfig::new(Window::new(-6.0, 6.0, -1.0, 1.0).unwrap(), 64, 3);
            cfg.palette = Palette::Gray;
            let img = render_escape(&f, &cfg, Schedule::Tiled).unwrap();
            assert_eq!(cfg.pixel_center(0, 1).im, 0.0);
            assert!((0..64).all(|c| img.get(c, 1) != BOUNDED_COLOR), "a={a}");
        }
    }

    #[test]
    fn tiled_equals_serial() {
        let mut cfg = RenderConfig::new(Window::new(-4.0, 4.0, -1.0, 4.0).unwrap(), 67, 45);
        cfg.tile = 16;
        let f = f0();
        let serial = render_escape(&f, &cfg, Schedule::Serial).unwrap();
        let tiled = render_escape(&f, &cfg, Schedule::Tiled).unwrap();
        assert_eq!(serial, tiled);
        assert_eq!(serial.to_ppm(), render_escape(&f, &cfg, Schedule::Serial).unwrap().to_ppm());
    }

    #[test]
    fn ppm_and_png_round_trip() {
        let cfg = RenderConfig::new(Window::new(-2.0, 2.0, -2.0, 2.0).unwrap(), 9, 5);
        let img = render_escape(&f0(), &cfg, Schedule::Serial).unwrap();
        let ppm = img.to_ppm();
        assert!(ppm.starts_with(b"P6\n9 5\n255\n"));
        assert_eq!(Image::read_ppm(ppm.as_slice()).unwrap(), img);
        let mut png = Vec::new();
        img.write(ImageFormat::Png, &mut png).unwrap();
        let decoded = image::load_from_memory(&png).unwrap().to_rgb8();
        assert_eq!(decoded.into_raw(), img.raw_bytes());
    }

    #[test]
    fn line_at_pi_lands_on_its_row() {
        let w = Window::new(-4.0, 4.0, -1.0, 4.0).unwrap();
        let mut cfg = RenderConfig::new(w, 80, 50);
        cfg.background = false;
        let line = OverlayData::Polylines(vec![vec![Complex64::new(-10.0, PI), Complex64::new(10.0, PI)]]);
        let mut img = Image::filled(80, 50, BOUNDED_COLOR);
        draw_overlay(&mut img, &cfg, &line, [255, 255, 255]);
        let row = cfg.to_pixel(Complex64::new(0.0, PI)).1;
        let lit: Vec<usize> = (0..50).filter(|&r| img.get(40, r) != BOUNDED_COLOR).collect();
        assert!(!lit.is_empty());
        assert!(lit.iter().all(|&r| (r as f64 - row).abs() < 1.0), "{lit:?} vs {row}");
        assert!((0..80).all(|c| img.get(c, row.round() as usize) != BOUNDED_COLOR));
    }

    #[test]
    fn conjugate_overlays_mirror() {
        let w = Window::new(-3.0, 3.0, -2.0, 2.0).unwrap();
        let mut cfg = RenderConfig::new(w, 60, 40);
        cfg.background = false;
        let curve: Vec<Complex64> = (0..200).map(|i| {
            let x = -3.0 + 0.03 * i as f64;
            Complex64::new(x, 1.0 + 0.5 * x.sin())
        }).collect();
        let conj: Vec<Complex64> = curve.iter().map(|z| z.conj()).collect();
        let mut a = Image::filled(60, 40, BOUNDED_COLOR);
        draw_overlay(&mut a, &cfg, &OverlayData::Polylines(vec![curve]), [255, 255, 255]);
        let mut b = Image::filled(60, 40, BOUNDED_COLOR);
        draw_overlay(&mut b, &cfg, &OverlayData::Polylines(vec![conj]), [255, 255, 255]);
        for r in 0..40 {
            for c in 0..60 {
                let (x, y) = (a.get(c, r)[0] as i32, b.get(c, 39 - r)[0] as i32);
                assert!((x - y).abs() <= 2, "({c},{r}) {x} {y}");
            }
        }
    }

    #[test]
    fn clipping() {
        let b = liang_barsky((-10.0, 5.0), (20.0, 5.0), (0.0, 0.0), (10.0, 10.0)).unwrap();
        assert_eq!(b, ((0.0, 5.0), (10.0, 5.0)));
        assert!(liang_barsky((-10.0, 20.0), (20.0, 20.0), (0.0, 0.0), (10.0, 10.0)).is_none());
        let far = liang_barsky((5.0, 5.0), (1e300, 5.0), (0.0, 0.0), (10.0, 10.0)).unwrap();
        assert_eq!(far.1 .0, 10.0);
    }

    #[test]
    fn overlay_parsing() {
        let curve = "generation,sign,param,re,im\n1,+,0,0,3.14\n1,+,1,1,3.14\n1,+,2,inf,inf\n1,+,3,2,3.14\n2,+,0,0,1\n";
        match parse_overlay(curve).unwrap() {
            OverlayData::Polylines(l) => assert_eq!(l.iter().map(Vec::len).collect::<Vec<_>>(), vec![2, 1, 1]),
            other => panic!("{other:?}"),
        }
        let forest = "depth,branch_word,re,im\n0,,1,2\n1,0,0.5,1\n";
        assert_eq!(parse_overlay(forest).unwrap(), OverlayData::Points(vec![Complex64::new(1.0, 2.0), Complex64::new(0.5, 1.0)]));
        assert!(matches!(parse_overlay("x,y\n1,2\n"), Err(Error::Parse { line: 1, .. })));
        let bad = "t,re,im,depth,gap\n1,2,3,4,0\n1,2,three,4,0\n";
        assert!(matches!(parse_overlay(bad), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn config_validation_and_parsing() {
        let w = Window::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        assert!(RenderConfig::new(w, 0, 10).validate().is_err());
        assert!(RenderConfig::new(w, 8193, 10).validate().is_err());
        let mut cfg = RenderConfig::new(w, 8, 8);
        cfg.tile = 0;
        assert!(cfg.validate().is_err());
        let o: OverlaySpec = "g1.csv@#ff8000".parse().unwrap();
        assert_eq!(o.color, [255, 128, 0]);
        assert_eq!(o.path, PathBuf::from("g1.csv"));
        assert!("g.csv@#zz0000".parse::<OverlaySpec>().is_err());
        assert_eq!("png".parse::<ImageFormat>().unwrap(), ImageFormat::Png);
        assert!("gif".parse::<ImageFormat>().is_err());
        assert_eq!("gray".parse::<Palette>().unwrap(), Palette::Gray);
    }
}
