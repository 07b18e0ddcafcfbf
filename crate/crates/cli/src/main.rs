//! `expdyn`: command-line access to the expdyn toolkit.
//!
//! Exit status: 0 on success, 2 on usage errors, 1 when a computation or
//! file operation fails.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use expdyn::continuum::io::{curve_rows, forest_rows, read_curves_csv, read_forest_csv, write_curves_csv, write_forest_csv, CURVE_HEADER, FOREST_HEADER};
use expdyn::continuum::{
    build_continuum, build_gamma, build_preimage_forest, build_y, connectivity_probe, density_probe, family_summary,
    hausdorff_report,
};
use expdyn::dynamics::OrbitRecord;
use expdyn::numerics::io::{read_points_csv, write_points_csv};
use expdyn::rays::{potential_grid, trace_ray, write_ray_csv, Address, DEFAULT_RAY_TOL};
use expdyn::render::{render_overlay, ImageFormat, OverlaySpec, Palette, RenderConfig, Schedule};
use expdyn::{Error, ExpMap, PointSet, Result, Sign, SpherePoint, Window};

#[derive(Parser, Debug)]
#[command(name = "expdyn", version, about = "Escaping-set experiments for f(z) = exp(z) + a")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct MapArgs {
    /// Parameter a of f(z) = exp(z) + a.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a: f64,
    /// Accept a <= -1 (outside the studied parameter range).
    #[arg(long = "seed-override-a")]
    seed_override_a: bool,
}

impl MapArgs {
    fn map(&self) -> Result<ExpMap> {
        if self.seed_override_a {
            ExpMap::with_override(self.a)
        } else {
            ExpMap::new(self.a)
        }
    }
}

#[derive(Args, Debug)]
struct OutArgs {
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutArgs {
    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn parse_window(s: &str) -> std::result::Result<Window, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// `re,im` or a bare real number.
fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |f: &str| f.parse::<f64>().map_err(|e| format!("{f:?}: {e}"));
    match parts[..] {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected re,im, got {s:?}")),
    }
}

fn parse_sign(s: &str) -> std::result::Result<Sign, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Clone, Debug)]
struct EpsList(Vec<f64>);

fn parse_eps_list(s: &str) -> std::result::Result<EpsList, String> {
    s.split(',')
        .map(|f| f.trim().parse::<f64>().map_err(|e| format!("{f:?}: {e}")))
        .collect::<std::result::Result<_, _>>()
        .map(EpsList)
}

const DEFAULT_WINDOW: &str = "-4,4,-1,4";

#[derive(Subcommand, Debug)]
enum Command {
    /// Forward orbit of one point as JSON.
    Orbit {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Strip itinerary of one point as JSON.
    Itinerary {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        z: Complex64,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// One curve of the pullback family as CSV.
    Curve {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_parser = parse_sign, default_value = "+", allow_hyphen_values = true)]
        sign: Sign,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, value_parser = parse_window, default_value = DEFAULT_WINDOW, allow_hyphen_values = true)]
        window: Window,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Curves of generations 0..=K as CSV; structural summary as JSON.
    Continuum {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_parser = parse_sign, default_value = "+", allow_hyphen_values = true)]
        sign: Sign,
        #[arg(long = "K", default_value_t = 8)]
        k_max: u32,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, value_parser = parse_window, default_value = DEFAULT_WINDOW, allow_hyphen_values = true)]
        window: Window,
        /// Where to write the structural summary; standard output if omitted.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Chordal Hausdorff distances of each curve to the family, as JSON.
    Hausdorff {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_parser = parse_sign, default_value = "+", allow_hyphen_values = true)]
        sign: Sign,
        #[arg(long = "K", default_value_t = 8)]
        k_max: u32,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, value_parser = parse_window, default_value = DEFAULT_WINDOW, allow_hyphen_values = true)]
        window: Window,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Both curve families with vertical translates, as a `re,im` CSV.
    #[command(name = "buildY")]
    BuildY {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long = "K", default_value_t = 8)]
        k_max: u32,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, value_parser = parse_window, default_value = DEFAULT_WINDOW, allow_hyphen_values = true)]
        window: Window,
        /// Translates by 2πik for |k| <= m.
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Preimage forest of a point set (built like `buildY` unless --input).
    Forest {
        #[command(flatten)]
        map: MapArgs,
        /// Root points as a `re,im` CSV.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long = "K", default_value_t = 8)]
        k_max: u32,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, value_parser = parse_window, default_value = DEFAULT_WINDOW, allow_hyphen_values = true)]
        window: Window,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, default_value_t = 8)]
        kmax: i64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// ε-component counts of a point, curve or forest file, as JSON.
    Connect {
        #[arg(long)]
        input: PathBuf,
        /// Strictly decreasing list of ε values.
        #[arg(long, value_parser = parse_eps_list)]
        eps: EpsList,
        /// Sampling resolution used to report the constant c.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, value_parser = parse_window, default_value = DEFAULT_WINDOW, allow_hyphen_values = true)]
        window: Window,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Grid coverage of iterated preimages of a seed, as JSON.
    Density {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_parser = parse_complex, default_value = "-1", allow_hyphen_values = true)]
        z: Complex64,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 6)]
        kmax: i64,
        #[arg(long, default_value_t = 128)]
        grid: usize,
        #[arg(long, value_parser = parse_window, default_value = "-4,4,-4,4", allow_hyphen_values = true)]
        window: Window,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Dynamic ray of a bounded address as CSV.
    Ray {
        #[command(flatten)]
        map: MapArgs,
        /// `HEAD|zeros` or `HEAD|periodic:BLOCK`, e.g. `1,0,-2|periodic:1,0`.
        #[arg(long, allow_hyphen_values = true)]
        address: Address,
        #[arg(long, default_value_t = 0.1)]
        tmin: f64,
        #[arg(long, default_value_t = 8.0)]
        tmax: f64,
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_RAY_TOL)]
        tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Escape-time image with optional overlays.
    Render {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_parser = parse_window, default_value = DEFAULT_WINDOW, allow_hyphen_values = true)]
        window: Window,
        #[arg(long, default_value_t = 800)]
        width: usize,
        #[arg(long, default_value_t = 500)]
        height: usize,
        /// Iteration cap per pixel.
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long = "r-escape", default_value_t = 50.0)]
        r_escape: f64,
        #[arg(long, default_value = "classic")]
        palette: Palette,
        /// Curve, forest or ray CSV, optionally `PATH@#rrggbb`; repeatable.
        #[arg(long)]
        overlay: Vec<OverlaySpec>,
        #[arg(long, default_value = "ppm")]
        format: ImageFormat,
        #[arg(long, default_value_t = 64)]
        tile: usize,
        /// Black background instead of escape coloring.
        #[arg(long = "no-background")]
        no_background: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write_json<T: Serialize>(value: &T, out: &OutArgs) -> Result<()> {
    let mut w = out.writer()?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Reads finite points from a `re,im`, curve or forest CSV.
fn read_any_points(path: &Path) -> Result<PointSet> {
    let text = std::fs::read_to_string(path)?;
    let header: Vec<&str> = text.lines().next().unwrap_or("").split(',').map(str::trim).collect();
    if header == CURVE_HEADER {
        Ok(PointSet::new(read_curves_csv(text.as_bytes())?.into_iter().map(|r| r.point).collect()))
    } else if header == FOREST_HEADER {
        Ok(PointSet::new(
            read_forest_csv(text.as_bytes())?.into_iter().map(|r| SpherePoint::Finite(r.z)).collect(),
        ))
    } else {
        read_points_csv(text.as_bytes())
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Orbit { map, z, n, out } => write_json(&OrbitRecord::from_orbit(&map.map()?.orbit(z, n)), &out),
        Command::Itinerary { map, z, n, out } => {
            write_json(&OrbitRecord::from_itinerary(z, &map.map()?.itinerary(z, n)), &out)
        }
        Command::Curve { map, sign, k, delta, window, out } => {
            let c = build_gamma(&map.map()?, sign, k, delta, window)?;
            write_curves_csv(&curve_rows(&[c]), out.writer()?)
        }
        Command::Continuum { map, sign, k_max, delta, window, summary, out } => {
            let approx = build_continuum(&map.map()?, sign, k_max, delta, window)?;
            let s = family_summary(&approx)?;
            write_curves_csv(&curve_rows(&approx.curves), out.writer()?)?;
            write_json(&s, &OutArgs { out: summary })
        }
        Command::Hausdorff { map, sign, k_max, delta, window, out } => {
            let approx = build_continuum(&map.map()?, sign, k_max, delta, window)?;
            write_json(&hausdorff_report(&approx)?, &out)
        }
        Command::BuildY { map, k_max, delta, window, m, out } => {
            write_points_csv(&build_y(&map.map()?, k_max, delta, window, m)?, out.writer()?)
        }
        Command::Forest { map, input, k_max, delta, m, window, depth, kmax, out } => {
            let f = map.map()?;
            let y0 = match input {
                Some(p) => read_points_csv(File::open(p)?)?,
                None => build_y(&f, k_max, delta, window, m)?,
            };
            let forest = build_preimage_forest(&f, &y0, depth, kmax, window)?;
            write_forest_csv(&forest_rows(&forest), out.writer()?)
        }
        Command::Connect { input, eps, delta, window, out } => {
            let mut set = read_any_points(&input)?;
            if let Some(d) = delta {
                set = set.with_resolution(d);
            }
            write_json(&connectivity_probe(&set, &eps.0, window)?, &out)
        }
        Command::Density { map, z, depth, kmax, grid, window, out } => {
            write_json(&density_probe(&map.map()?, z, depth, kmax, window, grid)?, &out)
        }
        Command::Ray { map, address, tmin, tmax, n, tol, out } => {
            let trace = trace_ray(&map.map()?, &address, &potential_grid(tmin, tmax, n)?, tol)?;
            write_ray_csv(&trace, out.writer()?)
        }
        Command::Render {
            map,
            window,
            width,
            height,
            n,
            r_escape,
            palette,
            overlay,
            format,
            tile,
            no_background,
            out,
        } => {
            let cfg = RenderConfig {
                window,
                width,
                height,
                n_max: n,
                r_escape,
                palette,
                overlays: overlay,
                format,
                tile,
                background: !no_background,
            };
            render_overlay(&map.map()?, &cfg, Schedule::Tiled)?.save(&out, format)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
