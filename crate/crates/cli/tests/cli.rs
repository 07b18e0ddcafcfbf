use std::f64::consts::PI;
use std::fs::File;
use std::path::Path;
use std::process::{Command, Output};

use expdyn::continuum::io::{curve_rows, forest_rows, read_curves_csv, read_forest_csv};
use expdyn::continuum::{
    build_continuum, build_gamma, build_preimage_forest, build_y, density_probe, family_summary, hausdorff_report,
    ConnectivityReport, DensityReport, FamilySummary, HausdorffReport,
};
use expdyn::dynamics::OrbitRecord;
use expdyn::numerics::io::read_points_csv;
use expdyn::rays::{potential_grid, read_ray_csv, trace_ray, Address};
use expdyn::{ExpMap, Sign, Window};
use num_complex::Complex64;

fn expdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expdyn")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = expdyn(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

fn window() -> Window {
    "-4,4,-1,4".parse().unwrap()
}

#[test]
fn first_curve_sits_at_pi() {
    let dir = tempfile::tempdir().unwrap();
    let g1 = path(dir.path(), "g1.csv");
    ok(&["curve", "--a", "0", "--sign", "+", "--k", "1", "--delta", "0.01", "--window", "-4,4,-1,4", "--out", &g1]);
    let rows = read_curves_csv(File::open(&g1).unwrap()).unwrap();
    assert!(rows.len() > 800);
    for r in &rows {
        let z = r.point.finite().unwrap();
        assert!((z.im - PI).abs() <= 1e-9);
    }
    let f = ExpMap::new(0.0).unwrap();
    let direct = build_gamma(&f, Sign::Plus, 1, 0.01, window()).unwrap();
    assert_eq!(rows, curve_rows(&[direct]));
}

#[test]
fn orbit_json() {
    let out = ok(&["orbit", "--a", "0", "--z", "1", "--n", "10"]);
    let rec: OrbitRecord = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((rec.tag.as_str(), rec.n), ("escaped", Some(3)));
    let f = ExpMap::new(0.0).unwrap();
    assert_eq!(rec, OrbitRecord::from_orbit(&f.orbit(Complex64::new(1.0, 0.0), 10)));
    let rec: OrbitRecord = serde_json::from_slice(&ok(&["orbit", "--z", "0", "--n", "10"]).stdout).unwrap();
    assert_eq!((rec.tag.as_str(), rec.n), ("escaped", Some(4)));
}

#[test]
fn itinerary_json() {
    let out = ok(&["itinerary", "--a", "0", "--z", "0.3,7", "--n", "20"]);
    let rec: OrbitRecord = serde_json::from_slice(&out.stdout).unwrap();
    let f = ExpMap::new(0.0).unwrap();
    let z = Complex64::new(0.3, 7.0);
    assert_eq!(rec, OrbitRecord::from_itinerary(z, &f.itinerary(z, 20)));
    assert_eq!(rec.entries[0], 1);
}

#[test]
fn exit_codes() {
    assert_eq!(expdyn(&["orbit", "--z", "1", "--bogus"]).status.code(), Some(2));
    assert_eq!(expdyn(&["nosuch"]).status.code(), Some(2));
    assert_eq!(expdyn(&["curve", "--window", "1,0,0,1", "--k", "1"]).status.code(), Some(2));
    assert_eq!(expdyn(&["orbit", "--a", "-2", "--z", "0"]).status.code(), Some(1));
    assert_eq!(expdyn(&["orbit", "--a", "-2", "--seed-override-a", "--z", "0"]).status.code(), Some(0));
    assert_eq!(expdyn(&["hausdorff", "--K", "2", "--delta", "0.05"]).status.code(), Some(1));
    assert_eq!(expdyn(&["connect", "--input", "/nonexistent.csv", "--eps", "0.1"]).status.code(), Some(1));
}

#[test]
fn render_is_deterministic_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let g1 = path(dir.path(), "g1.csv");
    ok(&["curve", "--k", "1", "--delta", "0.05", "--out", &g1]);
    let overlay = format!("{g1}@#ffffff");
    let args = |out: &str| -> Vec<String> {
        ["render", "--width", "120", "--height", "75", "--tile", "16", "--overlay", &overlay, "--out", out]
            .map(String::from)
            .to_vec()
    };
    let (a, b, c) = (path(dir.path(), "a.ppm"), path(dir.path(), "b.ppm"), path(dir.path(), "c.ppm"));
    let run = |out: &str, threads: &str| {
        let st = Command::new(env!("CARGO_BIN_EXE_expdyn"))
            .args(args(out))
            .env("EXPDYN_THREADS", threads)
            .status()
            .unwrap();
        assert!(st.success());
    };
    run(&a, "0");
    run(&b, "0");
    run(&c, "1");
    let bytes = std::fs::read(&a).unwrap();
    assert!(bytes.starts_with(b"P6\n120 75\n255\n"));
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    assert_eq!(bytes, std::fs::read(&c).unwrap());
    let png = path(dir.path(), "a.png");
    ok(&["render", "--width", "12", "--height", "9", "--format", "png", "--out", &png]);
    assert!(std::fs::read(&png).unwrap().starts_with(b"\x89PNG"));
}

#[test]
fn malformed_overlay_names_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.csv");
    std::fs::write(&bad, "t,re,im,depth,gap\n1,2,3,4,0\n1,2,oops,4,0\n").unwrap();
    let out = expdyn(&["render", "--width", "4", "--height", "4", "--overlay", &bad, "--out", &path(dir.path(), "x.ppm")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn continuum_and_hausdorff_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, js) = (path(dir.path(), "c.csv"), path(dir.path(), "s.json"));
    ok(&["continuum", "--sign", "-", "--K", "4", "--delta", "0.05", "--window", "-4,4,-4,1", "--out", &csv, "--summary", &js]);
    let f = ExpMap::new(0.0).unwrap();
    let w: Window = "-4,4,-4,1".parse().unwrap();
    let approx = build_continuum(&f, Sign::Minus, 4, 0.05, w).unwrap();
    assert_eq!(read_curves_csv(File::open(&csv).unwrap()).unwrap(), curve_rows(&approx.curves));
    let s: FamilySummary = serde_json::from_reader(File::open(&js).unwrap()).unwrap();
    assert_eq!(s, family_summary(&approx).unwrap());
    let out = ok(&["hausdorff", "--sign", "-", "--K", "4", "--delta", "0.05", "--window", "-4,4,-4,1"]);
    let h: HausdorffReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(h, hausdorff_report(&approx).unwrap());
}

#[test]
fn y_forest_and_connect_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (y, forest) = (path(dir.path(), "y.csv"), path(dir.path(), "f.csv"));
    let w: Window = "-4,4,-4,10".parse().unwrap();
    ok(&["buildY", "--K", "3", "--delta", "0.05", "--window", "-4,4,-4,10", "--m", "1", "--out", &y]);
    let f = ExpMap::new(0.0).unwrap();
    let direct = build_y(&f, 3, 0.05, w, 1).unwrap();
    assert_eq!(read_points_csv(File::open(&y).unwrap()).unwrap().points(), direct.points());
    ok(&["forest", "--input", &y, "--window", "-4,4,-4,10", "--depth", "1", "--kmax", "2", "--out", &forest]);
    let expected = build_preimage_forest(&f, &direct, 1, 2, w).unwrap();
    assert_eq!(read_forest_csv(File::open(&forest).unwrap()).unwrap(), forest_rows(&expected));
    let out = ok(&["connect", "--input", &y, "--eps", "0.5,0.2", "--delta", "0.05", "--window", "-4,4,-4,10"]);
    let r: ConnectivityReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r.points, direct.finite_points().filter(|&z| w.contains(z)).count());
    assert_eq!(r.entries.len(), 2);
    assert_eq!(expdyn(&["connect", "--input", &y, "--eps", "0.1,0.2"]).status.code(), Some(1));
}

#[test]
fn density_round_trip() {
    let out = ok(&["density", "--z", "-1,0", "--depth", "2", "--kmax", "3", "--grid", "32"]);
    let r: DensityReport = serde_json::from_slice(&out.stdout).unwrap();
    let f = ExpMap::new(0.0).unwrap();
    let w: Window = "-4,4,-4,4".parse().unwrap();
    assert_eq!(r, density_probe(&f, Complex64::new(-1.0, 0.0), 2, 3, w, 32).unwrap());
}

#[test]
fn ray_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "r.csv");
    let addr = "1,0,-2|periodic:1,0";
    ok(&["ray", "--a", "0.5", "--address", addr, "--tmin", "0.5", "--tmax", "6", "--n", "12", "--out", &out]);
    let f = ExpMap::new(0.5).unwrap();
    let s: Address = addr.parse().unwrap();
    let trace = trace_ray(&f, &s, &potential_grid(0.5, 6.0, 12).unwrap(), 1e-10).unwrap();
    assert_eq!(read_ray_csv(File::open(&out).unwrap()).unwrap(), trace.points);
    assert_eq!(expdyn(&["ray", "--address", "1|periodic:"]).status.code(), Some(2));
}
