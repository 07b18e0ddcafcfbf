//! Pullback curve families `γ_k^σ`, the glued set `Y`, its preimage forest,
//! and the experiments run on them.

mod family;
mod gamma;
pub mod io;
mod preimage;
mod probe;

pub use family::{
    build_continuum, family_summary, hausdorff_report, ContinuumApprox, FamilySummary, HausdorffEntry,
    HausdorffReport,
};
pub use gamma::{build_gamma, Chart, CurveSample, End, SampledCurve, SAMPLE_BUDGET};
pub use preimage::{
    build_preimage_forest, build_y, gluing_point, BranchWord, ForestPoint, PreimageForest, DEFAULT_K_MAX,
};
pub use probe::{
    connectivity_probe, density_probe, ConnectivityEntry, ConnectivityReport, DensityReport, DENSITY_MAX_DEPTH,
    DENSITY_MAX_GRID,
};
