//! Sphere arithmetic, chordal and Hausdorff distances, ε-chain connectivity.

pub mod io;
pub mod kdtree;
mod pointset;
mod sphere;

pub use pointset::{
    eps_components, hausdorff_discrete, hausdorff_estimate, HausdorffEstimate, Metric, PointSet, UnionFind,
};
pub use sphere::{
    chordal_dist, chordal_finite, normalize_arg, safe_exp, LogMagnitude, MapValue, SpherePoint, OVERFLOW_LEDGE,
};
