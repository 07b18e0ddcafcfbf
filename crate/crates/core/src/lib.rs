//! Numerical experiments on the escaping set of `f(z) = exp(z) + a`.
//!
//! The crate covers sphere arithmetic and distances ([`numerics`]), forward
//! and inverse dynamics ([`dynamics`]), pullback curve families and their
//! preimage forests ([`continuum`]), dynamic rays ([`rays`]) and an
//! escape-time renderer ([`render`]).

pub mod continuum;
pub mod dynamics;
pub mod error;
pub mod numerics;
pub mod rays;
pub mod render;
pub mod window;

pub use dynamics::{EscapeResult, ExpMap, Itinerary, Outcome, Sign, TerminatedBy};
pub use error::{Error, Result};
pub use numerics::{PointSet, SpherePoint};
pub use window::Window;
