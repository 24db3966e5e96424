//! Exact projective geometry of Y-meshes: pins, filtrations, mesh propagation,
//! y-variables, period-one quivers, lifted quivers and fractal audits.

pub mod arith;
pub mod error;
pub mod filtration;
pub mod fractal;
pub mod ij;
pub mod io;
pub mod lifted;
pub mod linalg;
pub mod mesh;
pub mod pin;
pub mod projective;
pub mod quiver;
pub mod verify;
pub mod yvars;

pub use arith::{ExtRational, Q};
pub use error::{Error, Result};
pub use pin::{lat, Lat, YPin};
pub use projective::{Flat, ProjPoint};
