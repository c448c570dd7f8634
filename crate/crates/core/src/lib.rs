//! Evolving-surface Taylor–Hood finite elements for the incompressible
//! Navier–Stokes equations on moving spheres.

pub mod ad;
pub mod analysis;
pub mod checks;
pub mod assembly;
pub mod config;
pub mod error;
pub mod fespace;
pub mod forms;
pub mod geometry;
pub mod lagrange;
pub mod mesh;
pub mod output;
pub mod quadrature;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
