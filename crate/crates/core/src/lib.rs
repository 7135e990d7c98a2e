//! Representations of signals on graphs.
//!
//! Bases and dictionaries range from global (graph Fourier bases, polynomial
//! dictionaries) to local (local-set wavelets and dictionaries built from a
//! multiresolution partition tree). On top of them sit sparse approximation,
//! sampling design and recovery, statistical detection, and an epidemic
//! simulation used to compare sampling strategies.

pub mod approx;
pub mod detection;
pub mod dictionary;
pub mod epidemics;
pub mod experiment;
pub mod error;
pub mod graph;
mod linalg;
pub mod partition;
pub mod sampling;
pub mod spectral;

pub use error::{Error, Result};
