//! Monte Carlo simulation of multiband ultra-narrowband IoT uplinks and
//! solvers for assigning base stations to bands.

pub mod assign;
pub mod channel;
pub mod config;
pub mod error;
pub mod harness;
pub mod model;
pub mod phy;
pub mod rng;
pub mod traffic;
pub mod training;

pub use config::SimConfig;
pub use error::{Error, Result};
pub use model::{Assignment, Band, DecodeStats, Point2D, SourceKind, Topology, TransmissionEvent};
