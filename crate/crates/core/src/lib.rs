//! Simulation and analysis of boundary-vector-cell driven place cells on a
//! ground robot with planar and vertically tuned range sensing.

pub mod agent;
pub mod bvc;
pub mod config;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod metrics;
pub mod pcn;
pub mod recording;
pub mod render;
pub mod sensor;

pub use error::{Error, Result};
