//! Microwave lensing and distributed cavity phase (DCP) frequency shifts of an atomic
//! fountain clock, the measurement analyses used to bound them, and the uncertainty budget.

pub mod analysis;
pub mod budget;
pub mod cli;
pub mod config;
pub mod constants;
pub mod dcp;
pub mod error;
pub mod fountain;
pub mod lensing;
pub mod quadrature;
pub mod special;
pub mod vec2;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};
pub use fountain::{
    BeamShape, CloudState, DetectionMode, DetectionProfile, Fountain, FountainGeometry,
    MicrowaveDrive, TimingSchedule,
};
pub use vec2::Vec2;
