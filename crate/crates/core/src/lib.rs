//! Fall detection from recorded depth-map sequences fused with wrist/hip
//! accelerometer data.
//!
//! The pipeline goes perception → decision: floor-plane estimation
//! ([`geometry`]), depth background modeling ([`background`]), person
//! segmentation ([`segmentation`]), head tracking ([`tracking`]), feature
//! extraction ([`features`]) and three interchangeable decision back-ends —
//! accelerometer thresholds ([`accel`]), supervised classifiers ([`classify`])
//! and a hierarchical fuzzy inference system ([`fuzzy`]). The [`detector`]
//! module wires the stages into frontal-camera and overhead-camera pipelines,
//! and [`eval`] scores detector output against labeled datasets.
//!
//! Depth maps use millimetre units with 0 as the "no measurement" (nmd)
//! sentinel throughout.

pub mod accel;
pub mod background;
pub mod classify;
pub mod config;
pub mod dataio;
pub mod detector;
pub mod error;
pub mod eval;
pub mod features;
pub mod fuzzy;
pub mod geometry;
pub mod segmentation;
pub mod synth;
pub mod tracking;

pub use config::Config;
pub use error::{Error, Result};
