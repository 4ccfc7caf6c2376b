//! Self-supervised learning of drivable "soft lanes" and per-cell multimodal
//! travel direction on synthetic top-down road scenes.
//!
//! The crate generates procedural road layouts, samples single feasible
//! trajectories through them, trains a convolutional encoder-decoder to
//! predict a dense soft lane affordance map together with a per-cell von
//! Mises mixture over travel direction, and evaluates generalization on
//! held-out layout variations.

pub mod augment;
pub mod circular;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod loss;
pub mod net;
pub mod render;
pub mod scene;
pub mod train;

pub use error::{Error, Result};

/// CPU backend used for inference and metric evaluation.
pub type Cpu = burn::backend::ndarray::NdArray<f32>;
/// Autodiff-enabled backend used for training.
pub type TrainBackend = burn::backend::Autodiff<Cpu>;
