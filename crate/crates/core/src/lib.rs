//! Actor-action video segmentation with layered conditional random fields.
//!
//! The crate covers the whole desk-scale pipeline: label spaces and instance
//! files ([`label_space`], [`instance`], [`format`], [`tracks`]), potentials
//! and model builders ([`potentials`], [`models`]), graph-cut inference with
//! label costs ([`maxflow`], [`inference`]), metrics ([`evaluation`]) and a
//! planted-instance generator ([`synth`]).

pub mod cli;
pub mod error;
pub mod evaluation;
pub mod format;
pub mod inference;
pub mod instance;
pub mod label_space;
pub mod maxflow;
pub mod models;
pub mod potentials;
pub mod synth;
pub mod tracks;

pub use error::{Error, Result};
pub use instance::{Edge, FrameInfo, Instance, Labeling, Node, NodeLabel, Thetas};
pub use label_space::LabelSpace;
