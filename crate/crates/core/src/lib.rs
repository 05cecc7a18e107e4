//! Spike-camera toolkit: integrate-and-fire simulation, spike/ISI/scene
//! representations and their statistics, scene-mediated lossy compression
//! with decoder-side spike regeneration, and rate-distortion evaluation.

pub mod analysis;
pub mod codec;
pub mod eval;
pub mod io;
pub mod registry;
pub mod representation;
pub mod scene;
pub mod spike_model;
pub mod stream;

pub use scene::{ConstantScene, FnScene, SceneFrame, SceneSequence, SceneSource};
pub use spike_model::{InitPolicy, ResetMode, SimulatorConfig};
pub use stream::{SpikePlane, SpikeStream};
