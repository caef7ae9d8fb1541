//! Driving noise: Brownian increments, the compensated small-jump measure
//! and compound-Poisson large jumps.

mod model;
mod realization;

pub use model::{LargeJumpSampler, LevyModel, LevyModelSpec, SmallAtom};
pub(crate) use model::norm;
pub use realization::{
    sample_noise, stream_rng, uniform_grid, LargeEvent, NoiseDump, NoiseRealization, NoiseView, SmallEvent, Stream,
};
