pub mod analysis;
pub mod bbob;
pub mod cluster;
pub mod doe;
pub mod ela;
pub mod error;
pub mod mabbob;
pub mod manifest;
pub mod matrix;
pub mod metrics;
pub mod pipeline;
pub mod repr;

pub use error::{Error, Result};
