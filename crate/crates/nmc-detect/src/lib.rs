pub mod detectors;
pub mod error;
pub mod linalg;
pub mod model;
pub mod montecarlo;
pub mod perf;
pub mod pipeline;
pub mod quad;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
pub use num_complex::Complex64;
