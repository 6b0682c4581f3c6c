pub mod certificate;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod mg;
pub mod presets;
pub mod problem;
pub mod smoothing;
pub mod transfer;

pub use error::{Error, Result};
