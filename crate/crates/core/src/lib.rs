pub mod conjecture;
pub mod error;
pub mod geometry;
pub mod lie;
pub mod loop_order;
pub mod render;
pub mod roots;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
