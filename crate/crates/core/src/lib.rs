pub mod blend;
mod error;
pub mod geometry;
pub mod gradcheck;
pub mod harness;
pub mod ik;
pub mod pose;
pub mod robot;
pub mod sqp;
pub mod teleop;

pub use error::{Error, Result};
