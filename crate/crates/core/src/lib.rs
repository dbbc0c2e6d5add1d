pub mod charsum;
pub mod error;
pub mod exec;
pub mod ff;
pub mod mpoly;
pub mod selftest;
pub mod singular;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
