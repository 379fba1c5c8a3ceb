pub mod error;
pub mod estimators;
pub mod forward;
pub mod geometry;
pub mod migration;
pub mod noise_medium;
pub mod psf;
pub mod numerics;

pub use error::{Error, Result};
pub use geometry::Vec3;
