pub mod error;
pub mod gf;

pub use error::{Error, Result};
pub mod polymap;
pub mod space;
pub mod samplers;
pub mod extractor;
pub mod ratio;
pub mod construction;
pub mod analysis;
