pub mod circulant;
pub mod claims;
pub mod curves;
pub mod error;
pub mod matrices;
pub mod matrix;
pub mod modular;
pub mod poly;
pub mod sweep;

pub use error::{Error, Result};
