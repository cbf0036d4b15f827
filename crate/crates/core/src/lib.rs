//! Separable bilinear programming: representation, successive approximation
//! with online error bounds, dimensionality reduction and problem compilers.

pub mod bilinear;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod models;
pub mod oracle;
pub mod pipeline;
pub mod random;
pub mod reduction;
pub mod solver;

pub use error::{Error, Result};
