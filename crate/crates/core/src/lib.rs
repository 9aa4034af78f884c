pub mod audio;
pub mod error;
pub mod exec;
pub mod model;

pub use error::{Error, Result};
pub mod visual;
pub mod lexical;
pub mod preprocess;
pub mod classifiers;
pub mod eval;
pub mod pipeline;
pub mod extract;
pub mod report;
pub mod bundle;
pub mod config;
pub mod synthetic;
