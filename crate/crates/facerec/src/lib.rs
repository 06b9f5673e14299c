//! Face databases, experiment configs and the recognition pipeline around
//! `facerec-core`, plus the `facerec` command-line tool.

pub mod config;
pub mod dataset;
pub mod error;
pub mod image_io;
pub mod model_io;
pub mod pipeline;
pub mod synthetic;

pub use config::{Algorithm, DatabaseSource, ExperimentConfig};
pub use dataset::{scan_database, split, FaceDatabase, Selection, SplitSpec};
pub use error::{Error, Result, Stage};
pub use pipeline::{run_algorithm1, run_algorithm2, run_experiment, run_grid, RecognitionReport};
