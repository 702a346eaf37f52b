//! Handwriting training-data synthesis.
//!
//! - [`dataset`]: IDX reading/writing, stratified seed selection, contact sheets
//! - [`raster`]: binarization, Zhang-Suen thinning, dilation, overlays, components
//! - [`crossover`]: structural crossing-over of same-class character pairs
//! - [`tangent`]: eight-field tangent-vector distortion (the baseline augmenter)
//! - [`hog`]: histogram-of-oriented-gradients descriptor
//! - [`svm`]: one-vs-all linear SVM
//! - [`bench`]: the synth / train / eval experiment runner
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod bench;
pub mod crossover;
pub mod dataset;
pub mod error;
pub mod hog;
pub mod raster;
pub mod svm;
pub mod tangent;

pub use error::{Error, Result};
