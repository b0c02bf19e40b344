//! Word-level script identification.
//!
//! Pages are binarized with Otsu's threshold, cleaned of speckle, deskewed
//! and cut into words along projection-profile valleys. Each word is
//! described by eight features: the ink density left after opening by
//! reconstruction with a line element at 0, 45, 90 and 135 degrees (holes
//! filled), the average component aspect ratio, the hole-filled pixel
//! ratio, and the average component eccentricity and extent. Words are
//! classified with nearest-neighbour or k-nearest-neighbour voting.

pub mod classifier;
pub mod config;
pub mod dump;
pub mod error;
pub mod features;
pub mod image;
pub mod imaging;
pub mod morphology;
pub mod pipeline;
pub mod pnm;
pub mod segmentation;
pub mod synth;

pub use classifier::{Model, Prediction, Report, Sample, ScriptLabel};
pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use features::{FeatureVector, WordImage};
pub use image::{BinaryImage, GrayImage};
pub use imaging::{ComponentStats, Connectivity};
pub use morphology::{Direction, MarkerMaskPair, StructuringElement};
pub use segmentation::{LineBand, WordBox};
