//! Single-image super-resolution by across-scale process similarity.
//!
//! An image is treated as the output of an unknown degradation process. The
//! same process is assumed to relate the image to its own wavelet
//! approximation, so fusion weights fitted while reconstructing the image
//! from that approximation are reused to synthesize the next finer scale.
//!
//! ```no_run
//! use psinterp::{interpolate, load_image, save_image, PipelineConfig, ScaleFactor};
//!
//! let input = load_image("in.png")?;
//! let out = interpolate(&input, ScaleFactor::new(2.0)?, &PipelineConfig::default())?;
//! save_image(&out.image, "out.png")?;
//! # Ok::<(), psinterp::Error>(())
//! ```

pub mod bench;
pub mod decimation;
pub mod error;
pub mod fusion;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod plane;
pub mod pso;
pub mod wavelet;

pub use decimation::{bicubic_resize, decimate, DecimationScheme};
pub use error::{Error, Result};
pub use fusion::{fuse_details, upsample_smooth, Band, DetailTriple, FusionWeights};
pub use io::{load_image, save_image};
pub use metrics::{psnr, quality, ssim, QualityReport};
pub use pipeline::{
    generate_2x, interpolate, interpolate_with_weights, model_channels, model_weights, reconstruct_estimate, Interpolation,
    ModelResult, PipelineConfig, ScaleFactor,
};
pub use plane::{Image, Plane};
pub use pso::{optimize, PsoConfig, PsoOutcome};
pub use wavelet::{dwt2, idwt2, make_filter, swt2, SubbandSet, TransformMode, WaveletFilter, WaveletKind};
