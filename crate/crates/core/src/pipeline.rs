//! Modeling and generation stages.
//!
//! Modeling learns six fusion weights from the input alone: the input's DWT
//! approximation `LL` is decomposed again by DWT and SWT, the detail bands
//! are fused under candidate weights, and `idwt2(LL, fused)` is scored
//! against the input by PSNR. The swarm maximizes that score.
//!
//! Generation repeats the same construction one scale up, with the input
//! image standing in for the approximation band. Because an orthonormal
//! approximation of a constant `c` is `2c`, the input is scaled by 2 before
//! it plays that role; by linearity this is the same as synthesizing from the
//! unscaled input and doubling the result.

use rayon::prelude::*;

use crate::decimation::resize_plane;
use crate::error::{Error, Result};
use crate::fusion::{fuse_details, fuse_lifted, lift_details, DetailTriple, FusionWeights};
use crate::metrics::psnr_plane;
use crate::plane::{Image, Plane};
use crate::pso::{optimize_with_anchors, PsoConfig};
use crate::wavelet::{dwt2, idwt2_parts, swt2, SubbandSet, WaveletFilter, WaveletKind};

/// Fitness reported when an estimate reproduces its target exactly.
pub const FITNESS_CEILING_DB: f64 = 1000.0;

/// Smallest plane accepted by [`model_weights`] and [`interpolate`].
pub const MIN_MODEL_SIZE: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelResult {
    pub weights: FusionWeights,
    pub fitness_db: f64,
    pub iterations: usize,
    pub wavelet: WaveletKind,
    /// Input was constant: every weight vector scores the same.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFactor {
    alpha: f64,
    levels: u32,
}

impl ScaleFactor {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha.is_finite()) {
            return Err(Error::InvalidScale(alpha));
        }
        let mut levels = 1;
        while ((1u64 << levels) as f64) < alpha - 1e-12 {
            levels += 1;
        }
        Ok(Self { alpha, levels })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of 2x generation passes, `ceil(log2(alpha))`.
    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn is_dyadic(&self) -> bool {
        (self.alpha - (1u64 << self.levels) as f64).abs() < 1e-12
    }

    /// Output size for an input of `n` samples along one axis.
    pub fn output_len(&self, n: usize) -> usize {
        (self.alpha * n as f64).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub wavelet: WaveletKind,
    pub pso: PsoConfig,
    /// Re-learn the weights at every 2x level instead of reusing the
    /// weights modeled on the input.
    pub remodel_per_level: bool,
    /// Process channels on the rayon pool.
    pub parallel_channels: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            wavelet: WaveletKind::Db2,
            pso: PsoConfig::default(),
            remodel_per_level: false,
            parallel_channels: true,
        }
    }
}

/// Everything about an estimate that does not depend on the weights.
struct EstimateBasis<'a> {
    ll: &'a Plane,
    lifted: DetailTriple,
    swt: DetailTriple,
    filter: &'a WaveletFilter,
}

fn details(bands: SubbandSet) -> DetailTriple {
    DetailTriple {
        lh: bands.lh,
        hl: bands.hl,
        hh: bands.hh,
    }
}

impl<'a> EstimateBasis<'a> {
    fn new(ll: &'a Plane, filter: &'a WaveletFilter) -> Result<Self> {
        let coarse = details(dwt2(ll, filter)?);
        let swt = details(swt2(ll, filter)?);
        let lifted = lift_details(&coarse, swt.dims())?;
        Ok(Self {
            ll,
            lifted,
            swt,
            filter,
        })
    }

    fn estimate(&self, weights: &FusionWeights) -> Result<Plane> {
        let fused = fuse_lifted(&self.lifted, &self.swt, weights)?;
        idwt2_parts(self.ll, &fused.lh, &fused.hl, &fused.hh, self.filter)
    }
}

fn ensure_even(p: &Plane) -> Result<()> {
    let (w, h) = p.dims();
    if w % 2 == 1 || h % 2 == 1 {
        return Err(Error::OddDimension {
            width: w,
            height: h,
        });
    }
    Ok(())
}

/// Estimate of the image whose DWT approximation is `ll`, using fused
/// details from one further DWT and SWT level of `ll`.
pub fn reconstruct_estimate(ll: &Plane, weights: &FusionWeights, filter: &WaveletFilter) -> Result<Plane> {
    let (w, h) = ll.dims();
    if w < 8 || h < 8 {
        return Err(Error::TooSmall {
            what: "approximation band",
            width: w,
            height: h,
            min: 8,
        });
    }
    ensure_even(ll)?;
    ll.ensure_finite()?;
    let coarse = details(dwt2(ll, filter)?);
    let fine = details(swt2(ll, filter)?);
    let fused = fuse_details(&coarse, &fine, weights)?;
    idwt2_parts(ll, &fused.lh, &fused.hl, &fused.hh, filter)
}

/// Learns the fusion weights of a single-channel image.
pub fn model_weights(image: &Plane, filter: &WaveletFilter, pso: &PsoConfig) -> Result<ModelResult> {
    let (w, h) = image.dims();
    if w < MIN_MODEL_SIZE || h < MIN_MODEL_SIZE {
        return Err(Error::TooSmall {
            what: "modeling input",
            width: w,
            height: h,
            min: MIN_MODEL_SIZE,
        });
    }
    // the approximation band is decomposed once more, so it must be even too
    if w % 4 != 0 || h % 4 != 0 {
        return Err(Error::NotDivisible {
            width: w,
            height: h,
            factor: 4,
        });
    }
    image.ensure_finite()?;
    if pso.dims != 6 {
        return Err(Error::InvalidConfig(format!("fusion needs 6 dimensions, got {}", pso.dims)));
    }

    let ll = dwt2(image, filter)?.ll;
    let basis = EstimateBasis::new(&ll, filter)?;
    let fitness = |x: &[f64]| -> f64 {
        // positions are clamped to the unit box by the swarm
        let weights = FusionWeights::from_slice(x).expect("swarm positions stay in [0, 1]");
        match basis.estimate(&weights).and_then(|est| psnr_plane(image, &est, 1.0)) {
            Ok(v) => v.min(FITNESS_CEILING_DB),
            Err(_) => f64::NAN,
        }
    };
    let anchors = [vec![0.0; 6], vec![1.0; 6]];
    let outcome = optimize_with_anchors(fitness, pso, &anchors)?;
    Ok(ModelResult {
        weights: FusionWeights::from_slice(&outcome.best_position)?,
        fitness_db: outcome.best_fitness,
        iterations: outcome.iterations,
        wavelet: filter.kind(),
        degenerate: image.is_constant(),
    })
}

/// One 2x generation pass without clipping.
pub fn synthesize_2x(image: &Plane, weights: &FusionWeights, filter: &WaveletFilter) -> Result<Plane> {
    let (w, h) = image.dims();
    if w < 2 || h < 2 {
        return Err(Error::TooSmall {
            what: "generation input",
            width: w,
            height: h,
            min: 2,
        });
    }
    ensure_even(image)?;
    image.ensure_finite()?;
    let ll = image.scaled(2.0);
    let basis = EstimateBasis::new(&ll, filter)?;
    basis.estimate(weights)
}

/// One 2x generation pass, clipped to `[0, 1]`.
pub fn generate_2x(image: &Plane, weights: &FusionWeights, filter: &WaveletFilter) -> Result<Plane> {
    Ok(synthesize_2x(image, weights, filter)?.clipped(0.0, 1.0))
}

/// Splits an image into independently processed channels.
pub fn color_policy(image: &Image) -> Result<Vec<Plane>> {
    match image.channels() {
        1 | 3 => Ok(image.planes().to_vec()),
        n => Err(Error::UnsupportedChannels(n)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interpolation {
    pub image: Image,
    /// Weights modeled on each input channel.
    pub models: Vec<ModelResult>,
}

/// Full method: model each channel, generate `levels` times, bicubic
/// downscale for non-dyadic factors, clip.
pub fn interpolate(image: &Image, alpha: ScaleFactor, config: &PipelineConfig) -> Result<Interpolation> {
    run_channels(image, alpha, config, None)
}

/// Like [`interpolate`] but with given per-channel weights; no modeling.
pub fn interpolate_with_weights(
    image: &Image,
    alpha: ScaleFactor,
    config: &PipelineConfig,
    weights: &[FusionWeights],
) -> Result<Image> {
    if weights.len() != image.channels() {
        return Err(Error::InvalidConfig(format!(
            "{} weight sets for {} channels",
            weights.len(),
            image.channels()
        )));
    }
    Ok(run_channels(image, alpha, config, Some(weights))?.image)
}

fn run_channels(
    image: &Image,
    alpha: ScaleFactor,
    config: &PipelineConfig,
    fixed: Option<&[FusionWeights]>,
) -> Result<Interpolation> {
    let planes = color_policy(image)?;
    let filter = WaveletFilter::new(config.wavelet);
    let job = |(c, plane): (usize, &Plane)| -> Result<(Plane, ModelResult)> {
        interpolate_channel(plane, alpha, &filter, config, fixed.map(|w| w[c]))
    };
    let results: Vec<Result<(Plane, ModelResult)>> = if config.parallel_channels {
        planes.par_iter().enumerate().map(job).collect()
    } else {
        planes.iter().enumerate().map(job).collect()
    };
    let mut out_planes = Vec::with_capacity(planes.len());
    let mut models = Vec::with_capacity(planes.len());
    for r in results {
        let (p, m) = r?;
        out_planes.push(p);
        models.push(m);
    }
    Ok(Interpolation {
        image: Image::from_planes(out_planes)?,
        models,
    })
}

fn check_channel(plane: &Plane) -> Result<()> {
    let (w, h) = plane.dims();
    if w < MIN_MODEL_SIZE || h < MIN_MODEL_SIZE {
        return Err(Error::TooSmall {
            what: "interpolation input",
            width: w,
            height: h,
            min: MIN_MODEL_SIZE,
        });
    }
    Ok(())
}

/// Symmetric padding to a multiple of 4, so the approximation band of the
/// padded plane can be decomposed once more.
fn pad_for_model(plane: &Plane) -> Plane {
    let (w, h) = plane.dims();
    plane.pad_symmetric(w.next_multiple_of(4), h.next_multiple_of(4))
}

/// The modeling stage of [`interpolate`] alone: one result per channel.
pub fn model_channels(image: &Image, config: &PipelineConfig) -> Result<Vec<ModelResult>> {
    let planes = color_policy(image)?;
    let filter = WaveletFilter::new(config.wavelet);
    let job = |plane: &Plane| -> Result<ModelResult> {
        check_channel(plane)?;
        model_weights(&pad_for_model(plane), &filter, &config.pso)
    };
    if config.parallel_channels {
        planes.par_iter().map(job).collect()
    } else {
        planes.iter().map(job).collect()
    }
}

fn interpolate_channel(
    plane: &Plane,
    alpha: ScaleFactor,
    filter: &WaveletFilter,
    config: &PipelineConfig,
    fixed: Option<FusionWeights>,
) -> Result<(Plane, ModelResult)> {
    check_channel(plane)?;
    let (w, h) = plane.dims();
    let padded = pad_for_model(plane);

    let model = match fixed {
        Some(weights) => ModelResult {
            weights,
            fitness_db: f64::NAN,
            iterations: 0,
            wavelet: filter.kind(),
            degenerate: plane.is_constant(),
        },
        None => model_weights(&padded, filter, &config.pso)?,
    };

    let mut weights = model.weights;
    let mut cur = padded;
    for level in 0..alpha.levels() {
        if level > 0 && config.remodel_per_level && fixed.is_none() {
            weights = model_weights(&cur, filter, &config.pso)?.weights;
        }
        cur = synthesize_2x(&cur, &weights, filter)?;
    }

    let gain = 1usize << alpha.levels();
    let mut out = cur.crop(gain * w, gain * h);
    if !alpha.is_dyadic() {
        out = resize_plane(&out, alpha.output_len(w), alpha.output_len(h))?;
    }
    Ok((out.clipped(0.0, 1.0), model))
}
