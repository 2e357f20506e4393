//! Low-resolution input generators and bicubic resampling.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::plane::{reflect, Image, Plane};
use crate::wavelet::{dwt2, WaveletFilter, WaveletKind};

/// Catmull-Rom parameter.
const CUBIC_A: f64 = -0.5;
const GAUSS_RADIUS: usize = 3;
const GAUSS_SIGMA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DecimationScheme {
    Bicubic,
    DaubechiesApprox,
    DMeyerApprox,
    GaussianDown,
    SubSample,
}

impl DecimationScheme {
    pub const ALL: [DecimationScheme; 5] = [
        DecimationScheme::Bicubic,
        DecimationScheme::DaubechiesApprox,
        DecimationScheme::DMeyerApprox,
        DecimationScheme::GaussianDown,
        DecimationScheme::SubSample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DecimationScheme::Bicubic => "bicubic",
            DecimationScheme::DaubechiesApprox => "daubechies",
            DecimationScheme::DMeyerApprox => "dmeyer",
            DecimationScheme::GaussianDown => "gaussian",
            DecimationScheme::SubSample => "subsample",
        }
    }
}

impl fmt::Display for DecimationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecimationScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DecimationScheme::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown decimation scheme `{s}`")))
    }
}

pub fn decimate(image: &Image, scheme: DecimationScheme, factor: usize) -> Result<Image> {
    if factor != 2 && factor != 4 {
        return Err(Error::InvalidConfig(format!("decimation factor must be 2 or 4, got {factor}")));
    }
    let (w, h) = image.dims();
    if w % factor != 0 || h % factor != 0 {
        return Err(Error::NotDivisible {
            width: w,
            height: h,
            factor,
        });
    }
    let planes = image
        .planes()
        .iter()
        .map(|p| decimate_plane(p, scheme, factor))
        .collect::<Result<Vec<_>>>()?;
    Image::from_planes(planes)
}

fn decimate_plane(p: &Plane, scheme: DecimationScheme, factor: usize) -> Result<Plane> {
    let (w, h) = p.dims();
    match scheme {
        DecimationScheme::Bicubic => resize_plane(p, w / factor, h / factor),
        DecimationScheme::DaubechiesApprox => wavelet_approx(p, WaveletKind::Db2, factor),
        DecimationScheme::DMeyerApprox => wavelet_approx(p, WaveletKind::Dmey, factor),
        DecimationScheme::GaussianDown => Ok(subsample(&gaussian_blur(p), factor)),
        DecimationScheme::SubSample => Ok(subsample(p, factor)),
    }
}

/// Repeated DWT approximation, halved per level so constants are preserved.
fn wavelet_approx(p: &Plane, kind: WaveletKind, factor: usize) -> Result<Plane> {
    let filter = WaveletFilter::new(kind);
    let mut cur = p.clone();
    let mut f = factor;
    while f > 1 {
        cur = dwt2(&cur, &filter)?.ll.scaled(0.5);
        f /= 2;
    }
    Ok(cur)
}

fn subsample(p: &Plane, factor: usize) -> Plane {
    Plane::from_fn(p.width() / factor, p.height() / factor, |x, y| p.get(factor * x, factor * y))
}

/// 7x7 Gaussian (sigma 1), unit gain, symmetric boundaries.
pub fn gaussian_blur(p: &Plane) -> Plane {
    let mut k = [0.0; 2 * GAUSS_RADIUS + 1];
    for (i, v) in k.iter_mut().enumerate() {
        let t = i as f64 - GAUSS_RADIUS as f64;
        *v = (-t * t / (2.0 * GAUSS_SIGMA * GAUSS_SIGMA)).exp();
    }
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);

    let (w, h) = p.dims();
    let r = GAUSS_RADIUS as isize;
    let rows = Plane::from_fn(w, h, |x, y| {
        k.iter()
            .enumerate()
            .map(|(i, c)| c * p.get(reflect(x as isize + i as isize - r, w), y))
            .sum()
    });
    Plane::from_fn(w, h, |x, y| {
        k.iter()
            .enumerate()
            .map(|(i, c)| c * rows.get(x, reflect(y as isize + i as isize - r, h)))
            .sum()
    })
}

#[inline]
fn cubic(t: f64) -> f64 {
    let t = t.abs();
    let a = CUBIC_A;
    if t <= 1.0 {
        ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0
    } else if t < 2.0 {
        ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a
    } else {
        0.0
    }
}

/// Source taps and weights for every output coordinate along one axis.
fn axis_taps(n_in: usize, n_out: usize) -> Vec<([usize; 4], [f64; 4])> {
    let ratio = n_in as f64 / n_out as f64;
    (0..n_out)
        .map(|o| {
            let src = (o as f64 + 0.5) * ratio - 0.5;
            let base = src.floor();
            let t = src - base;
            let base = base as isize;
            let idx = [0, 1, 2, 3].map(|j| reflect(base - 1 + j as isize, n_in));
            let w = [cubic(t + 1.0), cubic(t), cubic(1.0 - t), cubic(2.0 - t)];
            (idx, w)
        })
        .collect()
}

/// Separable Catmull-Rom resampling to an explicit size, pixel-center
/// aligned, half-sample symmetric boundaries.
pub fn resize_plane(p: &Plane, width: usize, height: usize) -> Result<Plane> {
    if width == 0 || height == 0 {
        return Err(Error::TooSmall {
            what: "resize target",
            width,
            height,
            min: 1,
        });
    }
    let (w, h) = p.dims();
    let xt = axis_taps(w, width);
    let yt = axis_taps(h, height);
    let mut rows = Plane::zeros(width, h);
    for y in 0..h {
        let src = p.row(y);
        for (o, (idx, wt)) in rows.row_mut(y).iter_mut().zip(&xt) {
            *o = (0..4).map(|j| wt[j] * src[idx[j]]).sum();
        }
    }
    let mut out = Plane::zeros(width, height);
    for (y, (idx, wt)) in yt.iter().enumerate() {
        let dst = out.row_mut(y);
        for j in 0..4 {
            for (o, s) in dst.iter_mut().zip(rows.row(idx[j])) {
                *o += wt[j] * s;
            }
        }
    }
    Ok(out)
}

pub fn bicubic_resize_to(image: &Image, width: usize, height: usize) -> Result<Image> {
    let planes = image
        .planes()
        .iter()
        .map(|p| resize_plane(p, width, height))
        .collect::<Result<Vec<_>>>()?;
    Image::from_planes(planes)
}

/// Bicubic resampling by `scale`; output dims are `round(scale * dims)`.
pub fn bicubic_resize(image: &Image, scale: f64) -> Result<Image> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidScale(scale));
    }
    let width = (scale * image.width() as f64).round() as usize;
    let height = (scale * image.height() as f64).round() as usize;
    bicubic_resize_to(image, width, height)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gray(p: Plane) -> Image {
        Image::gray(p).unwrap()
    }

    #[test]
    fn all_schemes_preserve_constants() {
        let img = gray(Plane::filled(16, 16, 0.42));
        for scheme in DecimationScheme::ALL {
            for factor in [2, 4] {
                let out = decimate(&img, scheme, factor).unwrap();
                assert_eq!(out.dims(), (16 / factor, 16 / factor));
                for v in out.plane(0).data() {
                    assert!((v - 0.42).abs() < 1e-12, "{scheme} x{factor}: {v}");
                }
            }
        }
    }

    #[test]
    fn subsample_picks_the_even_phase_of_a_checkerboard() {
        let img = gray(Plane::from_fn(8, 8, |x, y| ((x + y) % 2) as f64));
        let out = decimate(&img, DecimationScheme::SubSample, 2).unwrap();
        assert!(out.plane(0).data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn subsample_recovers_samples_placed_on_the_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let small = Plane::from_fn(5, 3, |_, _| rng.gen());
        let mut big = Plane::zeros(20, 12);
        for y in 0..3 {
            for x in 0..5 {
                big.set(4 * x, 4 * y, small.get(x, y));
            }
        }
        let out = decimate(&gray(big), DecimationScheme::SubSample, 4).unwrap();
        assert_eq!(out.plane(0), &small);
    }

    #[test]
    fn daubechies_matches_half_of_wavelet_ll() {
        let ramp = Plane::from_fn(16, 16, |x, y| (x + 2 * y) as f64 / 48.0);
        let out = decimate(&gray(ramp.clone()), DecimationScheme::DaubechiesApprox, 2).unwrap();
        let ll = dwt2(&ramp, &WaveletFilter::new(WaveletKind::Db2)).unwrap().ll;
        assert!(out.plane(0).max_abs_diff(&ll.scaled(0.5)) < 1e-12);
    }

    #[test]
    fn rejects_indivisible_sizes_and_bad_factors() {
        let img = gray(Plane::zeros(10, 12));
        assert!(matches!(
            decimate(&img, DecimationScheme::SubSample, 4),
            Err(Error::NotDivisible { .. })
        ));
        assert!(decimate(&img, DecimationScheme::SubSample, 3).is_err());
    }

    #[test]
    fn unit_scale_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = Plane::from_fn(9, 7, |_, _| rng.gen());
        let out = bicubic_resize(&gray(p.clone()), 1.0).unwrap();
        assert!(out.plane(0).max_abs_diff(&p) < 1e-9);
    }

    #[test]
    fn resize_preserves_constants() {
        let img = gray(Plane::filled(10, 6, 0.25));
        for scale in [0.5, 0.75, 1.5, 3.0] {
            let out = bicubic_resize(&img, scale).unwrap();
            assert!(out.plane(0).data().iter().all(|v| (v - 0.25).abs() < 1e-12));
        }
    }

    #[test]
    fn upscaling_reproduces_linear_ramps() {
        let ramp = Plane::from_fn(16, 12, |x, y| 0.02 * x as f64 + 0.03 * y as f64);
        let out = bicubic_resize(&gray(ramp), 2.0).unwrap();
        let p = out.plane(0);
        assert_eq!(p.dims(), (32, 24));
        // output pixel centre (x + 0.5) / 2 - 0.5 in input coordinates
        for y in 4..20 {
            for x in 4..28 {
                let (sx, sy) = ((x as f64 + 0.5) / 2.0 - 0.5, (y as f64 + 0.5) / 2.0 - 0.5);
                assert!((p.get(x, y) - (0.02 * sx + 0.03 * sy)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn rejects_degenerate_targets() {
        let img = gray(Plane::zeros(4, 4));
        assert!(bicubic_resize(&img, 0.1).is_err());
        assert!(bicubic_resize(&img, -1.0).is_err());
    }

    #[test]
    fn scheme_names_roundtrip() {
        for s in DecimationScheme::ALL {
            assert_eq!(s.name().parse::<DecimationScheme>().unwrap(), s);
        }
    }
}
