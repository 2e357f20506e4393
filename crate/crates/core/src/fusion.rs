//! Across-scale addition of detail subbands.
//!
//! Lower-resolution DWT details are lifted to the SWT resolution by
//! zero-insertion upsampling followed by a zero-phase Gaussian, then both
//! sets are weighted and summed band by band.

use crate::error::{Error, Result};
use crate::plane::Plane;

/// Half-width of the smoothing kernel (7 taps).
const KERNEL_RADIUS: usize = 3;
const KERNEL_SIGMA: f64 = 1.0;

/// Detail band selector, in weight order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Lh = 0,
    Hl = 1,
    Hh = 2,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::Lh, Band::Hl, Band::Hh];
}

/// Six fusion weights `[W1..W6]`: three for DWT details (LH, HL, HH) followed
/// by three for SWT details.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionWeights([f64; 6]);

impl FusionWeights {
    pub fn new(w: [f64; 6]) -> Result<Self> {
        for (index, &value) in w.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::WeightOutOfRange { index, value });
            }
        }
        Ok(Self(w))
    }

    pub fn from_slice(w: &[f64]) -> Result<Self> {
        let arr: [f64; 6] = w.try_into().map_err(|_| {
            Error::InvalidConfig(format!("expected 6 fusion weights, got {}", w.len()))
        })?;
        Self::new(arr)
    }

    pub fn zeros() -> Self {
        Self([0.0; 6])
    }

    pub fn ones() -> Self {
        Self([1.0; 6])
    }

    pub fn as_array(&self) -> &[f64; 6] {
        &self.0
    }

    pub fn dwt(&self, band: Band) -> f64 {
        self.0[band as usize]
    }

    pub fn swt(&self, band: Band) -> f64 {
        self.0[3 + band as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetailTriple {
    pub lh: Plane,
    pub hl: Plane,
    pub hh: Plane,
}

impl DetailTriple {
    pub fn new(lh: Plane, hl: Plane, hh: Plane) -> Result<Self> {
        lh.expect_dims(hl.dims())?;
        lh.expect_dims(hh.dims())?;
        for p in [&lh, &hl, &hh] {
            p.ensure_finite()?;
        }
        Ok(Self { lh, hl, hh })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        let z = Plane::zeros(width, height);
        Self {
            lh: z.clone(),
            hl: z.clone(),
            hh: z,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.lh.dims()
    }

    pub fn band(&self, band: Band) -> &Plane {
        match band {
            Band::Lh => &self.lh,
            Band::Hl => &self.hl,
            Band::Hh => &self.hh,
        }
    }

    pub fn band_mut(&mut self, band: Band) -> &mut Plane {
        match band {
            Band::Lh => &mut self.lh,
            Band::Hl => &mut self.hl,
            Band::Hh => &mut self.hh,
        }
    }
}

/// 1D smoothing taps for offsets `-3..=3`.
///
/// Sampled Gaussian whose even-offset and odd-offset taps are each scaled to
/// sum to 1/2: after zero insertion every output sample sees exactly one
/// parity class, so with a per-axis gain of 2 constants map to themselves.
pub fn smoothing_kernel() -> [f64; 2 * KERNEL_RADIUS + 1] {
    let mut k = [0.0; 2 * KERNEL_RADIUS + 1];
    for (i, tap) in k.iter_mut().enumerate() {
        let t = i as f64 - KERNEL_RADIUS as f64;
        *tap = (-t * t / (2.0 * KERNEL_SIGMA * KERNEL_SIGMA)).exp();
    }
    for parity in 0..2 {
        // offset parity equals (i - radius) parity
        let members = || (0..k.len()).filter(move |i| (i + KERNEL_RADIUS) % 2 == parity);
        let sum: f64 = members().map(|i| k[i]).sum();
        for i in members() {
            k[i] *= 0.5 / sum;
        }
    }
    k
}

/// Doubles both dimensions: zero insertion, then the separable kernel of
/// [`smoothing_kernel`] with gain 4, periodic boundaries.
pub fn upsample_smooth(plane: &Plane) -> Result<Plane> {
    plane.ensure_finite()?;
    let k = smoothing_kernel();
    let rows = upsample_rows(plane, &k);
    Ok(upsample_columns(&rows, &k))
}

fn upsample_rows(src: &Plane, k: &[f64]) -> Plane {
    let (w, h) = src.dims();
    let out_w = 2 * w;
    let r = KERNEL_RADIUS as isize;
    let mut out = Plane::zeros(out_w, h);
    for y in 0..h {
        let row = src.row(y);
        let dst = out.row_mut(y);
        for (m, &v) in row.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            for (i, &c) in k.iter().enumerate() {
                let n = (2 * m as isize + i as isize - r).rem_euclid(out_w as isize) as usize;
                dst[n] += 2.0 * c * v;
            }
        }
    }
    out
}

fn upsample_columns(src: &Plane, k: &[f64]) -> Plane {
    let (w, h) = src.dims();
    let out_h = 2 * h;
    let r = KERNEL_RADIUS as isize;
    let mut out = Plane::zeros(w, out_h);
    for m in 0..h {
        for (i, &c) in k.iter().enumerate() {
            let n = (2 * m as isize + i as isize - r).rem_euclid(out_h as isize) as usize;
            let src_row = src.row(m);
            let dst = out.row_mut(n);
            for (o, s) in dst.iter_mut().zip(src_row) {
                *o += 2.0 * c * s;
            }
        }
    }
    out
}

/// `out_b = W_dwt(b) * upsample_smooth(dwt_b) + W_swt(b) * swt_b` per band.
pub fn fuse_details(
    dwt_details: &DetailTriple,
    swt_details: &DetailTriple,
    weights: &FusionWeights,
) -> Result<DetailTriple> {
    let lifted = lift_details(dwt_details, swt_details.dims())?;
    fuse_lifted(&lifted, swt_details, weights)
}

/// Upsamples the DWT details; the result is independent of the weights and
/// can be reused across many [`fuse_lifted`] calls.
pub fn lift_details(dwt_details: &DetailTriple, target: (usize, usize)) -> Result<DetailTriple> {
    let (w, h) = dwt_details.dims();
    if (2 * w, 2 * h) != target {
        return Err(Error::SizeMismatch {
            expected: (target.0 / 2, target.1 / 2),
            found: (w, h),
        });
    }
    Ok(DetailTriple {
        lh: upsample_smooth(&dwt_details.lh)?,
        hl: upsample_smooth(&dwt_details.hl)?,
        hh: upsample_smooth(&dwt_details.hh)?,
    })
}

/// Weighted sum of already-lifted DWT details and same-size SWT details.
pub fn fuse_lifted(
    lifted: &DetailTriple,
    swt_details: &DetailTriple,
    weights: &FusionWeights,
) -> Result<DetailTriple> {
    if lifted.dims() != swt_details.dims() {
        return Err(Error::SizeMismatch {
            expected: swt_details.dims(),
            found: lifted.dims(),
        });
    }
    let mut out = DetailTriple::zeros(swt_details.dims().0, swt_details.dims().1);
    for band in Band::ALL {
        let (wd, ws) = (weights.dwt(band), weights.swt(band));
        let dst = out.band_mut(band).data_mut();
        let (a, b) = (lifted.band(band).data(), swt_details.band(band).data());
        for ((o, &x), &y) in dst.iter_mut().zip(a).zip(b) {
            *o = wd * x + ws * y;
        }
    }
    Ok(out)
}
