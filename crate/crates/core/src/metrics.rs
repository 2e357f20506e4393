//! Full-reference quality measures: PSNR and SSIM.

use crate::error::{Error, Result};
use crate::plane::{Image, Plane};

/// SSIM window size and Gaussian spread.
pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub psnr_db: f64,
    pub ssim: f64,
}

pub fn mse_plane(a: &Plane, b: &Plane) -> Result<f64> {
    a.expect_dims(b.dims())?;
    let sum: f64 = a.data().iter().zip(b.data()).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(sum / a.len() as f64)
}

fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

/// PSNR in dB. Identical inputs give `f64::INFINITY`.
pub fn psnr_plane(a: &Plane, b: &Plane, peak: f64) -> Result<f64> {
    check_peak(peak)?;
    Ok(psnr_from_mse(mse_plane(a, b)?, peak))
}

/// PSNR over all samples of all channels jointly. Identical inputs give
/// `f64::INFINITY`.
pub fn psnr(a: &Image, b: &Image, peak: f64) -> Result<f64> {
    check_peak(peak)?;
    check_same_shape(a, b)?;
    let mut sum = 0.0;
    let mut n = 0usize;
    for (pa, pb) in a.planes().iter().zip(b.planes()) {
        sum += pa.data().iter().zip(pb.data()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
        n += pa.len();
    }
    Ok(psnr_from_mse(sum / n as f64, peak))
}

fn check_peak(peak: f64) -> Result<()> {
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(Error::InvalidConfig(format!("PSNR peak must be positive, got {peak}")));
    }
    Ok(())
}

fn check_same_shape(a: &Image, b: &Image) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::SizeMismatch {
            expected: a.dims(),
            found: b.dims(),
        });
    }
    if a.channels() != b.channels() {
        return Err(Error::UnsupportedChannels(b.channels()));
    }
    Ok(())
}

fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let mut w = [0.0; SSIM_WINDOW];
    let c = (SSIM_WINDOW / 2) as f64;
    for (i, v) in w.iter_mut().enumerate() {
        let t = i as f64 - c;
        *v = (-t * t / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    w
}

/// Separable Gaussian filtering, "valid" region only.
fn filter_valid(p: &Plane, win: &[f64; SSIM_WINDOW]) -> Plane {
    let (w, h) = p.dims();
    let (ow, oh) = (w + 1 - SSIM_WINDOW, h + 1 - SSIM_WINDOW);
    let mut tmp = Plane::zeros(ow, h);
    for y in 0..h {
        let row = p.row(y);
        let dst = tmp.row_mut(y);
        for (x, o) in dst.iter_mut().enumerate() {
            *o = row[x..x + SSIM_WINDOW].iter().zip(win).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = Plane::zeros(ow, oh);
    for y in 0..oh {
        let dst = out.row_mut(y);
        for (j, &c) in win.iter().enumerate() {
            for (o, s) in dst.iter_mut().zip(tmp.row(y + j)) {
                *o += c * s;
            }
        }
    }
    out
}

/// Mean SSIM over all 11x11 Gaussian windows fully inside the plane,
/// dynamic range 1.
pub fn ssim_plane(a: &Plane, b: &Plane) -> Result<f64> {
    a.expect_dims(b.dims())?;
    let (w, h) = a.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::TooSmall {
            what: "SSIM input",
            width: w,
            height: h,
            min: SSIM_WINDOW,
        });
    }
    let win = gaussian_window();
    let c1 = (SSIM_K1 * 1.0).powi(2);
    let c2 = (SSIM_K2 * 1.0).powi(2);

    let prod = |p: &Plane, q: &Plane| -> Plane {
        let data = p.data().iter().zip(q.data()).map(|(x, y)| x * y).collect();
        Plane::from_vec(w, h, data).expect("same dims")
    };
    let mu_a = filter_valid(a, &win);
    let mu_b = filter_valid(b, &win);
    let aa = filter_valid(&prod(a, a), &win);
    let bb = filter_valid(&prod(b, b), &win);
    let ab = filter_valid(&prod(a, b), &win);

    let mut total = 0.0;
    for i in 0..mu_a.len() {
        let (ma, mb) = (mu_a.data()[i], mu_b.data()[i]);
        let va = aa.data()[i] - ma * ma;
        let vb = bb.data()[i] - mb * mb;
        let cov = ab.data()[i] - ma * mb;
        let num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
        let den = (ma * ma + mb * mb + c1) * (va + vb + c2);
        total += num / den;
    }
    Ok(total / mu_a.len() as f64)
}

/// SSIM; color images use the mean over channels.
pub fn ssim(a: &Image, b: &Image) -> Result<f64> {
    check_same_shape(a, b)?;
    let mut sum = 0.0;
    for (pa, pb) in a.planes().iter().zip(b.planes()) {
        sum += ssim_plane(pa, pb)?;
    }
    Ok(sum / a.channels() as f64)
}

pub fn quality(reference: &Image, test: &Image) -> Result<QualityReport> {
    Ok(QualityReport {
        psnr_db: psnr(reference, test, 1.0)?,
        ssim: ssim(reference, test)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gray(p: Plane) -> Image {
        Image::gray(p).unwrap()
    }

    fn random_plane(w: usize, h: usize, rng: &mut ChaCha8Rng) -> Plane {
        Plane::from_fn(w, h, |_, _| rng.gen())
    }

    #[test]
    fn identical_images_are_infinite() {
        let a = gray(Plane::filled(4, 4, 0.2));
        assert_eq!(psnr(&a, &a, 1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn closed_form_twenty_db() {
        let a = gray(Plane::zeros(8, 8));
        let b = gray(Plane::filled(8, 8, 0.1));
        assert!((psnr(&a, &b, 1.0).unwrap() - 20.0).abs() < 1e-9);
    }

    #[test]
    fn psnr_matches_direct_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (pa, pb) = (random_plane(8, 8, &mut rng), random_plane(8, 8, &mut rng));
        let mut sq = 0.0;
        for y in 0..8 {
            for x in 0..8 {
                sq += (pa.get(x, y) - pb.get(x, y)).powi(2);
            }
        }
        let expected = -10.0 * (sq / 64.0).log10();
        let got = psnr(&gray(pa.clone()), &gray(pb.clone()), 1.0).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert_eq!(got, psnr(&gray(pb), &gray(pa), 1.0).unwrap());
    }

    #[test]
    fn color_psnr_is_joint() {
        let z = Plane::zeros(4, 4);
        let a = Image::from_planes(vec![z.clone(), z.clone(), z.clone()]).unwrap();
        let b = Image::from_planes(vec![Plane::filled(4, 4, 0.3), z.clone(), z]).unwrap();
        // MSE = 0.09 / 3
        let expected = 10.0 * (3.0f64 / 0.09).log10();
        assert!((psnr(&a, &b, 1.0).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn psnr_rejects_mismatched_inputs() {
        let a = gray(Plane::zeros(4, 4));
        let b = gray(Plane::zeros(4, 6));
        assert!(psnr(&a, &b, 1.0).is_err());
        assert!(psnr(&a, &a, 0.0).is_err());
    }

    #[test]
    fn psnr_decreases_with_noise_amplitude() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let base = random_plane(32, 32, &mut rng);
        let noise = Plane::from_fn(32, 32, |_, _| rng.gen::<f64>() - 0.5);
        let mut last = f64::INFINITY;
        for amp in [0.01, 0.05, 0.2] {
            let mut noisy = base.clone();
            noisy.add_scaled(&noise, amp).unwrap();
            let v = psnr_plane(&base, &noisy, 1.0).unwrap();
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn ssim_of_identical_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let a = gray(random_plane(24, 20, &mut rng));
            assert_eq!(ssim(&a, &a).unwrap(), 1.0);
        }
        let c = gray(Plane::filled(16, 16, 0.5));
        assert_eq!(ssim(&c, &c).unwrap(), 1.0);
    }

    #[test]
    fn ssim_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = gray(random_plane(20, 20, &mut rng));
        let b = gray(random_plane(20, 20, &mut rng));
        assert!((ssim(&a, &b).unwrap() - ssim(&b, &a).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn ssim_rejects_small_inputs() {
        let a = gray(Plane::zeros(10, 32));
        assert!(matches!(ssim(&a, &a), Err(Error::TooSmall { .. })));
    }

    /// Per-window SSIM computed with explicit 2D sums.
    fn ssim_brute_force(a: &Plane, b: &Plane) -> f64 {
        let n = SSIM_WINDOW;
        let c = (n / 2) as f64;
        let mut g = vec![vec![0.0; n]; n];
        let mut gs = 0.0;
        for (i, row) in g.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let (di, dj) = (i as f64 - c, j as f64 - c);
                *v = (-(di * di + dj * dj) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
                gs += *v;
            }
        }
        let (c1, c2) = (0.0001, 0.0009);
        let (w, h) = a.dims();
        let mut total = 0.0;
        let mut count = 0;
        for y0 in 0..=h - n {
            for x0 in 0..=w - n {
                let (mut ma, mut mb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        let k = g[i][j] / gs;
                        let (x, y) = (a.get(x0 + j, y0 + i), b.get(x0 + j, y0 + i));
                        ma += k * x;
                        mb += k * y;
                        saa += k * x * x;
                        sbb += k * y * y;
                        sab += k * x * y;
                    }
                }
                let (va, vb, cov) = (saa - ma * ma, sbb - mb * mb, sab - ma * mb);
                total += (2.0 * ma * mb + c1) * (2.0 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
                count += 1;
            }
        }
        total / count as f64
    }

    #[test]
    fn inverted_binary_image_is_strongly_negative() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = Plane::from_fn(24, 24, |_, _| if rng.gen::<bool>() { 1.0 } else { 0.0 });
        let b = a.map(|v| 1.0 - v);
        let got = ssim_plane(&a, &b).unwrap();
        let oracle = ssim_brute_force(&a, &b);
        assert!((got - oracle).abs() < 1e-10);
        assert!(got < -0.5, "ssim {got}");
    }

    #[test]
    fn ssim_matches_brute_force_on_random_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_plane(16, 14, &mut rng);
        let b = a.map(|v| 0.7 * v + 0.1);
        assert!((ssim_plane(&a, &b).unwrap() - ssim_brute_force(&a, &b)).abs() < 1e-10);
    }
}
