//! Image file I/O. Samples are mapped to `[0, 1]`: 8-bit by `/255`, 16-bit
//! by `/65535`. Alpha is dropped. Writing is always 8-bit.

use std::path::Path;

use image::{DynamicImage, GrayImage, RgbImage};

use crate::error::Result;
use crate::plane::{Image, Plane};

pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let dynamic = image::ImageReader::open(path.as_ref())?.with_guessed_format()?.decode()?;
    from_dynamic(dynamic)
}

pub fn from_dynamic(dynamic: DynamicImage) -> Result<Image> {
    let (w, h) = (dynamic.width() as usize, dynamic.height() as usize);
    let has_color = dynamic.color().has_color();
    let sixteen = dynamic.color().bytes_per_pixel() / dynamic.color().channel_count() == 2;
    let planes = match (has_color, sixteen) {
        (false, false) => vec![to_plane(w, h, dynamic.into_luma8().into_raw(), 1, 0, 255.0)],
        (false, true) => vec![to_plane(w, h, dynamic.into_luma16().into_raw(), 1, 0, 65535.0)],
        (true, false) => {
            let raw = dynamic.into_rgb8().into_raw();
            (0..3).map(|c| to_plane(w, h, raw.clone(), 3, c, 255.0)).collect()
        }
        (true, true) => {
            let raw = dynamic.into_rgb16().into_raw();
            (0..3).map(|c| to_plane(w, h, raw.clone(), 3, c, 65535.0)).collect()
        }
    };
    Image::from_planes(planes)
}

fn to_plane<T: Copy + Into<f64>>(w: usize, h: usize, raw: Vec<T>, stride: usize, offset: usize, max: f64) -> Plane {
    let data = raw.iter().skip(offset).step_by(stride).map(|&v| v.into() / max).collect();
    Plane::from_vec(w, h, data).expect("decoder buffer matches its dimensions")
}

#[inline]
fn to_u8(v: f64) -> u8 {
    (255.0 * v).round().clamp(0.0, 255.0) as u8
}

pub fn to_dynamic(img: &Image) -> DynamicImage {
    let (w, h) = (img.width() as u32, img.height() as u32);
    if img.channels() == 1 {
        let raw = img.plane(0).data().iter().map(|&v| to_u8(v)).collect();
        DynamicImage::ImageLuma8(GrayImage::from_raw(w, h, raw).expect("sized buffer"))
    } else {
        let n = img.width() * img.height();
        let mut raw = Vec::with_capacity(3 * n);
        for i in 0..n {
            for c in 0..3 {
                raw.push(to_u8(img.plane(c).data()[i]));
            }
        }
        DynamicImage::ImageRgb8(RgbImage::from_raw(w, h, raw).expect("sized buffer"))
    }
}

/// Writes an 8-bit file; the format follows the extension.
pub fn save_image(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    to_dynamic(img).save(path.as_ref())?;
    Ok(())
}
