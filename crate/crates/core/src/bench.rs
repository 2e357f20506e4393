//! Batch evaluation: decimate, interpolate, score, aggregate.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::warn;
use rayon::prelude::*;

use crate::decimation::{decimate, DecimationScheme};
use crate::error::{Error, Result};
use crate::io::load_image;
use crate::metrics::{psnr, ssim};
use crate::pipeline::{interpolate, PipelineConfig, ScaleFactor};
use crate::plane::Image;
use crate::wavelet::WaveletKind;

pub const DETAIL_HEADER: [&str; 8] = ["image", "scheme", "factor", "wavelet", "repeat", "psnr_db", "ssim", "seconds"];

pub const SUMMARY_HEADER: [&str; 11] = [
    "scheme",
    "factor",
    "wavelet",
    "n",
    "n_infinite",
    "psnr_mean",
    "psnr_std",
    "ssim_mean",
    "ssim_std",
    "seconds_mean",
    "seconds_std",
];

const IMAGE_EXTENSIONS: [&str; 6] = ["png", "pgm", "ppm", "pnm", "pbm", "pam"];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRun {
    pub dataset_path: PathBuf,
    pub schemes: Vec<DecimationScheme>,
    pub factors: Vec<usize>,
    pub wavelets: Vec<WaveletKind>,
    pub repeats: usize,
    pub seed_base: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Round the decimated input and the output to 8-bit levels, as if they
    /// had been written to and read back from disk.
    pub quantize: bool,
    /// Template for every run; the wavelet and seed are overridden per task.
    pub pipeline: PipelineConfig,
}

impl BenchRun {
    pub fn new(dataset_path: impl Into<PathBuf>) -> Self {
        Self {
            dataset_path: dataset_path.into(),
            schemes: DecimationScheme::ALL.to_vec(),
            factors: vec![2],
            wavelets: vec![WaveletKind::Db2],
            repeats: 5,
            seed_base: 0,
            workers: Some(1),
            quantize: true,
            pipeline: PipelineConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub image: String,
    pub scheme: DecimationScheme,
    pub factor: usize,
    pub wavelet: WaveletKind,
    pub repeat: usize,
    pub psnr_db: f64,
    pub ssim: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scheme: DecimationScheme,
    pub factor: usize,
    pub wavelet: WaveletKind,
    pub n: usize,
    pub n_infinite: usize,
    pub psnr_mean: f64,
    pub psnr_std: f64,
    pub ssim_mean: f64,
    pub ssim_std: f64,
    pub seconds_mean: f64,
    pub seconds_std: f64,
}

/// 64-bit FNV-1a; stable across platforms and releases.
fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Seed of one (image, repeat) task.
pub fn task_seed(seed_base: u64, image_id: &str, repeat: usize) -> u64 {
    let bytes = image_id.bytes().chain([0u8]).chain((repeat as u64).to_le_bytes());
    seed_base ^ fnv1a(bytes)
}

/// Decodable images of a directory, sorted by file name. Unreadable files
/// are skipped with a warning.
pub fn load_dataset(dir: &Path) -> Result<Vec<(String, Image)>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        })
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        let id = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        match load_image(&p) {
            Ok(img) => out.push((id, img)),
            Err(e) => warn!("skipping {}: {e}", p.display()),
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyDataset(dir.to_path_buf()));
    }
    Ok(out)
}

struct Task<'a> {
    id: &'a str,
    image: &'a Image,
    scheme: DecimationScheme,
    factor: usize,
    wavelet: WaveletKind,
    repeat: usize,
}

fn crop_to_multiple(image: &Image, factor: usize) -> Result<Image> {
    let (w, h) = image.dims();
    let (cw, ch) = (w - w % factor, h - h % factor);
    if (cw, ch) == (w, h) {
        return Ok(image.clone());
    }
    Image::from_planes(image.planes().iter().map(|p| p.crop(cw, ch)).collect())
}

fn run_task(task: &Task<'_>, config: &BenchRun) -> Result<BenchRecord> {
    let truth = crop_to_multiple(task.image, task.factor)?;
    let mut input = decimate(&truth, task.scheme, task.factor)?;
    if config.quantize {
        input = input.quantized_8bit();
    }
    let mut pipeline = config.pipeline.clone();
    pipeline.wavelet = task.wavelet;
    pipeline.pso.seed = task_seed(config.seed_base, task.id, task.repeat);
    let alpha = ScaleFactor::new(task.factor as f64)?;

    let start = Instant::now();
    let result = interpolate(&input, alpha, &pipeline)?;
    let seconds = start.elapsed().as_secs_f64().max(1e-9);

    let mut output = result.image;
    if config.quantize {
        output = output.quantized_8bit();
    }
    Ok(BenchRecord {
        image: task.id.to_string(),
        scheme: task.scheme,
        factor: task.factor,
        wavelet: task.wavelet,
        repeat: task.repeat,
        psnr_db: psnr(&truth, &output, 1.0)?,
        ssim: ssim(&truth, &output)?,
        seconds,
    })
}

fn sort_key(r: &BenchRecord) -> (String, DecimationScheme, usize, WaveletKind, usize) {
    (r.image.clone(), r.scheme, r.factor, r.wavelet, r.repeat)
}

/// Runs every (image, scheme, factor, wavelet, repeat) task. Records come
/// back in a fixed order regardless of worker count. Tasks whose input is
/// too small for the pipeline are skipped with a warning.
pub fn run_benchmark(config: &BenchRun) -> Result<Vec<BenchRecord>> {
    if config.repeats == 0 || config.schemes.is_empty() || config.factors.is_empty() || config.wavelets.is_empty() {
        return Err(Error::InvalidConfig("benchmark needs at least one scheme, factor, wavelet and repeat".into()));
    }
    let dataset = load_dataset(&config.dataset_path)?;
    let mut tasks = Vec::new();
    for (id, image) in &dataset {
        for &scheme in &config.schemes {
            for &factor in &config.factors {
                for &wavelet in &config.wavelets {
                    for repeat in 0..config.repeats {
                        tasks.push(Task {
                            id,
                            image,
                            scheme,
                            factor,
                            wavelet,
                            repeat,
                        });
                    }
                }
            }
        }
    }

    let run_all = || -> Vec<(usize, Result<BenchRecord>)> {
        tasks.par_iter().enumerate().map(|(i, t)| (i, run_task(t, config))).collect()
    };
    let results = match config.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(run_all),
        None => run_all(),
    };

    let mut records = Vec::with_capacity(results.len());
    for (i, r) in results {
        match r {
            Ok(rec) => records.push(rec),
            Err(e @ (Error::TooSmall { .. } | Error::NotDivisible { .. })) => {
                let t = &tasks[i];
                warn!("skipping {} {} x{}: {e}", t.id, t.scheme, t.factor);
            }
            Err(e) => return Err(e),
        }
    }
    records.sort_by_key(sort_key);
    Ok(records)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Mean and sample standard deviation per (scheme, factor, wavelet).
/// Infinite PSNR rows are left out of the PSNR statistics and counted in
/// `n_infinite`; when every row is infinite the PSNR mean is infinite.
pub fn summarize(records: &[BenchRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(DecimationScheme, usize, WaveletKind), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.scheme, r.factor, r.wavelet)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((scheme, factor, wavelet), rows)| {
            let finite: Vec<f64> = rows.iter().map(|r| r.psnr_db).filter(|v| v.is_finite()).collect();
            let n_infinite = rows.len() - finite.len();
            let (psnr_mean, psnr_std) = if finite.is_empty() {
                (f64::INFINITY, 0.0)
            } else {
                mean_std(&finite)
            };
            let (ssim_mean, ssim_std) = mean_std(&rows.iter().map(|r| r.ssim).collect::<Vec<_>>());
            let (seconds_mean, seconds_std) = mean_std(&rows.iter().map(|r| r.seconds).collect::<Vec<_>>());
            SummaryRow {
                scheme,
                factor,
                wavelet,
                n: rows.len(),
                n_infinite,
                psnr_mean,
                psnr_std,
                ssim_mean,
                ssim_std,
                seconds_mean,
                seconds_std,
            }
        })
        .collect()
}

/// Path of the summary written next to a detail report:
/// `results.csv` becomes `results_summary.csv`.
pub fn summary_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}_summary.csv"))
}

/// Writes the detail CSV at `path` and the summary CSV at [`summary_path`].
pub fn write_report(records: &[BenchRecord], path: &Path) -> Result<()> {
    write_details(records, path)?;
    write_summary(&summarize(records), &summary_path(path))
}

pub fn write_details(records: &[BenchRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(DETAIL_HEADER)?;
    for r in records {
        w.write_record([
            r.image.clone(),
            r.scheme.to_string(),
            r.factor.to_string(),
            r.wavelet.to_string(),
            r.repeat.to_string(),
            r.psnr_db.to_string(),
            r.ssim.to_string(),
            r.seconds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.scheme.to_string(),
            r.factor.to_string(),
            r.wavelet.to_string(),
            r.n.to_string(),
            r.n_infinite.to_string(),
            r.psnr_mean.to_string(),
            r.psnr_std.to_string(),
            r.ssim_mean.to_string(),
            r.ssim_std.to_string(),
            r.seconds_mean.to_string(),
            r.seconds_std.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str) -> Result<T> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Report(format!("bad `{name}` field in line {:?}", rec.position().map(|p| p.line()))))
}

/// Parses a detail CSV written by [`write_report`].
pub fn read_report(path: &Path) -> Result<Vec<BenchRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    if r.headers()?.iter().ne(DETAIL_HEADER) {
        return Err(Error::Report(format!("unexpected header in {}", path.display())));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        out.push(BenchRecord {
            image: field(&rec, 0, "image")?,
            scheme: field(&rec, 1, "scheme")?,
            factor: field(&rec, 2, "factor")?,
            wavelet: field(&rec, 3, "wavelet")?,
            repeat: field(&rec, 4, "repeat")?,
            psnr_db: field(&rec, 5, "psnr_db")?,
            ssim: field(&rec, 6, "ssim")?,
            seconds: field(&rec, 7, "seconds")?,
        });
    }
    Ok(out)
}
