mod weights_file;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use psinterp::bench::{run_benchmark, summarize, summary_path, write_report, BenchRun};
use psinterp::{
    interpolate, interpolate_with_weights, load_image, model_channels, save_image, DecimationScheme, PipelineConfig,
    PsoConfig, ScaleFactor, WaveletKind,
};

use weights_file::WeightsFile;

/// Wavelet process-similarity image interpolation.
#[derive(Debug, Parser)]
#[command(name = "psinterp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Upscale one image.
    Interpolate(InterpolateArgs),
    /// Learn the fusion weights of one image and write them as JSON.
    Model(ModelArgs),
    /// Decimate, interpolate and score every image of a directory.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Wavelet filter: db2 or dmey [default: db2].
    #[arg(long)]
    wavelet: Option<WaveletKind>,
    /// Seed of the particle swarm.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Early stop once the best fitness moves less than this (dB).
    #[arg(long, default_value_t = 1e-6)]
    stall_tol: f64,
    /// Iteration cap of the particle swarm.
    #[arg(long, default_value_t = 15)]
    max_iters: usize,
}

impl SearchArgs {
    fn pipeline(&self, wavelet: WaveletKind) -> Result<PipelineConfig> {
        let defaults = PsoConfig::default();
        if self.max_iters == 0 {
            bail!("--max-iters must be at least 1");
        }
        let pso = PsoConfig {
            max_iters: self.max_iters,
            min_iters_before_early_stop: defaults.min_iters_before_early_stop.min(self.max_iters),
            stall_tolerance: self.stall_tol,
            seed: self.seed,
            ..defaults
        };
        pso.validate()?;
        Ok(PipelineConfig {
            wavelet,
            pso,
            ..Default::default()
        })
    }
}

#[derive(Debug, Args)]
struct InterpolateArgs {
    input: PathBuf,
    output: PathBuf,
    /// Scaling factor, greater than 1.
    #[arg(long, default_value_t = 2.0)]
    scale: f64,
    #[command(flatten)]
    search: SearchArgs,
    /// Use weights from a JSON file instead of modeling.
    #[arg(long, conflicts_with = "weights_out")]
    weights_in: Option<PathBuf>,
    /// Also write the learned weights as JSON.
    #[arg(long)]
    weights_out: Option<PathBuf>,
    /// Re-learn the weights at every 2x level.
    #[arg(long)]
    remodel_per_level: bool,
}

#[derive(Debug, Args)]
struct ModelArgs {
    input: PathBuf,
    #[command(flatten)]
    search: SearchArgs,
    /// Where to write the JSON; standard output if omitted.
    #[arg(long)]
    weights_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    /// Directory of PNG/PPM/PGM images.
    dataset: PathBuf,
    /// Detail CSV; the summary goes to `<stem>_summary.csv` next to it.
    #[arg(long)]
    report: PathBuf,
    /// Decimation schemes [default: all].
    #[arg(long, value_delimiter = ',')]
    schemes: Vec<DecimationScheme>,
    #[arg(long, value_delimiter = ',', default_value = "2")]
    factors: Vec<usize>,
    /// Wavelets to run [default: db2].
    #[arg(long, value_delimiter = ',')]
    wavelets: Vec<WaveletKind>,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Score unrounded samples instead of 8-bit levels.
    #[arg(long)]
    no_quantize: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    stall_tol: f64,
    #[arg(long, default_value_t = 15)]
    max_iters: usize,
}

fn format_weights(w: &[f64; 6]) -> String {
    let parts: Vec<String> = w.iter().map(|v| format!("{v:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

fn cmd_interpolate(args: &InterpolateArgs) -> Result<()> {
    let image = load_image(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let alpha = ScaleFactor::new(args.scale)?;
    let fixed = args.weights_in.as_deref().map(WeightsFile::read).transpose()?;
    let wavelet = match (&fixed, args.search.wavelet) {
        (Some(f), Some(w)) if f.wavelet()? != w => {
            bail!("--wavelet {w} disagrees with the weights file ({})", f.wavelet)
        }
        (Some(f), _) => f.wavelet()?,
        (None, w) => w.unwrap_or(WaveletKind::Db2),
    };
    let mut config = args.search.pipeline(wavelet)?;
    config.remodel_per_level = args.remodel_per_level;

    let start = Instant::now();
    let output = match &fixed {
        Some(file) => {
            let weights = file.fusion_weights()?;
            if weights.len() != image.channels() {
                bail!("weights file has {} channels, image has {}", weights.len(), image.channels());
            }
            let out = interpolate_with_weights(&image, alpha, &config, &weights)?;
            for (c, w) in weights.iter().enumerate() {
                println!("channel {c}: weights {} (from file)", format_weights(w.as_array()));
            }
            out
        }
        None => {
            let result = interpolate(&image, alpha, &config)?;
            for (c, m) in result.models.iter().enumerate() {
                println!(
                    "channel {c}: weights {} fitness {:.4} dB, {} iterations{}",
                    format_weights(m.weights.as_array()),
                    m.fitness_db,
                    m.iterations,
                    if m.degenerate { " (constant input)" } else { "" }
                );
            }
            if let Some(path) = &args.weights_out {
                WeightsFile::from_models(wavelet, &result.models, args.search.seed).write(path)?;
            }
            result.image
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    save_image(&output, &args.output).with_context(|| format!("writing {}", args.output.display()))?;
    let (w, h) = output.dims();
    println!("wrote {} ({w}x{h}) in {elapsed:.3} s", args.output.display());
    Ok(())
}

fn cmd_model(args: &ModelArgs) -> Result<()> {
    let image = load_image(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let wavelet = args.search.wavelet.unwrap_or(WaveletKind::Db2);
    let config = args.search.pipeline(wavelet)?;
    let models = model_channels(&image, &config)?;
    let file = WeightsFile::from_models(wavelet, &models, args.search.seed);
    match &args.weights_out {
        Some(path) => {
            file.write(path)?;
            for (c, m) in models.iter().enumerate() {
                println!(
                    "channel {c}: weights {} fitness {:.4} dB, {} iterations",
                    format_weights(m.weights.as_array()),
                    m.fitness_db,
                    m.iterations
                );
            }
        }
        None => println!("{}", serde_json::to_string_pretty(&file)?),
    }
    Ok(())
}

fn cmd_benchmark(args: &BenchmarkArgs) -> Result<()> {
    let search = SearchArgs {
        wavelet: None,
        seed: args.seed,
        stall_tol: args.stall_tol,
        max_iters: args.max_iters,
    };
    let mut config = BenchRun::new(&args.dataset);
    if !args.schemes.is_empty() {
        config.schemes = args.schemes.clone();
    }
    if !args.wavelets.is_empty() {
        config.wavelets = args.wavelets.clone();
    }
    config.factors = args.factors.clone();
    config.repeats = args.repeats;
    config.seed_base = args.seed;
    config.workers = Some(args.workers);
    config.quantize = !args.no_quantize;
    config.pipeline = search.pipeline(WaveletKind::Db2)?;

    let records = run_benchmark(&config)?;
    write_report(&records, &args.report).with_context(|| format!("writing {}", args.report.display()))?;
    println!("scheme      factor wavelet    n  psnr_db          ssim             seconds");
    for s in summarize(&records) {
        println!(
            "{:<11} {:>6} {:<7} {:>4}  {:>7.3} +/- {:<6.3} {:>6.4} +/- {:<6.4} {:>6.3} +/- {:.3}{}",
            s.scheme.name(),
            s.factor,
            s.wavelet.name(),
            s.n,
            s.psnr_mean,
            s.psnr_std,
            s.ssim_mean,
            s.ssim_std,
            s.seconds_mean,
            s.seconds_std,
            if s.n_infinite > 0 {
                format!("  ({} exact)", s.n_infinite)
            } else {
                String::new()
            }
        );
    }
    println!(
        "wrote {} and {} ({} records)",
        args.report.display(),
        summary_path(&args.report).display(),
        records.len()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Interpolate(a) => cmd_interpolate(a),
        Command::Model(a) => cmd_model(a),
        Command::Benchmark(a) => cmd_benchmark(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
