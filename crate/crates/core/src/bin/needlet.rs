use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use needlets::pipeline::synthetic::{random_direction, render_sources, two_antipodal_sources};
use needlets::pipeline::{
    fit_demo, read_pfm, sparsify, write_pfm, CoeffFile, FitConfig, FitLoss, Provenance, ThresholdMode,
};
use needlets::sparse::default_apply_bands;
use needlets::transport::std_metric::{std_metric, DEFAULT_STD_POINTS};
use needlets::{Error, NeedletFrame, Result, Scheme, TransportConfig};

#[derive(Parser)]
#[command(name = "needlet", version, about = "Spherical needlet coefficients for HDR panoramas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FrameArgs {
    /// Dilation base B.
    #[arg(long = "B", default_value_t = 2.0)]
    b: f64,
    /// Highest needlet band.
    #[arg(long = "jmax", default_value_t = 3)]
    jmax: usize,
    /// Cubature scheme: paper_matching or exact.
    #[arg(long, default_value = "paper_matching")]
    scheme: String,
}

impl FrameArgs {
    fn frame(&self) -> Result<NeedletFrame> {
        NeedletFrame::new(self.b, self.jmax, self.scheme.parse::<Scheme>()?)
    }
}

#[derive(Args, Clone)]
struct TransportArgs {
    /// Marginal relaxation weight.
    #[arg(long, default_value_t = 10.0)]
    tau: f64,
    /// Entropic weight.
    #[arg(long, default_value_t = 0.05)]
    gamma: f64,
}

impl TransportArgs {
    fn config(&self) -> TransportConfig {
        TransportConfig {
            tau: self.tau,
            gamma: self.gamma,
            ..Default::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a PFM panorama into a coefficient file.
    Analyze {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        frame: FrameArgs,
        /// Soft-threshold bands j >= 2 with this lambda.
        #[arg(long, value_name = "LAMBDA")]
        sparsify: Option<f64>,
    },
    /// Reconstruct a panorama from a coefficient file.
    Synthesize {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = 128)]
        height: usize,
        /// Defaults to twice the height.
        #[arg(long)]
        width: Option<usize>,
    },
    /// Threshold the bands of a coefficient file.
    Sparsify {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// soft or hard.
        #[arg(long, default_value = "soft")]
        mode: String,
        /// Bands to threshold (default: every band above the first).
        #[arg(long, value_delimiter = ',')]
        bands: Option<Vec<usize>>,
    },
    /// Spherical transport distance between two panoramas.
    Std {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_STD_POINTS)]
        points: usize,
        #[command(flatten)]
        transport: TransportArgs,
    },
    /// Fit coefficients to a panorama by gradient descent.
    FitDemo {
        /// Target panorama; a synthetic two-light scene is used when absent.
        #[arg(long)]
        target: Option<PathBuf>,
        #[command(flatten)]
        frame: FrameArgs,
        #[command(flatten)]
        transport: TransportArgs,
        /// l2, stl or l2+stl.
        #[arg(long, default_value = "l2+stl")]
        loss: String,
        #[arg(long, default_value_t = 500)]
        iters: usize,
        #[arg(long, default_value_t = 0.5)]
        lr: f64,
        #[arg(long, default_value_t = 0.01)]
        stl_weight: f64,
        #[arg(long, default_value_t = DEFAULT_STD_POINTS)]
        points: usize,
        /// Seed for the synthetic target.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Height of the synthetic target.
        #[arg(long, default_value_t = 64)]
        height: usize,
        /// Where to write the fitted coefficients.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Where to write the JSON report (stdout when absent).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Describe a frame.
    FrameInfo {
        #[command(flatten)]
        frame: FrameArgs,
    },
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("NEEDLET_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("NEEDLET_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn print_line(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    print_line(&serde_json::to_string_pretty(value)?)
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Analyze {
            input,
            output,
            frame,
            sparsify: lambda,
        } => {
            let frame = frame.frame()?;
            let map = read_pfm(&input)?;
            if map.unusual_aspect() {
                eprintln!(
                    "warning: {}x{} panorama is not 2:1",
                    map.width(),
                    map.height()
                );
            }
            let mut coeffs = frame.analyze_map(&map)?;
            let mut provenance = Provenance {
                note: format!("analyze {}", input.display()),
                sparsify: None,
            };
            if let Some(lambda) = lambda {
                let (out, record) = sparsify(&coeffs, lambda, &default_apply_bands(frame.j_max()), ThresholdMode::Soft)?;
                coeffs = out;
                provenance.sparsify = Some(record);
            }
            CoeffFile::from_coeffs(&frame, &coeffs, provenance)?.write(&output)
        }
        Command::Synthesize {
            input,
            output,
            height,
            width,
        } => {
            let file = CoeffFile::read(&input)?;
            let frame = file.frame()?;
            let signal = frame.synthesize(&file.coeffs()?, height, width.unwrap_or(2 * height))?;
            let (map, negatives) = signal.clamp_negative();
            eprintln!(
                "clamped {negatives} negative values of {}",
                3 * map.height() * map.width()
            );
            write_pfm(&map, &output)
        }
        Command::Sparsify {
            input,
            output,
            lambda,
            mode,
            bands,
        } => {
            let mode: ThresholdMode = mode.parse()?;
            let file = CoeffFile::read(&input)?;
            let frame = file.frame()?;
            let bands: BTreeSet<usize> = match bands {
                Some(b) => b.into_iter().collect(),
                None => default_apply_bands(frame.j_max()),
            };
            let (coeffs, record) = sparsify(&file.coeffs()?, lambda, &bands, mode)?;
            let provenance = Provenance {
                note: file.provenance.note.clone(),
                sparsify: Some(record),
            };
            CoeffFile::from_coeffs(&frame, &coeffs, provenance)?.write(&output)
        }
        Command::Std {
            a,
            b,
            points,
            transport,
        } => {
            let report = std_metric(&read_pfm(&a)?, &read_pfm(&b)?, points, &transport.config())?;
            if !report.converged {
                eprintln!("warning: Sinkhorn hit the iteration cap");
            }
            print_line(&report.distance.to_string())?;
            print_json(&report)
        }
        Command::FitDemo {
            target,
            frame,
            transport,
            loss,
            iters,
            lr,
            stl_weight,
            points,
            seed,
            height,
            output,
            report,
        } => {
            let frame = frame.frame()?;
            let target = match target {
                Some(path) => read_pfm(path)?,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let dir = random_direction(&mut rng);
                    render_sources(height, 2 * height, &two_antipodal_sources(dir, 8.0, [4.0, 3.0, 2.0]))
                }
            };
            let cfg = FitConfig {
                loss: loss.parse::<FitLoss>()?,
                iters,
                lr,
                stl_weight,
                transport: transport.config(),
                std_points: points,
            };
            let (fit, coeffs) = fit_demo(&target, &frame, &cfg)?;
            eprintln!(
                "STD {:.6} -> {:.6} in {:.1} s",
                fit.initial_std, fit.final_std, fit.wall_time_s
            );
            if let Some(path) = output {
                let provenance = Provenance {
                    note: format!("fit-demo loss={} iters={iters} lr={lr} seed={seed}", cfg.loss),
                    sparsify: None,
                };
                CoeffFile::from_coeffs(&frame, &coeffs, provenance)?.write(path)?;
            }
            match report {
                Some(path) => {
                    std::fs::write(path, serde_json::to_string_pretty(&fit)? + "\n")?;
                    Ok(())
                }
                None => print_json(&fit),
            }
        }
        Command::FrameInfo { frame } => {
            let frame = frame.frame()?;
            let bands: Vec<_> = (1..=frame.j_max())
                .map(|j| {
                    let (lo, hi) = frame.band_degrees(j)?;
                    let band = frame.band(j)?;
                    Ok(json!({
                        "j": j,
                        "points": band.points.len(),
                        "degrees": [lo, hi],
                        "lmax_exact": band.lmax_exact,
                    }))
                })
                .collect::<Result<_>>()?;
            print_json(&json!({
                "B": frame.b(),
                "j_max": frame.j_max(),
                "scheme": frame.scheme().as_str(),
                "lmax": frame.lmax(),
                "lowpass_len": frame.lowpass_len(),
                "coefficients_per_channel": frame.coefficient_count(),
                "partition_error": frame.window().partition_error(frame.lmax()),
                "bands": bands,
            }))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
