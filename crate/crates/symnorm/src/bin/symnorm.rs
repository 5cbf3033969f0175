use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use symnorm::commands::{self, SplitFilter};
use symnorm::config::RunConfig;
use symnorm::io::write_atomic;
use symnorm::{Error, Result};
use symnorm_core::orientation::ViewPose;

/// Symmetry planes, normal-map ground truth and evaluation for 3D shapes.
///
/// Exit codes: 0 success, 1 internal error, 2 input or parse error,
/// 3 geometric or degenerate input.
#[derive(Parser)]
#[command(name = "symnorm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// `key = value` config file merged over the defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config file.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    All,
    Train,
    Test,
}

impl From<SplitArg> for SplitFilter {
    fn from(s: SplitArg) -> Self {
        match s {
            SplitArg::All => SplitFilter::All,
            SplitArg::Train => SplitFilter::Train,
            SplitArg::Test => SplitFilter::Test,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Detect reflection-symmetry planes of a mesh.
    Detect {
        obj: PathBuf,
        /// Output plane file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Render a normal map, depth map and label map for one pose.
    Render {
        obj: PathBuf,
        /// Output prefix; writes PREFIX.normals.pfm, PREFIX.depth.pfm, PREFIX.labels.pgm.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        az: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        el: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        cyclo: f64,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        height: Option<usize>,
        /// Vertical field of view in degrees.
        #[arg(long)]
        fov: Option<f64>,
        /// Bins of the hemisphere normal codebook.
        #[arg(long)]
        codebook_k: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Build a corpus manifest from CORPUS/<category>/<model_id>.obj.
    Build {
        corpus: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Renderings per model.
        #[arg(long)]
        views: Option<usize>,
        /// Viewpoint distribution, V_N or V_D.
        #[arg(long)]
        view_setting: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Score symmetry predictions (image_id, nx, ny, nz, confidence per line).
    EvalSym {
        manifest: PathBuf,
        predictions: PathBuf,
        /// Angular match threshold.
        #[arg(long, default_value_t = 10.0)]
        theta_deg: f64,
        #[arg(long, value_enum, default_value_t = SplitArg::All)]
        split: SplitArg,
        /// Report directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Score predicted normal maps (PFM) or label maps (PGM) named by image id.
    EvalNormals {
        manifest: PathBuf,
        pred_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = SplitArg::All)]
        split: SplitArg,
        /// Report directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Write uniform-random symmetry predictions for every image.
    Baseline {
        manifest: PathBuf,
        /// Codebook size; the manifest's symmetry codebook size if omitted.
        #[arg(long)]
        codebook_k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = SplitArg::All)]
        split: SplitArg,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Input(format!("cannot write to standard output: {e}"))),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Detect { obj, out, common } => {
            let cfg = load_config(&common)?;
            let (_, text) = commands::cmd_detect(&obj, &cfg)?;
            emit(out.as_deref(), &text)
        }
        Command::Render { obj, out, az, el, cyclo, width, height, fov, codebook_k, common } => {
            let mut cfg = load_config(&common)?;
            if let Some(w) = width {
                cfg.camera.width = w;
            }
            if let Some(h) = height {
                cfg.camera.height = h;
            }
            if let Some(f) = fov {
                cfg.camera.fov_y_deg = f;
            }
            if let Some(k) = codebook_k {
                cfg.normal_codebook_k = k;
            }
            let pose = ViewPose::new(az, el, cyclo)?;
            let files = commands::cmd_render(&obj, &pose, &cfg, &out)?;
            println!("{}\n{}\n{}", files.normals.display(), files.depth.display(), files.labels.display());
            Ok(())
        }
        Command::Build { corpus, out, views, view_setting, common } => {
            let mut cfg = load_config(&common)?;
            if let Some(v) = views {
                cfg.per_model_views = v;
            }
            if let Some(v) = view_setting {
                cfg.set("view_setting", &v).map_err(Error::Input)?;
            }
            let summary = commands::cmd_build(&corpus, &out, &cfg)?;
            let m = &summary.manifest;
            let train = m.records.iter().filter(|r| r.split == symnorm::manifest::Split::Train).count();
            println!(
                "{} records ({} train, {} test), {} models skipped, {} warnings",
                m.records.len(),
                train,
                m.records.len() - train,
                summary.skipped.len(),
                summary.warnings.len()
            );
            Ok(())
        }
        Command::EvalSym { manifest, predictions, theta_deg, split, out } => {
            let report = commands::cmd_eval_sym(&manifest, &predictions, theta_deg, split.into(), &out)?;
            print!("{}", report.text);
            Ok(())
        }
        Command::EvalNormals { manifest, pred_dir, split, out } => {
            let report = commands::cmd_eval_normals(&manifest, &pred_dir, split.into(), &out)?;
            print!("{}", report.text);
            if report.failures.is_empty() {
                Ok(())
            } else {
                Err(Error::PartialFailure { failed: report.failures.len() })
            }
        }
        Command::Baseline { manifest, codebook_k, seed, split, out } => {
            let text = commands::cmd_baseline(&manifest, codebook_k, seed, split.into())?;
            emit(out.as_deref(), &text)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { symnorm::EXIT_INPUT } else { symnorm::EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    // panics are internal errors
    let outcome = std::panic::catch_unwind(|| run(cli));
    match outcome {
        Ok(Ok(())) => ExitCode::from(symnorm::EXIT_OK as u8),
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(symnorm::EXIT_INTERNAL as u8),
    }
}
