//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 runtime error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::ArrayView2;

use crate::error::{Error, Result};
use crate::eval::{
    euclidean_error, generate_synthetic_dataset, icosphere, pca_fit, run_benchmark_on, BenchmarkSpec,
    Dataset, ErrorStats, SplitSpec, SynthConfig,
};
use crate::mesh::Mesh;
use crate::model::{
    build_hierarchy, build_model, latent_sweep, load_checkpoint, sample_gaussian, save_checkpoint,
    train_autoencoder, write_history_csv, write_mesh_series, MeshHierarchy, SWEEP_FACTOR,
};
use crate::nn::TrainConfig;
use crate::sampling::decimate;

#[derive(Debug, Parser)]
#[command(name = "meshae", version, about = "Convolutional mesh autoencoder toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decimate a triangle mesh to a vertex subset.
    Decimate {
        input: PathBuf,
        #[arg(long)]
        target: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write the down-sampling matrix here.
        #[arg(long)]
        qd: Option<PathBuf>,
    },
    /// Build a mesh pyramid and write it as an archive directory.
    Hierarchy {
        template: PathBuf,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train an autoencoder on every frame of a dataset.
    Train {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// History CSV; defaults to the checkpoint path with `.history.csv`.
        #[arg(long)]
        history: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
    /// Reconstruction error of a trained model on a dataset.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
    },
    /// Decode a mesh with one latent component scaled by 1 + factor * j, j in -4..=4.
    Sweep {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = SWEEP_FACTOR)]
        factor: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode latent vectors drawn from a truncated unit Gaussian.
    Sample {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 3.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the PCA baseline and report its test error.
    Pca {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 8)]
        k: usize,
        #[command(flatten)]
        split: SplitArgs,
    },
    /// Autoencoder versus PCA on one split; writes CSV reports.
    Benchmark {
        /// Dataset directory; the default synthetic dataset when omitted.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long, default_value = "benchmark")]
        out: PathBuf,
    },
    /// Generate the synthetic expression dataset.
    Synth {
        /// Template OBJ; a 642-vertex icosphere when omitted.
        #[arg(long)]
        template: Option<PathBuf>,
        #[arg(long, default_value_t = 12)]
        sequences: usize,
        #[arg(long, default_value_t = 60)]
        frames: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Interpolation,
    Extrapolation,
    /// No split: every frame is a test frame.
    All,
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[arg(long, value_enum, default_value_t = Mode::Interpolation)]
    mode: Mode,
    /// Sequence held out in extrapolation mode.
    #[arg(long)]
    hold: Option<String>,
    #[arg(long, default_value_t = 10)]
    window: usize,
    #[arg(long = "split-seed", default_value_t = 0)]
    split_seed: u64,
}

impl SplitArgs {
    fn spec(&self) -> Result<Option<SplitSpec>> {
        Ok(match self.mode {
            Mode::Interpolation => Some(SplitSpec::Interpolation {
                window: self.window,
                seed: self.split_seed,
            }),
            Mode::Extrapolation => Some(SplitSpec::Extrapolation {
                held_out: self
                    .hold
                    .clone()
                    .ok_or_else(|| Error::arg("--mode extrapolation needs --hold <sequence>"))?,
            }),
            Mode::All => None,
        })
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Argument(_) => 1,
                _ => 2,
            }
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<TrainConfig> {
    match path {
        Some(p) => TrainConfig::load(p),
        None => Ok(TrainConfig::default()),
    }
}

fn with_extension_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut p = path.to_path_buf();
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    p.set_file_name(format!("{stem}{suffix}"));
    p
}

fn split_frames<'a>(
    dataset: &'a Dataset,
    split: Option<&SplitSpec>,
) -> Result<(Vec<ArrayView2<'a, f64>>, Vec<ArrayView2<'a, f64>>)> {
    let refs = match split {
        Some(s) => s.apply(dataset)?,
        None => crate::eval::Split {
            train: dataset.frame_refs(),
            test: dataset.frame_refs(),
        },
    };
    let train = refs.train.iter().map(|&r| dataset.frame(r).view()).collect();
    let test = refs.test.iter().map(|&r| dataset.frame(r).view()).collect();
    Ok((train, test))
}

fn print_stats(label: &str, stats: &ErrorStats) {
    println!(
        "{label}: mean {:.6} std {:.6} median {:.6} max {:.6} over {} vertices",
        stats.mean, stats.std, stats.median, stats.max, stats.count
    );
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Decimate {
            input,
            target,
            out,
            qd,
        } => {
            let mesh = Mesh::load_obj(&input)?;
            let (coarse, down) = decimate(&mesh, target)?;
            coarse.save_obj(&out)?;
            if let Some(path) = qd {
                down.matrix.save(&path)?;
            }
            println!(
                "{} -> {} vertices, {} faces",
                mesh.num_vertices(),
                coarse.num_vertices(),
                coarse.num_faces()
            );
        }
        Command::Hierarchy {
            template,
            levels,
            out,
        } => {
            let h = build_hierarchy(&Mesh::load_obj(&template)?, levels)?;
            h.save(&out)?;
            println!("levels {:?}", h.vertex_counts());
        }
        Command::Train {
            config,
            data,
            out,
            history,
            levels,
        } => {
            let cfg = load_config(config.as_deref())?;
            let dataset = Dataset::load(&data)?;
            let hierarchy = build_hierarchy(&dataset.template()?, levels)?;
            let frames: Vec<_> = dataset.frame_refs().iter().map(|&r| dataset.frame(r).view()).collect();
            let mut model = build_model(&cfg, &hierarchy)?;
            let records = train_autoencoder(&mut model, &hierarchy, &frames, &[], &cfg)?;
            save_checkpoint(&out, &model, &hierarchy, Some(&cfg))?;
            let hist_path = history.unwrap_or_else(|| with_extension_suffix(&out, ".history.csv"));
            let mut buf = Vec::new();
            write_history_csv(&records, &mut buf)?;
            std::fs::write(&hist_path, buf)?;
            if let Some(last) = records.last() {
                println!("final train L1 {:.6}", last.train_l1);
            }
        }
        Command::Eval {
            checkpoint,
            data,
            split,
        } => {
            let ck = load_checkpoint(&checkpoint)?;
            let dataset = Dataset::load(&data)?;
            let (_, test) = split_frames(&dataset, split.spec()?.as_ref())?;
            let mut errors = Vec::new();
            for gt in &test {
                let rec = ck.model.reconstruct(&ck.hierarchy, *gt)?;
                errors.extend(euclidean_error(rec.view(), *gt)?);
            }
            print_stats("autoencoder", &ErrorStats::from_errors(&errors)?);
        }
        Command::Sweep {
            checkpoint,
            mesh,
            dim,
            factor,
            out,
        } => {
            let ck = load_checkpoint(&checkpoint)?;
            let mesh = Mesh::load_obj(&mesh)?;
            check_topology(&ck.hierarchy, &mesh)?;
            let outputs = latent_sweep(&ck.model, &ck.hierarchy, mesh.vertices().view(), dim, factor)?;
            let labeled: Vec<_> = outputs
                .into_iter()
                .map(|(j, v)| (format!("dim={dim} j={j}"), v))
                .collect();
            write_mesh_series(&out, "sweep", mesh.faces(), &labeled)?;
            println!("wrote {} meshes to {}", labeled.len(), out.display());
        }
        Command::Sample {
            checkpoint,
            count,
            sigma,
            seed,
            out,
        } => {
            let ck = load_checkpoint(&checkpoint)?;
            let samples = sample_gaussian(&ck.model, &ck.hierarchy, count, sigma, seed)?;
            let labeled: Vec<_> = samples
                .into_iter()
                .enumerate()
                .map(|(i, v)| (format!("sample={i}"), v))
                .collect();
            write_mesh_series(&out, "sample", ck.hierarchy.mesh(0).faces(), &labeled)?;
            println!("wrote {} meshes to {}", labeled.len(), out.display());
        }
        Command::Pca { data, k, split } => {
            let dataset = Dataset::load(&data)?;
            let (train, test) = split_frames(&dataset, split.spec()?.as_ref())?;
            let pca = pca_fit(&train, k)?;
            let mut errors = Vec::new();
            for gt in &test {
                errors.extend(euclidean_error(pca.reconstruct(*gt)?.view(), *gt)?);
            }
            println!("parameters {}", pca.num_parameters());
            print_stats("pca", &ErrorStats::from_errors(&errors)?);
        }
        Command::Benchmark {
            data,
            config,
            split,
            levels,
            out,
        } => {
            let cfg = load_config(config.as_deref())?;
            let dataset = match data {
                Some(d) => Dataset::load(&d)?,
                None => generate_synthetic_dataset(&icosphere(3), &SynthConfig::default())?,
            };
            let split = split
                .spec()?
                .ok_or_else(|| Error::arg("benchmark needs an interpolation or extrapolation split"))?;
            let mut spec = BenchmarkSpec::new(split, cfg);
            spec.num_levels = levels;
            let hierarchy = build_hierarchy(&dataset.template()?, spec.num_levels)?;
            let (report, _) = run_benchmark_on(&dataset, &hierarchy, &spec)?;
            report.write_to_dir(&out)?;
            print!("{}", report.to_csv());
        }
        Command::Synth {
            template,
            sequences,
            frames,
            seed,
            amplitude,
            out,
        } => {
            let template = match template {
                Some(p) => Mesh::load_obj(&p)?,
                None => icosphere(3),
            };
            let cfg = SynthConfig {
                num_sequences: sequences,
                frames_per_sequence: frames,
                seed,
                amplitude,
            };
            let dataset = generate_synthetic_dataset(&template, &cfg)?;
            dataset.save(&out)?;
            println!(
                "{} sequences x {} frames of {} vertices",
                sequences,
                frames,
                template.num_vertices()
            );
        }
    }
    Ok(())
}

fn check_topology(h: &MeshHierarchy, mesh: &Mesh) -> Result<()> {
    if mesh.faces() != h.mesh(0).faces() {
        return Err(Error::Topology(
            "mesh does not share the model's template topology".into(),
        ));
    }
    Ok(())
}
