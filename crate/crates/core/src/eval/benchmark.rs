//! Autoencoder versus PCA on one train/test split.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::ArrayView2;

use super::dataset::Dataset;
use super::pca::pca_fit;
use super::split::SplitSpec;
use super::stats::{cumulative_error_histogram, euclidean_error, histogram_csv, uniform_edges, ErrorStats};
use crate::error::Result;
use crate::model::{
    build_hierarchy, build_model, train_autoencoder, write_history_csv, AutoencoderModel,
    EpochRecord, MeshHierarchy,
};
use crate::nn::{Parameterized, TrainConfig};

/// Published registered-face numbers (mm), kept in the report footer for scale.
pub const REFERENCE_ROWS: [(&str, usize, f64, f64, f64); 2] = [
    ("pca", 120_552, 1.639, 1.638, 1.101),
    ("mesh_autoencoder", 33_856, 0.845, 0.994, 0.496),
];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSpec {
    pub split: SplitSpec,
    /// PCA uses `train.z_dim` components so both models share one latent size.
    pub train: TrainConfig,
    pub num_levels: usize,
    pub histogram_bins: usize,
}

impl BenchmarkSpec {
    pub fn new(split: SplitSpec, train: TrainConfig) -> Self {
        Self {
            split,
            train,
            num_levels: 4,
            histogram_bins: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelResult {
    pub name: String,
    pub latent_dim: usize,
    pub parameters: usize,
    pub stats: ErrorStats,
    /// Per-vertex errors pooled over all test frames.
    pub errors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub split: String,
    pub train_frames: usize,
    pub test_frames: usize,
    pub results: Vec<ModelResult>,
    pub history: Vec<EpochRecord>,
    pub histogram_edges: Vec<f64>,
}

impl BenchmarkReport {
    pub fn result(&self, name: &str) -> Option<&ModelResult> {
        self.results.iter().find(|r| r.name == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("split,model,latent_dim,parameters,train_frames,test_frames,mean,std,median,max\n");
        for r in &self.results {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:.9e},{:.9e},{:.9e},{:.9e}",
                self.split,
                r.name,
                r.latent_dim,
                r.parameters,
                self.train_frames,
                self.test_frames,
                r.stats.mean,
                r.stats.std,
                r.stats.median,
                r.stats.max
            );
        }
        out.push_str("# reference numbers on registered faces (mm), 8-dimensional latent space\n");
        for (name, params, mean, std, median) in REFERENCE_ROWS {
            let _ = writeln!(out, "# reference,{name},8,{params},,,{mean},{std},{median},");
        }
        out
    }

    pub fn histogram_csv(&self, name: &str) -> Option<String> {
        let r = self.result(name)?;
        let fractions = cumulative_error_histogram(&r.errors, &self.histogram_edges).ok()?;
        Some(histogram_csv(&self.histogram_edges, &fractions))
    }

    /// Writes `report.csv`, `history.csv` and `histogram_<model>.csv`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.csv"), self.to_csv())?;
        let mut hist = Vec::new();
        write_history_csv(&self.history, &mut hist)?;
        std::fs::write(dir.join("history.csv"), hist)?;
        for r in &self.results {
            if let Some(csv) = self.histogram_csv(&r.name) {
                std::fs::write(dir.join(format!("histogram_{}.csv", r.name)), csv)?;
            }
        }
        Ok(())
    }
}

/// Builds the hierarchy from the dataset's first frame, then runs
/// [`run_benchmark_on`].
pub fn run_benchmark(dataset: &Dataset, spec: &BenchmarkSpec) -> Result<BenchmarkReport> {
    let hierarchy = build_hierarchy(&dataset.template()?, spec.num_levels)?;
    run_benchmark_on(dataset, &hierarchy, spec).map(|(report, _)| report)
}

/// Trains the autoencoder and fits PCA on the same training frames, then
/// scores both on the same test frames.
pub fn run_benchmark_on(
    dataset: &Dataset,
    hierarchy: &MeshHierarchy,
    spec: &BenchmarkSpec,
) -> Result<(BenchmarkReport, AutoencoderModel)> {
    let split = spec.split.apply(dataset)?;
    let train: Vec<ArrayView2<'_, f64>> = dataset.frames(&split.train).map(|f| f.view()).collect();
    let test: Vec<ArrayView2<'_, f64>> = dataset.frames(&split.test).map(|f| f.view()).collect();
    let k = spec.train.z_dim;

    let mut model = build_model(&spec.train, hierarchy)?;
    let history = train_autoencoder(&mut model, hierarchy, &train, &[], &spec.train)?;
    let pca = pca_fit(&train, k)?;

    let mut ae_errors = Vec::new();
    let mut pca_errors = Vec::new();
    for gt in &test {
        let rec = model.reconstruct(hierarchy, *gt)?;
        ae_errors.extend(euclidean_error(rec.view(), *gt)?);
        let rec = pca.reconstruct(*gt)?;
        pca_errors.extend(euclidean_error(rec.view(), *gt)?);
    }
    let results = vec![
        ModelResult {
            name: "pca".into(),
            latent_dim: k,
            parameters: pca.num_parameters(),
            stats: ErrorStats::from_errors(&pca_errors)?,
            errors: pca_errors,
        },
        ModelResult {
            name: "autoencoder".into(),
            latent_dim: k,
            parameters: model.num_parameters(),
            stats: ErrorStats::from_errors(&ae_errors)?,
            errors: ae_errors,
        },
    ];
    let max = results.iter().map(|r| r.stats.max).fold(0.0, f64::max);
    let report = BenchmarkReport {
        split: spec.split.describe(),
        train_frames: train.len(),
        test_frames: test.len(),
        results,
        history,
        histogram_edges: uniform_edges(max, spec.histogram_bins),
    };
    Ok((report, model))
}
