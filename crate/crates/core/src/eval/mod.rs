//! Datasets, the PCA baseline, splits, error statistics and benchmarks.

pub mod benchmark;
pub mod dataset;
pub mod pca;
pub mod split;
pub mod stats;
pub mod synth;

pub use benchmark::{run_benchmark, run_benchmark_on, BenchmarkReport, BenchmarkSpec, ModelResult};
pub use dataset::{Dataset, FrameRef, Sequence};
pub use pca::{pca_fit, PcaModel};
pub use split::{is_partition, split_extrapolation, split_interpolation, Split, SplitSpec};
pub use stats::{cumulative_error_histogram, euclidean_error, uniform_edges, ErrorStats};
pub use synth::{dome_template, generate_synthetic_dataset, grid, icosphere, SynthConfig, EXPRESSION_NAMES};
