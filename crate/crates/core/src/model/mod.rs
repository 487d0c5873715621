//! Autoencoder assembly, training, latent tools and checkpoints.

mod autoencoder;
mod checkpoint;
mod hierarchy;
mod latent;
mod train;

pub use autoencoder::{
    count_parameters, AutoencoderModel, Encoding, ModelSpec, Normalization, Objective, TraceRow,
};
pub use checkpoint::{
    load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, Checkpoint,
    CHECKPOINT_VERSION,
};
pub use hierarchy::{build_hierarchy, build_hierarchy_with_counts, level_counts, MeshHierarchy};
pub use latent::{
    latent_statistics, latent_sweep, mean_pairwise_distance, sample_gaussian, truncated_normal,
    write_mesh_series, LatentStats, SWEEP_FACTOR, SWEEP_STEPS,
};
pub use train::{
    build_model, build_model_with_spec, evaluate_l1, train_autoencoder, write_history_csv,
    EpochRecord, HISTORY_HEADER,
};
