//! Convolutional mesh autoencoders.
//!
//! Spectral Chebyshev convolutions over a fixed mesh topology, quadric-error
//! vertex-subset decimation with barycentric up-sampling, a trainable
//! encoder/decoder over the resulting mesh pyramid, and a PCA baseline with
//! the matching evaluation protocols.

pub mod cli;
pub mod error;
pub mod eval;
pub mod laplacian;
pub mod mesh;
pub mod model;
pub mod nn;
pub mod oracle;
pub mod sampling;
pub mod sparse;
pub mod spectral_conv;

pub use error::{Error, Result};
pub use laplacian::{
    build_laplacian, estimate_lambda_max, scale_laplacian, Laplacian, PowerIteration,
    ScaledLaplacian,
};
pub use mesh::{build_adjacency, Mesh};
pub use sparse::SparseMatrix;
