//! Attributed graph datasets, spectral baselines and kernel matrices.

mod kernel;
mod spectral;
mod tu;

pub use kernel::{kernel_matrix, median_gamma, nn_classify, KernelMatrix, Similarity};
pub use spectral::{lambda_distance, spectrum, SpectralMatrix};
pub use tu::{load_tu_dataset, AttributedGraphDataset};
