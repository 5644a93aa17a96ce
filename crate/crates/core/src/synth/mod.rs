//! Dataset loading, synthetic graphs, homophily manipulation and feature
//! reduction.

mod homophily;
mod io;
mod sbm;
mod svd;

pub use homophily::{
    decrease_homophily, increase_homophily, HomophilyAdjustment, DEFAULT_SWAP_BUDGET,
};
pub use io::{load_dataset, write_dataset, DatasetPaths, LoadedDataset};
pub use sbm::generate_sbm;
pub use svd::{
    randomized_svd, reduce_features, TruncatedSvd, DEFAULT_OVERSAMPLE, DEFAULT_POWER_ITERATIONS,
};
