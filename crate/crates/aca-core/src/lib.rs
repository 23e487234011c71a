//! Abnormal component analysis (ACA): an orthonormal sequence of directions
//! along which a dataset looks least regular, found by minimizing statistical
//! projection depth instead of maximizing variance.
//!
//! The first component is the direction (over the unit sphere) on which some
//! observation attains the smallest univariate projection depth; each further
//! component repeats the search restricted to the orthogonal complement of the
//! components already found. Low-depth projections expose anomalies, so the
//! leading components concentrate whatever outlying structure the data has,
//! the mirror image of PCA's variance-greedy ordering.
//!
//! Module layout:
//! - [`robust`]: univariate medians, MAD variants, and the two univariate
//!   depth kernels everything else reduces to.
//! - [`subspace`]: unit directions, orthonormal bases, complements, lifts.
//! - [`depth`]: projection depth of a point via direction search on the
//!   sphere (spherical Nelder-Mead or refined random search), plus a dense
//!   angular grid oracle for the planar case.
//! - [`aca`]: the greedy fit itself and the fitted model.
//! - [`explain`]: loadings, variable rankings, and per-cell anomaly scores.
//! - [`datagen`]: synthetic benchmark generators with controlled anomalies.
//! - [`baseline`]: PCA components and direction-recovery metrics.
//! - [`io`]: numeric CSV and the versioned JSON model format.

pub mod aca;
pub mod baseline;
pub mod data;
pub mod datagen;
pub mod depth;
pub mod error;
pub mod explain;
pub mod io;
pub mod robust;
pub mod seed;
pub mod subspace;

pub use aca::{fit, orient, transform, AcaModel};
pub use baseline::{best_aligned, oracle_direction, pca_components, ComponentSet};
pub use data::DataMatrix;
pub use datagen::{
    contaminate, contaminate_with, gen_labeled, gen_normal, hcn_cov, toeplitz_a09,
    toeplitz_a09_unsigned, ContaminationOptions, LabeledDataset, Placement, Setting,
    SimulationSpec,
};
pub use depth::{
    dataset_depths, grid_depth_oracle, min_depth_over_dataset, proj_depth, DepthNotion,
    DepthResult, OptimizerConfig, SearchAlgorithm, StartRule,
};
pub use error::Error;
pub use explain::{cell_scores, component_loadings, variable_importance, LoadingEntry, LoadingReport};
pub use subspace::{Basis, Direction};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
