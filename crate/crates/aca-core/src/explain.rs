//! Per-variable views of a fitted model and of a single observation: signed
//! component loadings with normalized shares, a variable ranking driven by
//! the first component, and a per-variable anomaly score that couples the
//! symmetric depth's minimizing direction with the asymmetric depth's value.

use nalgebra::DVector;

use crate::aca::AcaModel;
use crate::data::DataMatrix;
use crate::depth::{proj_depth, DepthNotion, OptimizerConfig};
use crate::error::Error;
use crate::seed::derive;
use crate::subspace::Basis;
use crate::Result;

const SALT_CELL: u64 = 0xCE;

/// One variable's contribution to a component.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadingEntry {
    /// 1-based variable index.
    pub variable: usize,
    /// Signed coordinate of the component along this variable.
    pub loading: f64,
    /// |loading| divided by the sum of |loading| over all variables.
    pub share: f64,
}

/// A component's loadings sorted by decreasing absolute value, ties broken
/// toward the lower variable index. Shares sum to 1.
#[derive(Debug, Clone)]
pub struct LoadingReport {
    /// 1-based component index.
    pub component_index: usize,
    pub entries: Vec<LoadingEntry>,
}

/// Loadings of component `i` (1-based).
pub fn component_loadings(model: &AcaModel, i: usize) -> Result<LoadingReport> {
    let p = model.num_components();
    if i == 0 || i > p {
        return Err(Error::invalid(format!(
            "component index {i} outside 1..={p}"
        )));
    }
    let coords = model.components()[i - 1].coords();
    // A unit vector has at least one nonzero coordinate, so the norm
    // below cannot vanish.
    let total: f64 = coords.iter().map(|c| c.abs()).sum();
    let mut entries: Vec<LoadingEntry> = coords
        .iter()
        .enumerate()
        .map(|(j, &loading)| LoadingEntry {
            variable: j + 1,
            loading,
            share: loading.abs() / total,
        })
        .collect();
    entries.sort_by(|a, b| {
        b.loading
            .abs()
            .total_cmp(&a.loading.abs())
            .then(a.variable.cmp(&b.variable))
    });
    Ok(LoadingReport {
        component_index: i,
        entries,
    })
}

/// Variables ranked by decreasing contribution (in absolute value) to the
/// first component; ties go to the lower variable index. Indices are 1-based.
pub fn variable_importance(model: &AcaModel) -> Vec<usize> {
    let report =
        component_loadings(model, 1).expect("a model always holds at least one component");
    report.entries.iter().map(|e| e.variable).collect()
}

/// Per-variable anomaly scores of the observation `y` against `data`:
/// score i = |i-th coordinate of the direction minimizing y's symmetric
/// projection depth| * (1 / asymmetric projection depth of y - 1).
///
/// The two searches run under seeds derived from `config.seed` so the pair
/// is reproducible as a unit. Scores are all zero exactly when the
/// asymmetric depth comes out 1 (the observation sits at the data's center).
pub fn cell_scores(
    y: &DVector<f64>,
    data: &DataMatrix,
    config: &OptimizerConfig,
) -> Result<DVector<f64>> {
    let basis = Basis::identity(data.ncols());
    let mut pd_config = config.clone();
    pd_config.seed = derive(config.seed, SALT_CELL, 0, 0);
    let mut apd_config = config.clone();
    apd_config.seed = derive(config.seed, SALT_CELL, 1, 0);
    let pd = proj_depth(y, data, &basis, DepthNotion::Projection, &pd_config)?;
    let apd = proj_depth(y, data, &basis, DepthNotion::AsymmetricProjection, &apd_config)?;
    // The degeneracy rule keeps every depth strictly positive, so the
    // reciprocal is finite.
    let factor = 1.0 / apd.depth - 1.0;
    Ok(pd.direction.coords().map(|c| c.abs() * factor))
}
