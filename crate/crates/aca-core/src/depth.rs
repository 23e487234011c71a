//! Projection depth of a point, approximated by direction search.
//!
//! The multivariate depth of z is the infimum over unit directions u of the
//! univariate depth of z'u within the projected sample X'u, optionally with u
//! confined to the span of an orthonormal basis. The infimum is approximated
//! from above by derivative-free minimization on the sphere: every direction
//! actually evaluated gives an upper bound, and the smallest one is returned
//! together with its direction.
//!
//! Two optimizers are provided, a spherical Nelder-Mead with geodesic
//! reflect/expand/contract/shrink moves and a refined random search that
//! samples shrinking caps around the incumbent. Both run `restarts`
//! independent starts that split the per-query evaluation budget evenly, and
//! both draw each restart's randomness from its own derived stream, so a
//! larger budget extends a smaller run instead of reshuffling it.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::DataMatrix;
use crate::error::Error;
use crate::robust::{apd_stats, depth_from_apd, depth_from_pd, pd_stats};
use crate::seed::derive;
use crate::subspace::{lift, random_unit, Basis, Direction};
use crate::Result;

/// Which univariate kernel the projections are scored with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthNotion {
    /// Symmetric: distance from the median in MAD units.
    Projection,
    /// Asymmetric: only positive departure from the median counts, scaled by
    /// the upper-tail MAD.
    AsymmetricProjection,
}

impl DepthNotion {
    pub fn as_str(self) -> &'static str {
        match self {
            DepthNotion::Projection => "pd",
            DepthNotion::AsymmetricProjection => "apd",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "pd" => Ok(DepthNotion::Projection),
            "apd" => Ok(DepthNotion::AsymmetricProjection),
            other => Err(Error::invalid(format!(
                "unknown depth notion \"{other}\", expected \"pd\" or \"apd\""
            ))),
        }
    }
}

/// Direction-search algorithm choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchAlgorithm {
    NelderMeadSphere,
    RefinedRandomSearch,
}

impl SearchAlgorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchAlgorithm::NelderMeadSphere => "nelder_mead_sphere",
            SearchAlgorithm::RefinedRandomSearch => "refined_random_search",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "nelder_mead_sphere" => Ok(SearchAlgorithm::NelderMeadSphere),
            "refined_random_search" => Ok(SearchAlgorithm::RefinedRandomSearch),
            other => Err(Error::invalid(format!(
                "unknown algorithm \"{other}\", expected \"nelder_mead_sphere\" or \"refined_random_search\""
            ))),
        }
    }
}

/// First-restart start rule.
///
/// `Mn` points the first restart from the data mean toward the query point
/// (projected into the search subspace), falling back to a random start when
/// that offset vanishes or no query point exists; the remaining restarts are
/// random. `Rn` makes every restart random.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartRule {
    Mn,
    Rn,
}

impl StartRule {
    pub fn as_str(self) -> &'static str {
        match self {
            StartRule::Mn => "mn",
            StartRule::Rn => "rn",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "mn" => Ok(StartRule::Mn),
            "rn" => Ok(StartRule::Rn),
            other => Err(Error::invalid(format!(
                "unknown start rule \"{other}\", expected \"mn\" or \"rn\""
            ))),
        }
    }
}

/// Tuning knobs of the direction search.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub algorithm: SearchAlgorithm,
    /// Total univariate-depth evaluations allowed per query, split evenly
    /// across restarts.
    pub budget_k: usize,
    /// Independent optimizer starts per query.
    pub restarts: usize,
    /// Start-simplex cap divisor; the cap radius is (pi/2)/beta.
    pub beta: f64,
    /// Reflection angle multiplier.
    pub alpha: f64,
    /// Expansion angle multiplier.
    pub gamma: f64,
    /// Contraction angle multiplier.
    pub rho: f64,
    /// Shrink angle multiplier.
    pub sigma: f64,
    /// Simplex depth-spread stopping threshold.
    pub tol: f64,
    pub start: StartRule,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            algorithm: SearchAlgorithm::NelderMeadSphere,
            budget_k: 1000,
            restarts: 10,
            beta: 6.0,
            alpha: 1.0,
            gamma: 2.0,
            rho: 0.5,
            sigma: 0.5,
            tol: 1e-6,
            start: StartRule::Mn,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::invalid("restarts must be at least 1"));
        }
        if self.budget_k < self.restarts {
            return Err(Error::invalid(format!(
                "budget_k ({}) must be at least the restart count ({})",
                self.budget_k, self.restarts
            )));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::invalid("alpha must be positive"));
        }
        if !(self.gamma > 1.0) {
            return Err(Error::invalid("gamma must exceed 1"));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::invalid("rho must lie strictly between 0 and 1"));
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(Error::invalid("sigma must lie strictly between 0 and 1"));
        }
        if !(self.beta > 0.0) {
            return Err(Error::invalid("beta must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol must be positive"));
        }
        Ok(())
    }

    fn per_restart_budget(&self) -> usize {
        self.budget_k / self.restarts
    }
}

/// Outcome of one depth query.
#[derive(Debug, Clone)]
pub struct DepthResult {
    /// Smallest univariate depth over all directions evaluated.
    pub depth: f64,
    /// The direction attaining it, in ambient coordinates.
    pub direction: Direction,
    /// Univariate-depth evaluations actually consumed.
    pub evaluations_used: usize,
}

// Salts separating the seed-derivation namespaces of the search stages.
const SALT_RESTART: u64 = 0x5e;
const SALT_ROW: u64 = 0x01;

/// The projected minimization problem: data mapped into basis coefficients
/// once, then every direction evaluation is one pass over n projections.
struct DepthSearch {
    /// n x r projected data, Z = X * B.
    z: DMatrix<f64>,
    notion: DepthNotion,
    /// Coefficient-space query, B^T z, when the query is an external point.
    query_coeff: Option<DVector<f64>>,
    /// Query is this row of the data when set; its projection is read off
    /// the shared projection buffer.
    query_row: Option<usize>,
    /// Column means of Z, i.e. B^T times the data mean.
    mean_coeff: DVector<f64>,
    proj: Vec<f64>,
    scratch: Vec<f64>,
}

impl DepthSearch {
    fn new(data: &DataMatrix, basis: &Basis, notion: DepthNotion) -> DepthSearch {
        let z = data.matrix() * basis.matrix();
        let n = z.nrows();
        let r = z.ncols();
        let mut mean = DVector::zeros(r);
        for j in 0..r {
            mean[j] = z.column(j).sum() / n as f64;
        }
        DepthSearch {
            z,
            notion,
            query_coeff: None,
            query_row: None,
            mean_coeff: mean,
            proj: vec![0.0; n],
            scratch: Vec::with_capacity(n),
        }
    }

    fn rank(&self) -> usize {
        self.z.ncols()
    }

    fn set_external_query(&mut self, coeff: DVector<f64>) {
        self.query_coeff = Some(coeff);
        self.query_row = None;
    }

    fn set_row_query(&mut self, row: usize) {
        self.query_coeff = None;
        self.query_row = Some(row);
    }

    /// Start offset for the Mn rule: normalized coefficient vector from the
    /// data mean toward the query, or None when they coincide in the span.
    fn mn_offset(&self) -> Option<DVector<f64>> {
        let mut offset = match (&self.query_coeff, self.query_row) {
            (Some(c), _) => c - &self.mean_coeff,
            (None, Some(j)) => self.z.row(j).transpose() - &self.mean_coeff,
            (None, None) => return None,
        };
        let norm = offset.norm();
        if norm > 1e-12 {
            offset /= norm;
            Some(offset)
        } else {
            None
        }
    }

    /// One univariate depth evaluation along coefficient direction t.
    fn eval(&mut self, t: &DVector<f64>) -> f64 {
        let n = self.z.nrows();
        let r = self.z.ncols();
        self.proj.clear();
        self.proj.resize(n, 0.0);
        for j in 0..r {
            let tj = t[j];
            if tj == 0.0 {
                continue;
            }
            let col = self.z.column(j);
            let col = col.as_slice();
            for (p, &c) in self.proj.iter_mut().zip(col) {
                *p += tj * c;
            }
        }
        let zp = match self.query_row {
            Some(row) => self.proj[row],
            None => self
                .query_coeff
                .as_ref()
                .expect("query must be set before eval")
                .dot(t),
        };
        match self.notion {
            DepthNotion::Projection => {
                let (med, spread) = pd_stats(&self.proj, &mut self.scratch);
                depth_from_pd(zp, med, spread)
            }
            DepthNotion::AsymmetricProjection => {
                let (med, spread) = apd_stats(&self.proj, &mut self.scratch);
                depth_from_apd(zp, med, spread)
            }
        }
    }

    /// The symmetric kernel scores u and -u identically, so the rank-1 search
    /// space collapses to a single evaluation.
    fn antipodal_invariant(&self) -> bool {
        self.notion == DepthNotion::Projection
    }
}

/// How each restart obtains its generator seed.
enum RestartSeeds {
    /// Derived from a master seed and the restart index; used by depth
    /// queries so results do not depend on budget or on sibling queries.
    Derived(u64),
    /// Pre-drawn, one per restart; used by the public optimizer entry points
    /// that are handed a generator instead of a seed.
    Explicit(Vec<u64>),
}

impl RestartSeeds {
    fn seed_for(&self, restart: usize) -> u64 {
        match self {
            RestartSeeds::Derived(master) => derive(*master, SALT_RESTART, restart as u64, 0),
            RestartSeeds::Explicit(seeds) => seeds[restart],
        }
    }
}

/// Multi-restart minimization of `f` over the unit sphere in coefficient
/// space. Returns (best value, best coefficients, evaluations used).
fn search_core<F: FnMut(&DVector<f64>) -> f64>(
    f: &mut F,
    r: usize,
    config: &OptimizerConfig,
    mn_offset: Option<&DVector<f64>>,
    seeds: &RestartSeeds,
    antipodal_invariant: bool,
) -> (f64, DVector<f64>, usize) {
    debug_assert!(r >= 1);
    let mut used = 0usize;
    if r == 1 {
        // The sphere is the pair {+1, -1}; no optimization freedom.
        let plus = DVector::from_element(1, 1.0);
        let f_plus = f(&plus);
        used += 1;
        if antipodal_invariant || config.budget_k < 2 {
            return (f_plus, plus, used);
        }
        let minus = DVector::from_element(1, -1.0);
        let f_minus = f(&minus);
        used += 1;
        return if f_minus < f_plus {
            (f_minus, minus, used)
        } else {
            (f_plus, plus, used)
        };
    }

    let cap = config.per_restart_budget();
    let mut best: Option<(f64, DVector<f64>)> = None;
    for restart in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seeds.seed_for(restart));
        let start = match (restart, config.start, mn_offset) {
            (0, StartRule::Mn, Some(offset)) => offset.clone(),
            _ => random_unit(r, &mut rng).expect("r >= 2"),
        };
        let mut local_used = 0usize;
        let mut tracker = BestTracker::new();
        match config.algorithm {
            SearchAlgorithm::NelderMeadSphere => nm_restart(
                f,
                r,
                &start,
                config,
                cap,
                &mut local_used,
                &mut rng,
                &mut tracker,
            ),
            SearchAlgorithm::RefinedRandomSearch => {
                rrs_restart(f, &start, cap, &mut local_used, &mut rng, &mut tracker)
            }
        }
        used += local_used;
        if let Some((val, point)) = tracker.into_inner() {
            match &best {
                Some((bv, _)) if *bv <= val => {}
                _ => best = Some((val, point)),
            }
        }
    }
    let (value, point) = best.expect("per-restart budget is at least 1");
    (value, point, used)
}

/// Running minimum over every point the optimizer has evaluated.
struct BestTracker {
    best: Option<(f64, DVector<f64>)>,
}

impl BestTracker {
    fn new() -> Self {
        BestTracker { best: None }
    }

    fn observe(&mut self, value: f64, point: &DVector<f64>) {
        match &self.best {
            Some((bv, _)) if *bv <= value => {}
            _ => self.best = Some((value, point.clone())),
        }
    }

    fn into_inner(self) -> Option<(f64, DVector<f64>)> {
        self.best
    }
}

/// Geodesic step from `base` toward unit tangent `tangent` by angle `theta`.
fn geodesic(base: &DVector<f64>, tangent: &DVector<f64>, theta: f64) -> DVector<f64> {
    let mut p = base * theta.cos() + tangent * theta.sin();
    let norm = p.norm();
    if norm > 0.0 {
        p /= norm;
    }
    p
}

/// Unit tangent at `base` pointing toward `target`, with the subtended angle.
/// None when the points are (anti)parallel and no great circle is defined.
fn tangent_toward(base: &DVector<f64>, target: &DVector<f64>) -> Option<(DVector<f64>, f64)> {
    let dot = base.dot(target).clamp(-1.0, 1.0);
    let theta = dot.acos();
    let mut y = target - base * dot;
    let norm = y.norm();
    if norm <= 1e-12 || theta <= 1e-12 {
        return None;
    }
    y /= norm;
    Some((y, theta))
}

/// Random unit tangent at `base`.
fn random_tangent<R: Rng + ?Sized>(base: &DVector<f64>, rng: &mut R) -> DVector<f64> {
    loop {
        let g = random_unit(base.len(), rng).expect("dimension >= 2");
        let dot = base.dot(&g);
        let mut y = g - base * dot;
        let norm = y.norm();
        if norm > 1e-9 {
            y /= norm;
            return y;
        }
    }
}

/// Point drawn inside the spherical cap of radius `radius` around `center`.
fn sample_in_cap<R: Rng + ?Sized>(
    center: &DVector<f64>,
    radius: f64,
    rng: &mut R,
) -> DVector<f64> {
    let theta = radius * rng.random::<f64>();
    let tangent = random_tangent(center, rng);
    geodesic(center, &tangent, theta)
}

/// One spherical Nelder-Mead restart; every evaluation is reported to the
/// tracker so the returned incumbent is the best point ever visited.
#[allow(clippy::too_many_arguments)]
fn nm_restart<F: FnMut(&DVector<f64>) -> f64>(
    f: &mut F,
    r: usize,
    start: &DVector<f64>,
    config: &OptimizerConfig,
    cap: usize,
    used: &mut usize,
    rng: &mut ChaCha8Rng,
    tracker: &mut BestTracker,
) {
    let eps = std::f64::consts::FRAC_PI_2 / config.beta;
    // Starting simplex: r points inside the cap around the start direction.
    let mut simplex: Vec<(f64, DVector<f64>)> = Vec::with_capacity(r);
    for _ in 0..r {
        if *used >= cap {
            return;
        }
        let p = sample_in_cap(start, eps, rng);
        let v = f(&p);
        *used += 1;
        tracker.observe(v, &p);
        simplex.push((v, p));
    }

    loop {
        // Stable sort keeps insertion order among equal depths, which makes
        // the trajectory reproducible.
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
        let spread = simplex[r - 1].0 - simplex[0].0;
        if spread < config.tol || *used >= cap {
            return;
        }

        // Normalized centroid of all but the worst vertex.
        let mut centroid = DVector::zeros(r);
        for (_, p) in &simplex[..r - 1] {
            centroid += p;
        }
        let cn = centroid.norm();
        if cn <= 1e-12 {
            return;
        }
        centroid /= cn;

        let f_best = simplex[0].0;
        let f_second_worst = simplex[r - 2].0;
        let f_worst = simplex[r - 1].0;
        let worst = simplex[r - 1].1.clone();

        let Some((y, theta)) = tangent_toward(&centroid, &worst) else {
            return;
        };
        // Reflection travels the great circle away from the worst vertex.
        let x_r = geodesic(&centroid, &y, -config.alpha * theta);
        if *used >= cap {
            return;
        }
        let f_r = f(&x_r);
        *used += 1;
        tracker.observe(f_r, &x_r);

        if f_best <= f_r && f_r < f_second_worst {
            simplex[r - 1] = (f_r, x_r);
        } else if f_r < f_best {
            // Expansion: keep going past the reflected point if it helps.
            let replacement = match tangent_toward(&centroid, &x_r) {
                Some((y_e, theta_e)) if *used < cap => {
                    let x_e = geodesic(&centroid, &y_e, config.gamma * theta_e);
                    let f_e = f(&x_e);
                    *used += 1;
                    tracker.observe(f_e, &x_e);
                    if f_e < f_r {
                        (f_e, x_e)
                    } else {
                        (f_r, x_r)
                    }
                }
                _ => (f_r, x_r),
            };
            simplex[r - 1] = replacement;
        } else {
            // Contraction toward the better of the reflected and worst points.
            let x_h = if f_r < f_worst { x_r.clone() } else { worst };
            let contracted = match tangent_toward(&centroid, &x_h) {
                Some((y_c, theta_c)) if *used < cap => {
                    let x_c = geodesic(&centroid, &y_c, config.rho * theta_c);
                    let f_c = f(&x_c);
                    *used += 1;
                    tracker.observe(f_c, &x_c);
                    Some((f_c, x_c))
                }
                _ => None,
            };
            match contracted {
                Some((f_c, x_c)) if f_c < f_worst => {
                    simplex[r - 1] = (f_c, x_c);
                }
                Some(_) => {
                    // Shrink everything toward the best vertex.
                    let anchor = simplex[0].1.clone();
                    for i in 1..r {
                        if *used >= cap {
                            return;
                        }
                        if let Some((y_i, theta_i)) = tangent_toward(&anchor, &simplex[i].1) {
                            let p_new = geodesic(&anchor, &y_i, config.sigma * theta_i);
                            let f_new = f(&p_new);
                            *used += 1;
                            tracker.observe(f_new, &p_new);
                            simplex[i] = (f_new, p_new);
                        }
                        // Coincident vertices stay where they are.
                    }
                }
                None => {
                    // Budget exhausted or degenerate geometry mid-contraction.
                    if f_r < f_worst {
                        simplex[r - 1] = (f_r, x_r);
                    }
                    return;
                }
            }
        }
    }
}

// Refined random search cap schedule: the sampling cap around the incumbent
// starts at a quarter turn and decays geometrically per evaluation, floored
// so late iterations still move. Tied to the absolute evaluation index, not
// the budget, so a longer run extends a shorter one.
const RRS_SHRINK: f64 = 0.95;
const RRS_MIN_CAP: f64 = 1e-4;

/// One refined-random-search restart around a single incumbent.
fn rrs_restart<F: FnMut(&DVector<f64>) -> f64>(
    f: &mut F,
    start: &DVector<f64>,
    cap: usize,
    used: &mut usize,
    rng: &mut ChaCha8Rng,
    tracker: &mut BestTracker,
) {
    if *used >= cap {
        return;
    }
    let mut incumbent = start.clone();
    let mut value = f(&incumbent);
    *used += 1;
    tracker.observe(value, &incumbent);
    let mut radius = std::f64::consts::FRAC_PI_2;
    while *used < cap {
        let candidate = sample_in_cap(&incumbent, radius, rng);
        let v = f(&candidate);
        *used += 1;
        tracker.observe(v, &candidate);
        if v < value {
            value = v;
            incumbent = candidate;
        }
        radius = (radius * RRS_SHRINK).max(RRS_MIN_CAP);
    }
}

fn validate_query_inputs(
    z: &DVector<f64>,
    data: &DataMatrix,
    basis: &Basis,
    config: &OptimizerConfig,
) -> Result<()> {
    config.validate()?;
    if basis.rank() == 0 {
        return Err(Error::invalid("depth query needs a basis of rank >= 1"));
    }
    if basis.ambient_dim() != data.ncols() {
        return Err(Error::invalid(format!(
            "basis ambient dimension {} does not match data dimension {}",
            basis.ambient_dim(),
            data.ncols()
        )));
    }
    if data.nrows() < 2 {
        return Err(Error::invalid("depth query needs at least 2 data rows"));
    }
    if z.len() != data.ncols() {
        return Err(Error::invalid(format!(
            "query point has dimension {}, data has {}",
            z.len(),
            data.ncols()
        )));
    }
    if z.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("query point has non-finite entries"));
    }
    Ok(())
}

/// Approximate projection depth of `z` within `data`, restricted to
/// directions in the span of `basis`.
///
/// The returned depth is the minimum univariate depth over every direction
/// the search evaluated, an upper bound on the true restricted depth. With a
/// rank-1 basis the search space is the pair of antipodal directions and the
/// result is exact.
pub fn proj_depth(
    z: &DVector<f64>,
    data: &DataMatrix,
    basis: &Basis,
    notion: DepthNotion,
    config: &OptimizerConfig,
) -> Result<DepthResult> {
    validate_query_inputs(z, data, basis, config)?;
    let mut search = DepthSearch::new(data, basis, notion);
    search.set_external_query(basis.matrix().transpose() * z);
    run_query(&mut search, basis, config, RestartSeeds::Derived(config.seed))
}

fn run_query(
    search: &mut DepthSearch,
    basis: &Basis,
    config: &OptimizerConfig,
    seeds: RestartSeeds,
) -> Result<DepthResult> {
    let r = search.rank();
    let mn = match config.start {
        StartRule::Mn => search.mn_offset(),
        StartRule::Rn => None,
    };
    let antipodal = search.antipodal_invariant();
    let mut objective = |t: &DVector<f64>| search.eval(t);
    let (depth, coeff, evals) = search_core(
        &mut objective,
        r,
        config,
        mn.as_ref(),
        &seeds,
        antipodal,
    );
    Ok(DepthResult {
        depth,
        direction: lift(&coeff, basis)?,
        evaluations_used: evals,
    })
}

/// Approximate depth of every row of `data` taken as a query point against
/// the full dataset, in row order.
///
/// Each row's search runs under its own seed derived from the master seed
/// and the row index, so a row's result does not depend on scan order and
/// matches what `min_depth_over_dataset` sees for that row.
pub fn dataset_depths(
    data: &DataMatrix,
    basis: &Basis,
    notion: DepthNotion,
    config: &OptimizerConfig,
) -> Result<Vec<DepthResult>> {
    let probe = data.row(0);
    validate_query_inputs(&probe, data, basis, config)?;
    let mut search = DepthSearch::new(data, basis, notion);
    let mut results = Vec::with_capacity(data.nrows());
    for row in 0..data.nrows() {
        search.set_row_query(row);
        let row_seed = derive(config.seed, SALT_ROW, row as u64, 0);
        results.push(run_query(
            &mut search,
            basis,
            config,
            RestartSeeds::Derived(row_seed),
        )?);
    }
    Ok(results)
}

/// Scans every row of `data` as a query point and returns the row with the
/// smallest approximate depth (ties to the lowest index).
pub fn min_depth_over_dataset(
    data: &DataMatrix,
    basis: &Basis,
    notion: DepthNotion,
    config: &OptimizerConfig,
) -> Result<(usize, DepthResult)> {
    let results = dataset_depths(data, basis, notion, config)?;
    let mut best: Option<(usize, DepthResult)> = None;
    for (row, result) in results.into_iter().enumerate() {
        let better = match &best {
            Some((_, incumbent)) => result.depth < incumbent.depth,
            None => true,
        };
        if better {
            best = Some((row, result));
        }
    }
    Ok(best.expect("data has at least 2 rows"))
}

/// Exhaustive depth over equally spaced planar directions; the verification
/// oracle for two-dimensional data.
///
/// The symmetric notion scores antipodal directions identically, so its grid
/// covers the half-circle [0, pi); the asymmetric notion sweeps the full
/// circle.
pub fn grid_depth_oracle(
    z: &DVector<f64>,
    data: &DataMatrix,
    notion: DepthNotion,
    angles: usize,
) -> Result<f64> {
    if data.ncols() != 2 || z.len() != 2 {
        return Err(Error::invalid("grid oracle requires two-dimensional data"));
    }
    if angles < 4 {
        return Err(Error::invalid("grid oracle needs at least 4 angles"));
    }
    if z.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("query point has non-finite entries"));
    }
    let n = data.nrows();
    let span = match notion {
        DepthNotion::Projection => std::f64::consts::PI,
        DepthNotion::AsymmetricProjection => 2.0 * std::f64::consts::PI,
    };
    let m = data.matrix();
    let mut proj = vec![0.0; n];
    let mut scratch = Vec::with_capacity(n);
    let mut best = f64::INFINITY;
    for i in 0..angles {
        let theta = span * i as f64 / angles as f64;
        let (c, s) = (theta.cos(), theta.sin());
        for (row, slot) in proj.iter_mut().enumerate() {
            *slot = c * m[(row, 0)] + s * m[(row, 1)];
        }
        let zp = c * z[0] + s * z[1];
        let depth = match notion {
            DepthNotion::Projection => {
                let (med, spread) = pd_stats(&proj, &mut scratch);
                depth_from_pd(zp, med, spread)
            }
            DepthNotion::AsymmetricProjection => {
                let (med, spread) = apd_stats(&proj, &mut scratch);
                depth_from_apd(zp, med, spread)
            }
        };
        if depth < best {
            best = depth;
        }
    }
    Ok(best)
}

/// Multi-restart spherical Nelder-Mead over an arbitrary objective on the
/// unit sphere of `basis`'s span.
///
/// The budget and restart semantics match depth queries: `config.budget_k`
/// objective evaluations split evenly across `config.restarts` starts. With
/// no query point in sight the Mn rule has no meaning here, so every start is
/// random; per-restart seeds are pre-drawn from `rng` so a bigger budget
/// extends a smaller one.
pub fn nelder_mead_sphere<F, R>(
    objective: F,
    basis: &Basis,
    config: &OptimizerConfig,
    rng: &mut R,
) -> Result<(f64, Direction)>
where
    F: FnMut(&Direction) -> f64,
    R: Rng + ?Sized,
{
    let mut config = config.clone();
    config.algorithm = SearchAlgorithm::NelderMeadSphere;
    run_public_optimizer(objective, basis, &config, rng)
}

/// Multi-restart refined random search; see [`nelder_mead_sphere`] for the
/// budget and restart semantics.
pub fn refined_random_search<F, R>(
    objective: F,
    basis: &Basis,
    config: &OptimizerConfig,
    rng: &mut R,
) -> Result<(f64, Direction)>
where
    F: FnMut(&Direction) -> f64,
    R: Rng + ?Sized,
{
    let mut config = config.clone();
    config.algorithm = SearchAlgorithm::RefinedRandomSearch;
    run_public_optimizer(objective, basis, &config, rng)
}

fn run_public_optimizer<F, R>(
    mut objective: F,
    basis: &Basis,
    config: &OptimizerConfig,
    rng: &mut R,
) -> Result<(f64, Direction)>
where
    F: FnMut(&Direction) -> f64,
    R: Rng + ?Sized,
{
    config.validate()?;
    if basis.rank() == 0 {
        return Err(Error::invalid("optimizer needs a basis of rank >= 1"));
    }
    let seeds = RestartSeeds::Explicit((0..config.restarts).map(|_| rng.random()).collect());
    let mut lift_err = None;
    let mut coeff_objective = |t: &DVector<f64>| match lift(t, basis) {
        Ok(dir) => objective(&dir),
        Err(e) => {
            lift_err = Some(e);
            f64::INFINITY
        }
    };
    let (value, coeff, _) = search_core(
        &mut coeff_objective,
        basis.rank(),
        config,
        None,
        &seeds,
        false,
    );
    if let Some(e) = lift_err {
        return Err(e);
    }
    Ok((value, lift(&coeff, basis)?))
}
