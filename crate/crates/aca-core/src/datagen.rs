//! Labeled synthetic benchmarks: five families of clean data plus a
//! contamination step that plants a tight anomaly cluster at a controlled
//! Mahalanobis distance from the clean sample.
//!
//! Everything is driven by caller-supplied seeds; a fixed spec reproduces
//! the dataset bit for bit.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, StandardNormal, StudentT};

use crate::data::{symmetrize, DataMatrix};
use crate::error::Error;
use crate::subspace::{fix_sign, random_unit};
use crate::Result;

/// Distribution family of the clean rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Setting {
    /// Centered Gaussian with the alternating-sign Toeplitz covariance.
    MvnA09,
    /// Centered Gaussian with a random correlation matrix of condition
    /// number 100.
    MvnHcn,
    /// Elliptical Student-t: scale factor times a uniform sphere direction
    /// times a t-distributed radius, with the Toeplitz scatter.
    EllT { df: u32 },
    /// Independent exponential coordinates with rates 1/beta_i,
    /// beta_i ~ U[0.1, 1].
    Exp,
    /// Bivariate: skew-normal (alpha = 10) first coordinate, N(0, 1/4)
    /// second coordinate.
    MvSk,
}

impl Setting {
    pub fn name(self) -> &'static str {
        match self {
            Setting::MvnA09 => "mvn_a09",
            Setting::MvnHcn => "mvn_hcn",
            Setting::EllT { .. } => "ell_t",
            Setting::Exp => "exp",
            Setting::MvSk => "mv_sk",
        }
    }
}

/// Size, dimension, contamination fraction and seed of one benchmark draw.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub setting: Setting,
    pub n: usize,
    pub d: usize,
    pub eps: f64,
    pub seed: u64,
}

impl SimulationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("sample size must be at least 1"));
        }
        if self.d == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if !(self.eps >= 0.0 && self.eps < 1.0) {
            return Err(Error::invalid(format!(
                "contamination fraction {} outside [0, 1)",
                self.eps
            )));
        }
        if let Setting::EllT { df } = self.setting {
            if df == 0 {
                return Err(Error::invalid("t distribution needs df >= 1"));
            }
        }
        if self.setting == Setting::MvSk && self.d != 2 {
            return Err(Error::invalid(format!(
                "the skewed bivariate setting requires d = 2, got {}",
                self.d
            )));
        }
        Ok(())
    }
}

/// A dataset with ground truth: which rows are planted anomalies, where
/// their cluster is centered, and which covariance describes the clean rows
/// (the generating one when built by `gen_labeled`, the sample estimate when
/// built by `contaminate` directly).
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub data: DataMatrix,
    pub labels: Vec<bool>,
    pub anomaly_center: DVector<f64>,
    pub normal_cov: DMatrix<f64>,
}

/// Where the anomaly cluster center goes relative to the clean sample.
#[derive(Debug, Clone)]
pub enum Placement {
    /// Along the smallest-variance principal direction of the clean rows, at
    /// `factor` times their largest Mahalanobis distance (measured in the
    /// same Mahalanobis metric).
    LastPc { factor: f64 },
    /// A uniformly drawn direction u with u1 > 0 and |u2| > u1, at `gamma`
    /// times the largest Mahalanobis distance. Needs d >= 2.
    Sector { gamma: f64 },
    /// An explicit center in ambient coordinates.
    Fixed { center: DVector<f64> },
}

/// Cluster placement plus the isotropic variance of the cluster itself.
#[derive(Debug, Clone)]
pub struct ContaminationOptions {
    pub placement: Placement,
    pub noise_var: f64,
}

impl Default for ContaminationOptions {
    fn default() -> Self {
        ContaminationOptions {
            placement: Placement::LastPc { factor: 1.25 },
            noise_var: 1.0 / 20.0,
        }
    }
}

/// Toeplitz matrix with entries (-0.9)^|i-j|.
pub fn toeplitz_a09(d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |i, j| (-0.9f64).powi((i as i32 - j as i32).abs()))
}

/// Unsigned variant, entries 0.9^|i-j|.
pub fn toeplitz_a09_unsigned(d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |i, j| 0.9f64.powi((i as i32 - j as i32).abs()))
}

/// Random correlation matrix (unit diagonal, symmetric positive definite)
/// whose condition number lands within 1% of `cond`.
///
/// A random orthogonal frame carries a geometric eigenvalue ladder; because
/// rescaling to unit diagonal perturbs the spectrum, the ladder's spread is
/// re-tuned until the rescaled matrix hits the target.
pub fn hcn_cov<R: Rng + ?Sized>(d: usize, cond: f64, rng: &mut R) -> Result<DMatrix<f64>> {
    if d < 2 {
        return Err(Error::invalid("condition-number design needs d >= 2"));
    }
    if !(cond > 1.0 && cond.is_finite()) {
        return Err(Error::invalid(format!(
            "condition number must be finite and > 1, got {cond}"
        )));
    }
    let gauss = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = gauss.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            for i in 0..d {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    let mut spread = cond.ln();
    for _ in 0..100 {
        let lambdas = DVector::from_fn(d, |i, _| {
            (-spread * i as f64 / (d as f64 - 1.0)).exp()
        });
        let m = symmetrize(&q * DMatrix::from_diagonal(&lambdas) * q.transpose());
        let mut c = m.clone();
        for i in 0..d {
            for j in 0..d {
                c[(i, j)] /= (m[(i, i)] * m[(j, j)]).sqrt();
            }
        }
        for i in 0..d {
            c[(i, i)] = 1.0;
        }
        let c = symmetrize(c);
        let eig = SymmetricEigen::new(c.clone());
        let lo = eig.eigenvalues.min();
        let hi = eig.eigenvalues.max();
        if lo <= 0.0 {
            return Err(Error::numeric(
                "condition-number design lost positive definiteness",
            ));
        }
        let achieved = hi / lo;
        if (achieved - cond).abs() <= 0.01 * cond {
            return Ok(c);
        }
        if achieved <= 1.0 {
            spread *= 2.0;
        } else {
            spread *= cond.ln() / achieved.ln();
        }
    }
    Err(Error::numeric(
        "condition-number tuning did not converge in 100 rounds",
    ))
}

/// Number of anomaly rows for a requested total of n: ceil(n * eps).
fn ceil_count(n: usize, eps: f64) -> usize {
    ((n as f64 * eps).ceil() as usize).min(n)
}

/// Smallest a with a = ceil((m + a) * eps), i.e. the anomaly count that
/// makes m clean rows the floor((m + a)(1 - eps)) share of the total.
fn least_anomaly_count(m: usize, eps: f64) -> usize {
    let mut a = 0usize;
    for _ in 0..10_000 {
        let next = ceil_count(m + a, eps);
        if next == a {
            return a;
        }
        a = next;
    }
    // The map is monotone and bounded, so this is unreachable for eps < 1.
    a
}

/// Clean rows only: floor(n * (1 - eps)) draws from the spec's family.
pub fn gen_normal<R: Rng + ?Sized>(spec: &SimulationSpec, rng: &mut R) -> Result<DataMatrix> {
    Ok(gen_normal_with_cov(spec, rng)?.0)
}

/// Clean rows plus the covariance the generator actually used (the scatter
/// matrix for the elliptical family).
pub(crate) fn gen_normal_with_cov<R: Rng + ?Sized>(
    spec: &SimulationSpec,
    rng: &mut R,
) -> Result<(DataMatrix, DMatrix<f64>)> {
    spec.validate()?;
    let d = spec.d;
    let m = spec.n - ceil_count(spec.n, spec.eps);
    if m == 0 {
        return Err(Error::invalid(
            "contamination fraction leaves no clean rows",
        ));
    }
    let mut rows = Vec::with_capacity(m * d);
    let cov = match spec.setting {
        Setting::MvnA09 | Setting::MvnHcn => {
            let sigma = match spec.setting {
                Setting::MvnA09 => toeplitz_a09(d),
                _ => hcn_cov(d, 100.0, rng)?,
            };
            let chol = Cholesky::new(sigma.clone())
                .ok_or_else(|| Error::numeric("generator covariance is not positive definite"))?;
            let l = chol.l();
            for _ in 0..m {
                let z = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
                rows.extend((&l * z).iter().copied());
            }
            sigma
        }
        Setting::EllT { df } => {
            let sigma = toeplitz_a09(d);
            let chol = Cholesky::new(sigma.clone())
                .ok_or_else(|| Error::numeric("generator covariance is not positive definite"))?;
            let l = chol.l();
            let radial = StudentT::new(df as f64)
                .map_err(|e| Error::invalid(format!("t radius: {e}")))?;
            for _ in 0..m {
                let u = random_unit(d, rng)?;
                let r: f64 = rng.sample(radial);
                rows.extend((&l * (u * r)).iter().copied());
            }
            sigma
        }
        Setting::Exp => {
            let betas: Vec<f64> = (0..d).map(|_| rng.random_range(0.1..=1.0)).collect();
            let dists: Vec<Exp<f64>> = betas
                .iter()
                .map(|&b| Exp::new(1.0 / b).expect("rate is positive"))
                .collect();
            for _ in 0..m {
                for dist in &dists {
                    rows.push(rng.sample(*dist));
                }
            }
            DMatrix::from_diagonal(&DVector::from_iterator(
                d,
                betas.iter().map(|&b| b * b),
            ))
        }
        Setting::MvSk => {
            let alpha = 10.0f64;
            let delta = alpha / (1.0 + alpha * alpha).sqrt();
            for _ in 0..m {
                let z0: f64 = rng.sample(StandardNormal);
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                rows.push(delta * z0.abs() + (1.0 - delta * delta).sqrt() * z1);
                rows.push(0.5 * z2);
            }
            DMatrix::from_diagonal(&DVector::from_vec(vec![
                1.0 - 2.0 * delta * delta / std::f64::consts::PI,
                0.25,
            ]))
        }
    };
    Ok((DataMatrix::from_rows(m, d, &rows)?, cov))
}

/// Appends the default anomaly cluster (last principal direction, factor
/// 1.25, cluster variance 1/20) and shuffles. The anomaly count a solves
/// a = ceil((m + a) * eps) so the clean rows are exactly the
/// floor(total * (1 - eps)) share.
pub fn contaminate<R: Rng + ?Sized>(
    normal: &DataMatrix,
    eps: f64,
    rng: &mut R,
) -> Result<LabeledDataset> {
    contaminate_with(normal, eps, &ContaminationOptions::default(), rng)
}

/// `contaminate` with explicit placement and cluster variance.
pub fn contaminate_with<R: Rng + ?Sized>(
    normal: &DataMatrix,
    eps: f64,
    opts: &ContaminationOptions,
    rng: &mut R,
) -> Result<LabeledDataset> {
    if !(eps >= 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!(
            "contamination fraction {eps} outside [0, 1)"
        )));
    }
    let count = least_anomaly_count(normal.nrows(), eps);
    contaminate_core(normal, count, opts, rng)
}

pub(crate) fn contaminate_core<R: Rng + ?Sized>(
    normal: &DataMatrix,
    count: usize,
    opts: &ContaminationOptions,
    rng: &mut R,
) -> Result<LabeledDataset> {
    let m = normal.nrows();
    let d = normal.ncols();
    if m < d + 1 {
        return Err(Error::invalid(format!(
            "contamination needs at least d + 1 = {} clean rows, got {m}",
            d + 1
        )));
    }
    if !(opts.noise_var > 0.0 && opts.noise_var.is_finite()) {
        return Err(Error::invalid("cluster variance must be positive"));
    }
    let mean = normal.column_means();
    let cov = normal.sample_covariance()?;
    let chol = Cholesky::new(cov.clone()).ok_or_else(|| {
        Error::invalid("sample covariance of the clean rows is singular")
    })?;
    let mut max_mahal: f64 = 0.0;
    for i in 0..m {
        let diff = normal.row(i) - &mean;
        let solved = chol.solve(&diff);
        max_mahal = max_mahal.max(diff.dot(&solved).max(0.0).sqrt());
    }
    let center = match &opts.placement {
        Placement::LastPc { factor } => {
            if !(factor.is_finite() && *factor > 0.0) {
                return Err(Error::invalid("placement factor must be positive"));
            }
            let eig = SymmetricEigen::new(cov.clone());
            let mut last = 0;
            for i in 1..d {
                if eig.eigenvalues[i] < eig.eigenvalues[last] {
                    last = i;
                }
            }
            let lambda_min = eig.eigenvalues[last];
            if lambda_min <= 0.0 {
                return Err(Error::invalid(
                    "sample covariance of the clean rows is singular",
                ));
            }
            let mut v = eig.eigenvectors.column(last).into_owned();
            fix_sign(&mut v);
            // v is a unit eigenvector, so this offset has Mahalanobis
            // length exactly factor * max_mahal.
            &mean + v * (factor * max_mahal * lambda_min.sqrt())
        }
        Placement::Sector { gamma } => {
            if !(gamma.is_finite() && *gamma > 0.0) {
                return Err(Error::invalid("placement factor must be positive"));
            }
            if d < 2 {
                return Err(Error::invalid("sector placement needs d >= 2"));
            }
            let mut dir = None;
            for _ in 0..100_000 {
                let u = random_unit(d, rng)?;
                if u[0] > 0.0 && u[1].abs() > u[0] {
                    dir = Some(u);
                    break;
                }
            }
            let u = dir.ok_or_else(|| Error::numeric("sector sampling failed"))?;
            let solved = chol.solve(&u);
            let mahal_of_u = u.dot(&solved).sqrt();
            &mean + u * (gamma * max_mahal / mahal_of_u)
        }
        Placement::Fixed { center } => {
            if center.len() != d {
                return Err(Error::invalid(format!(
                    "placement center has dimension {}, data has {d}",
                    center.len()
                )));
            }
            if center.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid("placement center has non-finite entries"));
            }
            center.clone()
        }
    };
    if count == 0 {
        return Ok(LabeledDataset {
            data: normal.clone(),
            labels: vec![false; m],
            anomaly_center: center,
            normal_cov: cov,
        });
    }
    let n = m + count;
    let sd = opts.noise_var.sqrt();
    let mut rows: Vec<DVector<f64>> = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..m {
        rows.push(normal.row(i));
        labels.push(false);
    }
    for _ in 0..count {
        let z = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        rows.push(&center + z * sd);
        labels.push(true);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut flat = Vec::with_capacity(n * d);
    let mut shuffled_labels = Vec::with_capacity(n);
    for &i in &order {
        flat.extend(rows[i].iter().copied());
        shuffled_labels.push(labels[i]);
    }
    Ok(LabeledDataset {
        data: DataMatrix::from_rows(n, d, &flat)?,
        labels: shuffled_labels,
        anomaly_center: center,
        normal_cov: cov,
    })
}

/// Full pipeline: clean rows from the spec's family, then the default
/// contamination, all under one seed. The recorded covariance is the
/// generating one, and the anomaly count is exactly ceil(n * eps).
pub fn gen_labeled(spec: &SimulationSpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (normal, cov) = gen_normal_with_cov(spec, &mut rng)?;
    let count = ceil_count(spec.n, spec.eps);
    let mut out = contaminate_core(&normal, count, &ContaminationOptions::default(), &mut rng)?;
    out.normal_cov = cov;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::robust::median;

    fn spec(setting: Setting, n: usize, d: usize, eps: f64, seed: u64) -> SimulationSpec {
        SimulationSpec {
            setting,
            n,
            d,
            eps,
            seed,
        }
    }

    fn mahal(point: &DVector<f64>, mean: &DVector<f64>, cov: &DMatrix<f64>) -> f64 {
        let chol = Cholesky::new(cov.clone()).unwrap();
        let diff = point - mean;
        diff.dot(&chol.solve(&diff)).sqrt()
    }

    #[test]
    fn toeplitz_matches_printed_entries() {
        let t = toeplitz_a09(4);
        assert_eq!(t[(0, 1)], -0.9);
        assert_eq!(t[(0, 2)], 0.81);
        assert_eq!(t[(2, 0)], 0.81);
        assert_eq!(t[(0, 0)], 1.0);
        let one = toeplitz_a09(1);
        assert_eq!(one[(0, 0)], 1.0);
        assert_eq!(one.nrows(), 1);
        let u = toeplitz_a09_unsigned(3);
        assert_eq!(u[(0, 1)], 0.9);
        assert_eq!(u[(0, 2)], 0.81);
    }

    #[test]
    fn hcn_cov_hits_the_target_condition_number() {
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        for d in [3usize, 10] {
            let c = hcn_cov(d, 100.0, &mut rng).unwrap();
            assert_eq!(c.transpose(), c);
            for i in 0..d {
                assert_eq!(c[(i, i)], 1.0);
            }
            let eig = SymmetricEigen::new(c.clone());
            let lo = eig.eigenvalues.min();
            let hi = eig.eigenvalues.max();
            assert!(lo > 0.0);
            let cond = hi / lo;
            assert!((99.0..=101.0).contains(&cond), "cond = {cond}");
        }
        assert!(hcn_cov(1, 100.0, &mut rng).is_err());
        assert!(hcn_cov(3, 1.0, &mut rng).is_err());
    }

    #[test]
    fn toeplitz_gaussian_sample_covariance_matches_population() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let s = spec(Setting::MvnA09, 100_000, 10, 0.0, 0);
        let x = gen_normal(&s, &mut rng).unwrap();
        let m = x.matrix();
        let n = m.nrows() as f64;
        let (mut m0, mut m1) = (0.0, 0.0);
        for i in 0..m.nrows() {
            m0 += m[(i, 0)];
            m1 += m[(i, 1)];
        }
        m0 /= n;
        m1 /= n;
        let mut c01 = 0.0;
        for i in 0..m.nrows() {
            c01 += (m[(i, 0)] - m0) * (m[(i, 1)] - m1);
        }
        c01 /= n - 1.0;
        assert!((c01 + 0.9).abs() < 0.05, "cov(1,2) = {c01}");
    }

    #[test]
    fn exponential_rows_are_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let s = spec(Setting::Exp, 5_000, 4, 0.0, 0);
        let x = gen_normal(&s, &mut rng).unwrap();
        assert!(x.matrix().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn elliptical_t_is_centered_coordinatewise() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let s = spec(Setting::EllT { df: 5 }, 100_000, 5, 0.0, 0);
        let x = gen_normal(&s, &mut rng).unwrap();
        for j in 0..5 {
            let col: Vec<f64> = x.matrix().column(j).iter().copied().collect();
            let med = median(&col).unwrap();
            assert!(med.abs() < 0.05, "median of column {j} is {med}");
        }
    }

    #[test]
    fn skewed_bivariate_shape() {
        assert!(spec(Setting::MvSk, 100, 3, 0.0, 0).validate().is_err());
        assert!(spec(Setting::EllT { df: 0 }, 100, 3, 0.0, 0)
            .validate()
            .is_err());
        assert!(spec(Setting::MvnA09, 100, 3, 1.0, 0).validate().is_err());
        assert!(spec(Setting::MvnA09, 0, 3, 0.0, 0).validate().is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        let s = spec(Setting::MvSk, 20_000, 2, 0.0, 0);
        let x = gen_normal(&s, &mut rng).unwrap();
        let mean = x.column_means();
        let delta = 10.0 / 101.0f64.sqrt();
        let expected = delta * (2.0 / std::f64::consts::PI).sqrt();
        assert!((mean[0] - expected).abs() < 0.05, "skew mean {}", mean[0]);
        assert!(mean[1].abs() < 0.05);
        let cov = x.sample_covariance().unwrap();
        assert!((cov[(1, 1)] - 0.25).abs() < 0.02);
    }

    #[test]
    fn zero_fraction_returns_the_input_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let s = spec(Setting::MvnA09, 50, 3, 0.0, 0);
        let x = gen_normal(&s, &mut rng).unwrap();
        let out = contaminate(&x, 0.0, &mut rng).unwrap();
        assert_eq!(out.data.matrix(), x.matrix());
        assert!(out.labels.iter().all(|&l| !l));
        assert_eq!(out.labels.len(), 50);
    }

    #[test]
    fn counts_follow_the_ceiling_rule() {
        for (n, eps, want_true) in [(1000usize, 0.05, 50usize), (21, 0.5, 11), (7, 0.3, 3)] {
            let s = spec(Setting::MvnA09, n, 3, eps, 60);
            let out = gen_labeled(&s).unwrap();
            let t = out.labels.iter().filter(|&&l| l).count();
            assert_eq!(t, want_true, "n={n} eps={eps}");
            assert_eq!(out.labels.len(), n);
            assert_eq!(out.data.nrows(), n);
        }
    }

    #[test]
    fn standalone_contamination_count_is_consistent() {
        // 950 clean rows at eps 0.05 must yield 50 anomalies: the total is
        // then 1000 and ceil(1000 * 0.05) = 50 again.
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let s = spec(Setting::MvnA09, 950, 3, 0.0, 0);
        let x = gen_normal(&s, &mut rng).unwrap();
        let out = contaminate(&x, 0.05, &mut rng).unwrap();
        assert_eq!(out.data.nrows(), 1000);
        assert_eq!(out.labels.iter().filter(|&&l| l).count(), 50);
    }

    #[test]
    fn center_sits_at_the_prescribed_mahalanobis_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let s = spec(Setting::MvnA09, 400, 5, 0.0, 0);
        let x = gen_normal(&s, &mut rng).unwrap();
        let out = contaminate(&x, 0.1, &mut rng).unwrap();
        let mean = x.column_means();
        let cov = x.sample_covariance().unwrap();
        let chol = Cholesky::new(cov.clone()).unwrap();
        let mut max_mahal: f64 = 0.0;
        for i in 0..x.nrows() {
            let diff = x.row(i) - &mean;
            max_mahal = max_mahal.max(diff.dot(&chol.solve(&diff)).sqrt());
        }
        let got = mahal(&out.anomaly_center, &mean, &cov);
        assert!(
            (got - 1.25 * max_mahal).abs() < 1e-9,
            "got {got}, want {}",
            1.25 * max_mahal
        );
        assert_eq!(out.normal_cov, cov);
    }

    #[test]
    fn anomaly_rows_cluster_around_the_center() {
        let s = spec(Setting::MvnA09, 400, 5, 0.1, 63);
        let out = gen_labeled(&s).unwrap();
        let count = out.labels.iter().filter(|&&l| l).count();
        assert_eq!(count, 40);
        let mut mean = DVector::zeros(5);
        for (i, &is_anomaly) in out.labels.iter().enumerate() {
            if is_anomaly {
                mean += out.data.row(i);
            }
        }
        mean /= count as f64;
        let bound = 3.0 * (1.0f64 / 20.0).sqrt() / (count as f64).sqrt();
        for j in 0..5 {
            let dev = (mean[j] - out.anomaly_center[j]).abs();
            assert!(dev < bound, "coordinate {j}: {dev} vs {bound}");
        }
    }

    #[test]
    fn identical_specs_reproduce_identical_datasets() {
        let s = spec(Setting::EllT { df: 5 }, 120, 4, 0.05, 64);
        let a = gen_labeled(&s).unwrap();
        let b = gen_labeled(&s).unwrap();
        assert_eq!(a.data.matrix(), b.data.matrix());
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.anomaly_center, b.anomaly_center);
        assert_eq!(a.normal_cov, b.normal_cov);
    }

    #[test]
    fn pipeline_records_the_generating_covariance() {
        let s = spec(Setting::MvnA09, 200, 4, 0.05, 65);
        let out = gen_labeled(&s).unwrap();
        assert_eq!(out.normal_cov, toeplitz_a09(4));
    }

    #[test]
    fn sector_placement_respects_cone_and_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(66);
        let s = spec(Setting::MvSk, 500, 2, 0.0, 0);
        let x = gen_normal(&s, &mut rng).unwrap();
        let opts = ContaminationOptions {
            placement: Placement::Sector { gamma: 1.0 },
            noise_var: 1.0 / 20.0,
        };
        let out = contaminate_with(&x, 0.1, &opts, &mut rng).unwrap();
        let mean = x.column_means();
        let cov = x.sample_covariance().unwrap();
        let dir = &out.anomaly_center - &mean;
        assert!(dir[0] > 0.0);
        assert!(dir[1].abs() > dir[0]);
        let chol = Cholesky::new(cov.clone()).unwrap();
        let mut max_mahal: f64 = 0.0;
        for i in 0..x.nrows() {
            let diff = x.row(i) - &mean;
            max_mahal = max_mahal.max(diff.dot(&chol.solve(&diff)).sqrt());
        }
        let got = mahal(&out.anomaly_center, &mean, &cov);
        assert!((got - max_mahal).abs() < 1e-9, "{got} vs {max_mahal}");
    }

    #[test]
    fn fixed_placement_uses_the_given_center() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let s = spec(Setting::MvnA09, 100, 3, 0.0, 0);
        let x = gen_normal(&s, &mut rng).unwrap();
        let center = DVector::from_vec(vec![5.0, -3.0, 2.0]);
        let opts = ContaminationOptions {
            placement: Placement::Fixed {
                center: center.clone(),
            },
            noise_var: 1e-4,
        };
        let out = contaminate_with(&x, 0.1, &opts, &mut rng).unwrap();
        assert_eq!(out.anomaly_center, center);
        for (i, &is_anomaly) in out.labels.iter().enumerate() {
            if is_anomaly {
                assert!((out.data.row(i) - &center).norm() < 0.1);
            }
        }
        let bad = ContaminationOptions {
            placement: Placement::Fixed {
                center: DVector::zeros(2),
            },
            noise_var: 1e-4,
        };
        assert!(contaminate_with(&x, 0.1, &bad, &mut rng).is_err());
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(68);
        let flat = DataMatrix::from_rows(5, 3, &[1.0, 2.0, 3.0].repeat(5)).unwrap();
        let e = contaminate(&flat, 0.1, &mut rng).unwrap_err();
        assert!(e.to_string().contains("singular"), "{e}");
        let few = DataMatrix::from_rows(3, 3, &[1.0; 9]).unwrap();
        assert!(contaminate(&few, 0.1, &mut rng).is_err());
        let ok = DataMatrix::from_rows(4, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(contaminate(&ok, 1.0, &mut rng).is_err());
        assert!(contaminate(&ok, -0.1, &mut rng).is_err());
    }
}
