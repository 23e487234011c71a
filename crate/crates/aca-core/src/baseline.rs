//! Principal-component baseline and alignment scoring: how close does a
//! method's component list come to the direction a clairvoyant would pick.

use nalgebra::{Cholesky, DVector, SymmetricEigen};

use crate::data::DataMatrix;
use crate::error::Error;
use crate::subspace::{fix_sign, Direction};
use crate::Result;

/// An ordered list of unit directions, most important first.
#[derive(Debug, Clone)]
pub struct ComponentSet {
    components: Vec<Direction>,
    method_tag: String,
}

impl ComponentSet {
    pub fn new(components: Vec<Direction>, method_tag: impl Into<String>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("a component set cannot be empty"));
        }
        let dim = components[0].dim();
        if components.iter().any(|c| c.dim() != dim) {
            return Err(Error::invalid(
                "all components must share one ambient dimension",
            ));
        }
        Ok(ComponentSet {
            components,
            method_tag: method_tag.into(),
        })
    }

    pub fn components(&self) -> &[Direction] {
        &self.components
    }

    pub fn method_tag(&self) -> &str {
        &self.method_tag
    }

    pub fn ambient_dim(&self) -> usize {
        self.components[0].dim()
    }
}

/// First `m` eigenvectors of the sample covariance, by decreasing
/// eigenvalue.
///
/// Signs are fixed so each vector's largest-magnitude coordinate is
/// positive; eigenvalues that agree within 1e-12 form a tie group ordered by
/// the sign-fixed vectors' lexicographic order, so the output is a
/// deterministic function of the data.
pub fn pca_components(data: &DataMatrix, m: usize) -> Result<ComponentSet> {
    let d = data.ncols();
    if m == 0 {
        return Err(Error::invalid("component count must be at least 1"));
    }
    if m > d {
        return Err(Error::invalid(format!(
            "component count {m} exceeds dimension {d}"
        )));
    }
    if data.nrows() < 2 {
        return Err(Error::invalid("principal components need at least 2 rows"));
    }
    let eig = SymmetricEigen::new(data.sample_covariance()?);
    let mut vectors: Vec<DVector<f64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = eig.eigenvectors.column(j).into_owned();
        fix_sign(&mut v);
        vectors.push(v);
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let lex = |a: &DVector<f64>, b: &DVector<f64>| {
        for i in 0..a.len() {
            match a[i].total_cmp(&b[i]) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    };
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d
            && (eig.eigenvalues[order[end - 1]] - eig.eigenvalues[order[end]]).abs() <= 1e-12
        {
            end += 1;
        }
        order[start..end].sort_by(|&a, &b| lex(&vectors[a], &vectors[b]));
        start = end;
    }
    let components = order
        .into_iter()
        .take(m)
        .map(|j| Direction::normalized(vectors[j].clone()))
        .collect::<Result<Vec<_>>>()?;
    ComponentSet::new(components, "pca")
}

/// The direction a clairvoyant would use to separate an anomaly cluster at
/// `center` from elliptical data with covariance `cov`: the normalized
/// solution of cov * u = center.
pub fn oracle_direction(cov: &nalgebra::DMatrix<f64>, center: &DVector<f64>) -> Result<Direction> {
    if cov.nrows() != cov.ncols() {
        return Err(Error::invalid("covariance must be square"));
    }
    if center.len() != cov.nrows() {
        return Err(Error::invalid(format!(
            "center has dimension {}, covariance is {}x{}",
            center.len(),
            cov.nrows(),
            cov.ncols()
        )));
    }
    if center.iter().any(|x| !x.is_finite()) || center.norm() == 0.0 {
        return Err(Error::invalid("center must be finite and nonzero"));
    }
    let chol = Cholesky::new(cov.clone())
        .ok_or_else(|| Error::invalid("covariance is singular or not positive definite"))?;
    Direction::normalized(chol.solve(center))
}

/// Index (1-based) of the component most aligned with `u_star` under the
/// sign-blind angle arccos|u . u*|, together with that angle in [0, pi/2].
/// Ties go to the lowest index.
pub fn best_aligned(set: &ComponentSet, u_star: &Direction) -> Result<(usize, f64)> {
    if set.ambient_dim() != u_star.dim() {
        return Err(Error::invalid(format!(
            "components have dimension {}, reference has {}",
            set.ambient_dim(),
            u_star.dim()
        )));
    }
    let mut best = (0usize, f64::INFINITY);
    for (i, c) in set.components().iter().enumerate() {
        let cos = c.coords().dot(u_star.coords()).abs().clamp(0.0, 1.0);
        let angle = cos.acos();
        if angle < best.1 {
            best = (i + 1, angle);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn axis(d: usize, k: usize) -> Direction {
        let mut v = DVector::zeros(d);
        v[k] = 1.0;
        Direction::new(v).unwrap()
    }

    #[test]
    fn dominant_variance_axis_is_the_first_component() {
        let mut rng = ChaCha8Rng::seed_from_u64(70);
        let n = 20_000;
        let mut rows = Vec::with_capacity(n * 2);
        for _ in 0..n {
            rows.push(2.0 * rng.sample::<f64, _>(StandardNormal));
            rows.push(rng.sample::<f64, _>(StandardNormal));
        }
        let data = DataMatrix::from_rows(n, 2, &rows).unwrap();
        let set = pca_components(&data, 2).unwrap();
        let pc1 = set.components()[0].coords();
        assert!(pc1[0].abs() >= 0.05f64.cos(), "pc1 = {pc1}");
        assert!(pc1[0] > 0.0);
    }

    #[test]
    fn near_degenerate_line_recovers_its_axis() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let n = 500;
        let mut rows = Vec::with_capacity(n * 3);
        for _ in 0..n {
            let t: f64 = rng.sample(StandardNormal);
            rows.push(t);
            rows.push(1e-3 * rng.sample::<f64, _>(StandardNormal));
            rows.push(1e-3 * rng.sample::<f64, _>(StandardNormal));
        }
        let data = DataMatrix::from_rows(n, 3, &rows).unwrap();
        let set = pca_components(&data, 1).unwrap();
        let pc1 = set.components()[0].coords();
        assert!(pc1[0].abs() > 0.9999);
    }

    #[test]
    fn components_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(72);
        let n = 200;
        let d = 5;
        let rows: Vec<f64> = (0..n * d)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let data = DataMatrix::from_rows(n, d, &rows).unwrap();
        let set = pca_components(&data, d).unwrap();
        for i in 0..d {
            for j in 0..d {
                let dot = set.components()[i]
                    .coords()
                    .dot(set.components()[j].coords());
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((dot - target).abs() < 1e-8);
            }
        }
        assert!(pca_components(&data, d + 1).is_err());
        assert!(pca_components(&data, 0).is_err());
    }

    #[test]
    fn row_order_does_not_change_the_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let n = 150;
        let d = 4;
        let rows: Vec<f64> = (0..n * d)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let data = DataMatrix::from_rows(n, d, &rows).unwrap();
        let mut swapped = rows.clone();
        for i in 0..n / 2 {
            for j in 0..d {
                swapped.swap(i * d + j, (n - 1 - i) * d + j);
            }
        }
        let reversed = DataMatrix::from_rows(n, d, &swapped).unwrap();
        let a = pca_components(&data, d).unwrap();
        let b = pca_components(&reversed, d).unwrap();
        for (ca, cb) in a.components().iter().zip(b.components()) {
            for i in 0..d {
                assert!((ca.coords()[i] - cb.coords()[i]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn exact_eigenvalue_tie_orders_lexicographically() {
        // The four unit-axis points give the exactly isotropic sample
        // covariance (2/3) I, one tie group; (0,1) sorts before (1,0).
        let data = DataMatrix::from_rows(
            4,
            2,
            &[1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0],
        )
        .unwrap();
        let set = pca_components(&data, 2).unwrap();
        assert!(set.components()[0].coords()[1] > 0.9999);
        assert!(set.components()[1].coords()[0] > 0.9999);
    }

    #[test]
    fn oracle_direction_matches_hand_solves() {
        let eye = DMatrix::identity(3, 3);
        let center = DVector::from_vec(vec![3.0, 0.0, 4.0]);
        let u = oracle_direction(&eye, &center).unwrap();
        assert!((u.coords() - DVector::from_vec(vec![0.6, 0.0, 0.8])).norm() < 1e-12);

        let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0]));
        let u = oracle_direction(&cov, &DVector::from_vec(vec![1.0, 1.0])).unwrap();
        let expect = DVector::from_vec(vec![0.25, 1.0]).normalize();
        assert!((u.coords() - expect).norm() < 1e-12);
        assert!((u.coords().norm() - 1.0).abs() < 1e-12);

        let singular = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0]));
        assert!(oracle_direction(&singular, &DVector::from_vec(vec![1.0, 1.0])).is_err());
        assert!(oracle_direction(&eye, &DVector::zeros(3)).is_err());
    }

    #[test]
    fn alignment_picks_the_closest_component_sign_blind() {
        let set = ComponentSet::new(vec![axis(3, 0), axis(3, 1), axis(3, 2)], "t").unwrap();
        let (j, a) = best_aligned(&set, &axis(3, 1)).unwrap();
        assert_eq!(j, 2);
        assert!(a.abs() < 1e-12);

        let neg = Direction::normalized(DVector::from_vec(vec![0.0, 0.0, -1.0])).unwrap();
        let (j, a) = best_aligned(&set, &neg).unwrap();
        assert_eq!(j, 3);
        assert!(a.abs() < 1e-7);

        let two = ComponentSet::new(vec![axis(3, 0), axis(3, 1)], "t").unwrap();
        let (j, a) = best_aligned(&two, &axis(3, 2)).unwrap();
        assert_eq!(j, 1);
        assert!((a - std::f64::consts::FRAC_PI_2).abs() < 1e-12);

        let dup = ComponentSet::new(vec![axis(3, 1), axis(3, 1)], "t").unwrap();
        let (j, _) = best_aligned(&dup, &axis(3, 1)).unwrap();
        assert_eq!(j, 1);

        assert!(best_aligned(&two, &axis(4, 0)).is_err());
        assert!(ComponentSet::new(vec![], "t").is_err());
        assert!(ComponentSet::new(vec![axis(3, 0), axis(2, 0)], "t").is_err());
    }
}
