//! Validated data matrix: rows are observations, columns are variables.

use nalgebra::DMatrix;

use crate::error::Error;
use crate::Result;

/// An n x d matrix of finite reals with n >= 1 and d >= 1.
///
/// Finiteness is checked once here so the numeric kernels can assume it.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    m: DMatrix<f64>,
}

impl DataMatrix {
    /// Wraps a matrix after checking the invariants.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::invalid(format!(
                "data matrix must be non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if let Some((i, j)) = find_non_finite(&m) {
            return Err(Error::invalid(format!(
                "data matrix entry ({i}, {j}) is not finite"
            )));
        }
        Ok(DataMatrix { m })
    }

    /// Builds from a row-major flat slice.
    pub fn from_rows(n: usize, d: usize, row_major: &[f64]) -> Result<Self> {
        if row_major.len() != n * d {
            return Err(Error::invalid(format!(
                "expected {n}*{d} = {} entries, got {}",
                n * d,
                row_major.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(n, d, row_major))
    }

    pub fn nrows(&self) -> usize {
        self.m.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.m.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// Row i as an owned vector (an observation in ambient coordinates).
    pub fn row(&self, i: usize) -> nalgebra::DVector<f64> {
        self.m.row(i).transpose()
    }

    /// Column means, i.e. the sample mean observation.
    pub fn column_means(&self) -> nalgebra::DVector<f64> {
        self.m.row_mean().transpose()
    }

    /// Sample covariance with the n - 1 divisor; needs at least 2 rows.
    pub fn sample_covariance(&self) -> Result<DMatrix<f64>> {
        let n = self.nrows();
        if n < 2 {
            return Err(Error::invalid(
                "sample covariance needs at least 2 rows",
            ));
        }
        let mean = self.column_means();
        let mut centered = self.m.clone();
        for i in 0..n {
            for j in 0..self.ncols() {
                centered[(i, j)] -= mean[j];
            }
        }
        let cov = centered.transpose() * &centered / (n as f64 - 1.0);
        // Matrix products round asymmetrically; symmetrize so downstream
        // eigendecompositions see an exactly symmetric input.
        Ok(symmetrize(cov))
    }
}

/// Replaces m with (m + m^T) / 2.
pub(crate) fn symmetrize(mut m: DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = f64::midpoint(m[(i, j)], m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

fn find_non_finite(m: &DMatrix<f64>) -> Option<(usize, usize)> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Some((i, j));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_finite_rejects_nan_and_empty() {
        assert!(DataMatrix::from_rows(2, 2, &[1.0, 2.0, 3.0, 4.0]).is_ok());
        let e = DataMatrix::from_rows(2, 2, &[1.0, f64::NAN, 3.0, 4.0]).unwrap_err();
        assert!(e.to_string().contains("not finite"), "{e}");
        assert!(DataMatrix::from_rows(0, 2, &[]).is_err());
        assert!(DataMatrix::from_rows(2, 0, &[]).is_err());
        assert!(DataMatrix::from_rows(2, 2, &[1.0; 3]).is_err());
        let e = DataMatrix::from_rows(1, 1, &[f64::INFINITY]).unwrap_err();
        assert!(matches!(e, Error::InvalidInput(_)));
    }

    #[test]
    fn row_extraction_matches_layout() {
        let d = DataMatrix::from_rows(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(d.row(1).as_slice(), &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn mean_and_covariance_match_hand_values() {
        let d = DataMatrix::from_rows(3, 2, &[0.0, 0.0, 2.0, 2.0, 4.0, 1.0]).unwrap();
        let mean = d.column_means();
        assert_eq!(mean.as_slice(), &[2.0, 1.0]);
        let cov = d.sample_covariance().unwrap();
        // Deviations: (-2,-1), (0,1), (2,0); cross sum = 2, divisor 2.
        assert_eq!(cov[(0, 0)], 4.0);
        assert_eq!(cov[(1, 1)], 1.0);
        assert_eq!(cov[(0, 1)], 1.0);
        assert_eq!(cov[(0, 1)], cov[(1, 0)]);
        let single = DataMatrix::from_rows(1, 2, &[1.0, 2.0]).unwrap();
        assert!(single.sample_covariance().is_err());
    }
}
