//! Unit directions and orthonormal bases.
//!
//! The component search never optimizes over the full sphere directly: after
//! components have been accepted, the search continues on the unit sphere of
//! their orthogonal complement. This module owns that bookkeeping, namely
//! complement construction, lifting coefficient vectors back to ambient
//! coordinates, and uniform sampling of start directions.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Error;
use crate::Result;

/// Unit-norm tolerance for a [`Direction`].
pub const UNIT_NORM_TOL: f64 = 1e-12;
/// Pairwise orthogonality tolerance for [`Basis`] columns.
pub const ORTHO_TOL: f64 = 1e-10;

/// A point on the unit sphere of the ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    v: DVector<f64>,
}

impl Direction {
    /// Accepts a vector already on the sphere (norm within 1e-12 of 1).
    pub fn new(v: DVector<f64>) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("direction has non-finite entries"));
        }
        let norm = v.norm();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::invalid(format!(
                "direction norm {norm} is not 1 within {UNIT_NORM_TOL:e}"
            )));
        }
        Ok(Direction { v })
    }

    /// Normalizes an arbitrary nonzero vector onto the sphere.
    pub fn normalized(v: DVector<f64>) -> Result<Self> {
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("direction has non-finite entries"));
        }
        let norm = v.norm();
        if norm <= 0.0 {
            return Err(Error::invalid("cannot normalize a zero vector"));
        }
        Ok(Direction { v: v / norm })
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.v
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.v
    }

    /// The antipodal direction.
    pub fn flipped(&self) -> Direction {
        Direction { v: -&self.v }
    }
}

/// An ordered orthonormal set of ambient-dimension columns; rank may be 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    ambient: usize,
    // ambient x rank, columns orthonormal.
    cols: DMatrix<f64>,
}

impl Basis {
    /// Validates columns: finite, unit, pairwise orthogonal within 1e-10.
    pub fn from_matrix(ambient: usize, cols: DMatrix<f64>) -> Result<Self> {
        if cols.nrows() != ambient && cols.ncols() != 0 {
            return Err(Error::invalid(format!(
                "basis columns have dimension {}, ambient is {ambient}",
                cols.nrows()
            )));
        }
        if cols.ncols() > ambient {
            return Err(Error::invalid(format!(
                "rank {} exceeds ambient dimension {ambient}",
                cols.ncols()
            )));
        }
        let b = Basis {
            ambient,
            cols: reshape_empty(ambient, cols),
        };
        for j in 0..b.rank() {
            let cj = b.cols.column(j);
            if cj.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(format!("basis column {j} is not finite")));
            }
            if (cj.norm() - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::invalid(format!("basis column {j} is not unit")));
            }
            for k in 0..j {
                let dot = cj.dot(&b.cols.column(k));
                if dot.abs() > ORTHO_TOL {
                    return Err(Error::invalid(format!(
                        "basis columns {k} and {j} have inner product {dot:e}"
                    )));
                }
            }
        }
        Ok(b)
    }

    pub fn from_directions(ambient: usize, dirs: &[Direction]) -> Result<Self> {
        let mut cols = DMatrix::zeros(ambient, dirs.len());
        for (j, d) in dirs.iter().enumerate() {
            if d.dim() != ambient {
                return Err(Error::invalid(format!(
                    "direction {j} has dimension {}, ambient is {ambient}",
                    d.dim()
                )));
            }
            cols.set_column(j, d.coords());
        }
        Self::from_matrix(ambient, cols)
    }

    /// Rank-0 basis of the given ambient space.
    pub fn empty(ambient: usize) -> Self {
        Basis {
            ambient,
            cols: DMatrix::zeros(ambient, 0),
        }
    }

    /// The canonical full basis e1..ed.
    pub fn identity(ambient: usize) -> Self {
        Basis {
            ambient,
            cols: DMatrix::identity(ambient, ambient),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.cols.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.cols
    }

    pub fn column(&self, j: usize) -> Direction {
        Direction {
            v: self.cols.column(j).into_owned(),
        }
    }

    /// Largest absolute deviation of B^T B from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let g = self.cols.transpose() * &self.cols;
        let mut worst: f64 = 0.0;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }
}

fn reshape_empty(ambient: usize, cols: DMatrix<f64>) -> DMatrix<f64> {
    if cols.ncols() == 0 {
        DMatrix::zeros(ambient, 0)
    } else {
        cols
    }
}

/// Orthonormal basis of the orthogonal complement of `found` in the ambient
/// space.
///
/// Completion is a rank-revealing orthogonalization of [A | I]: each canonical
/// axis is orthogonalized against the found columns, then axes are accepted
/// greedily by largest residual norm (ties to the lowest index) with the
/// remaining residuals deflated after each acceptance. Deterministic for a
/// fixed input.
pub fn orthonormal_complement(found: &Basis, ambient_dim: usize) -> Result<Basis> {
    if found.ambient_dim() != ambient_dim {
        return Err(Error::invalid(format!(
            "found basis lives in dimension {}, requested complement in {ambient_dim}",
            found.ambient_dim()
        )));
    }
    let r = found.rank();
    if r == ambient_dim {
        return Ok(Basis::empty(ambient_dim));
    }
    let a = found.matrix();
    // Residuals of the canonical axes after removing the found span.
    let mut residuals: Vec<DVector<f64>> = (0..ambient_dim)
        .map(|j| {
            let mut e = DVector::zeros(ambient_dim);
            e[j] = 1.0;
            project_out(&mut e, a);
            e
        })
        .collect();
    let mut alive: Vec<usize> = (0..ambient_dim).collect();
    let mut picked = DMatrix::zeros(ambient_dim, ambient_dim - r);

    for k in 0..(ambient_dim - r) {
        let (slot, _) = alive
            .iter()
            .enumerate()
            .map(|(slot, &j)| (slot, residuals[j].norm()))
            .fold((usize::MAX, -1.0), |best, (slot, norm)| {
                if norm > best.1 {
                    (slot, norm)
                } else {
                    best
                }
            });
        let j = alive.remove(slot);
        let mut q = residuals[j].clone();
        // Second orthogonalization pass guards against cancellation when the
        // residual is small relative to the axis.
        project_out(&mut q, a);
        for prev in 0..k {
            let col = picked.column(prev).into_owned();
            let dot = q.dot(&col);
            q.axpy(-dot, &col, 1.0);
        }
        let norm = q.norm();
        if norm <= 1e-10 {
            return Err(Error::numeric(
                "complement construction lost rank; found basis is ill-conditioned",
            ));
        }
        q /= norm;
        for &jj in &alive {
            let dot = q.dot(&residuals[jj]);
            residuals[jj].axpy(-dot, &q, 1.0);
        }
        picked.set_column(k, &q);
    }
    Basis::from_matrix(ambient_dim, picked)
}

fn project_out(v: &mut DVector<f64>, a: &DMatrix<f64>) {
    for j in 0..a.ncols() {
        let col = a.column(j);
        let dot = col.dot(&*v);
        v.axpy(-dot, &col.into_owned(), 1.0);
    }
}

/// Two-pass modified Gram-Schmidt over the columns of `m`, left to right.
/// Restores orthonormality after accumulated rounding drift; errors only if
/// a column collapses into the span of its predecessors.
pub(crate) fn reorthonormalize(m: &mut DMatrix<f64>) -> Result<()> {
    for j in 0..m.ncols() {
        let mut col = m.column(j).into_owned();
        for _pass in 0..2 {
            for k in 0..j {
                let prev = m.column(k).into_owned();
                let dot = col.dot(&prev);
                col.axpy(-dot, &prev, 1.0);
            }
        }
        let norm = col.norm();
        if norm <= 1e-12 {
            return Err(Error::numeric(format!(
                "column {j} lost independence during re-orthonormalization"
            )));
        }
        col /= norm;
        m.set_column(j, &col);
    }
    Ok(())
}

/// Maps unit coefficients on the basis sphere back to an ambient direction,
/// B * coeffs.
pub fn lift(coeffs: &DVector<f64>, basis: &Basis) -> Result<Direction> {
    if basis.rank() == 0 {
        return Err(Error::invalid("cannot lift through a rank-0 basis"));
    }
    if coeffs.len() != basis.rank() {
        return Err(Error::invalid(format!(
            "coefficient length {} does not match basis rank {}",
            coeffs.len(),
            basis.rank()
        )));
    }
    let norm = coeffs.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "coefficients must be unit-norm, got {norm}"
        )));
    }
    // Orthonormal columns make B*c unit up to rounding; the residual drift is
    // folded away so Direction's own invariant always holds.
    Direction::normalized(basis.matrix() * coeffs)
}

/// Flips v so its largest-magnitude coordinate is positive (ties to the
/// lowest index), removing the sign ambiguity of eigenvectors.
pub(crate) fn fix_sign(v: &mut DVector<f64>) {
    let mut lead = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[lead].abs() {
            lead = i;
        }
    }
    if v[lead] < 0.0 {
        v.neg_mut();
    }
}

/// Uniform draw from the unit sphere of dimension r (isotropic Gaussian,
/// normalized). Reproducible for a fixed generator state.
pub fn random_unit<R: Rng + ?Sized>(r: usize, rng: &mut R) -> Result<DVector<f64>> {
    if r == 0 {
        return Err(Error::invalid("sphere dimension must be at least 1"));
    }
    loop {
        let v = DVector::from_fn(r, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            return Ok(v / norm);
        }
        // Essentially-zero draw; resample rather than divide by noise.
    }
}
