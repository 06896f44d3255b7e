use nalgebra::DMatrix;

use super::ExteriorError;

/// A linear endomorphism of the model vector space, column `j` holding the
/// image of the basis vector `e_{j+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinMap {
    dim: usize,
    mat: DMatrix<f64>,
}

impl LinMap {
    pub fn identity(dim: usize) -> Result<Self, ExteriorError> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            mat: DMatrix::identity(dim, dim),
        })
    }

    /// The scalar map `t * Id`.
    pub fn scaling(dim: usize, t: f64) -> Result<Self, ExteriorError> {
        let mut map = Self::identity(dim)?;
        map.mat *= t;
        Ok(map)
    }

    pub fn from_matrix(mat: DMatrix<f64>) -> Result<Self, ExteriorError> {
        let dim = mat.nrows();
        check_dim(dim)?;
        if mat.ncols() != dim {
            return Err(ExteriorError::DimensionMismatch(dim, mat.ncols()));
        }
        Ok(Self { dim, mat })
    }

    /// Row-major entries, `dim * dim` of them.
    pub fn from_rows(dim: usize, entries: &[f64]) -> Result<Self, ExteriorError> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(ExteriorError::CoefficientCount {
                dim,
                degree: 1,
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self {
            dim,
            mat: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    /// Diagonal map with the given entries.
    pub fn diagonal(entries: &[f64]) -> Result<Self, ExteriorError> {
        let dim = entries.len();
        check_dim(dim)?;
        Ok(Self {
            dim,
            mat: DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(entries)),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn det(&self) -> f64 {
        self.mat.determinant()
    }

    pub fn inverse(&self) -> Result<LinMap, ExteriorError> {
        let det = self.det();
        self.mat
            .clone()
            .try_inverse()
            .map(|mat| LinMap { dim: self.dim, mat })
            .ok_or(ExteriorError::SingularMap { det })
    }

    /// `self . other` as maps (apply `other` first).
    pub fn compose(&self, other: &LinMap) -> Result<LinMap, ExteriorError> {
        if self.dim != other.dim {
            return Err(ExteriorError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(LinMap {
            dim: self.dim,
            mat: &self.mat * &other.mat,
        })
    }

    /// Applies the map to a vector of components.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>, ExteriorError> {
        if v.len() != self.dim {
            return Err(ExteriorError::VectorLength {
                expected: self.dim,
                got: v.len(),
            });
        }
        let out = &self.mat * nalgebra::DVector::from_row_slice(v);
        Ok(out.iter().copied().collect())
    }

    /// Frobenius-style trace.
    pub fn trace(&self) -> f64 {
        self.mat.trace()
    }
}

/// An inner product on the model vector space, `mat[(i, j)] = g(e_{i+1}, e_{j+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    dim: usize,
    mat: DMatrix<f64>,
}

impl Metric {
    pub fn euclidean(dim: usize) -> Result<Self, ExteriorError> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            mat: DMatrix::identity(dim, dim),
        })
    }

    /// Wraps a symmetric matrix; symmetry is the caller's contract and is
    /// enforced only up to round-off.
    pub fn from_matrix(mat: DMatrix<f64>) -> Result<Self, ExteriorError> {
        let dim = mat.nrows();
        check_dim(dim)?;
        if mat.ncols() != dim {
            return Err(ExteriorError::DimensionMismatch(dim, mat.ncols()));
        }
        let sym = (&mat + mat.transpose()) * 0.5;
        Ok(Self { dim, mat: sym })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn is_positive_definite(&self) -> bool {
        self.mat.clone().cholesky().is_some()
    }

    pub fn det(&self) -> f64 {
        self.mat.determinant()
    }
}

fn check_dim(dim: usize) -> Result<(), ExteriorError> {
    if dim != 6 && dim != 7 {
        return Err(ExteriorError::UnsupportedDimension(dim));
    }
    Ok(())
}
