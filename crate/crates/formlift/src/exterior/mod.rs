//! Dense exterior algebra over R^6 and R^7.
//!
//! Alternating forms are stored as dense coefficient vectors over the
//! lexicographically ordered basis of strictly increasing multi-indices, so a
//! degree-`k` form in dimension `n` carries exactly `C(n, k)` numbers (at most
//! 35 here). The orientation is fixed once and for all by declaring
//! `e^{1..n}` positive.
//!
//! Conventions used throughout the crate:
//!
//! * wedge products of basis forms follow the shuffle-sign rule
//!   `e^I ^ e^J = sign(I, J) e^{I u J}` (zero on overlapping indices);
//! * interior products are antiderivations with `e_i . e^i = 1`;
//! * an invertible map `A` acts on a form by `A.rho := rho(A^-1 ., ..., A^-1 .)`,
//!   so scalars act by `(t Id).rho = t^-k rho` in degree `k`;
//! * the Hodge star of a positive-definite metric satisfies
//!   `b ^ *a = <b, a>_g vol_g` with `vol_g` the metric volume form that is a
//!   positive multiple of the chosen orientation.

mod form;
mod linmap;
mod multi_index;
mod ops;

pub use form::Form;
pub use linmap::{LinMap, Metric};
pub use multi_index::{binomial, MultiIndex};
pub use ops::{act, contract, hodge_star, hodge_star_oriented, metric_pairing, top_scalar, wedge};

pub(crate) use ops::pullback;

use thiserror::Error;

/// Errors for exterior algebra construction and operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExteriorError {
    /// Dimension must be 6 or 7 in this project.
    #[error("unsupported dimension {0}; forms live in dimension 6 or 7")]
    UnsupportedDimension(usize),
    /// Degree must satisfy 0 <= k <= n.
    #[error("degree {degree} out of range for dimension {dim}")]
    DegreeOutOfRange { dim: usize, degree: usize },
    /// Two operands live in different dimensions.
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    /// Two operands have incompatible degrees for the requested operation.
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    /// A wedge product would exceed the top degree.
    #[error("degree overflow: {0} + {1} exceeds dimension {2}")]
    DegreeOverflow(usize, usize, usize),
    /// The operation needs a top-degree form.
    #[error("expected a top-degree form (degree {dim}), got degree {degree}")]
    NotTopDegree { dim: usize, degree: usize },
    /// Multi-index entries must be strictly increasing and within 1..=n.
    #[error("invalid multi-index {indices:?} for dimension {dim}")]
    InvalidMultiIndex { dim: usize, indices: Vec<u8> },
    /// A multi-index constructor received a repeated index.
    #[error("repeated index {index} in multi-index")]
    RepeatedIndex { index: u8 },
    /// Coefficient vector length does not match C(n, k).
    #[error("coefficient count {got} does not match C({dim},{degree}) = {expected}")]
    CoefficientCount {
        dim: usize,
        degree: usize,
        expected: usize,
        got: usize,
    },
    /// The linear map is singular and cannot act on forms.
    #[error("singular linear map (determinant {det:e})")]
    SingularMap { det: f64 },
    /// Hodge duality needs a positive-definite metric.
    #[error("metric is not positive definite")]
    NotPositiveDefinite,
    /// The orientation form must be a nonzero top form.
    #[error("orientation form must be a nonzero top-degree form")]
    BadOrientation,
    /// A vector argument has the wrong number of components.
    #[error("vector has {got} components, expected {expected}")]
    VectorLength { expected: usize, got: usize },
}
