use super::multi_index::{binomial, MultiIndex};
use super::ExteriorError;

/// An alternating form of fixed degree, stored densely over the
/// lexicographic multi-index basis.
///
/// Coefficient `coeffs[r]` multiplies the basis form whose multi-index has
/// rank `r`. Forms of different dimension or degree never combine additively;
/// the arithmetic operators panic on such a mismatch because it is a
/// programming error, while fallible operations ([`super::wedge`],
/// [`super::contract`], ...) report it as an [`ExteriorError`].
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    dim: u8,
    degree: u8,
    coeffs: Vec<f64>,
}

impl Form {
    /// The zero form of the given degree.
    pub fn zero(dim: usize, degree: usize) -> Result<Self, ExteriorError> {
        if dim != 6 && dim != 7 {
            return Err(ExteriorError::UnsupportedDimension(dim));
        }
        if degree > dim {
            return Err(ExteriorError::DegreeOutOfRange { dim, degree });
        }
        Ok(Self {
            dim: dim as u8,
            degree: degree as u8,
            coeffs: vec![0.0; binomial(dim, degree)],
        })
    }

    /// Wraps a dense coefficient vector (lexicographic basis order).
    pub fn from_coeffs(dim: usize, degree: usize, coeffs: Vec<f64>) -> Result<Self, ExteriorError> {
        let mut form = Self::zero(dim, degree)?;
        if coeffs.len() != form.coeffs.len() {
            return Err(ExteriorError::CoefficientCount {
                dim,
                degree,
                expected: form.coeffs.len(),
                got: coeffs.len(),
            });
        }
        form.coeffs = coeffs;
        Ok(form)
    }

    /// Builds a form from `(indices, coefficient)` terms. Indices need not be
    /// sorted; the alternating sign of sorting is applied. Repeated indices in
    /// a term are an error (the term would be zero only by accident).
    pub fn from_terms(
        dim: usize,
        degree: usize,
        terms: &[(&[u8], f64)],
    ) -> Result<Self, ExteriorError> {
        let mut form = Self::zero(dim, degree)?;
        for (indices, coeff) in terms {
            if indices.len() != degree {
                return Err(ExteriorError::DegreeMismatch(indices.len(), degree));
            }
            let (mi, sign) = MultiIndex::from_unsorted(dim, indices)?;
            form.coeffs[mi.rank()] += sign * coeff;
        }
        Ok(form)
    }

    /// The basis form `e^{i1...ik}` (indices may be unsorted; sign applied).
    pub fn basis(dim: usize, indices: &[u8]) -> Result<Self, ExteriorError> {
        Self::from_terms(dim, indices.len(), &[(indices, 1.0)])
    }

    /// The constant function 1 viewed as a 0-form.
    pub fn one(dim: usize) -> Result<Self, ExteriorError> {
        Self::from_coeffs(dim, 0, vec![1.0])
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// Coefficient of the basis form with the given multi-index.
    pub fn coeff(&self, mi: &MultiIndex) -> f64 {
        debug_assert_eq!(mi.dim(), self.dim());
        debug_assert_eq!(mi.degree(), self.degree());
        self.coeffs[mi.rank()]
    }

    /// Coefficient addressed by (possibly unsorted) indices, with sign.
    pub fn component(&self, indices: &[u8]) -> Result<f64, ExteriorError> {
        if indices.len() != self.degree() {
            return Err(ExteriorError::DegreeMismatch(indices.len(), self.degree()));
        }
        let (mi, sign) = MultiIndex::from_unsorted(self.dim(), indices)?;
        Ok(sign * self.coeffs[mi.rank()])
    }

    /// Iterates `(multi-index, coefficient)` pairs in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (MultiIndex, f64)> + '_ {
        let dim = self.dim();
        let degree = self.degree();
        self.coeffs.iter().enumerate().map(move |(r, &c)| {
            (
                MultiIndex::from_rank(dim, degree, r).expect("rank in range"),
                c,
            )
        })
    }

    /// Dot product of coefficient vectors (degrees and dimensions must match).
    pub fn dot(&self, other: &Form) -> f64 {
        self.assert_compatible(other);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Largest absolute coefficient.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm_inf() <= tol
    }

    /// True when every coefficient is finite.
    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn scaled(&self, s: f64) -> Form {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= s;
        }
        out
    }

    fn assert_compatible(&self, other: &Form) {
        assert_eq!(
            self.dim, other.dim,
            "forms of different dimension never combine additively"
        );
        assert_eq!(
            self.degree, other.degree,
            "forms of different degree never combine additively"
        );
    }
}

impl std::ops::Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        self.assert_compatible(rhs);
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        out
    }
}

impl std::ops::Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self.assert_compatible(rhs);
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        out
    }
}

impl std::ops::Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scaled(-1.0)
    }
}

impl std::ops::Mul<f64> for &Form {
    type Output = Form;
    fn mul(self, rhs: f64) -> Form {
        self.scaled(rhs)
    }
}

impl std::ops::AddAssign<&Form> for Form {
    fn add_assign(&mut self, rhs: &Form) {
        self.assert_compatible(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl std::fmt::Display for Form {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (mi, c) in self.terms() {
            if c == 0.0 {
                continue;
            }
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if c < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            if self.degree == 0 {
                write!(f, "{a}")?;
            } else if (a - 1.0).abs() > 1e-12 {
                write!(f, "{a}*{mi}")?;
            } else {
                write!(f, "{mi}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
