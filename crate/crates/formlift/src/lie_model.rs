//! Six-dimensional Lie algebras presented by their invariant differential.
//!
//! An algebra is stored as the table `de^1, …, de^6` of degree-2 forms; the
//! exterior derivative on invariant forms is the antiderivation extension
//! [`LieAlgebra::d_ce`]. This reduces geometry on a compact quotient to
//! finite-dimensional linear algebra: integration becomes the top coefficient
//! (total volume normalized to 1), and the integration-by-parts argument
//! behind the Hamiltonian picture holds exactly on unimodular algebras.
//!
//! The table is primary data rather than brackets: the shorthand notation
//! gives `d` directly and avoids a sign-convention round trip. Brackets, if
//! ever needed, follow from `de^k(e_i, e_j) = -c^k_{ij}`.

use thiserror::Error;

use crate::exterior::{act, top_scalar, wedge, ExteriorError, Form, LinMap, MultiIndex};

/// Residual threshold for the construction-time structure checks; the inputs
/// are small integers or exact rationals, so anything above round-off means a
/// genuinely inconsistent table.
const STRUCTURE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum LieModelError {
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error("algebra shorthand must be wrapped in parentheses like \"(0,0,0,0,12,13)\"")]
    MissingParentheses,
    #[error("expected 6 comma-separated covector entries, got {0}")]
    WrongCovectorCount(usize),
    #[error("covector {covector}: cannot read term {token:?}")]
    BadTerm { covector: usize, token: String },
    #[error("covector {covector}: repeated index in pair \"{i}{i}\"")]
    RepeatedIndexPair { covector: usize, i: u8 },
    #[error("covector {covector}: index {index} outside 1..=6")]
    IndexOutOfRange { covector: usize, index: u8 },
    #[error("d(d(e^{covector})) has norm {residual:.3e}: the table violates the Jacobi identity")]
    JacobiViolation { covector: usize, residual: f64 },
    #[error("an algebra needs exactly 6 covector differentials, got {0}")]
    WrongDifferentialCount(usize),
    #[error("covector differentials must be degree-2 forms in dimension 6, got degree {0} in dimension {1}")]
    BadDifferentialShape(usize, usize),
    #[error("expected a 6-dimensional form, got dimension {0}")]
    NotSixDimensional(usize),
    #[error("expected a degree {expected} form, got degree {got}")]
    WrongDegree { expected: usize, got: usize },
}

/// A 6-dimensional Lie algebra, immutable after construction. Constructors
/// verify the Jacobi identity (`d ∘ d = 0` on basis covectors) and record
/// unimodularity once.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    d1: Vec<Form>,
    unimodular: bool,
}

impl LieAlgebra {
    /// The abelian algebra (`d ≡ 0`).
    pub fn abelian() -> Self {
        let d1 = (0..6).map(|_| Form::zero(6, 2).expect("shape")).collect();
        Self {
            d1,
            unimodular: true,
        }
    }

    /// Builds an algebra from the six differentials `de^1, …, de^6`,
    /// rejecting tables that violate the Jacobi identity.
    pub fn from_d1(d1: Vec<Form>) -> Result<Self, LieModelError> {
        if d1.len() != 6 {
            return Err(LieModelError::WrongDifferentialCount(d1.len()));
        }
        for f in &d1 {
            if f.dim() != 6 || f.degree() != 2 {
                return Err(LieModelError::BadDifferentialShape(f.degree(), f.dim()));
            }
        }
        let algebra = Self::new_unchecked(d1);
        let scale = 1.0
            + algebra
                .d1
                .iter()
                .map(Form::norm)
                .fold(0.0_f64, f64::max)
                .powi(2);
        for k in 1..=6 {
            let dd = algebra.d_ce(&algebra.d1[k - 1])?;
            let residual = dd.norm();
            if residual > STRUCTURE_TOL * scale {
                return Err(LieModelError::JacobiViolation {
                    covector: k,
                    residual,
                });
            }
        }
        Ok(algebra)
    }

    /// Skips the Jacobi check; used by tests that need an inconsistent table.
    pub(crate) fn new_unchecked(d1: Vec<Form>) -> Self {
        let mut algebra = Self {
            d1,
            unimodular: false,
        };
        algebra.unimodular = algebra.unimodular_check();
        algebra
    }

    /// Parses shorthand like `"(23,-13,12,56,-46,45)"`: entry `k` spells
    /// `de^k` as a signed sum of index pairs, `0` for closed covectors.
    /// A reversed pair (`"31"`) contributes with the opposite sign; an
    /// optional coefficient is written `"2*12"` or `"0.5*13"`.
    pub fn parse_salamon(text: &str) -> Result<Self, LieModelError> {
        let trimmed = text.trim();
        let inner = trimmed
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or(LieModelError::MissingParentheses)?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 6 {
            return Err(LieModelError::WrongCovectorCount(parts.len()));
        }
        let mut d1 = Vec::with_capacity(6);
        for (k, part) in parts.iter().enumerate() {
            d1.push(parse_covector(k + 1, part)?);
        }
        Self::from_d1(d1)
    }

    /// Canonical shorthand for the table; inverse of [`Self::parse_salamon`]
    /// up to term ordering and pair orientation.
    pub fn to_salamon(&self) -> String {
        let mut entries = Vec::with_capacity(6);
        for f in &self.d1 {
            let mut s = String::new();
            for (mi, c) in f.terms() {
                if c == 0.0 {
                    continue;
                }
                if c < 0.0 {
                    s.push('-');
                } else if !s.is_empty() {
                    s.push('+');
                }
                let mag = c.abs();
                if (mag - 1.0).abs() > 1e-12 {
                    s.push_str(&format!("{mag}*"));
                }
                let idx = mi.indices();
                s.push_str(&format!("{}{}", idx[0], idx[1]));
            }
            if s.is_empty() {
                s.push('0');
            }
            entries.push(s);
        }
        format!("({})", entries.join(","))
    }

    pub fn dim(&self) -> usize {
        6
    }

    /// The differential `de^k` (1-based `k`).
    pub fn d1(&self, k: usize) -> &Form {
        &self.d1[k - 1]
    }

    pub fn is_abelian(&self) -> bool {
        self.d1.iter().all(|f| f.is_zero(0.0))
    }

    /// Unimodularity recorded at construction.
    pub fn is_unimodular(&self) -> bool {
        self.unimodular
    }

    /// Exterior derivative on invariant forms: the antiderivation with
    /// `d(e^{i₁…i_k}) = Σ_j (-1)^{j-1} e^{i₁…î_j…i_k} ∧ de^{i_j}`.
    /// Top-degree forms are closed; for them the zero 6-form is returned
    /// (the codomain `Λ⁷` of a 6-dimensional space is the zero space).
    pub fn d_ce(&self, a: &Form) -> Result<Form, LieModelError> {
        if a.dim() != 6 {
            return Err(LieModelError::NotSixDimensional(a.dim()));
        }
        let k = a.degree();
        if k >= 6 {
            return Ok(Form::zero(6, 6)?);
        }
        let mut out = Form::zero(6, k + 1)?;
        for (mi, c) in a.terms() {
            if c == 0.0 {
                continue;
            }
            let idx = mi.indices();
            for (pos, &ij) in idx.iter().enumerate() {
                let dcov = &self.d1[(ij - 1) as usize];
                if dcov.is_zero(0.0) {
                    continue;
                }
                let rest: Vec<u8> = idx
                    .iter()
                    .enumerate()
                    .filter(|&(p, _)| p != pos)
                    .map(|(_, &v)| v)
                    .collect();
                let sign = if pos % 2 == 0 { c } else { -c };
                let term = wedge(&Form::basis(6, &rest)?, dcov)?;
                out += &term.scaled(sign);
            }
        }
        Ok(out)
    }

    /// True when `d ∘ d` vanishes on every basis covector.
    pub fn jacobi_check(&self) -> bool {
        let scale = 1.0
            + self
                .d1
                .iter()
                .map(Form::norm)
                .fold(0.0_f64, f64::max)
                .powi(2);
        self.d1.iter().all(|f| {
            self.d_ce(f)
                .map(|dd| dd.norm() <= STRUCTURE_TOL * scale)
                .unwrap_or(false)
        })
    }

    /// True when every degree-5 basis form has exact top component zero,
    /// the invariant-form face of trace-free adjoint maps. Integration by
    /// parts (`∫ d(β) = 0`) holds in this model exactly for such algebras.
    pub fn unimodular_check(&self) -> bool {
        let scale = 1.0 + self.d1.iter().map(Form::norm).fold(0.0_f64, f64::max);
        (0..6).all(|r| {
            let b = MultiIndex::from_rank(6, 5, r)
                .and_then(|mi| Form::basis(6, mi.indices()))
                .expect("basis 5-form");
            match self.d_ce(&b) {
                Ok(db) => top_scalar(&db).map(f64::abs).unwrap_or(f64::INFINITY)
                    <= STRUCTURE_TOL * scale,
                Err(_) => false,
            }
        })
    }

    /// Integral over the (volume-normalized) compact quotient: the top
    /// coefficient of a degree-6 form.
    pub fn integral(&self, a: &Form) -> Result<f64, LieModelError> {
        if a.dim() != 6 {
            return Err(LieModelError::NotSixDimensional(a.dim()));
        }
        if a.degree() != 6 {
            return Err(LieModelError::WrongDegree {
                expected: 6,
                got: a.degree(),
            });
        }
        Ok(top_scalar(a)?)
    }

    /// True when `A` is an automorphism of the algebra in the sense that the
    /// induced action commutes with `d` on every basis covector.
    pub fn is_automorphism(&self, a: &LinMap, tol: f64) -> Result<bool, LieModelError> {
        for k in 1..=6 {
            let e = Form::basis(6, &[k as u8])?;
            let lhs = self.d_ce(&act(a, &e)?)?;
            let rhs = act(a, &self.d_ce(&e)?)?;
            if (&lhs - &rhs).norm() > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl std::fmt::Display for LieAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_salamon())
    }
}

fn parse_covector(k: usize, text: &str) -> Result<Form, LieModelError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut form = Form::zero(6, 2)?;
    if s.is_empty() {
        return Err(LieModelError::BadTerm {
            covector: k,
            token: text.to_string(),
        });
    }
    if s == "0" {
        return Ok(form);
    }
    // split into sign-carrying chunks; a leading sign belongs to the first term
    let mut chunks: Vec<(f64, String)> = Vec::new();
    let mut sign = 1.0;
    let mut cur = String::new();
    for (pos, ch) in s.chars().enumerate() {
        match ch {
            '+' | '-' if pos == 0 => sign = if ch == '-' { -1.0 } else { 1.0 },
            '+' | '-' => {
                if cur.is_empty() {
                    return Err(LieModelError::BadTerm {
                        covector: k,
                        token: s.clone(),
                    });
                }
                chunks.push((sign, std::mem::take(&mut cur)));
                sign = if ch == '-' { -1.0 } else { 1.0 };
            }
            _ => cur.push(ch),
        }
    }
    if cur.is_empty() {
        return Err(LieModelError::BadTerm {
            covector: k,
            token: s.clone(),
        });
    }
    chunks.push((sign, cur));

    for (sign, chunk) in chunks {
        let (coeff, pair) = match chunk.split_once(['*', '·']) {
            Some((num, pair)) => {
                let c: f64 = num.parse().map_err(|_| LieModelError::BadTerm {
                    covector: k,
                    token: chunk.clone(),
                })?;
                (c, pair.to_string())
            }
            None => (1.0, chunk.clone()),
        };
        let digits: Vec<u8> = pair
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8))
            .collect::<Option<Vec<u8>>>()
            .ok_or_else(|| LieModelError::BadTerm {
                covector: k,
                token: chunk.clone(),
            })?;
        if digits.len() != 2 {
            return Err(LieModelError::BadTerm {
                covector: k,
                token: chunk.clone(),
            });
        }
        let (mut i, mut j) = (digits[0], digits[1]);
        for idx in [i, j] {
            if !(1..=6).contains(&idx) {
                return Err(LieModelError::IndexOutOfRange {
                    covector: k,
                    index: idx,
                });
            }
        }
        if i == j {
            return Err(LieModelError::RepeatedIndexPair { covector: k, i });
        }
        let mut c = sign * coeff;
        if i > j {
            std::mem::swap(&mut i, &mut j);
            c = -c;
        }
        let rank = MultiIndex::new(6, &[i, j])?.rank();
        form.coeffs_mut()[rank] += c;
    }
    Ok(form)
}
