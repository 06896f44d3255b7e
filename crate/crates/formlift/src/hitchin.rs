//! Invariants of stable forms in dimension 6.
//!
//! A form is *stable* when its pointwise GL(6)-orbit is open. Openness
//! happens only in degrees 2, 3 and 4, and each case carries a volume
//! functional `ε`:
//!
//! * degree 2: `ε(ω) = -(1/6) top(ω³)`, nonzero exactly on nondegenerate ω;
//! * degree 3: the operator `K_φ` with `K_φ² = λ(φ)·Id` splits the stable
//!   forms into two open families by the sign of the discriminant
//!   `λ = (1/6) tr(K²)`; for `λ < 0` (the family inducing a complex
//!   structure `I = K/ε`) the volume is `ε = +√(-λ)`;
//! * degree 4: `K_σ` is antisymmetric, `λ = det(K_σ) ≥ 0`, and stability
//!   means `λ > 0` with `ε = λ^{1/4}`.
//!
//! Every stable ρ has a dual form `ρ̂` of complementary degree characterized
//! by the derivative identity `D_ρε(τ) = ½ top(ρ̂ ∧ τ)`; [`deps`] computes
//! that derivative analytically and [`hat`] the dual itself. The volume is
//! always taken as the positive multiple of the oriented basis volume, so
//! orientation reversal shows up through the sign rules of the group action
//! rather than through a root branch.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::exterior::{
    binomial, contract, pullback, top_scalar, wedge, ExteriorError, Form, LinMap, MultiIndex,
};

/// Default scale-invariant threshold separating stable from borderline forms.
pub const DEFAULT_STABILITY_TOL: f64 = 1e-10;

/// Open-orbit classification of a form of degree 2, 3 or 4 in dimension 6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StableClass {
    /// Nondegenerate 2-form.
    Symplectic2,
    /// Stable 3-form with negative discriminant; induces a complex structure.
    Positive3,
    /// Stable 3-form with positive discriminant (the other open orbit,
    /// e.g. `e^{123} + e^{456}`); carries no complex structure.
    NegativeDiscriminant3,
    /// Stable 4-form (positive determinant of the antisymmetric pairing).
    Stable4,
    /// Not stable at the given tolerance.
    NotStable,
}

impl std::fmt::Display for StableClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            StableClass::Symplectic2 => "symplectic (degree 2)",
            StableClass::Positive3 => "positive (degree 3, lambda < 0)",
            StableClass::NegativeDiscriminant3 => "stable non-positive (degree 3, lambda > 0)",
            StableClass::Stable4 => "stable (degree 4)",
            StableClass::NotStable => "not stable",
        };
        f.write_str(s)
    }
}

/// The value of a volume functional: the coefficient of the oriented basis
/// volume `e^{123456}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeElement {
    pub value: f64,
}

impl VolumeElement {
    pub fn new(value: f64) -> Self {
        Self { value }
    }
}

impl std::fmt::Display for VolumeElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} e^{{123456}}", self.value)
    }
}

/// The operator of a degree 3 or degree 4 form, as a 6×6 matrix of
/// `Λ⁶`-coefficients; column `i` holds the image of `e_{i+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KMatrix {
    mat: DMatrix<f64>,
}

impl KMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn det(&self) -> f64 {
        self.mat.determinant()
    }

    pub fn trace_of_square(&self) -> f64 {
        (&self.mat * &self.mat).trace()
    }
}

#[derive(Debug, Error)]
pub enum HitchinError {
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error("expected a 6-dimensional form, got dimension {0}")]
    NotSixDimensional(usize),
    #[error("expected degree {expected}, got degree {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("no stability theory for degree {0} (stable degrees are 2, 3, 4)")]
    UnsupportedDegree(usize),
    #[error("3-form is not of positive type: discriminant {lambda:.6e} is not negative")]
    NotPositiveType { lambda: f64 },
    #[error("4-form is not stable: discriminant {lambda:.6e} is not positive")]
    NotStableFour { lambda: f64 },
    #[error("form is not stable ({class})")]
    NotStable { class: StableClass },
    #[error("forms differ in shape: degree {0} vs {1}")]
    ShapeMismatch(usize, usize),
}

fn require_shape(rho: &Form, degree: usize) -> Result<(), HitchinError> {
    if rho.dim() != 6 {
        return Err(HitchinError::NotSixDimensional(rho.dim()));
    }
    if rho.degree() != degree {
        return Err(HitchinError::WrongDegree {
            expected: degree,
            got: rho.degree(),
        });
    }
    Ok(())
}

/// Volume of a 2-form: `ε(ω) = -(1/6) top(ω³)`. Zero exactly when ω is
/// degenerate, so no stability precondition is imposed here.
pub fn eps2(omega: &Form) -> Result<VolumeElement, HitchinError> {
    require_shape(omega, 2)?;
    let w2 = wedge(omega, omega)?;
    let w3 = wedge(&w2, omega)?;
    Ok(VolumeElement::new(-top_scalar(&w3)? / 6.0))
}

/// The bilinear expansion of `K`: entry `(j, i)` is
/// `½ top(e^j ∧ (e_i ⌟ a) ∧ b)`, so `K_φ = k_bilinear(φ, φ)`.
fn k_bilinear(a: &Form, b: &Form) -> Result<DMatrix<f64>, HitchinError> {
    let mut mat = DMatrix::zeros(6, 6);
    for i in 0..6 {
        let mut x = [0.0; 6];
        x[i] = 1.0;
        let inner = wedge(&contract(&x, a)?, b)?;
        for j in 0..6 {
            let ej = Form::basis(6, &[(j + 1) as u8])?;
            mat[(j, i)] = 0.5 * top_scalar(&wedge(&ej, &inner)?)?;
        }
    }
    Ok(mat)
}

/// The operator `K_φ` of a 3-form, `K_φ(x)` read off from
/// `½ α ∧ (x ⌟ φ) ∧ φ = α(K_φ x) e^{123456}`.
pub fn k_map3(phi: &Form) -> Result<KMatrix, HitchinError> {
    require_shape(phi, 3)?;
    Ok(KMatrix {
        mat: k_bilinear(phi, phi)?,
    })
}

/// Discriminant `λ(φ) = (1/6) tr(K_φ²)`; negative exactly on the
/// complex-structure-inducing stable orbit.
pub fn lambda3(phi: &Form) -> Result<f64, HitchinError> {
    Ok(k_map3(phi)?.trace_of_square() / 6.0)
}

/// Volume of a positive 3-form: `ε = +√(-λ)`. Errors when `λ(φ) ≥ 0`.
pub fn eps3(phi: &Form) -> Result<VolumeElement, HitchinError> {
    let lambda = lambda3(phi)?;
    if lambda >= 0.0 {
        return Err(HitchinError::NotPositiveType { lambda });
    }
    Ok(VolumeElement::new((-lambda).sqrt()))
}

/// The antisymmetric pairing of a 4-form: entry `(j, i)` is
/// `top(e^j ∧ e^i ∧ σ)`.
pub fn k_map4(sigma: &Form) -> Result<KMatrix, HitchinError> {
    require_shape(sigma, 4)?;
    let mut mat = DMatrix::zeros(6, 6);
    for j in 0..6 {
        for i in 0..6 {
            if i == j {
                continue;
            }
            let e = Form::basis(6, &[(j + 1) as u8, (i + 1) as u8]);
            let e = match e {
                Ok(e) => e,
                Err(_) => unreachable!("distinct indices"),
            };
            mat[(j, i)] = top_scalar(&wedge(&e, sigma)?)?;
        }
    }
    Ok(KMatrix { mat })
}

/// Discriminant `λ(σ) = det(K_σ)`; a perfect square (Pfaffian squared),
/// positive exactly on the stable orbit.
pub fn lambda4(sigma: &Form) -> Result<f64, HitchinError> {
    Ok(k_map4(sigma)?.det())
}

/// Volume of a stable 4-form: `ε = λ^{1/4}`. Errors when `λ(σ) ≤ 0`.
pub fn eps4(sigma: &Form) -> Result<VolumeElement, HitchinError> {
    let lambda = lambda4(sigma)?;
    if lambda <= 0.0 {
        return Err(HitchinError::NotStableFour { lambda });
    }
    Ok(VolumeElement::new(lambda.powf(0.25)))
}

/// Volume functional dispatched on degree (2, 3 or 4).
pub fn epsilon(rho: &Form) -> Result<VolumeElement, HitchinError> {
    match rho.degree() {
        2 => eps2(rho),
        3 => eps3(rho),
        4 => eps4(rho),
        d => Err(HitchinError::UnsupportedDegree(d)),
    }
}

/// Classifies with the default tolerance [`DEFAULT_STABILITY_TOL`].
pub fn classify(rho: &Form) -> Result<StableClass, HitchinError> {
    classify_with_tol(rho, DEFAULT_STABILITY_TOL)
}

/// Open-orbit classification with a scale-invariant threshold: the
/// discriminants are compared against `tol` times the matching power of the
/// coefficient norm (`‖ω‖³`, `‖φ‖⁴`, `‖σ‖⁶`), so `classify(t·ρ) = classify(ρ)`.
pub fn classify_with_tol(rho: &Form, tol: f64) -> Result<StableClass, HitchinError> {
    if rho.dim() != 6 {
        return Err(HitchinError::NotSixDimensional(rho.dim()));
    }
    let n = rho.norm();
    Ok(match rho.degree() {
        2 => {
            if eps2(rho)?.value.abs() > tol * n.powi(3) {
                StableClass::Symplectic2
            } else {
                StableClass::NotStable
            }
        }
        3 => {
            let lambda = lambda3(rho)?;
            if lambda < -tol * n.powi(4) {
                StableClass::Positive3
            } else if lambda > tol * n.powi(4) {
                StableClass::NegativeDiscriminant3
            } else {
                StableClass::NotStable
            }
        }
        4 => {
            if lambda4(rho)? > tol * n.powi(6) {
                StableClass::Stable4
            } else {
                StableClass::NotStable
            }
        }
        d => return Err(HitchinError::UnsupportedDegree(d)),
    })
}

/// The almost complex structure `I(φ) = K_φ / ε(φ)` of a positive 3-form;
/// satisfies `I² = -Id` and depends on the orientation through ε.
pub fn complex_structure(phi: &Form) -> Result<LinMap, HitchinError> {
    let k = k_map3(phi)?;
    let lambda = k.trace_of_square() / 6.0;
    if lambda >= 0.0 {
        return Err(HitchinError::NotPositiveType { lambda });
    }
    let eps = (-lambda).sqrt();
    Ok(LinMap::from_matrix(&k.mat / eps).expect("6x6 matrix"))
}

/// The dual form `ρ̂` of a stable ρ, characterized by
/// `D_ρε(τ) = ½ top(ρ̂ ∧ τ)`:
///
/// * degree 2: `ω̂ = -ω²`;
/// * degree 3 (positive type): `φ̂ = φ(I·, I·, I·)`, equivalently `-I.φ`
///   under the group action convention (`I⁻¹ = -I`);
/// * degree 4: read back from the analytic derivative of ε degree by degree.
///
/// The dual of the `λ > 0` stable 3-form family is out of scope and reports
/// [`HitchinError::NotPositiveType`].
pub fn hat(rho: &Form) -> Result<Form, HitchinError> {
    match rho.degree() {
        2 => {
            let class = classify(rho)?;
            if class != StableClass::Symplectic2 {
                return Err(HitchinError::NotStable { class });
            }
            Ok(-&wedge(rho, rho)?)
        }
        3 => {
            let i = complex_structure(rho)?;
            Ok(pullback(&i, rho)?)
        }
        4 => {
            let class = classify(rho)?;
            if class != StableClass::Stable4 {
                return Err(HitchinError::NotStable { class });
            }
            let mut out = Form::zero(6, 2)?;
            for r in 0..binomial(6, 2) {
                let p = MultiIndex::from_rank(6, 2, r)?;
                let tau = Form::basis(6, p.complement().indices())?;
                out.coeffs_mut()[r] = 2.0 * p.complement_sign() * deps(rho, &tau)?;
            }
            Ok(out)
        }
        d => Err(HitchinError::UnsupportedDegree(d)),
    }
}

/// Adjugate via cofactors; exact for the small matrices used here and free of
/// any inversion, so it stays meaningful near the stability boundary.
fn adjugate(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        let minor = m.clone().remove_row(j).remove_column(i).determinant();
        if (i + j) % 2 == 0 {
            minor
        } else {
            -minor
        }
    })
}

/// Analytic directional derivative of the volume functional at a stable ρ in
/// the direction ρ̇ (same degree): `D_ρε(ρ̇)`.
///
/// * degree 2: `-½ top(ω² ∧ ω̇)`;
/// * degree 3: chain rule through `λ = (1/6) tr(K²)` with the bilinear
///   expansion `DK(φ̇) = B(φ, φ̇) + B(φ̇, φ)` and `Dε = -Dλ/(2ε)`;
/// * degree 4: Jacobi's rule `Dλ = tr(adj(K_σ) K_σ̇)` and `Dε = ¼λ^{-¾} Dλ`.
pub fn deps(rho: &Form, rho_dot: &Form) -> Result<f64, HitchinError> {
    if rho.dim() != rho_dot.dim() {
        return Err(HitchinError::NotSixDimensional(rho_dot.dim()));
    }
    if rho.degree() != rho_dot.degree() {
        return Err(HitchinError::ShapeMismatch(rho.degree(), rho_dot.degree()));
    }
    match rho.degree() {
        2 => {
            let class = classify(rho)?;
            if class != StableClass::Symplectic2 {
                return Err(HitchinError::NotStable { class });
            }
            let w2 = wedge(rho, rho)?;
            Ok(-0.5 * top_scalar(&wedge(&w2, rho_dot)?)?)
        }
        3 => {
            let k = k_map3(rho)?;
            let lambda = k.trace_of_square() / 6.0;
            if lambda >= 0.0 {
                return Err(HitchinError::NotPositiveType { lambda });
            }
            let eps = (-lambda).sqrt();
            let dk = k_bilinear(rho, rho_dot)? + k_bilinear(rho_dot, rho)?;
            let dlambda = (&k.mat * dk).trace() / 3.0;
            Ok(-dlambda / (2.0 * eps))
        }
        4 => {
            let k = k_map4(rho)?;
            let lambda = k.det();
            if lambda <= 0.0 {
                return Err(HitchinError::NotStableFour { lambda });
            }
            let dk = k_map4(rho_dot)?;
            let dlambda = (adjugate(&k.mat) * dk.mat).trace();
            Ok(0.25 * lambda.powf(-0.75) * dlambda)
        }
        d => Err(HitchinError::UnsupportedDegree(d)),
    }
}
