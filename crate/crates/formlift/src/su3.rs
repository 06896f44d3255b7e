//! SU(3)-structures on 6-dimensional algebras: validation of a compatible
//! pair `(ω, φ)`, the induced metric, intrinsic-torsion classification, and
//! the map recovering ω from dφ.
//!
//! A pair of stable forms defines an SU(3)-structure when
//!
//! 1. the bilinear form `g(X, Y) = ω(X, I(φ)Y)` is positive definite,
//! 2. `ω ∧ φ = 0` (equivalently, `g` is symmetric), and
//! 3. the volume normalization `ε(φ) = ε(ω)` holds.
//!
//! [`validate`] checks the three conditions in that order, each with a named
//! diagnostic carrying the offending residual, and caches the derived data
//! (complex structure, metric, dual 3-form) in an immutable [`SU3Structure`].

use nalgebra::DMatrix;
use thiserror::Error;

use crate::exterior::{wedge, ExteriorError, Form, LinMap, Metric};
use crate::hitchin::{
    classify, complex_structure, eps2, eps3, hat, HitchinError, StableClass, VolumeElement,
};
use crate::lie_model::{LieAlgebra, LieModelError};

/// Default residual tolerance for structure validation and torsion tests.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum Su3Error {
    #[error(transparent)]
    Hitchin(#[from] HitchinError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    LieModel(#[from] LieModelError),
    #[error("expected a degree {expected} form in dimension 6, got degree {got} in dimension {dim}")]
    WrongShape {
        expected: usize,
        got: usize,
        dim: usize,
    },
    #[error("omega is not a nondegenerate 2-form ({class})")]
    OmegaNotStable { class: StableClass },
    #[error("phi is not a positive 3-form ({class})")]
    PhiNotStable { class: StableClass },
    #[error(
        "positivity fails: omega(., I(phi) .) has minimum eigenvalue {min_eig:.6e} \
         (threshold {threshold:.6e})"
    )]
    NotPositive { min_eig: f64, threshold: f64 },
    #[error("compatibility fails: |omega ^ phi| = {residual:.6e} exceeds {tol:.6e}")]
    NotCompatible { residual: f64, tol: f64 },
    #[error(
        "volume normalization fails: eps(phi) = {eps_phi:.9e} but eps(omega) = {eps_omega:.9e}"
    )]
    VolumeMismatch { eps_phi: f64, eps_omega: f64 },
    #[error("the defining constant lambda must be nonzero")]
    LambdaZero,
    #[error("d(phi) does not rescale to a stable 4-form ({class}); phi is outside the admissible set")]
    PiOutsideDomain { class: StableClass },
}

/// A validated SU(3)-structure with its derived data. Immutable; every field
/// is consistent with `(omega, phi)` at the tolerance used by [`validate`].
#[derive(Debug, Clone)]
pub struct SU3Structure {
    omega: Form,
    phi: Form,
    phihat: Form,
    complex_structure: LinMap,
    metric: Metric,
    epsilon: VolumeElement,
}

impl SU3Structure {
    pub fn omega(&self) -> &Form {
        &self.omega
    }

    pub fn phi(&self) -> &Form {
        &self.phi
    }

    /// The dual 3-form `φ̂` (cached `hat(phi)`).
    pub fn phihat(&self) -> &Form {
        &self.phihat
    }

    pub fn complex_structure(&self) -> &LinMap {
        &self.complex_structure
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn epsilon(&self) -> VolumeElement {
        self.epsilon
    }
}

/// The bilinear form `ω(·, I(φ)·)` as a matrix; symmetric exactly when
/// `ω ∧ φ = 0`, which makes its asymmetry a useful diagnostic.
pub fn induced_pairing(omega: &Form, phi: &Form) -> Result<DMatrix<f64>, Su3Error> {
    require_shape(omega, 2)?;
    require_shape(phi, 3)?;
    let i = complex_structure(phi)?;
    let mut w = DMatrix::zeros(6, 6);
    for (mi, c) in omega.terms() {
        let a = mi.indices()[0] as usize - 1;
        let b = mi.indices()[1] as usize - 1;
        w[(a, b)] = c;
        w[(b, a)] = -c;
    }
    Ok(w * i.matrix())
}

fn require_shape(f: &Form, degree: usize) -> Result<(), Su3Error> {
    if f.dim() != 6 || f.degree() != degree {
        return Err(Su3Error::WrongShape {
            expected: degree,
            got: f.degree(),
            dim: f.dim(),
        });
    }
    Ok(())
}

/// Validates `(ω, φ)` as an SU(3)-structure at tolerance `tol` and assembles
/// the derived caches. Checks run in a fixed order (stability of both forms,
/// positivity, compatibility, volume normalization) so diagnostics are
/// deterministic.
pub fn validate(omega: &Form, phi: &Form, tol: f64) -> Result<SU3Structure, Su3Error> {
    require_shape(omega, 2)?;
    require_shape(phi, 3)?;
    let omega_class = classify(omega)?;
    if omega_class != StableClass::Symplectic2 {
        return Err(Su3Error::OmegaNotStable { class: omega_class });
    }
    let phi_class = classify(phi)?;
    if phi_class != StableClass::Positive3 {
        return Err(Su3Error::PhiNotStable { class: phi_class });
    }

    let pairing = induced_pairing(omega, phi)?;
    let sym = (&pairing + pairing.transpose()) * 0.5;
    let eig = sym.clone().symmetric_eigen();
    let min_eig = eig.eigenvalues.min();
    let threshold = tol * sym.norm();
    if min_eig <= threshold {
        return Err(Su3Error::NotPositive { min_eig, threshold });
    }

    let residual = wedge(omega, phi)?.norm();
    if residual > tol {
        return Err(Su3Error::NotCompatible { residual, tol });
    }

    let eps_omega = eps2(omega)?.value;
    let eps_phi = eps3(phi)?.value;
    if (eps_phi - eps_omega).abs() > tol * eps_omega.abs() {
        return Err(Su3Error::VolumeMismatch { eps_phi, eps_omega });
    }

    Ok(SU3Structure {
        omega: omega.clone(),
        phi: phi.clone(),
        phihat: hat(phi)?,
        complex_structure: complex_structure(phi)?,
        metric: Metric::from_matrix(sym)?,
        epsilon: VolumeElement::new(eps_phi),
    })
}

/// Intrinsic-torsion type of a validated structure on an algebra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TorsionTag {
    /// `dω = 3φ` and `dφ̂ + 2ω² = 0`.
    NearlyKaehler,
    /// `dφ = 0` and `d(ω²) = 0`.
    HalfFlat,
    /// `dφ + λ ω² = 0` with `λ ≠ 0`; carries the fitted λ in this
    /// normalization (the 7-dimensional constant is `2λ`).
    NearlyHalfFlat { lambda_def: f64 },
    /// None of the above at the given tolerance.
    Unclassified,
}

impl std::fmt::Display for TorsionTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TorsionTag::NearlyKaehler => f.write_str("nearly Kaehler"),
            TorsionTag::HalfFlat => f.write_str("half-flat"),
            TorsionTag::NearlyHalfFlat { lambda_def } => {
                write!(f, "nearly half-flat (lambda = {lambda_def})")
            }
            TorsionTag::Unclassified => f.write_str("unclassified"),
        }
    }
}

/// Residual norms of every defining equation, reported regardless of the
/// accepted tag so callers can see near-misses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorsionResiduals {
    /// `‖dω - 3φ‖`
    pub nearly_kaehler_domega: f64,
    /// `‖dφ̂ + 2ω²‖`
    pub nearly_kaehler_dphihat: f64,
    /// `‖dφ‖`
    pub half_flat_dphi: f64,
    /// `‖d(ω²)‖`
    pub half_flat_domega2: f64,
    /// `‖dφ + λ_fit ω²‖` with the least-squares λ below
    pub nearly_half_flat: f64,
    /// the fitted λ in the `dφ + λω² = 0` normalization
    pub lambda_fit: f64,
    /// size factor the residuals were compared against (`tol · scale`)
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorsionClass {
    pub tag: TorsionTag,
    pub residuals: TorsionResiduals,
}

impl TorsionClass {
    /// The constant of the 7-dimensional lift (`dψ = λ ∗ψ` normalization),
    /// twice the fitted value; present only for nearly half-flat structures.
    pub fn lambda_g2(&self) -> Option<f64> {
        match self.tag {
            TorsionTag::NearlyHalfFlat { lambda_def } => Some(2.0 * lambda_def),
            _ => None,
        }
    }
}

/// Evaluates all three torsion-class residual sets and returns the most
/// specific class that holds at `tol` (nearly Kaehler conditions imply the
/// half-flat ones, so precedence matters). λ for the nearly half-flat test is
/// fitted by least squares over the ω² line, and `λ = 0` is never accepted:
/// a half-flat structure is not automatically nearly half-flat.
pub fn classify_torsion(algebra: &LieAlgebra, s: &SU3Structure, tol: f64) -> TorsionClass {
    // shapes are guaranteed by validation, so the unwraps cannot fire
    let domega = algebra.d_ce(s.omega()).expect("validated shape");
    let dphi = algebra.d_ce(s.phi()).expect("validated shape");
    let dphihat = algebra.d_ce(s.phihat()).expect("validated shape");
    let omega2 = wedge(s.omega(), s.omega()).expect("validated shape");
    let domega2 = algebra.d_ce(&omega2).expect("validated shape");

    let nearly_kaehler_domega = (&domega - &s.phi().scaled(3.0)).norm();
    let nearly_kaehler_dphihat = (&dphihat + &omega2.scaled(2.0)).norm();
    let half_flat_dphi = dphi.norm();
    let half_flat_domega2 = domega2.norm();

    let denom = omega2.dot(&omega2);
    let lambda_fit = if denom > 0.0 {
        -dphi.dot(&omega2) / denom
    } else {
        0.0
    };
    let nearly_half_flat = (&dphi + &omega2.scaled(lambda_fit)).norm();

    let scale = 1.0
        + domega.norm()
        + half_flat_dphi
        + dphihat.norm()
        + omega2.norm()
        + 3.0 * s.phi().norm();
    let accept = tol * scale;

    let tag = if nearly_kaehler_domega <= accept && nearly_kaehler_dphihat <= accept {
        TorsionTag::NearlyKaehler
    } else if half_flat_dphi <= accept && half_flat_domega2 <= accept {
        TorsionTag::HalfFlat
    } else if nearly_half_flat <= accept && lambda_fit.abs() > tol {
        TorsionTag::NearlyHalfFlat {
            lambda_def: lambda_fit,
        }
    } else {
        TorsionTag::Unclassified
    };

    TorsionClass {
        tag,
        residuals: TorsionResiduals {
            nearly_kaehler_domega,
            nearly_kaehler_dphihat,
            half_flat_dphi,
            half_flat_domega2,
            nearly_half_flat,
            lambda_fit,
            scale,
        },
    }
}

/// Recovers the 2-form from a 3-form with `dφ` on the stable-4-form locus:
/// `π(φ) = -hat(-(1/λ) dφ)`. For admissible φ the pair `(π(φ), φ)` then
/// satisfies `dφ = -(λ/2) π(φ)²`.
pub fn pi_map(algebra: &LieAlgebra, phi: &Form, lambda: f64) -> Result<Form, Su3Error> {
    require_shape(phi, 3)?;
    if lambda == 0.0 {
        return Err(Su3Error::LambdaZero);
    }
    let sigma = algebra.d_ce(phi)?.scaled(-1.0 / lambda);
    let class = classify(&sigma)?;
    if class != StableClass::Stable4 {
        return Err(Su3Error::PiOutsideDomain { class });
    }
    Ok(-&hat(&sigma)?)
}

/// Residual of the chain-rule identity `π(φ) ∧ π_{∗φ}(φ̇) = -(1/λ) dφ̇`,
/// with the derivative of π taken by central finite differences. A test
/// instrument, not a hot-path routine.
pub fn pi_derivative_identity(
    algebra: &LieAlgebra,
    phi: &Form,
    lambda: f64,
    phi_dot: &Form,
) -> Result<f64, Su3Error> {
    let base = pi_map(algebra, phi, lambda)?;
    let dot_norm = phi_dot.norm();
    if dot_norm == 0.0 {
        return Ok(0.0);
    }
    let h = 1e-6 * phi.norm() / dot_norm;
    let plus = pi_map(algebra, &(phi + &phi_dot.scaled(h)), lambda)?;
    let minus = pi_map(algebra, &(phi - &phi_dot.scaled(h)), lambda)?;
    let derivative = (&plus - &minus).scaled(1.0 / (2.0 * h));
    let lhs = wedge(&base, &derivative)?;
    let rhs = algebra.d_ce(phi_dot)?.scaled(1.0 / lambda);
    Ok((&lhs + &rhs).norm())
}
