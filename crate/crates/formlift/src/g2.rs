//! The product G2-structure built over a 6-dimensional algebra: the 3-form
//! `ψ = ω ∧ dt + φ` on the 7-dimensional product, its Hodge dual, the
//! 7-dimensional exterior derivative of a one-parameter family, and the
//! residual of the nearly-parallel equation `dψ = λ ∗ψ`.
//!
//! The seventh covector slot plays the parameter direction dt. Time
//! derivatives of a family are always caller-supplied data (closed-form or
//! produced by the integrator): the derivative formulas here are local in t
//! and never difference a sample grid.
//!
//! Orientation on the product is `vol₆ ∧ dt = e^{1…7}`, which is pinned by
//! the requirement that [`star_psi`] agree with the metric Hodge dual of ψ
//! for the product metric `g ⊕ dt²`.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::exterior::{wedge, ExteriorError, Form, Metric};
use crate::hitchin::{classify, HitchinError, StableClass};
use crate::lie_model::{LieAlgebra, LieModelError};
use crate::su3::{SU3Structure, Su3Error};

/// Index of the covector playing dt on the product.
pub const DT_INDEX: u8 = 7;

#[derive(Debug, Error)]
pub enum G2Error {
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Hitchin(#[from] HitchinError),
    #[error(transparent)]
    LieModel(#[from] LieModelError),
    #[error(transparent)]
    Su3(#[from] Su3Error),
    #[error(
        "expected a degree {expected_degree} form in dimension {expected_dim}, \
         got degree {got_degree} in dimension {got_dim}"
    )]
    WrongShape {
        expected_degree: usize,
        expected_dim: usize,
        got_degree: usize,
        got_dim: usize,
    },
    #[error("sample parameters must increase strictly (violated at sample {index})")]
    GridNotIncreasing { index: usize },
    #[error("sample {index}: {which} is not stable ({class})")]
    UnstableSample {
        index: usize,
        which: &'static str,
        class: StableClass,
    },
}

fn require(f: &Form, dim: usize, degree: usize) -> Result<(), G2Error> {
    if f.dim() != dim || f.degree() != degree {
        return Err(G2Error::WrongShape {
            expected_degree: degree,
            expected_dim: dim,
            got_degree: f.degree(),
            got_dim: f.dim(),
        });
    }
    Ok(())
}

/// Includes a form on the 6-dimensional factor into the product, keeping its
/// index set untouched (the image never involves dt).
pub fn embed(f: &Form) -> Result<Form, G2Error> {
    if f.dim() != 6 {
        return Err(G2Error::WrongShape {
            expected_degree: f.degree(),
            expected_dim: 6,
            got_degree: f.degree(),
            got_dim: f.dim(),
        });
    }
    let mut out = Form::zero(7, f.degree())?;
    for (mi, c) in f.terms() {
        let rank = crate::exterior::MultiIndex::new(7, mi.indices())?.rank();
        out.coeffs_mut()[rank] = c;
    }
    Ok(out)
}

/// The product 3-form together with its (optional, cached) Hodge dual.
#[derive(Debug, Clone)]
pub struct G2Form {
    pub psi: Form,
    pub starpsi: Option<Form>,
}

impl G2Form {
    /// Lifts a validated structure and caches both ψ and ∗ψ.
    pub fn from_structure(s: &SU3Structure) -> Self {
        let mut lifted = lift(s.omega(), s.phi()).expect("validated shapes");
        lifted.starpsi = Some(star_psi(s));
        lifted
    }
}

/// `ψ = ω ∧ dt + φ`, embedded into the product. The dual is not computed
/// here: a bare pair of forms carries no metric.
pub fn lift(omega: &Form, phi: &Form) -> Result<G2Form, G2Error> {
    require(omega, 6, 2)?;
    require(phi, 6, 3)?;
    let dt = Form::basis(7, &[DT_INDEX])?;
    let psi = &wedge(&embed(omega)?, &dt)? + &embed(phi)?;
    Ok(G2Form { psi, starpsi: None })
}

/// Splits a product 3-form back into its factor components `(ω, φ)`:
/// the terms carrying dt and the terms free of it.
pub fn split(psi: &Form) -> Result<(Form, Form), G2Error> {
    require(psi, 7, 3)?;
    let mut omega = Form::zero(6, 2)?;
    let mut phi = Form::zero(6, 3)?;
    for (mi, c) in psi.terms() {
        let idx = mi.indices();
        if idx.last() == Some(&DT_INDEX) {
            // appending dt to a sorted pair costs no sign
            omega = &omega + &Form::basis(6, &idx[..2])?.scaled(c);
        } else {
            phi = &phi + &Form::basis(6, idx)?.scaled(c);
        }
    }
    Ok((omega, phi))
}

/// The Hodge dual of the lifted 3-form for the product metric and the
/// `vol₆ ∧ dt` orientation: `∗ψ = -φ̂ ∧ dt - ½ ω²`.
pub fn star_psi(s: &SU3Structure) -> Form {
    let dt = Form::basis(7, &[DT_INDEX]).expect("valid basis index");
    let phihat = embed(s.phihat()).expect("validated shape");
    let omega2 = wedge(s.omega(), s.omega()).expect("validated shape");
    &-&wedge(&phihat, &dt).expect("distinct indices")
        - &embed(&omega2).expect("validated shape").scaled(0.5)
}

/// 7-dimensional exterior derivative of `ψ_t = ω(t) ∧ dt + φ(t)` at one
/// parameter value: `d⁷ψ = (d⁶ω - φ̇) ∧ dt + d⁶φ`.
pub fn d7_psi(
    algebra: &LieAlgebra,
    omega: &Form,
    phi: &Form,
    phidot: &Form,
) -> Result<Form, G2Error> {
    require(omega, 6, 2)?;
    require(phi, 6, 3)?;
    require(phidot, 6, 3)?;
    let dt = Form::basis(7, &[DT_INDEX])?;
    let dt_part = &algebra.d_ce(omega)? - phidot;
    Ok(&wedge(&embed(&dt_part)?, &dt)? + &embed(&algebra.d_ce(phi)?)?)
}

/// 7-dimensional exterior derivative of `∗ψ_t`:
/// `d⁷∗ψ = (-d⁶φ̂ - ω ∧ ω̇) ∧ dt - ω ∧ d⁶ω`.
pub fn d7_star_psi(
    algebra: &LieAlgebra,
    s: &SU3Structure,
    omegadot: &Form,
) -> Result<Form, G2Error> {
    require(omegadot, 6, 2)?;
    let dt = Form::basis(7, &[DT_INDEX])?;
    let dphihat = algebra.d_ce(s.phihat())?;
    let dt_part = -&(&dphihat + &wedge(s.omega(), omegadot)?);
    let spatial = wedge(s.omega(), &algebra.d_ce(s.omega())?)?;
    Ok(&wedge(&embed(&dt_part)?, &dt)? - &embed(&spatial)?)
}

/// `‖d⁷ψ - λ ∗ψ‖`; vanishes exactly when both evolution constraints hold:
/// `dω - φ̇ + λφ̂ = 0` and `dφ + (λ/2)ω² = 0`.
pub fn nearly_parallel_residual(
    algebra: &LieAlgebra,
    s: &SU3Structure,
    phidot: &Form,
    lambda: f64,
) -> Result<f64, G2Error> {
    let dpsi = d7_psi(algebra, s.omega(), s.phi(), phidot)?;
    let starpsi = star_psi(s);
    Ok((&dpsi - &starpsi.scaled(lambda)).norm())
}

/// Block metric `g ⊕ 1` on the product (dt direction orthonormal).
pub fn product_metric(s: &SU3Structure) -> Metric {
    let mut m = DMatrix::<f64>::identity(7, 7);
    m.view_mut((0, 0), (6, 6)).copy_from(s.metric().matrix());
    Metric::from_matrix(m).expect("positive definite block extension")
}

/// One sample of a parameterized family: the pair of forms at `t` together
/// with their caller-supplied time derivatives.
#[derive(Debug, Clone)]
pub struct FamilySample {
    pub t: f64,
    pub omega: Form,
    pub phi: Form,
    pub omegadot: Form,
    pub phidot: Form,
}

/// A sampled one-parameter family of structures over a fixed algebra. The
/// constructor enforces a strictly increasing grid and stability of every
/// sample; derivatives are data, never recomputed from neighbors.
#[derive(Debug, Clone)]
pub struct ProductG2Family {
    algebra: LieAlgebra,
    samples: Vec<FamilySample>,
}

impl ProductG2Family {
    pub fn new(algebra: LieAlgebra, samples: Vec<FamilySample>) -> Result<Self, G2Error> {
        for (index, s) in samples.iter().enumerate() {
            if index > 0 && s.t <= samples[index - 1].t {
                return Err(G2Error::GridNotIncreasing { index });
            }
            let class = classify(&s.omega)?;
            if class != StableClass::Symplectic2 {
                return Err(G2Error::UnstableSample {
                    index,
                    which: "omega",
                    class,
                });
            }
            let class = classify(&s.phi)?;
            if class != StableClass::Positive3 {
                return Err(G2Error::UnstableSample {
                    index,
                    which: "phi",
                    class,
                });
            }
        }
        Ok(Self { algebra, samples })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn samples(&self) -> &[FamilySample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}
