//! Closed-form solution families over a nearly-Kaehler base: the metric cone
//! (a parallel product structure) and the sine cone (a nearly parallel one),
//! plus the concrete invariant nearly-Kaehler structure on su(2) ⊕ su(2)
//! that serves as initial data and as the integrator oracle.
//!
//! The su(2) ⊕ su(2) coefficients below were derived by root finding on the
//! defining equations `dω = 3φ`, `dφ̂ + 2ω² = 0` over the symmetric ansatz
//! `ω = x(e^{14} + e^{25} + e^{36})`, `φ = (1/3) dω`, and are shipped as
//! checked constants; the test suite re-derives them from scratch.

use thiserror::Error;

use crate::exterior::{ExteriorError, Form};
use crate::g2::{d7_psi, star_psi, FamilySample, G2Error, ProductG2Family};
use crate::hitchin::HitchinError;
use crate::lie_model::{LieAlgebra, LieModelError};
use crate::su3::{classify_torsion, validate, SU3Structure, Su3Error, TorsionTag, DEFAULT_TOL};

/// Scale of the invariant nearly-Kaehler structure on su(2) ⊕ su(2):
/// `ω = NK_SCALE (e^{14} + e^{25} + e^{36})`.
pub const NK_SCALE: f64 = 0.096_225_044_864_937_62; // √3 / 18

#[derive(Debug, Error)]
pub enum SolutionsError {
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Hitchin(#[from] HitchinError),
    #[error(transparent)]
    LieModel(#[from] LieModelError),
    #[error(transparent)]
    Su3(#[from] Su3Error),
    #[error(transparent)]
    G2(#[from] G2Error),
    #[error("the base structure is not nearly Kaehler (classified {tag})")]
    BaseNotNearlyKaehler { tag: TorsionTag },
    #[error("parameter t = {t} lies outside the open domain ({lo}, {hi})")]
    OutsideDomain { t: f64, lo: f64, hi: f64 },
    #[error(
        "no constant fits d(psi) = lambda * star(psi): lambda = {lambda:.6e} \
         leaves residual {residual:.3e}"
    )]
    LambdaFitFailed { lambda: f64, residual: f64 },
    #[error("grid must have n >= 1 samples with t0 < t1 (or a single sample) inside the domain")]
    BadGrid,
}

/// The invariant nearly-Kaehler structure on su(2) ⊕ su(2), built from the
/// frozen coefficients. The returned pair satisfies `dω = 3φ` and
/// `dφ̂ + 2ω² = 0` to well below 1e-10.
pub fn nearly_kahler_su2su2() -> (LieAlgebra, SU3Structure) {
    let algebra = LieAlgebra::parse_salamon("(23,31,12,56,64,45)")
        .expect("fixed structure constants satisfy the closure conditions");
    let a = NK_SCALE;
    let omega = Form::from_terms(6, 2, &[(&[1, 4], a), (&[2, 5], a), (&[3, 6], a)])
        .expect("fixed index sets");
    let b = a / 3.0;
    let phi = Form::from_terms(
        6,
        3,
        &[
            (&[1, 2, 6], b),
            (&[1, 3, 5], -b),
            (&[2, 3, 4], b),
            (&[1, 5, 6], -b),
            (&[2, 4, 6], b),
            (&[3, 4, 5], -b),
        ],
    )
    .expect("fixed index sets");
    let structure = validate(&omega, &phi, 1e-10)
        .expect("frozen nearly-Kaehler constants define a valid structure");
    (algebra, structure)
}

/// Which closed-form family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// `(t²ω, t³φ)` on (0, ∞); the lift is parallel (λ = 0).
    Cone,
    /// `(sin²t ω, sin³t (sin t φ̂ + cos t φ))` on (0, π); nearly parallel.
    SineCone,
}

impl std::fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FamilyKind::Cone => f.write_str("cone"),
            FamilyKind::SineCone => f.write_str("sine-cone"),
        }
    }
}

/// A closed-form one-parameter family over a nearly-Kaehler base, with
/// analytic evaluators for the forms and their t-derivatives. The constant
/// λ of the lifted equation `dψ = λ ∗ψ` is fitted and verified at
/// construction, never assumed.
#[derive(Debug, Clone)]
pub struct ExactFamily {
    kind: FamilyKind,
    algebra: LieAlgebra,
    base: SU3Structure,
    domain: (f64, f64),
    lambda: f64,
}

/// `(t²ω, t³φ)` over a nearly-Kaehler base; the lifted structure is closed
/// and coclosed on all of (0, ∞).
pub fn cone_family(
    algebra: &LieAlgebra,
    base: &SU3Structure,
) -> Result<ExactFamily, SolutionsError> {
    ExactFamily::new(FamilyKind::Cone, algebra, base, (0.0, f64::INFINITY), &[0.8, 1.6])
}

/// `(sin²t ω, sin³t (sin t φ̂ + cos t φ))` over a nearly-Kaehler base on
/// (0, π); the fitted λ comes out 4 for the standard normalization.
pub fn sine_cone_family(
    algebra: &LieAlgebra,
    base: &SU3Structure,
) -> Result<ExactFamily, SolutionsError> {
    ExactFamily::new(
        FamilyKind::SineCone,
        algebra,
        base,
        (0.0, std::f64::consts::PI),
        &[0.9, 1.9],
    )
}

impl ExactFamily {
    fn new(
        kind: FamilyKind,
        algebra: &LieAlgebra,
        base: &SU3Structure,
        domain: (f64, f64),
        fit_points: &[f64],
    ) -> Result<Self, SolutionsError> {
        let torsion = classify_torsion(algebra, base, DEFAULT_TOL);
        if torsion.tag != TorsionTag::NearlyKaehler {
            return Err(SolutionsError::BaseNotNearlyKaehler { tag: torsion.tag });
        }
        let mut family = Self {
            kind,
            algebra: algebra.clone(),
            base: base.clone(),
            domain,
            lambda: 0.0,
        };
        family.lambda = family.fit_lambda(fit_points)?;
        Ok(family)
    }

    // least-squares fit of lambda in d(psi) = lambda * star(psi) over the
    // given interior points, rejected loudly if any residual survives
    fn fit_lambda(&self, fit_points: &[f64]) -> Result<f64, SolutionsError> {
        let mut num = 0.0;
        let mut den = 0.0;
        let mut evaluated = Vec::new();
        for &t in fit_points {
            let smp = self.sample(t)?;
            let s = validate(&smp.omega, &smp.phi, DEFAULT_TOL)?;
            let dpsi = d7_psi(&self.algebra, &smp.omega, &smp.phi, &smp.phidot)?;
            let starpsi = star_psi(&s);
            num += dpsi.dot(&starpsi);
            den += starpsi.dot(&starpsi);
            evaluated.push((dpsi, starpsi));
        }
        let lambda = if den > 0.0 { num / den } else { 0.0 };
        for (dpsi, starpsi) in &evaluated {
            let residual = (dpsi - &starpsi.scaled(lambda)).norm();
            if residual > 1e-8 * (1.0 + starpsi.norm()) {
                return Err(SolutionsError::LambdaFitFailed { lambda, residual });
            }
        }
        Ok(lambda)
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn base(&self) -> &SU3Structure {
        &self.base
    }

    /// Open parameter interval on which every sample is a valid structure.
    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// The fitted constant of `dψ = λ ∗ψ` (0 for the cone).
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Evaluates the family and its analytic t-derivatives at one parameter.
    pub fn sample(&self, t: f64) -> Result<FamilySample, SolutionsError> {
        let (lo, hi) = self.domain;
        if !(t > lo && t < hi) {
            return Err(SolutionsError::OutsideDomain { t, lo, hi });
        }
        let omega = self.base.omega();
        let phi = self.base.phi();
        let phihat = self.base.phihat();
        let sample = match self.kind {
            FamilyKind::Cone => FamilySample {
                t,
                omega: omega.scaled(t * t),
                phi: phi.scaled(t * t * t),
                omegadot: omega.scaled(2.0 * t),
                phidot: phi.scaled(3.0 * t * t),
            },
            FamilyKind::SineCone => {
                let (s, c) = t.sin_cos();
                FamilySample {
                    t,
                    omega: omega.scaled(s * s),
                    phi: &phihat.scaled(s.powi(4)) + &phi.scaled(s.powi(3) * c),
                    omegadot: omega.scaled(2.0 * s * c),
                    phidot: &phihat.scaled(4.0 * s.powi(3) * c)
                        + &phi.scaled(3.0 * s.powi(2) * c * c - s.powi(4)),
                }
            }
        };
        Ok(sample)
    }

    /// Samples `n` points of `[t0, t1]` (inclusive) into a checked family.
    pub fn sample_grid(
        &self,
        t0: f64,
        t1: f64,
        n: usize,
    ) -> Result<ProductG2Family, SolutionsError> {
        if n == 0 || (n > 1 && !(t0 < t1)) {
            return Err(SolutionsError::BadGrid);
        }
        let mut samples = Vec::with_capacity(n);
        for i in 0..n {
            let t = if n == 1 {
                t0
            } else {
                t0 + (t1 - t0) * i as f64 / (n - 1) as f64
            };
            samples.push(self.sample(t)?);
        }
        Ok(ProductG2Family::new(self.algebra.clone(), samples)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::wedge;
    use crate::g2::{d7_star_psi, nearly_parallel_residual, product_metric};
    use crate::hitchin::hat;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    #[test]
    fn frozen_structure_satisfies_the_defining_equations() {
        let (l, s) = nearly_kahler_su2su2();
        assert!(l.is_unimodular());
        let domega = l.d_ce(s.omega()).unwrap();
        assert!((&domega - &s.phi().scaled(3.0)).norm() <= 1e-10);
        let dphihat = l.d_ce(s.phihat()).unwrap();
        let omega2 = wedge(s.omega(), s.omega()).unwrap();
        assert!((&dphihat + &omega2.scaled(2.0)).norm() <= 1e-10);
        let t = classify_torsion(&l, &s, DEFAULT_TOL);
        assert_eq!(t.tag, TorsionTag::NearlyKaehler);
    }

    #[test]
    fn partner_structure_is_nearly_half_flat() {
        let (l, s) = nearly_kahler_su2su2();
        let partner = validate(s.omega(), s.phihat(), DEFAULT_TOL).unwrap();
        let t = classify_torsion(&l, &partner, DEFAULT_TOL);
        match t.tag {
            TorsionTag::NearlyHalfFlat { lambda_def } => {
                assert_relative_eq!(lambda_def, 2.0, max_relative = 1e-10)
            }
            other => panic!("expected nearly half-flat, got {other}"),
        }
    }

    /// Independent re-derivation of the frozen scale: bisect the signed
    /// `e^{1245}` component of `dφ̂ + 2ω²` over the symmetric ansatz.
    #[test]
    fn scale_rederives_by_root_finding() {
        let l = LieAlgebra::parse_salamon("(23,31,12,56,64,45)").unwrap();
        let residual_component = |x: f64| -> f64 {
            let omega =
                Form::from_terms(6, 2, &[(&[1, 4], x), (&[2, 5], x), (&[3, 6], x)]).unwrap();
            let phi = l.d_ce(&omega).unwrap().scaled(1.0 / 3.0);
            let r = &l.d_ce(&hat(&phi).unwrap()).unwrap()
                + &wedge(&omega, &omega).unwrap().scaled(2.0);
            r.component(&[1, 2, 4, 5]).unwrap()
        };
        let (mut lo, mut hi) = (1e-3, 0.5);
        assert!(residual_component(lo) > 0.0 && residual_component(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if residual_component(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        assert!((root - NK_SCALE).abs() <= 1e-12, "root {root} drifted");
        assert_relative_eq!(NK_SCALE, 3.0_f64.sqrt() / 18.0, max_relative = 1e-15);
    }

    #[test]
    fn cone_family_is_parallel_across_the_domain() {
        let (l, s) = nearly_kahler_su2su2();
        let fam = cone_family(&l, &s).unwrap();
        assert_eq!(fam.kind(), FamilyKind::Cone);
        assert!(fam.lambda().abs() <= 1e-12);

        // t = 1 reproduces the base
        let at_one = fam.sample(1.0).unwrap();
        assert!((&at_one.omega - s.omega()).norm() < 1e-15);
        assert!((&at_one.phi - s.phi()).norm() < 1e-15);

        for i in 0..50 {
            let t = 0.5 + 2.5 * i as f64 / 49.0;
            let smp = fam.sample(t).unwrap();
            let st = validate(&smp.omega, &smp.phi, DEFAULT_TOL).unwrap();
            let scale = 1.0 + star_psi(&st).norm();
            assert!(d7_psi(&l, &smp.omega, &smp.phi, &smp.phidot).unwrap().norm() <= 1e-8 * scale);
            assert!(d7_star_psi(&l, &st, &smp.omegadot).unwrap().norm() <= 1e-8 * scale);
            // each slice is half-flat
            assert!(l.d_ce(&smp.phi).unwrap().norm() <= 1e-12);
            let o2 = wedge(&smp.omega, &smp.omega).unwrap();
            assert!(l.d_ce(&o2).unwrap().norm() <= 1e-12);
            // conical metric
            let mut expected = DMatrix::<f64>::identity(7, 7);
            expected
                .view_mut((0, 0), (6, 6))
                .copy_from(&(s.metric().matrix() * (t * t)));
            assert!((product_metric(&st).matrix() - &expected).norm() <= 1e-9);
        }
    }

    #[test]
    fn sine_cone_family_is_nearly_parallel_with_lambda_four() {
        let (l, s) = nearly_kahler_su2su2();
        let fam = sine_cone_family(&l, &s).unwrap();
        assert_eq!(fam.kind(), FamilyKind::SineCone);
        assert_relative_eq!(fam.lambda(), 4.0, max_relative = 1e-10);

        // t = pi/2 reproduces the nearly half-flat partner
        let mid = fam.sample(std::f64::consts::FRAC_PI_2).unwrap();
        assert!((&mid.omega - s.omega()).norm() < 1e-14);
        assert!((&mid.phi - s.phihat()).norm() < 1e-14);

        let lambda = fam.lambda();
        for i in 1..40 {
            let t = std::f64::consts::PI * i as f64 / 40.0;
            let smp = fam.sample(t).unwrap();
            let st = validate(&smp.omega, &smp.phi, 1e-6).unwrap();
            // evolution constraint at the fitted constant
            let o2 = wedge(&smp.omega, &smp.omega).unwrap();
            let c1 = (&l.d_ce(&smp.phi).unwrap() + &o2.scaled(lambda / 2.0)).norm();
            assert!(c1 <= 1e-9, "constraint residual {c1} at t = {t}");
            let r = nearly_parallel_residual(&l, &st, &smp.phidot, lambda).unwrap();
            assert!(r <= 1e-9 * (1.0 + star_psi(&st).norm()));
            // sine-cone metric
            let mut expected = DMatrix::<f64>::identity(7, 7);
            expected
                .view_mut((0, 0), (6, 6))
                .copy_from(&(s.metric().matrix() * (t.sin() * t.sin())));
            assert!((product_metric(&st).matrix() - &expected).norm() <= 1e-9);
        }
    }

    #[test]
    fn family_derivatives_match_finite_differences() {
        let (l, s) = nearly_kahler_su2su2();
        let h = 1e-5;
        for fam in [cone_family(&l, &s).unwrap(), sine_cone_family(&l, &s).unwrap()] {
            for t in [0.7, 1.4, 2.2] {
                let smp = fam.sample(t).unwrap();
                let plus = fam.sample(t + h).unwrap();
                let minus = fam.sample(t - h).unwrap();
                let fd_omega = (&plus.omega - &minus.omega).scaled(0.5 / h);
                let fd_phi = (&plus.phi - &minus.phi).scaled(0.5 / h);
                assert!((&fd_omega - &smp.omegadot).norm() <= 1e-6);
                assert!((&fd_phi - &smp.phidot).norm() <= 1e-6);
            }
        }
    }

    #[test]
    fn constructors_reject_bases_without_the_required_torsion() {
        let abelian = LieAlgebra::abelian();
        let omega0 =
            Form::from_terms(6, 2, &[(&[1, 4], 1.0), (&[2, 5], 1.0), (&[3, 6], 1.0)]).unwrap();
        let phi0 = Form::from_terms(
            6,
            3,
            &[
                (&[1, 2, 3], 1.0),
                (&[1, 5, 6], -1.0),
                (&[2, 4, 6], 1.0),
                (&[3, 4, 5], -1.0),
            ],
        )
        .unwrap();
        let flat = validate(&omega0, &phi0, DEFAULT_TOL).unwrap();
        match cone_family(&abelian, &flat) {
            Err(SolutionsError::BaseNotNearlyKaehler { tag }) => {
                assert_eq!(tag, TorsionTag::HalfFlat)
            }
            other => panic!("expected a torsion rejection, got {other:?}"),
        }
    }

    #[test]
    fn domain_and_grid_guards() {
        let (l, s) = nearly_kahler_su2su2();
        let fam = sine_cone_family(&l, &s).unwrap();
        assert!(matches!(
            fam.sample(0.0),
            Err(SolutionsError::OutsideDomain { .. })
        ));
        assert!(matches!(
            fam.sample(std::f64::consts::PI),
            Err(SolutionsError::OutsideDomain { .. })
        ));
        assert!(matches!(fam.sample_grid(1.0, 0.5, 10), Err(SolutionsError::BadGrid)));
        assert!(matches!(fam.sample_grid(0.5, 1.0, 0), Err(SolutionsError::BadGrid)));
        let grid = fam.sample_grid(0.5, 2.5, 21).unwrap();
        assert_eq!(grid.len(), 21);
        assert_eq!(grid.samples()[0].t, 0.5);
        assert_eq!(grid.samples()[20].t, 2.5);
    }
}
