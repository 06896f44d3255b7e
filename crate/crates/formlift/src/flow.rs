//! Time integration of the evolution equations on invariant forms: the
//! nearly-parallel flow `φ̇ = d π(φ) + λ φ̂` on the admissible set, and the
//! half-flat flow `φ̇ = dω, σ̇ = -d φ̂` on closed pairs. Fixed-step classical
//! RK4 with post-step stability verification; constraints are monitored,
//! never projected, so integrator drift stays visible.
//!
//! The nearly-parallel flow is Hamiltonian for the wedge pairing
//! `Ω(φ̇₁, φ̇₂) = ∫ φ̇₁ ∧ φ̇₂` with energy `H = 2λ(∫ε(φ) - ∫ε(π(φ)))`;
//! [`hamiltonian_field`] reconstructs the field from `H` by finite
//! differences as an independent cross-check of the right-hand side.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::exterior::{top_scalar, wedge, ExteriorError, Form, MultiIndex};
use crate::hitchin::{classify, eps2, eps3, hat, HitchinError, StableClass};
use crate::lie_model::{LieAlgebra, LieModelError};
use crate::su3::{pi_map, Su3Error};

#[derive(Debug, Error)]
pub enum FlowError {
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Hitchin(#[from] HitchinError),
    #[error(transparent)]
    LieModel(#[from] LieModelError),
    #[error(transparent)]
    Su3(#[from] Su3Error),
    #[error("config: step must be positive and finite, got {step}")]
    BadStep { step: f64 },
    #[error("config: lambda must be nonzero in nearly-parallel mode")]
    LambdaZero,
    #[error("config: monitor_every must be at least 1")]
    BadMonitor,
    #[error("half-flat mode needs sigma as independent state")]
    MissingSigma,
    #[error("phi left the stable positive cone ({class})")]
    PhiUnstable { class: StableClass },
    #[error("sigma left the stable cone ({class})")]
    SigmaUnstable { class: StableClass },
    #[error(
        "half-flat preconditions violated: |d(phi)| = {dphi:.3e}, \
         |d(omega^2)| = {domega2:.3e} exceed {tol:.3e}"
    )]
    NotHalfFlat { dphi: f64, domega2: f64, tol: f64 },
    #[error("the algebra is not unimodular; reduced integrals are not defined")]
    NotUnimodular,
    #[error("state became non-finite")]
    NonFinite,
    #[error("internal: the wedge pairing matrix is singular")]
    SingularPairing,
}

impl FlowError {
    // errors that mean "the state left the valid set" rather than
    // "the call was malformed"; these terminate a trajectory gracefully
    fn is_stability_loss(&self) -> bool {
        fn hitchin_loss(e: &HitchinError) -> bool {
            matches!(
                e,
                HitchinError::NotPositiveType { .. }
                    | HitchinError::NotStableFour { .. }
                    | HitchinError::NotStable { .. }
            )
        }
        match self {
            FlowError::PhiUnstable { .. }
            | FlowError::SigmaUnstable { .. }
            | FlowError::NonFinite => true,
            FlowError::Hitchin(e) => hitchin_loss(e),
            FlowError::Su3(Su3Error::PiOutsideDomain { .. }) => true,
            FlowError::Su3(Su3Error::Hitchin(e)) => hitchin_loss(e),
            _ => false,
        }
    }
}

/// Which evolution equation to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowMode {
    /// `φ̇ = d π(φ) + λ φ̂`; σ is derived from φ.
    NearlyParallel,
    /// `φ̇ = dω, σ̇ = -d φ̂` with `ω = -hat(σ)`; σ is independent state.
    HalfFlat,
}

#[derive(Debug, Clone)]
pub struct FlowConfig {
    /// Constant of `dψ = λ ∗ψ`; must be nonzero in nearly-parallel mode.
    pub lambda: f64,
    /// Fixed step size (positive; the direction comes from `t_end`).
    pub step: f64,
    /// Target time; may lie on either side of the initial time.
    pub t_end: f64,
    pub mode: FlowMode,
    /// Record a trajectory point every this many accepted steps.
    pub monitor_every: usize,
}

impl FlowConfig {
    fn check(&self) -> Result<(), FlowError> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(FlowError::BadStep { step: self.step });
        }
        if self.monitor_every == 0 {
            return Err(FlowError::BadMonitor);
        }
        if self.mode == FlowMode::NearlyParallel && self.lambda == 0.0 {
            return Err(FlowError::LambdaZero);
        }
        Ok(())
    }
}

/// State of the flow at one time. `sigma` is carried only along the
/// half-flat flow, where it is independent data; the nearly-parallel flow
/// derives it from φ and ignores the field.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub phi: Form,
    pub sigma: Option<Form>,
}

/// Constraint residuals and recorded quantities at one trajectory point.
#[derive(Debug, Clone, Copy)]
pub struct Diagnostics {
    /// `‖dφ + (λ/2)ω²‖` (with λ = 0 in half-flat mode, i.e. `‖dφ‖`)
    pub c1: f64,
    /// `‖ω ∧ φ‖`
    pub c2: f64,
    /// `|ε(φ) - ε(ω)|`
    pub c3: f64,
    /// `ε(φ)` at this state
    pub eps_phi: f64,
    /// energy `2λ(ε(φ) - ε(π(φ)))`; recorded (not asserted) on unimodular
    /// algebras in nearly-parallel mode
    pub hamiltonian: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrajectoryPoint {
    pub state: FlowState,
    pub diagnostics: Diagnostics,
}

/// Why integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// reached `t_end`
    Completed,
    /// a step left the stable set; the trajectory holds every good state
    StabilityLost,
    /// the step size cannot advance t in floating point
    StepUnderflow,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::Completed => f.write_str("completed"),
            Termination::StabilityLost => f.write_str("stability lost"),
            Termination::StepUnderflow => f.write_str("step underflow"),
        }
    }
}

/// Monitored points of one integration run, in time order, each with its
/// diagnostics; partial on early termination.
#[derive(Debug, Clone)]
pub struct Trajectory {
    points: Vec<TrajectoryPoint>,
    termination: Termination,
}

impl Trajectory {
    pub fn points(&self) -> &[TrajectoryPoint] {
        &self.points
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    pub fn final_point(&self) -> &TrajectoryPoint {
        self.points.last().expect("a trajectory holds its initial state")
    }
}

/// Right-hand side of the nearly-parallel flow: `d π(φ) + λ hat(φ)`.
pub fn rhs_nearly_parallel(
    algebra: &LieAlgebra,
    phi: &Form,
    lambda: f64,
) -> Result<Form, FlowError> {
    let omega = pi_map(algebra, phi, lambda)?;
    Ok(&algebra.d_ce(&omega)? + &hat(phi)?.scaled(lambda))
}

// tolerance scale for the half-flat closure preconditions
const HALF_FLAT_TOL: f64 = 1e-8;

/// Right-hand side of the half-flat flow on the pair `(φ, σ)`:
/// `φ̇ = d(-hat σ)`, `σ̇ = -d(hat φ)`. Both closure preconditions
/// `dφ = 0` and `d(ω²) = 2dσ = 0` are re-checked (they are linear in the
/// state, so exact flows preserve them; violations indicate bad data).
pub fn rhs_half_flat(
    algebra: &LieAlgebra,
    phi: &Form,
    sigma: &Form,
) -> Result<(Form, Form), FlowError> {
    let class = classify(phi)?;
    if class != StableClass::Positive3 {
        return Err(FlowError::PhiUnstable { class });
    }
    let class = classify(sigma)?;
    if class != StableClass::Stable4 {
        return Err(FlowError::SigmaUnstable { class });
    }
    let dphi = algebra.d_ce(phi)?.norm();
    let domega2 = 2.0 * algebra.d_ce(sigma)?.norm();
    let tol = HALF_FLAT_TOL * (1.0 + phi.norm() + sigma.norm());
    if dphi > tol || domega2 > tol {
        return Err(FlowError::NotHalfFlat { dphi, domega2, tol });
    }
    let omega = -&hat(sigma)?;
    Ok((algebra.d_ce(&omega)?, -&algebra.d_ce(&hat(phi)?)?))
}

/// Reduced energy `2λ(∫ε(φ) - ∫ε(π(φ)))` with the volume normalized to 1.
/// Refused on non-unimodular algebras, where the reduction to a single
/// volume constant is not available.
pub fn hamiltonian(algebra: &LieAlgebra, phi: &Form, lambda: f64) -> Result<f64, FlowError> {
    if !algebra.is_unimodular() {
        return Err(FlowError::NotUnimodular);
    }
    let omega = pi_map(algebra, phi, lambda)?;
    Ok(2.0 * lambda * (eps3(phi)?.value - eps2(&omega)?.value))
}

/// The wedge pairing `Ω(φ̇₁, φ̇₂) = top(φ̇₁ ∧ φ̇₂)`; antisymmetric and
/// nondegenerate on the 20-dimensional space of 3-forms.
pub fn symplectic_pairing(a: &Form, b: &Form) -> Result<f64, FlowError> {
    Ok(top_scalar(&wedge(a, b)?)?)
}

/// Reconstructs the flow field from the energy alone: central finite
/// differences give DH over the 20 coefficients, and `Ω(X, ·) = DH` is
/// solved for X. Agrees with [`rhs_nearly_parallel`] up to FD error.
pub fn hamiltonian_field(
    algebra: &LieAlgebra,
    phi: &Form,
    lambda: f64,
) -> Result<Form, FlowError> {
    let n = phi.coeffs().len();
    let basis: Vec<Form> = (0..n)
        .map(|r| {
            let mi = MultiIndex::from_rank(6, 3, r)?;
            Form::basis(6, mi.indices())
        })
        .collect::<Result<_, _>>()?;
    // row j, column i holds Ω(b_i, b_j) so that (A x)_j = Ω(X, b_j)
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(j, i)] = symplectic_pairing(&basis[i], &basis[j])?;
        }
    }
    let h = 1e-6 * phi.norm();
    let mut dh = DVector::<f64>::zeros(n);
    for i in 0..n {
        let mut plus = phi.clone();
        plus.coeffs_mut()[i] += h;
        let mut minus = phi.clone();
        minus.coeffs_mut()[i] -= h;
        dh[i] = (hamiltonian(algebra, &plus, lambda)? - hamiltonian(algebra, &minus, lambda)?)
            / (2.0 * h);
    }
    let x = a.lu().solve(&dh).ok_or(FlowError::SingularPairing)?;
    Ok(Form::from_coeffs(6, 3, x.iter().copied().collect())?)
}

// one classical RK4 step of the selected right-hand side
fn rk4_step(
    algebra: &LieAlgebra,
    state: &FlowState,
    h: f64,
    config: &FlowConfig,
) -> Result<FlowState, FlowError> {
    match config.mode {
        FlowMode::NearlyParallel => {
            let f = |phi: &Form| rhs_nearly_parallel(algebra, phi, config.lambda);
            let k1 = f(&state.phi)?;
            let k2 = f(&(&state.phi + &k1.scaled(h / 2.0)))?;
            let k3 = f(&(&state.phi + &k2.scaled(h / 2.0)))?;
            let k4 = f(&(&state.phi + &k3.scaled(h)))?;
            let incr = &(&k1 + &k4) + &(&k2 + &k3).scaled(2.0);
            Ok(FlowState {
                t: state.t + h,
                phi: &state.phi + &incr.scaled(h / 6.0),
                sigma: None,
            })
        }
        FlowMode::HalfFlat => {
            let sigma = state.sigma.as_ref().ok_or(FlowError::MissingSigma)?;
            let f = |phi: &Form, sigma: &Form| rhs_half_flat(algebra, phi, sigma);
            let (p1, s1) = f(&state.phi, sigma)?;
            let (p2, s2) = f(
                &(&state.phi + &p1.scaled(h / 2.0)),
                &(sigma + &s1.scaled(h / 2.0)),
            )?;
            let (p3, s3) = f(
                &(&state.phi + &p2.scaled(h / 2.0)),
                &(sigma + &s2.scaled(h / 2.0)),
            )?;
            let (p4, s4) = f(&(&state.phi + &p3.scaled(h)), &(sigma + &s3.scaled(h)))?;
            let pincr = &(&p1 + &p4) + &(&p2 + &p3).scaled(2.0);
            let sincr = &(&s1 + &s4) + &(&s2 + &s3).scaled(2.0);
            Ok(FlowState {
                t: state.t + h,
                phi: &state.phi + &pincr.scaled(h / 6.0),
                sigma: Some(sigma + &sincr.scaled(h / 6.0)),
            })
        }
    }
}

// stability re-verification after an accepted step
fn verify_state(
    algebra: &LieAlgebra,
    state: &FlowState,
    config: &FlowConfig,
) -> Result<(), FlowError> {
    if !state.phi.is_finite() || state.sigma.as_ref().is_some_and(|s| !s.is_finite()) {
        return Err(FlowError::NonFinite);
    }
    let class = classify(&state.phi)?;
    if class != StableClass::Positive3 {
        return Err(FlowError::PhiUnstable { class });
    }
    let sigma = match (&config.mode, &state.sigma) {
        (FlowMode::HalfFlat, Some(s)) => s.clone(),
        (FlowMode::HalfFlat, None) => return Err(FlowError::MissingSigma),
        (FlowMode::NearlyParallel, _) => {
            algebra.d_ce(&state.phi)?.scaled(-1.0 / config.lambda)
        }
    };
    let class = classify(&sigma)?;
    if class != StableClass::Stable4 {
        return Err(FlowError::SigmaUnstable { class });
    }
    Ok(())
}

// diagnostics at a verified state; omega comes from the mode-appropriate map
fn diagnose(
    algebra: &LieAlgebra,
    state: &FlowState,
    config: &FlowConfig,
) -> Result<Diagnostics, FlowError> {
    let (omega, lambda_eff) = match config.mode {
        FlowMode::NearlyParallel => (
            pi_map(algebra, &state.phi, config.lambda)?,
            config.lambda,
        ),
        FlowMode::HalfFlat => {
            let sigma = state.sigma.as_ref().ok_or(FlowError::MissingSigma)?;
            (-&hat(sigma)?, 0.0)
        }
    };
    let omega2 = wedge(&omega, &omega)?;
    let c1 = (&algebra.d_ce(&state.phi)? + &omega2.scaled(lambda_eff / 2.0)).norm();
    let c2 = wedge(&omega, &state.phi)?.norm();
    let eps_phi = eps3(&state.phi)?.value;
    let c3 = (eps_phi - eps2(&omega)?.value).abs();
    let hamiltonian = if config.mode == FlowMode::NearlyParallel && algebra.is_unimodular() {
        Some(2.0 * config.lambda * (eps_phi - eps2(&omega)?.value))
    } else {
        None
    };
    Ok(Diagnostics {
        c1,
        c2,
        c3,
        eps_phi,
        hamiltonian,
    })
}

/// Integrates the configured flow from `state0` to `config.t_end` with
/// fixed steps, recording a diagnosed point every `monitor_every` accepted
/// steps (plus the initial and final states). Leaving the stable set ends
/// the run early with the partial trajectory; a malformed configuration or
/// an invalid initial state is an error instead.
pub fn integrate(
    algebra: &LieAlgebra,
    state0: &FlowState,
    config: &FlowConfig,
) -> Result<Trajectory, FlowError> {
    config.check()?;
    let mut state = state0.clone();
    verify_state(algebra, &state, config)?;
    // an rhs evaluation at the initial state catches everything the
    // stability check cannot (half-flat closure, pi domain)
    match config.mode {
        FlowMode::NearlyParallel => {
            rhs_nearly_parallel(algebra, &state.phi, config.lambda).map(|_| ())?
        }
        FlowMode::HalfFlat => {
            let sigma = state.sigma.as_ref().ok_or(FlowError::MissingSigma)?;
            rhs_half_flat(algebra, &state.phi, sigma).map(|_| ())?
        }
    }

    let mut points = vec![TrajectoryPoint {
        state: state.clone(),
        diagnostics: diagnose(algebra, &state, config)?,
    }];
    if state.t == config.t_end {
        return Ok(Trajectory {
            points,
            termination: Termination::Completed,
        });
    }

    let dir = (config.t_end - state.t).signum();
    let mut unmonitored_steps = 0usize;
    loop {
        let remaining = config.t_end - state.t;
        let last = remaining.abs() <= config.step;
        let h = if last { remaining } else { dir * config.step };
        if state.t + h == state.t {
            if unmonitored_steps > 0 {
                points.push(TrajectoryPoint {
                    state: state.clone(),
                    diagnostics: diagnose(algebra, &state, config)?,
                });
            }
            return Ok(Trajectory {
                points,
                termination: Termination::StepUnderflow,
            });
        }

        let outcome = rk4_step(algebra, &state, h, config)
            .and_then(|next| verify_state(algebra, &next, config).map(|()| next));
        match outcome {
            Ok(mut next) => {
                if last {
                    next.t = config.t_end; // land exactly
                }
                state = next;
                unmonitored_steps += 1;
                if last || unmonitored_steps >= config.monitor_every {
                    points.push(TrajectoryPoint {
                        state: state.clone(),
                        diagnostics: diagnose(algebra, &state, config)?,
                    });
                    unmonitored_steps = 0;
                }
                if last {
                    return Ok(Trajectory {
                        points,
                        termination: Termination::Completed,
                    });
                }
            }
            Err(e) if e.is_stability_loss() => {
                if unmonitored_steps > 0 {
                    points.push(TrajectoryPoint {
                        state: state.clone(),
                        diagnostics: diagnose(algebra, &state, config)?,
                    });
                }
                return Ok(Trajectory {
                    points,
                    termination: Termination::StabilityLost,
                });
            }
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solutions::{cone_family, nearly_kahler_su2su2, sine_cone_family};
    use crate::su3::validate;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn phi0() -> Form {
        Form::from_terms(
            6,
            3,
            &[
                (&[1, 2, 3], 1.0),
                (&[1, 5, 6], -1.0),
                (&[2, 4, 6], 1.0),
                (&[3, 4, 5], -1.0),
            ],
        )
        .unwrap()
    }

    fn sigma0() -> Form {
        Form::from_terms(
            6,
            4,
            &[
                (&[1, 2, 4, 5], -1.0),
                (&[1, 3, 4, 6], -1.0),
                (&[2, 3, 5, 6], -1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn nearly_parallel_rhs_matches_the_sine_cone_derivative() {
        let (l, s) = nearly_kahler_su2su2();
        let fam = sine_cone_family(&l, &s).unwrap();
        let lambda = fam.lambda();
        for t in [FRAC_PI_2, 1.1, 2.0] {
            let smp = fam.sample(t).unwrap();
            let rhs = rhs_nearly_parallel(&l, &smp.phi, lambda).unwrap();
            assert!(
                (&rhs - &smp.phidot).norm() <= 1e-8,
                "flow field drifts from the family derivative at t = {t}"
            );
        }
    }

    #[test]
    fn nearly_parallel_rhs_splits_into_its_two_terms() {
        let (l, s) = nearly_kahler_su2su2();
        let fam = sine_cone_family(&l, &s).unwrap();
        let phi = fam.sample(1.3).unwrap().phi;
        for lambda in [fam.lambda(), 2.0 * fam.lambda()] {
            let rhs = rhs_nearly_parallel(&l, &phi, lambda).unwrap();
            let omega = pi_map(&l, &phi, lambda).unwrap();
            let expected = &l.d_ce(&omega).unwrap() + &hat(&phi).unwrap().scaled(lambda);
            assert!((&rhs - &expected).norm() < 1e-14);
        }
    }

    #[test]
    fn nearly_parallel_rhs_needs_an_exact_form() {
        let l = LieAlgebra::abelian();
        assert!(matches!(
            rhs_nearly_parallel(&l, &phi0(), 4.0),
            Err(FlowError::Su3(Su3Error::PiOutsideDomain { .. }))
        ));
    }

    #[test]
    fn half_flat_rhs_matches_the_cone_derivative() {
        let (l, s) = nearly_kahler_su2su2();
        for t in [0.8_f64, 1.5] {
            let phi_t = s.phi().scaled(t.powi(3));
            let omega2 = wedge(s.omega(), s.omega()).unwrap();
            let sigma_t = omega2.scaled(0.5 * t.powi(4));
            let (phidot, sigmadot) = rhs_half_flat(&l, &phi_t, &sigma_t).unwrap();
            assert!((&phidot - &s.phi().scaled(3.0 * t * t)).norm() <= 1e-12);
            assert!((&sigmadot - &omega2.scaled(2.0 * t.powi(3))).norm() <= 1e-12);
        }
    }

    #[test]
    fn half_flat_rhs_is_frozen_on_the_abelian_algebra() {
        let l = LieAlgebra::abelian();
        let (phidot, sigmadot) = rhs_half_flat(&l, &phi0(), &sigma0()).unwrap();
        assert_eq!(phidot.norm(), 0.0);
        assert_eq!(sigmadot.norm(), 0.0);
    }

    #[test]
    fn half_flat_rhs_rejects_non_closed_data() {
        let (l, s) = nearly_kahler_su2su2();
        // d(phihat) = -2 omega^2 is far from closed
        let sigma = wedge(s.omega(), s.omega()).unwrap().scaled(0.5);
        match rhs_half_flat(&l, s.phihat(), &sigma) {
            Err(FlowError::NotHalfFlat { dphi, .. }) => assert!(dphi > 1e-3),
            other => panic!("expected a closure rejection, got {other:?}"),
        }
    }

    #[test]
    fn config_errors_are_reported_before_any_work() {
        let (l, s) = nearly_kahler_su2su2();
        let state = FlowState {
            t: 0.0,
            phi: s.phi().clone(),
            sigma: None,
        };
        let base = FlowConfig {
            lambda: 4.0,
            step: 1e-3,
            t_end: 1.0,
            mode: FlowMode::NearlyParallel,
            monitor_every: 10,
        };
        let mut c = base.clone();
        c.step = 0.0;
        assert!(matches!(integrate(&l, &state, &c), Err(FlowError::BadStep { .. })));
        let mut c = base.clone();
        c.step = -1.0;
        assert!(matches!(integrate(&l, &state, &c), Err(FlowError::BadStep { .. })));
        let mut c = base.clone();
        c.lambda = 0.0;
        assert!(matches!(integrate(&l, &state, &c), Err(FlowError::LambdaZero)));
        let mut c = base;
        c.monitor_every = 0;
        assert!(matches!(integrate(&l, &state, &c), Err(FlowError::BadMonitor)));
    }

    #[test]
    fn nearly_parallel_trajectory_tracks_the_sine_cone() {
        let (l, s) = nearly_kahler_su2su2();
        let fam = sine_cone_family(&l, &s).unwrap();
        for direction in [1.0, -1.0] {
            let t0 = FRAC_PI_2;
            let smp = fam.sample(t0).unwrap();
            let state = FlowState {
                t: t0,
                phi: smp.phi.clone(),
                sigma: None,
            };
            let config = FlowConfig {
                lambda: fam.lambda(),
                step: 1e-3,
                t_end: t0 + direction * 0.4,
                mode: FlowMode::NearlyParallel,
                monitor_every: 50,
            };
            let traj = integrate(&l, &state, &config).unwrap();
            assert_eq!(traj.termination(), Termination::Completed);
            assert!(traj.points().len() > 3);
            for p in traj.points() {
                let reference = fam.sample(p.state.t).unwrap().phi;
                let err = (&p.state.phi - &reference).norm();
                assert!(
                    err <= 1e-6 * reference.norm(),
                    "deviation {err} at t = {}",
                    p.state.t
                );
            }
            let last = traj.final_point();
            assert_relative_eq!(last.state.t, config.t_end);
        }
    }

    #[test]
    fn half_flat_trajectory_tracks_the_cone() {
        let (l, s) = nearly_kahler_su2su2();
        let fam = cone_family(&l, &s).unwrap();
        let omega2 = wedge(s.omega(), s.omega()).unwrap();
        let state = FlowState {
            t: 1.0,
            phi: fam.sample(1.0).unwrap().phi,
            sigma: Some(omega2.scaled(0.5)),
        };
        let config = FlowConfig {
            lambda: 0.0,
            step: 1e-3,
            t_end: 2.0,
            mode: FlowMode::HalfFlat,
            monitor_every: 100,
        };
        let traj = integrate(&l, &state, &config).unwrap();
        assert_eq!(traj.termination(), Termination::Completed);
        for p in traj.points() {
            let t = p.state.t;
            let phi_ref = fam.sample(t).unwrap().phi;
            let sigma_ref = omega2.scaled(0.5 * t.powi(4));
            assert!((&p.state.phi - &phi_ref).norm() <= 1e-6 * phi_ref.norm());
            let sigma = p.state.sigma.as_ref().unwrap();
            assert!((sigma - &sigma_ref).norm() <= 1e-6 * sigma_ref.norm());
            // half-flat closure holds along the whole run
            assert!(p.diagnostics.c1 <= 1e-10);
        }
    }

    #[test]
    fn constraints_stay_small_over_a_unit_span() {
        let (l, s) = nearly_kahler_su2su2();
        let fam = sine_cone_family(&l, &s).unwrap();
        let t0 = FRAC_PI_2;
        let state = FlowState {
            t: t0,
            phi: fam.sample(t0).unwrap().phi,
            sigma: None,
        };
        let config = FlowConfig {
            lambda: fam.lambda(),
            step: 1e-3,
            t_end: t0 + 1.0,
            mode: FlowMode::NearlyParallel,
            monitor_every: 100,
        };
        let traj = integrate(&l, &state, &config).unwrap();
        assert_eq!(traj.termination(), Termination::Completed);
        let initial = &traj.points()[0].diagnostics;
        assert!(initial.c1 <= 1e-10 && initial.c2 <= 1e-10 && initial.c3 <= 1e-10);
        for p in traj.points() {
            let d = &p.diagnostics;
            assert!(d.c1 <= 1e-8 && d.c2 <= 1e-8 && d.c3 <= 1e-8);
            assert!(d.hamiltonian.is_some());
        }
        // the assembled product form closes at every monitored state
        for p in traj.points() {
            let omega = pi_map(&l, &p.state.phi, config.lambda).unwrap();
            let st = validate(&omega, &p.state.phi, 1e-6).unwrap();
            let rhs = rhs_nearly_parallel(&l, &p.state.phi, config.lambda).unwrap();
            let r =
                crate::g2::nearly_parallel_residual(&l, &st, &rhs, config.lambda).unwrap();
            assert!(r <= 1e-8 * (1.0 + crate::g2::star_psi(&st).norm()));
        }
    }

    #[test]
    fn degenerating_half_flat_run_returns_a_partial_trajectory() {
        // on this nilpotent algebra the half-flat flow from the standard
        // pair drives the e^{123} coefficient of phi through the stability
        // wall in finite time
        let l = LieAlgebra::parse_salamon("(0,0,0,23,-13,12)").unwrap();
        let state = FlowState {
            t: 0.0,
            phi: phi0(),
            sigma: Some(sigma0()),
        };
        let config = FlowConfig {
            lambda: 0.0,
            step: 1e-3,
            t_end: 5.0,
            mode: FlowMode::HalfFlat,
            monitor_every: 50,
        };
        let traj = integrate(&l, &state, &config).unwrap();
        assert_eq!(traj.termination(), Termination::StabilityLost);
        assert!(!traj.points().is_empty());
        let last_t = traj.final_point().state.t;
        assert!(last_t > 0.0 && last_t < 5.0, "lost stability at t = {last_t}");
    }

    #[test]
    fn step_underflow_is_detected() {
        let (l, s) = nearly_kahler_su2su2();
        let fam = sine_cone_family(&l, &s).unwrap();
        let t0 = 1e16;
        let state = FlowState {
            t: t0,
            phi: fam.sample(FRAC_PI_2).unwrap().phi,
            sigma: None,
        };
        let config = FlowConfig {
            lambda: fam.lambda(),
            step: 1e-3,
            t_end: t0 + 16.0, // representable target, but steps of 1e-3 are below one ulp
            mode: FlowMode::NearlyParallel,
            monitor_every: 10,
        };
        let traj = integrate(&l, &state, &config).unwrap();
        assert_eq!(traj.termination(), Termination::StepUnderflow);
    }

    #[test]
    fn hamiltonian_guards_and_automorphism_invariance() {
        let non_unimodular = LieAlgebra::parse_salamon("(12,0,0,0,0,0)").unwrap();
        let (l, s) = nearly_kahler_su2su2();
        let fam = sine_cone_family(&l, &s).unwrap();
        let phi = fam.sample(FRAC_PI_2).unwrap().phi;
        let lambda = fam.lambda();
        assert!(matches!(
            hamiltonian(&non_unimodular, &phi, lambda),
            Err(FlowError::NotUnimodular)
        ));

        let h0 = hamiltonian(&l, &phi, lambda).unwrap();
        assert!(h0.is_finite());
        // block rotations are orientation-preserving automorphisms of the
        // direct sum; the reduced energy cannot see them
        let c = 0.6_f64.cos();
        let sn = 0.6_f64.sin();
        let mut rows = vec![0.0; 36];
        let rot = [[c, -sn, 0.0], [sn, c, 0.0], [0.0, 0.0, 1.0]];
        for b in 0..2 {
            for i in 0..3 {
                for j in 0..3 {
                    rows[(3 * b + i) * 6 + 3 * b + j] = rot[i][j];
                }
            }
        }
        let f = crate::exterior::LinMap::from_rows(6, &rows).unwrap();
        assert!(l.is_automorphism(&f, 1e-12).unwrap());
        let moved = crate::exterior::act(&f, &phi).unwrap();
        let h1 = hamiltonian(&l, &moved, lambda).unwrap();
        assert_relative_eq!(h0, h1, max_relative = 1e-10);
    }

    #[test]
    fn hamiltonian_scaling_in_lambda_is_explicit() {
        let (l, s) = nearly_kahler_su2su2();
        let fam = sine_cone_family(&l, &s).unwrap();
        let phi = fam.sample(FRAC_PI_2).unwrap().phi;
        let lambda = fam.lambda();
        // doubling lambda halves sigma, scaling pi by 2^{-1/2} and its
        // volume by 2^{-3/2}; compensate explicitly and compare
        let omega = pi_map(&l, &phi, lambda).unwrap();
        let expected = 4.0
            * lambda
            * (eps3(&phi).unwrap().value
                - eps2(&omega).unwrap().value / 2.0_f64.powf(1.5));
        let h2 = hamiltonian(&l, &phi, 2.0 * lambda).unwrap();
        assert_relative_eq!(h2, expected, max_relative = 1e-12);
    }

    #[test]
    fn wedge_pairing_is_antisymmetric_and_nondegenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let mut a = Form::zero(6, 3).unwrap();
            let mut b = Form::zero(6, 3).unwrap();
            for c in a.coeffs_mut() {
                *c = rng.gen_range(-1.0..1.0);
            }
            for c in b.coeffs_mut() {
                *c = rng.gen_range(-1.0..1.0);
            }
            assert!(symplectic_pairing(&a, &a).unwrap().abs() < 1e-14);
            let ab = symplectic_pairing(&a, &b).unwrap();
            let ba = symplectic_pairing(&b, &a).unwrap();
            assert!((ab + ba).abs() < 1e-12);
        }
        let e123 = Form::basis(6, &[1, 2, 3]).unwrap();
        let e456 = Form::basis(6, &[4, 5, 6]).unwrap();
        assert_eq!(symplectic_pairing(&e123, &e456).unwrap(), 1.0);

        let n = 20;
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let bi = Form::basis(6, MultiIndex::from_rank(6, 3, i).unwrap().indices())
                    .unwrap();
                let bj = Form::basis(6, MultiIndex::from_rank(6, 3, j).unwrap().indices())
                    .unwrap();
                m[(i, j)] = symplectic_pairing(&bi, &bj).unwrap();
            }
        }
        assert_eq!(m.rank(1e-12), n);
    }

    #[test]
    fn hamiltonian_field_reproduces_the_flow_field() {
        let (l, s) = nearly_kahler_su2su2();
        let fam = sine_cone_family(&l, &s).unwrap();
        let lambda = fam.lambda();
        let phi = fam.sample(FRAC_PI_2).unwrap().phi;
        let rhs = rhs_nearly_parallel(&l, &phi, lambda).unwrap();
        let x = hamiltonian_field(&l, &phi, lambda).unwrap();
        assert!((&x - &rhs).norm() <= 1e-5 * (1.0 + rhs.norm()));

        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let mut done = 0;
        while done < 10 {
            let mut probe = phi.clone();
            for c in probe.coeffs_mut() {
                *c += 0.01 * rng.gen_range(-1.0..1.0);
            }
            if rhs_nearly_parallel(&l, &probe, lambda).is_err() {
                continue;
            }
            done += 1;
            let rhs = rhs_nearly_parallel(&l, &probe, lambda).unwrap();
            let x = hamiltonian_field(&l, &probe, lambda).unwrap();
            assert!((&x - &rhs).norm() <= 1e-5 * (1.0 + rhs.norm()));
        }

        let non_unimodular = LieAlgebra::parse_salamon("(12,0,0,0,0,0)").unwrap();
        assert!(matches!(
            hamiltonian_field(&non_unimodular, &phi, lambda),
            Err(FlowError::NotUnimodular)
        ));
    }
}
