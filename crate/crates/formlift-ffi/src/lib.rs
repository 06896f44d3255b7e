//! C interface to the formlift library.
//!
//! Design:
//! - Every object crossing the boundary is an opaque handle allocated by this
//!   crate and released with its matching `fl_*_free` function. Handles are
//!   immutable after creation, so sharing a `*const` handle between threads
//!   is sound as long as frees are not raced with reads.
//! - Fallible functions return [`FlStatus`] and write their results through
//!   out-pointers. Out-pointers are written only on [`FlStatus::Ok`].
//! - On failure a description is stored in thread-local storage and can be
//!   read with [`fl_last_error_message`]; the pointer stays valid until the
//!   next failing call on the same thread.
//! - Panics are caught at the boundary and reported as [`FlStatus::Internal`]
//!   rather than unwinding into the caller.
//!
//! Safety: callers must pass handle pointers obtained from this API (or
//! null where documented), NUL-terminated strings for text arguments, and
//! buffers at least as long as stated. Freeing a handle twice or using it
//! after free is undefined behavior, exactly as with any C library.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;

use formlift::exterior::{wedge, Form};
use formlift::flow::{self, FlowConfig, FlowMode, FlowState, Termination, Trajectory};
use formlift::g2;
use formlift::hitchin::{self, StableClass};
use formlift::io;
use formlift::lie_model::LieAlgebra;
use formlift::solutions;
use formlift::su3::{self, SU3Structure, TorsionTag};

/// Default tolerance for stability classification (mirrors the library).
pub const FL_DEFAULT_STABILITY_TOL: f64 = 1e-10;

/// Default tolerance for structure validation (mirrors the library).
pub const FL_DEFAULT_VALIDATE_TOL: f64 = 1e-8;

/// Result of every fallible call in this API.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlStatus {
    /// The call succeeded and all out-pointers were written.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A text argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Text input (JSON or a structure-constant string) was rejected.
    ParseError = 3,
    /// A form had the wrong dimension or degree for the operation.
    ShapeError = 4,
    /// A form was outside the open set of stable forms.
    NotStable = 5,
    /// The forms are individually stable but fail a compatibility equation.
    ValidationFailed = 6,
    /// A numeric or mode parameter was out of range for the operation.
    BadConfig = 7,
    /// An index or buffer length did not match the object.
    OutOfRange = 8,
    /// An internal invariant failed; report this as a bug.
    Internal = 9,
}

/// Stability class of a form under the natural group action.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlStableClass {
    /// Not stable at the requested tolerance.
    NotStable = 0,
    /// Nondegenerate 2-form.
    Symplectic2 = 1,
    /// Stable 3-form with negative discriminant; induces a complex structure.
    Positive3 = 2,
    /// Stable 3-form with positive discriminant.
    NegativeDiscriminant3 = 3,
    /// Stable 4-form.
    Stable4 = 4,
}

/// Intrinsic torsion class of a validated structure on a given algebra.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlTorsionTag {
    /// None of the recognized classes hold at the tolerance.
    Unclassified = 0,
    /// d(omega) = 3 phi and d(phihat) + 2 omega^2 = 0.
    NearlyKaehler = 1,
    /// d(phi) = 0 and d(omega^2) = 0.
    HalfFlat = 2,
    /// d(phi) + lambda omega^2 = 0 with nonzero fitted lambda; the fitted
    /// value is reported in the residuals and the 7-dimensional constant
    /// is twice it.
    NearlyHalfFlat = 3,
}

/// Which evolution equation to integrate.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlFlowMode {
    /// d(psi) = lambda *psi along the lift; phi is the only state.
    NearlyParallel = 0,
    /// Closed-form evolution with sigma as independent state.
    HalfFlat = 1,
}

/// Why integration stopped.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlTermination {
    /// Reached the requested end time.
    Completed = 0,
    /// A step left the stable set; the trajectory holds every good state.
    StabilityLost = 1,
    /// The step size could no longer advance the time in floating point.
    StepUnderflow = 2,
}

/// Residual norms of every torsion-class defining equation, reported
/// regardless of the accepted tag so callers can inspect near-misses.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FlTorsionResiduals {
    /// Norm of d(omega) - 3 phi.
    pub nearly_kaehler_domega: f64,
    /// Norm of d(phihat) + 2 omega^2.
    pub nearly_kaehler_dphihat: f64,
    /// Norm of d(phi).
    pub half_flat_dphi: f64,
    /// Norm of d(omega^2).
    pub half_flat_domega2: f64,
    /// Norm of d(phi) + lambda_fit omega^2.
    pub nearly_half_flat: f64,
    /// Least-squares lambda in the d(phi) + lambda omega^2 = 0 normalization.
    pub lambda_fit: f64,
    /// Size factor the residuals were compared against (tol times scale).
    pub scale: f64,
}

/// Constraint residuals and recorded quantities at one trajectory point.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FlDiagnostics {
    /// Norm of d(phi) + (lambda/2) omega^2 (lambda = 0 in half-flat mode).
    pub c1: f64,
    /// Norm of omega wedge phi.
    pub c2: f64,
    /// Absolute difference of the two volume functionals.
    pub c3: f64,
    /// Volume functional of phi at this state.
    pub eps_phi: f64,
    /// Flow energy; meaningful only when has_hamiltonian is true.
    pub hamiltonian: f64,
    /// Whether the hamiltonian field was recorded at this point.
    pub has_hamiltonian: bool,
}

/// Opaque handle to an exterior form of fixed dimension and degree.
pub struct FlForm {
    inner: Form,
}

/// Opaque handle to a 6-dimensional Lie algebra given by structure constants.
pub struct FlAlgebra {
    inner: LieAlgebra,
}

/// Opaque handle to a validated structure pair (omega, phi) with its
/// derived metric, dual 3-form, and volume.
pub struct FlStructure {
    inner: SU3Structure,
}

/// Opaque handle to the recorded points of one integration run.
pub struct FlTrajectory {
    inner: Trajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: FlStatus, message: impl std::fmt::Display) -> FlStatus {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(text).expect("NUL bytes were removed");
    });
    status
}

fn guarded<F: FnOnce() -> FlStatus>(body: F) -> FlStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(FlStatus::Internal, "internal panic at the C boundary"),
    }
}

/// Null-checks a `*const` handle or text pointer and produces a reference.
macro_rules! arg {
    ($ptr:ident) => {
        match unsafe { $ptr.as_ref() } {
            Some(r) => r,
            None => {
                return fail(
                    FlStatus::NullArgument,
                    concat!(stringify!($ptr), " is null"),
                )
            }
        }
    };
}

/// Null-checks an out-pointer without dereferencing it.
macro_rules! out {
    ($ptr:ident) => {
        if $ptr.is_null() {
            return fail(
                FlStatus::NullArgument,
                concat!(stringify!($ptr), " is null"),
            );
        }
    };
}

/// Null-checks and decodes a text argument.
macro_rules! text {
    ($ptr:ident) => {{
        out!($ptr);
        match unsafe { CStr::from_ptr($ptr) }.to_str() {
            Ok(s) => s,
            Err(_) => {
                return fail(
                    FlStatus::InvalidUtf8,
                    concat!(stringify!($ptr), " is not valid UTF-8"),
                )
            }
        }
    }};
}

fn hitchin_status(e: &hitchin::HitchinError) -> FlStatus {
    use hitchin::HitchinError as E;
    match e {
        E::NotPositiveType { .. } | E::NotStableFour { .. } | E::NotStable { .. } => {
            FlStatus::NotStable
        }
        _ => FlStatus::ShapeError,
    }
}

fn su3_status(e: &su3::Su3Error) -> FlStatus {
    use su3::Su3Error as E;
    match e {
        E::Hitchin(h) => hitchin_status(h),
        E::OmegaNotStable { .. } | E::PhiNotStable { .. } | E::PiOutsideDomain { .. } => {
            FlStatus::NotStable
        }
        E::NotPositive { .. } | E::NotCompatible { .. } | E::VolumeMismatch { .. } => {
            FlStatus::ValidationFailed
        }
        E::LambdaZero => FlStatus::BadConfig,
        E::WrongShape { .. } | E::Exterior(_) | E::LieModel(_) => FlStatus::ShapeError,
    }
}

fn flow_status(e: &flow::FlowError) -> FlStatus {
    use flow::FlowError as E;
    match e {
        E::BadStep { .. } | E::LambdaZero | E::BadMonitor | E::MissingSigma | E::NotUnimodular => {
            FlStatus::BadConfig
        }
        E::PhiUnstable { .. } | E::SigmaUnstable { .. } | E::NonFinite => FlStatus::NotStable,
        E::NotHalfFlat { .. } => FlStatus::ValidationFailed,
        E::Hitchin(h) => hitchin_status(h),
        E::Su3(s) => su3_status(s),
        E::Exterior(_) | E::LieModel(_) => FlStatus::ShapeError,
        E::SingularPairing => FlStatus::Internal,
    }
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> FlStatus {
    *out = Box::into_raw(Box::new(value));
    FlStatus::Ok
}

fn class_code(class: StableClass) -> FlStableClass {
    match class {
        StableClass::NotStable => FlStableClass::NotStable,
        StableClass::Symplectic2 => FlStableClass::Symplectic2,
        StableClass::Positive3 => FlStableClass::Positive3,
        StableClass::NegativeDiscriminant3 => FlStableClass::NegativeDiscriminant3,
        StableClass::Stable4 => FlStableClass::Stable4,
    }
}

/// Version of the underlying library as a static NUL-terminated string.
/// The pointer is valid for the life of the program; do not free it.
#[no_mangle]
pub extern "C" fn fl_version() -> *const c_char {
    static VERSION: OnceLock<CString> = OnceLock::new();
    VERSION
        .get_or_init(|| CString::new(formlift::VERSION).expect("version has no NUL"))
        .as_ptr()
}

/// Description of the most recent failure on the calling thread, or an
/// empty string if nothing failed yet. Valid until the next failing call
/// on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn fl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by this API. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fl_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// Releases a form handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fl_form_free(form: *mut FlForm) {
    if !form.is_null() {
        drop(Box::from_raw(form));
    }
}

/// Releases an algebra handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fl_algebra_free(algebra: *mut FlAlgebra) {
    if !algebra.is_null() {
        drop(Box::from_raw(algebra));
    }
}

/// Releases a structure handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fl_structure_free(structure: *mut FlStructure) {
    if !structure.is_null() {
        drop(Box::from_raw(structure));
    }
}

/// Releases a trajectory handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fl_trajectory_free(trajectory: *mut FlTrajectory) {
    if !trajectory.is_null() {
        drop(Box::from_raw(trajectory));
    }
}

/// Parses a form from its JSON document, a string of the shape
/// {"dimension": 6, "degree": 3, "terms": [{"indices": [1,2,3], "coeff": 1.0}]}.
#[no_mangle]
pub unsafe extern "C" fn fl_form_parse_json(text: *const c_char, out: *mut *mut FlForm) -> FlStatus {
    guarded(|| {
        let text = text!(text);
        out!(out);
        match io::form_from_json("input", text) {
            Ok(inner) => store(out, FlForm { inner }),
            Err(e) => fail(FlStatus::ParseError, e),
        }
    })
}

/// Serializes a form to its JSON document. The caller owns the returned
/// string and must release it with fl_string_free.
#[no_mangle]
pub unsafe extern "C" fn fl_form_to_json(form: *const FlForm, out: *mut *mut c_char) -> FlStatus {
    guarded(|| {
        let form = arg!(form);
        out!(out);
        let text = CString::new(io::form_to_json(&form.inner)).expect("JSON has no NUL");
        *out = text.into_raw();
        FlStatus::Ok
    })
}

/// Builds a form from a dense coefficient buffer. Coefficients are indexed
/// by the strictly increasing index tuples of the degree in lexicographic
/// order, and length must equal binomial(dimension, degree).
#[no_mangle]
pub unsafe extern "C" fn fl_form_from_coefficients(
    dimension: usize,
    degree: usize,
    coefficients: *const f64,
    length: usize,
    out: *mut *mut FlForm,
) -> FlStatus {
    guarded(|| {
        out!(out);
        let coeffs = if length == 0 {
            Vec::new()
        } else {
            out!(coefficients);
            unsafe { std::slice::from_raw_parts(coefficients, length) }.to_vec()
        };
        match Form::from_coeffs(dimension, degree, coeffs) {
            Ok(inner) => store(out, FlForm { inner }),
            Err(e) => fail(FlStatus::ShapeError, e),
        }
    })
}

/// Dimension of the underlying space.
#[no_mangle]
pub unsafe extern "C" fn fl_form_dimension(form: *const FlForm, out: *mut usize) -> FlStatus {
    guarded(|| {
        let form = arg!(form);
        out!(out);
        *out = form.inner.dim();
        FlStatus::Ok
    })
}

/// Degree of the form.
#[no_mangle]
pub unsafe extern "C" fn fl_form_degree(form: *const FlForm, out: *mut usize) -> FlStatus {
    guarded(|| {
        let form = arg!(form);
        out!(out);
        *out = form.inner.degree();
        FlStatus::Ok
    })
}

/// Number of coefficients, binomial(dimension, degree).
#[no_mangle]
pub unsafe extern "C" fn fl_form_coefficient_count(
    form: *const FlForm,
    out: *mut usize,
) -> FlStatus {
    guarded(|| {
        let form = arg!(form);
        out!(out);
        *out = form.inner.coeffs().len();
        FlStatus::Ok
    })
}

/// Copies the coefficients into the caller's buffer, ordered as in
/// fl_form_from_coefficients. The length must match exactly.
#[no_mangle]
pub unsafe extern "C" fn fl_form_coefficients(
    form: *const FlForm,
    buffer: *mut f64,
    length: usize,
) -> FlStatus {
    guarded(|| {
        let form = arg!(form);
        out!(buffer);
        let coeffs = form.inner.coeffs();
        if length != coeffs.len() {
            return fail(
                FlStatus::OutOfRange,
                format!(
                    "buffer length {length} does not match coefficient count {}",
                    coeffs.len()
                ),
            );
        }
        unsafe { std::slice::from_raw_parts_mut(buffer, length) }.copy_from_slice(coeffs);
        FlStatus::Ok
    })
}

/// Euclidean coefficient norm of the form.
#[no_mangle]
pub unsafe extern "C" fn fl_form_norm(form: *const FlForm, out: *mut f64) -> FlStatus {
    guarded(|| {
        let form = arg!(form);
        out!(out);
        *out = form.inner.norm();
        FlStatus::Ok
    })
}

/// The form scaled by a constant, as a new handle.
#[no_mangle]
pub unsafe extern "C" fn fl_form_scaled(
    form: *const FlForm,
    scale: f64,
    out: *mut *mut FlForm,
) -> FlStatus {
    guarded(|| {
        let form = arg!(form);
        out!(out);
        store(
            out,
            FlForm {
                inner: form.inner.scaled(scale),
            },
        )
    })
}

/// Wedge product of two forms over the same space.
#[no_mangle]
pub unsafe extern "C" fn fl_wedge(
    left: *const FlForm,
    right: *const FlForm,
    out: *mut *mut FlForm,
) -> FlStatus {
    guarded(|| {
        let left = arg!(left);
        let right = arg!(right);
        out!(out);
        match wedge(&left.inner, &right.inner) {
            Ok(inner) => store(out, FlForm { inner }),
            Err(e) => fail(FlStatus::ShapeError, e),
        }
    })
}

/// Classifies a 6-dimensional form of degree 2, 3, or 4 by stability,
/// treating discriminants within the tolerance of zero as degenerate.
#[no_mangle]
pub unsafe extern "C" fn fl_classify(
    form: *const FlForm,
    tolerance: f64,
    out: *mut FlStableClass,
) -> FlStatus {
    guarded(|| {
        let form = arg!(form);
        out!(out);
        match hitchin::classify_with_tol(&form.inner, tolerance) {
            Ok(class) => {
                *out = class_code(class);
                FlStatus::Ok
            }
            Err(e) => fail(hitchin_status(&e), e),
        }
    })
}

/// Volume functional of a stable form, as the coefficient of the oriented
/// basis volume.
#[no_mangle]
pub unsafe extern "C" fn fl_epsilon(form: *const FlForm, out: *mut f64) -> FlStatus {
    guarded(|| {
        let form = arg!(form);
        out!(out);
        match hitchin::epsilon(&form.inner) {
            Ok(volume) => {
                *out = volume.value;
                FlStatus::Ok
            }
            Err(e) => fail(hitchin_status(&e), e),
        }
    })
}

/// Derivative of the volume functional: the unique form with
/// d/ds epsilon(rho + s tau) = pairing(hat(rho), tau) at s = 0.
#[no_mangle]
pub unsafe extern "C" fn fl_hat(form: *const FlForm, out: *mut *mut FlForm) -> FlStatus {
    guarded(|| {
        let form = arg!(form);
        out!(out);
        match hitchin::hat(&form.inner) {
            Ok(inner) => store(out, FlForm { inner }),
            Err(e) => fail(hitchin_status(&e), e),
        }
    })
}

/// Parses a 6-dimensional algebra from a structure-constant string such as
/// "(0,0,0,0,12,13)". The table must satisfy the Jacobi identity.
#[no_mangle]
pub unsafe extern "C" fn fl_algebra_parse_salamon(
    text: *const c_char,
    out: *mut *mut FlAlgebra,
) -> FlStatus {
    guarded(|| {
        let text = text!(text);
        out!(out);
        match LieAlgebra::parse_salamon(text) {
            Ok(inner) => store(out, FlAlgebra { inner }),
            Err(e) => fail(FlStatus::ParseError, e),
        }
    })
}

/// Parses an algebra from its JSON document, which carries either a
/// structure-constant string or an explicit differential table.
#[no_mangle]
pub unsafe extern "C" fn fl_algebra_parse_json(
    text: *const c_char,
    out: *mut *mut FlAlgebra,
) -> FlStatus {
    guarded(|| {
        let text = text!(text);
        out!(out);
        match io::algebra_from_json("input", text) {
            Ok(inner) => store(out, FlAlgebra { inner }),
            Err(e) => fail(FlStatus::ParseError, e),
        }
    })
}

/// Canonical structure-constant string of the algebra. The caller owns the
/// returned string and must release it with fl_string_free.
#[no_mangle]
pub unsafe extern "C" fn fl_algebra_to_salamon(
    algebra: *const FlAlgebra,
    out: *mut *mut c_char,
) -> FlStatus {
    guarded(|| {
        let algebra = arg!(algebra);
        out!(out);
        let text = CString::new(algebra.inner.to_salamon()).expect("table text has no NUL");
        *out = text.into_raw();
        FlStatus::Ok
    })
}

/// Serializes the algebra to its JSON document. The caller owns the
/// returned string and must release it with fl_string_free.
#[no_mangle]
pub unsafe extern "C" fn fl_algebra_to_json(
    algebra: *const FlAlgebra,
    out: *mut *mut c_char,
) -> FlStatus {
    guarded(|| {
        let algebra = arg!(algebra);
        out!(out);
        let text = CString::new(io::algebra_to_json(&algebra.inner)).expect("JSON has no NUL");
        *out = text.into_raw();
        FlStatus::Ok
    })
}

/// Dimension of the algebra.
#[no_mangle]
pub unsafe extern "C" fn fl_algebra_dimension(
    algebra: *const FlAlgebra,
    out: *mut usize,
) -> FlStatus {
    guarded(|| {
        let algebra = arg!(algebra);
        out!(out);
        *out = algebra.inner.dim();
        FlStatus::Ok
    })
}

/// Exterior derivative of a left-invariant form in the algebra's model.
#[no_mangle]
pub unsafe extern "C" fn fl_algebra_differential(
    algebra: *const FlAlgebra,
    form: *const FlForm,
    out: *mut *mut FlForm,
) -> FlStatus {
    guarded(|| {
        let algebra = arg!(algebra);
        let form = arg!(form);
        out!(out);
        match algebra.inner.d_ce(&form.inner) {
            Ok(inner) => store(out, FlForm { inner }),
            Err(e) => fail(FlStatus::ShapeError, e),
        }
    })
}

/// Validates a pair (omega, phi) as a compatible normalized structure:
/// both stable, positivity of the induced metric, omega wedge phi = 0, and
/// matching volume functionals, all at the given tolerance.
#[no_mangle]
pub unsafe extern "C" fn fl_su3_validate(
    omega: *const FlForm,
    phi: *const FlForm,
    tolerance: f64,
    out: *mut *mut FlStructure,
) -> FlStatus {
    guarded(|| {
        let omega = arg!(omega);
        let phi = arg!(phi);
        out!(out);
        match su3::validate(&omega.inner, &phi.inner, tolerance) {
            Ok(inner) => store(out, FlStructure { inner }),
            Err(e) => fail(su3_status(&e), e),
        }
    })
}

/// The 2-form of a validated structure, as a new handle.
#[no_mangle]
pub unsafe extern "C" fn fl_structure_omega(
    structure: *const FlStructure,
    out: *mut *mut FlForm,
) -> FlStatus {
    guarded(|| {
        let structure = arg!(structure);
        out!(out);
        store(
            out,
            FlForm {
                inner: structure.inner.omega().clone(),
            },
        )
    })
}

/// The 3-form of a validated structure, as a new handle.
#[no_mangle]
pub unsafe extern "C" fn fl_structure_phi(
    structure: *const FlStructure,
    out: *mut *mut FlForm,
) -> FlStatus {
    guarded(|| {
        let structure = arg!(structure);
        out!(out);
        store(
            out,
            FlForm {
                inner: structure.inner.phi().clone(),
            },
        )
    })
}

/// The dual 3-form of a validated structure, as a new handle.
#[no_mangle]
pub unsafe extern "C" fn fl_structure_phihat(
    structure: *const FlStructure,
    out: *mut *mut FlForm,
) -> FlStatus {
    guarded(|| {
        let structure = arg!(structure);
        out!(out);
        store(
            out,
            FlForm {
                inner: structure.inner.phihat().clone(),
            },
        )
    })
}

/// Volume functional shared by the two forms of a validated structure.
#[no_mangle]
pub unsafe extern "C" fn fl_structure_epsilon(
    structure: *const FlStructure,
    out: *mut f64,
) -> FlStatus {
    guarded(|| {
        let structure = arg!(structure);
        out!(out);
        *out = structure.inner.epsilon().value;
        FlStatus::Ok
    })
}

/// Classifies the intrinsic torsion of a validated structure over an
/// algebra, writing the accepted tag and the residuals of every defining
/// equation. When the tag is nearly half-flat, the lambda_fit residual
/// field carries the defining constant (the 7-dimensional constant is
/// twice it).
#[no_mangle]
pub unsafe extern "C" fn fl_torsion_classify(
    algebra: *const FlAlgebra,
    structure: *const FlStructure,
    tolerance: f64,
    out_tag: *mut FlTorsionTag,
    out_residuals: *mut FlTorsionResiduals,
) -> FlStatus {
    guarded(|| {
        let algebra = arg!(algebra);
        let structure = arg!(structure);
        out!(out_tag);
        out!(out_residuals);
        let class = su3::classify_torsion(&algebra.inner, &structure.inner, tolerance);
        let r = class.residuals;
        *out_tag = match class.tag {
            TorsionTag::Unclassified => FlTorsionTag::Unclassified,
            TorsionTag::NearlyKaehler => FlTorsionTag::NearlyKaehler,
            TorsionTag::HalfFlat => FlTorsionTag::HalfFlat,
            TorsionTag::NearlyHalfFlat { .. } => FlTorsionTag::NearlyHalfFlat,
        };
        *out_residuals = FlTorsionResiduals {
            nearly_kaehler_domega: r.nearly_kaehler_domega,
            nearly_kaehler_dphihat: r.nearly_kaehler_dphihat,
            half_flat_dphi: r.half_flat_dphi,
            half_flat_domega2: r.half_flat_domega2,
            nearly_half_flat: r.nearly_half_flat,
            lambda_fit: r.lambda_fit,
            scale: r.scale,
        };
        FlStatus::Ok
    })
}

/// The 2-form pi(phi) obtained by rescaling d(phi) to a stable 4-form and
/// taking its dual 2-form; defined only where d(phi) rescales into the
/// stable set. lambda fixes the rescaling and must be nonzero.
#[no_mangle]
pub unsafe extern "C" fn fl_pi_map(
    algebra: *const FlAlgebra,
    phi: *const FlForm,
    lambda: f64,
    out: *mut *mut FlForm,
) -> FlStatus {
    guarded(|| {
        let algebra = arg!(algebra);
        let phi = arg!(phi);
        out!(out);
        match su3::pi_map(&algebra.inner, &phi.inner, lambda) {
            Ok(inner) => store(out, FlForm { inner }),
            Err(e) => fail(su3_status(&e), e),
        }
    })
}

/// The product-space 3-form omega wedge dt + phi, on the 7-dimensional
/// space with dt as the last covector.
#[no_mangle]
pub unsafe extern "C" fn fl_lift(
    omega: *const FlForm,
    phi: *const FlForm,
    out: *mut *mut FlForm,
) -> FlStatus {
    guarded(|| {
        let omega = arg!(omega);
        let phi = arg!(phi);
        out!(out);
        match g2::lift(&omega.inner, &phi.inner) {
            Ok(lifted) => store(out, FlForm { inner: lifted.psi }),
            Err(e) => fail(FlStatus::ShapeError, e),
        }
    })
}

/// Splits a product-space 3-form into its factor components (omega, phi).
#[no_mangle]
pub unsafe extern "C" fn fl_split(
    psi: *const FlForm,
    out_omega: *mut *mut FlForm,
    out_phi: *mut *mut FlForm,
) -> FlStatus {
    guarded(|| {
        let psi = arg!(psi);
        out!(out_omega);
        out!(out_phi);
        match g2::split(&psi.inner) {
            Ok((omega, phi)) => {
                store(out_omega, FlForm { inner: omega });
                store(out_phi, FlForm { inner: phi })
            }
            Err(e) => fail(FlStatus::ShapeError, e),
        }
    })
}

/// Hodge dual of the lifted 3-form for the product metric of a validated
/// structure: minus phihat wedge dt minus half omega squared.
#[no_mangle]
pub unsafe extern "C" fn fl_star_psi(
    structure: *const FlStructure,
    out: *mut *mut FlForm,
) -> FlStatus {
    guarded(|| {
        let structure = arg!(structure);
        out!(out);
        store(
            out,
            FlForm {
                inner: g2::star_psi(&structure.inner),
            },
        )
    })
}

/// Norm of d(psi) - lambda *psi for the lift of a validated structure,
/// where the time derivative of phi enters the product-space derivative.
/// Passing null for phi_dot means a static lift (derivative zero).
#[no_mangle]
pub unsafe extern "C" fn fl_nearly_parallel_residual(
    algebra: *const FlAlgebra,
    structure: *const FlStructure,
    phi_dot: *const FlForm,
    lambda: f64,
    out: *mut f64,
) -> FlStatus {
    guarded(|| {
        let algebra = arg!(algebra);
        let structure = arg!(structure);
        out!(out);
        let zero;
        let phi_dot = match unsafe { phi_dot.as_ref() } {
            Some(handle) => &handle.inner,
            None => {
                zero = Form::zero(6, 3).expect("valid shape");
                &zero
            }
        };
        match g2::nearly_parallel_residual(&algebra.inner, &structure.inner, phi_dot, lambda) {
            Ok(residual) => {
                *out = residual;
                FlStatus::Ok
            }
            Err(e) => fail(FlStatus::ShapeError, e),
        }
    })
}

/// The standard structure on the product of two 3-spheres whose defining
/// equations close with torsion constants 3 and -2, as fresh algebra and
/// structure handles.
#[no_mangle]
pub unsafe extern "C" fn fl_nearly_kahler_su2su2(
    out_algebra: *mut *mut FlAlgebra,
    out_structure: *mut *mut FlStructure,
) -> FlStatus {
    guarded(|| {
        out!(out_algebra);
        out!(out_structure);
        let (algebra, structure) = solutions::nearly_kahler_su2su2();
        store(out_algebra, FlAlgebra { inner: algebra });
        store(out_structure, FlStructure { inner: structure })
    })
}

/// Integrates an evolution equation with a fixed-step fourth-order scheme
/// from (t_start, phi) to t_end, recording a point every monitor_every
/// accepted steps. In nearly-parallel mode lambda must be nonzero and
/// sigma is ignored (pass null); in half-flat mode sigma is required
/// independent state and lambda is ignored. A trajectory is returned even
/// when integration stops early; inspect fl_trajectory_termination.
#[no_mangle]
pub unsafe extern "C" fn fl_evolve(
    algebra: *const FlAlgebra,
    phi: *const FlForm,
    sigma: *const FlForm,
    mode: FlFlowMode,
    lambda: f64,
    t_start: f64,
    t_end: f64,
    step: f64,
    monitor_every: usize,
    out: *mut *mut FlTrajectory,
) -> FlStatus {
    guarded(|| {
        let algebra = arg!(algebra);
        let phi = arg!(phi);
        out!(out);
        let state = FlowState {
            t: t_start,
            phi: phi.inner.clone(),
            sigma: unsafe { sigma.as_ref() }.map(|handle| handle.inner.clone()),
        };
        let config = FlowConfig {
            lambda,
            step,
            t_end,
            mode: match mode {
                FlFlowMode::NearlyParallel => FlowMode::NearlyParallel,
                FlFlowMode::HalfFlat => FlowMode::HalfFlat,
            },
            monitor_every,
        };
        match flow::integrate(&algebra.inner, &state, &config) {
            Ok(inner) => store(out, FlTrajectory { inner }),
            Err(e) => fail(flow_status(&e), e),
        }
    })
}

/// Number of recorded points; at least 1 for any returned trajectory.
#[no_mangle]
pub unsafe extern "C" fn fl_trajectory_length(
    trajectory: *const FlTrajectory,
    out: *mut usize,
) -> FlStatus {
    guarded(|| {
        let trajectory = arg!(trajectory);
        out!(out);
        *out = trajectory.inner.points().len();
        FlStatus::Ok
    })
}

/// Why the integration stopped.
#[no_mangle]
pub unsafe extern "C" fn fl_trajectory_termination(
    trajectory: *const FlTrajectory,
    out: *mut FlTermination,
) -> FlStatus {
    guarded(|| {
        let trajectory = arg!(trajectory);
        out!(out);
        *out = match trajectory.inner.termination() {
            Termination::Completed => FlTermination::Completed,
            Termination::StabilityLost => FlTermination::StabilityLost,
            Termination::StepUnderflow => FlTermination::StepUnderflow,
        };
        FlStatus::Ok
    })
}

fn trajectory_point(
    trajectory: &Trajectory,
    index: usize,
) -> Result<&flow::TrajectoryPoint, FlStatus> {
    trajectory.points().get(index).ok_or_else(|| {
        fail(
            FlStatus::OutOfRange,
            format!(
                "index {index} out of range (length {})",
                trajectory.points().len()
            ),
        )
    })
}

/// Time of the recorded point at an index.
#[no_mangle]
pub unsafe extern "C" fn fl_trajectory_time(
    trajectory: *const FlTrajectory,
    index: usize,
    out: *mut f64,
) -> FlStatus {
    guarded(|| {
        let trajectory = arg!(trajectory);
        out!(out);
        match trajectory_point(&trajectory.inner, index) {
            Ok(point) => {
                *out = point.state.t;
                FlStatus::Ok
            }
            Err(status) => status,
        }
    })
}

/// The 3-form state of the recorded point at an index, as a new handle.
#[no_mangle]
pub unsafe extern "C" fn fl_trajectory_phi(
    trajectory: *const FlTrajectory,
    index: usize,
    out: *mut *mut FlForm,
) -> FlStatus {
    guarded(|| {
        let trajectory = arg!(trajectory);
        out!(out);
        match trajectory_point(&trajectory.inner, index) {
            Ok(point) => store(
                out,
                FlForm {
                    inner: point.state.phi.clone(),
                },
            ),
            Err(status) => status,
        }
    })
}

/// The 4-form state of the recorded point at an index, as a new handle,
/// or null when the mode carries no independent 4-form.
#[no_mangle]
pub unsafe extern "C" fn fl_trajectory_sigma(
    trajectory: *const FlTrajectory,
    index: usize,
    out: *mut *mut FlForm,
) -> FlStatus {
    guarded(|| {
        let trajectory = arg!(trajectory);
        out!(out);
        match trajectory_point(&trajectory.inner, index) {
            Ok(point) => match &point.state.sigma {
                Some(sigma) => store(
                    out,
                    FlForm {
                        inner: sigma.clone(),
                    },
                ),
                None => {
                    *out = std::ptr::null_mut();
                    FlStatus::Ok
                }
            },
            Err(status) => status,
        }
    })
}

/// Diagnostics of the recorded point at an index.
#[no_mangle]
pub unsafe extern "C" fn fl_trajectory_diagnostics(
    trajectory: *const FlTrajectory,
    index: usize,
    out: *mut FlDiagnostics,
) -> FlStatus {
    guarded(|| {
        let trajectory = arg!(trajectory);
        out!(out);
        match trajectory_point(&trajectory.inner, index) {
            Ok(point) => {
                let d = point.diagnostics;
                *out = FlDiagnostics {
                    c1: d.c1,
                    c2: d.c2,
                    c3: d.c3,
                    eps_phi: d.eps_phi,
                    hamiltonian: d.hamiltonian.unwrap_or(f64::NAN),
                    has_hamiltonian: d.hamiltonian.is_some(),
                };
                FlStatus::Ok
            }
            Err(status) => status,
        }
    })
}
