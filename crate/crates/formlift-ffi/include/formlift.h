/* C interface to formlift: stable-form calculus on 6- and 7-dimensional spaces. */

#ifndef FORMLIFT_H
#define FORMLIFT_H

/* Generated by cbindgen from the formlift-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Default tolerance for stability classification (mirrors the library).
#define FL_DEFAULT_STABILITY_TOL 1e-10

// Default tolerance for structure validation (mirrors the library).
#define FL_DEFAULT_VALIDATE_TOL 1e-8

// Result of every fallible call in this API.
enum FlStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  // The call succeeded and all out-pointers were written.
  FL_STATUS_OK = 0,
  // A required pointer argument was null.
  FL_STATUS_NULL_ARGUMENT = 1,
  // A text argument was not valid UTF-8.
  FL_STATUS_INVALID_UTF8 = 2,
  // Text input (JSON or a structure-constant string) was rejected.
  FL_STATUS_PARSE_ERROR = 3,
  // A form had the wrong dimension or degree for the operation.
  FL_STATUS_SHAPE_ERROR = 4,
  // A form was outside the open set of stable forms.
  FL_STATUS_NOT_STABLE = 5,
  // The forms are individually stable but fail a compatibility equation.
  FL_STATUS_VALIDATION_FAILED = 6,
  // A numeric or mode parameter was out of range for the operation.
  FL_STATUS_BAD_CONFIG = 7,
  // An index or buffer length did not match the object.
  FL_STATUS_OUT_OF_RANGE = 8,
  // An internal invariant failed; report this as a bug.
  FL_STATUS_INTERNAL = 9,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum FlStatus FlStatus;
#else
typedef int32_t FlStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

// Stability class of a form under the natural group action.
enum FlStableClass
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  // Not stable at the requested tolerance.
  FL_STABLE_CLASS_NOT_STABLE = 0,
  // Nondegenerate 2-form.
  FL_STABLE_CLASS_SYMPLECTIC2 = 1,
  // Stable 3-form with negative discriminant; induces a complex structure.
  FL_STABLE_CLASS_POSITIVE3 = 2,
  // Stable 3-form with positive discriminant.
  FL_STABLE_CLASS_NEGATIVE_DISCRIMINANT3 = 3,
  // Stable 4-form.
  FL_STABLE_CLASS_STABLE4 = 4,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum FlStableClass FlStableClass;
#else
typedef int32_t FlStableClass;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

// Intrinsic torsion class of a validated structure on a given algebra.
enum FlTorsionTag
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  // None of the recognized classes hold at the tolerance.
  FL_TORSION_TAG_UNCLASSIFIED = 0,
  // d(omega) = 3 phi and d(phihat) + 2 omega^2 = 0.
  FL_TORSION_TAG_NEARLY_KAEHLER = 1,
  // d(phi) = 0 and d(omega^2) = 0.
  FL_TORSION_TAG_HALF_FLAT = 2,
  // d(phi) + lambda omega^2 = 0 with nonzero fitted lambda; the fitted
  // value is reported in the residuals and the 7-dimensional constant
  // is twice it.
  FL_TORSION_TAG_NEARLY_HALF_FLAT = 3,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum FlTorsionTag FlTorsionTag;
#else
typedef int32_t FlTorsionTag;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

// Which evolution equation to integrate.
enum FlFlowMode
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  // d(psi) = lambda *psi along the lift; phi is the only state.
  FL_FLOW_MODE_NEARLY_PARALLEL = 0,
  // Closed-form evolution with sigma as independent state.
  FL_FLOW_MODE_HALF_FLAT = 1,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum FlFlowMode FlFlowMode;
#else
typedef int32_t FlFlowMode;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

// Why integration stopped.
enum FlTermination
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  // Reached the requested end time.
  FL_TERMINATION_COMPLETED = 0,
  // A step left the stable set; the trajectory holds every good state.
  FL_TERMINATION_STABILITY_LOST = 1,
  // The step size could no longer advance the time in floating point.
  FL_TERMINATION_STEP_UNDERFLOW = 2,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum FlTermination FlTermination;
#else
typedef int32_t FlTermination;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

// Opaque handle to a 6-dimensional Lie algebra given by structure constants.
typedef struct FlAlgebra FlAlgebra;

// Opaque handle to an exterior form of fixed dimension and degree.
typedef struct FlForm FlForm;

// Opaque handle to a validated structure pair (omega, phi) with its
// derived metric, dual 3-form, and volume.
typedef struct FlStructure FlStructure;

// Opaque handle to the recorded points of one integration run.
typedef struct FlTrajectory FlTrajectory;

// Residual norms of every torsion-class defining equation, reported
// regardless of the accepted tag so callers can inspect near-misses.
typedef struct {
  // Norm of d(omega) - 3 phi.
  double nearly_kaehler_domega;
  // Norm of d(phihat) + 2 omega^2.
  double nearly_kaehler_dphihat;
  // Norm of d(phi).
  double half_flat_dphi;
  // Norm of d(omega^2).
  double half_flat_domega2;
  // Norm of d(phi) + lambda_fit omega^2.
  double nearly_half_flat;
  // Least-squares lambda in the d(phi) + lambda omega^2 = 0 normalization.
  double lambda_fit;
  // Size factor the residuals were compared against (tol times scale).
  double scale;
} FlTorsionResiduals;

// Constraint residuals and recorded quantities at one trajectory point.
typedef struct {
  // Norm of d(phi) + (lambda/2) omega^2 (lambda = 0 in half-flat mode).
  double c1;
  // Norm of omega wedge phi.
  double c2;
  // Absolute difference of the two volume functionals.
  double c3;
  // Volume functional of phi at this state.
  double eps_phi;
  // Flow energy; meaningful only when has_hamiltonian is true.
  double hamiltonian;
  // Whether the hamiltonian field was recorded at this point.
  bool has_hamiltonian;
} FlDiagnostics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version of the underlying library as a static NUL-terminated string.
// The pointer is valid for the life of the program; do not free it.
const char *fl_version(void);

// Description of the most recent failure on the calling thread, or an
// empty string if nothing failed yet. Valid until the next failing call
// on the same thread; do not free it.
const char *fl_last_error_message(void);

// Releases a string returned by this API. Null is ignored.
void fl_string_free(char *text);

// Releases a form handle. Null is ignored.
void fl_form_free(FlForm *form);

// Releases an algebra handle. Null is ignored.
void fl_algebra_free(FlAlgebra *algebra);

// Releases a structure handle. Null is ignored.
void fl_structure_free(FlStructure *structure);

// Releases a trajectory handle. Null is ignored.
void fl_trajectory_free(FlTrajectory *trajectory);

// Parses a form from its JSON document, a string of the shape
// {"dimension": 6, "degree": 3, "terms": [{"indices": [1,2,3], "coeff": 1.0}]}.
FlStatus fl_form_parse_json(const char *text, FlForm **out);

// Serializes a form to its JSON document. The caller owns the returned
// string and must release it with fl_string_free.
FlStatus fl_form_to_json(const FlForm *form, char **out);

// Builds a form from a dense coefficient buffer. Coefficients are indexed
// by the strictly increasing index tuples of the degree in lexicographic
// order, and length must equal binomial(dimension, degree).
FlStatus fl_form_from_coefficients(size_t dimension,
                                   size_t degree,
                                   const double *coefficients,
                                   size_t length,
                                   FlForm **out);

// Dimension of the underlying space.
FlStatus fl_form_dimension(const FlForm *form, size_t *out);

// Degree of the form.
FlStatus fl_form_degree(const FlForm *form, size_t *out);

// Number of coefficients, binomial(dimension, degree).
FlStatus fl_form_coefficient_count(const FlForm *form, size_t *out);

// Copies the coefficients into the caller's buffer, ordered as in
// fl_form_from_coefficients. The length must match exactly.
FlStatus fl_form_coefficients(const FlForm *form, double *buffer, size_t length);

// Euclidean coefficient norm of the form.
FlStatus fl_form_norm(const FlForm *form, double *out);

// The form scaled by a constant, as a new handle.
FlStatus fl_form_scaled(const FlForm *form, double scale, FlForm **out);

// Wedge product of two forms over the same space.
FlStatus fl_wedge(const FlForm *left, const FlForm *right, FlForm **out);

// Classifies a 6-dimensional form of degree 2, 3, or 4 by stability,
// treating discriminants within the tolerance of zero as degenerate.
FlStatus fl_classify(const FlForm *form, double tolerance, FlStableClass *out);

// Volume functional of a stable form, as the coefficient of the oriented
// basis volume.
FlStatus fl_epsilon(const FlForm *form, double *out);

// Derivative of the volume functional: the unique form with
// d/ds epsilon(rho + s tau) = pairing(hat(rho), tau) at s = 0.
FlStatus fl_hat(const FlForm *form, FlForm **out);

// Parses a 6-dimensional algebra from a structure-constant string such as
// "(0,0,0,0,12,13)". The table must satisfy the Jacobi identity.
FlStatus fl_algebra_parse_salamon(const char *text, FlAlgebra **out);

// Parses an algebra from its JSON document, which carries either a
// structure-constant string or an explicit differential table.
FlStatus fl_algebra_parse_json(const char *text, FlAlgebra **out);

// Canonical structure-constant string of the algebra. The caller owns the
// returned string and must release it with fl_string_free.
FlStatus fl_algebra_to_salamon(const FlAlgebra *algebra, char **out);

// Serializes the algebra to its JSON document. The caller owns the
// returned string and must release it with fl_string_free.
FlStatus fl_algebra_to_json(const FlAlgebra *algebra, char **out);

// Dimension of the algebra.
FlStatus fl_algebra_dimension(const FlAlgebra *algebra, size_t *out);

// Exterior derivative of a left-invariant form in the algebra's model.
FlStatus fl_algebra_differential(const FlAlgebra *algebra, const FlForm *form, FlForm **out);

// Validates a pair (omega, phi) as a compatible normalized structure:
// both stable, positivity of the induced metric, omega wedge phi = 0, and
// matching volume functionals, all at the given tolerance.
FlStatus fl_su3_validate(const FlForm *omega,
                         const FlForm *phi,
                         double tolerance,
                         FlStructure **out);

// The 2-form of a validated structure, as a new handle.
FlStatus fl_structure_omega(const FlStructure *structure, FlForm **out);

// The 3-form of a validated structure, as a new handle.
FlStatus fl_structure_phi(const FlStructure *structure, FlForm **out);

// The dual 3-form of a validated structure, as a new handle.
FlStatus fl_structure_phihat(const FlStructure *structure, FlForm **out);

// Volume functional shared by the two forms of a validated structure.
FlStatus fl_structure_epsilon(const FlStructure *structure, double *out);

// Classifies the intrinsic torsion of a validated structure over an
// algebra, writing the accepted tag and the residuals of every defining
// equation. When the tag is nearly half-flat, the lambda_fit residual
// field carries the defining constant (the 7-dimensional constant is
// twice it).
FlStatus fl_torsion_classify(const FlAlgebra *algebra,
                             const FlStructure *structure,
                             double tolerance,
                             FlTorsionTag *out_tag,
                             FlTorsionResiduals *out_residuals);

// The 2-form pi(phi) obtained by rescaling d(phi) to a stable 4-form and
// taking its dual 2-form; defined only where d(phi) rescales into the
// stable set. lambda fixes the rescaling and must be nonzero.
FlStatus fl_pi_map(const FlAlgebra *algebra, const FlForm *phi, double lambda, FlForm **out);

// The product-space 3-form omega wedge dt + phi, on the 7-dimensional
// space with dt as the last covector.
FlStatus fl_lift(const FlForm *omega, const FlForm *phi, FlForm **out);

// Splits a product-space 3-form into its factor components (omega, phi).
FlStatus fl_split(const FlForm *psi, FlForm **out_omega, FlForm **out_phi);

// Hodge dual of the lifted 3-form for the product metric of a validated
// structure: minus phihat wedge dt minus half omega squared.
FlStatus fl_star_psi(const FlStructure *structure, FlForm **out);

// Norm of d(psi) - lambda *psi for the lift of a validated structure,
// where the time derivative of phi enters the product-space derivative.
// Passing null for phi_dot means a static lift (derivative zero).
FlStatus fl_nearly_parallel_residual(const FlAlgebra *algebra,
                                     const FlStructure *structure,
                                     const FlForm *phi_dot,
                                     double lambda,
                                     double *out);

// The standard structure on the product of two 3-spheres whose defining
// equations close with torsion constants 3 and -2, as fresh algebra and
// structure handles.
FlStatus fl_nearly_kahler_su2su2(FlAlgebra **out_algebra, FlStructure **out_structure);

// Integrates an evolution equation with a fixed-step fourth-order scheme
// from (t_start, phi) to t_end, recording a point every monitor_every
// accepted steps. In nearly-parallel mode lambda must be nonzero and
// sigma is ignored (pass null); in half-flat mode sigma is required
// independent state and lambda is ignored. A trajectory is returned even
// when integration stops early; inspect fl_trajectory_termination.
FlStatus fl_evolve(const FlAlgebra *algebra,
                   const FlForm *phi,
                   const FlForm *sigma,
                   FlFlowMode mode,
                   double lambda,
                   double t_start,
                   double t_end,
                   double step,
                   size_t monitor_every,
                   FlTrajectory **out);

// Number of recorded points; at least 1 for any returned trajectory.
FlStatus fl_trajectory_length(const FlTrajectory *trajectory, size_t *out);

// Why the integration stopped.
FlStatus fl_trajectory_termination(const FlTrajectory *trajectory, FlTermination *out);

// Time of the recorded point at an index.
FlStatus fl_trajectory_time(const FlTrajectory *trajectory, size_t index, double *out);

// The 3-form state of the recorded point at an index, as a new handle.
FlStatus fl_trajectory_phi(const FlTrajectory *trajectory, size_t index, FlForm **out);

// The 4-form state of the recorded point at an index, as a new handle,
// or null when the mode carries no independent 4-form.
FlStatus fl_trajectory_sigma(const FlTrajectory *trajectory, size_t index, FlForm **out);

// Diagnostics of the recorded point at an index.
FlStatus fl_trajectory_diagnostics(const FlTrajectory *trajectory,
                                   size_t index,
                                   FlDiagnostics *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FORMLIFT_H */
