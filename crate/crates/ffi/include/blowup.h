#ifndef BLOWUP_H
#define BLOWUP_H

/* Generated by cbindgen from blowup-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Expansion regime selecting which correction terms the reduced landscape
// keeps.
typedef enum BlowupRegime {
  // Any coupling, dimensions three through six.
  BLOWUP_REGIME_GENERIC36 = 0,
  // Geometric coupling, dimensions three through nine.
  BLOWUP_REGIME_GEOMETRIC39 = 1,
  // Locally conformally flat with vanishing Weyl term, all dimensions.
  BLOWUP_REGIME_LCF_ALL_DIM = 2,
  // Dimension ten with the squared-Weyl competition term.
  BLOWUP_REGIME_DIM10_WEYL = 3,
  // Dimension six with a positive coupling excess.
  BLOWUP_REGIME_DIM6_POSITIVE = 4,
} BlowupRegime;

// Result of every call in this interface.
typedef enum BlowupStatus {
  // The call succeeded and all out-parameters are filled.
  BLOWUP_STATUS_OK = 0,
  // A required pointer argument was null.
  BLOWUP_STATUS_NULL_ARGUMENT = 1,
  // A scalar argument was out of range for the operation.
  BLOWUP_STATUS_INVALID_ARGUMENT = 2,
  // The operation is not defined for this manifold or regime.
  BLOWUP_STATUS_UNSUPPORTED = 3,
  // Quadrature or fitting failed to reach its tolerance.
  BLOWUP_STATUS_NUMERICAL_FAILURE = 4,
  // The provided buffer is too small; the required length is reported.
  BLOWUP_STATUS_BUFFER_TOO_SMALL = 5,
  // The reduced landscape has no interior minimum for these data.
  BLOWUP_STATUS_NO_INTERIOR_MINIMUM = 6,
} BlowupStatus;

// Opaque model manifold handle.
typedef struct BlowupManifold BlowupManifold;

// One Laplace eigenvalue with its mode pair: circle mode `i` (always zero
// on the sphere) and sphere-factor mode `j`.
typedef struct BlowupEigenvalue {
  double value;
  uint32_t circle_mode;
  uint32_t sphere_mode;
} BlowupEigenvalue;

// Outcome of the constant-solution degeneracy scan.
typedef struct BlowupVerdict {
  // The tested value `Scal / (n-1)`.
  double target;
  // Nearest Laplace eigenvalue to the target.
  struct BlowupEigenvalue nearest;
  // Distance from the target to that eigenvalue.
  double distance;
  // True when the distance clears the tolerance.
  bool nondegenerate;
} BlowupVerdict;

// Closed-form expansion coefficients of the reduced energy, in the order
// they enter `c1 + c2 eps + c3 eps ln eps + eps (c4 ln(1/t) + c5 Phi
// t^{(n-2)/2})`.
typedef struct BlowupCoefficients {
  size_t n;
  // Constant coupling the coefficients were computed for.
  double coupling;
  // Constant background solution of the critical equation.
  double background;
  double volume;
  double energy_constant;
  double epsilon_coefficient;
  double epsilon_log_coefficient;
  double scale_log_coefficient;
  double interaction_coefficient;
  // Logarithmic bubble moment entering the epsilon coefficient.
  double beta;
  // Squared-Weyl correction coefficient; zero below dimension seven.
  double weyl_coefficient;
  // False in dimension four, where the bracket factor is undefined and
  // `coupling_correction_factor` holds zero.
  bool has_coupling_correction;
  double coupling_correction_factor;
} BlowupCoefficients;

// Pointwise data of the reduced landscape at a candidate blow-up point.
typedef struct BlowupPointData {
  // Background solution value at the point.
  double u0;
  // Coupling value at the point.
  double h;
  // Scalar curvature at the point.
  double scal;
  // Squared Weyl norm at the point.
  double weyl2;
} BlowupPointData;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static nul-terminated string; do not free.
const char *blowup_version(void);

// Static nul-terminated name of a status code; do not free.
const char *blowup_status_name(enum BlowupStatus status);

// Creates the round sphere of dimension `n`.
//
// # Safety
// `out` must be a valid pointer; the returned handle must be released with
// [`blowup_manifold_free`].
enum BlowupStatus blowup_sphere_create(size_t n, struct BlowupManifold **out);

// Creates the product of a circle of radius `r` with a unit sphere; `n` is
// the total dimension.
//
// # Safety
// `out` must be a valid pointer; the returned handle must be released with
// [`blowup_manifold_free`].
enum BlowupStatus blowup_product_create(size_t n, double r, struct BlowupManifold **out);

// Releases a manifold handle. Null is accepted and ignored.
//
// # Safety
// `m` must be a handle previously returned by a `*_create` call, not yet
// freed, or null.
void blowup_manifold_free(struct BlowupManifold *m);

// Dimension of the manifold.
//
// # Safety
// `m` must be a live handle and `out` a valid pointer.
enum BlowupStatus blowup_manifold_dim(const struct BlowupManifold *m, size_t *out);

// Riemannian volume of the manifold.
//
// # Safety
// `m` must be a live handle and `out` a valid pointer.
enum BlowupStatus blowup_manifold_volume(const struct BlowupManifold *m, double *out);

// Scalar curvature of the manifold (constant on both model families).
//
// # Safety
// `m` must be a live handle and `out` a valid pointer.
enum BlowupStatus blowup_manifold_scalar_curvature(const struct BlowupManifold *m, double *out);

// Fills `buf` with every Laplace eigenvalue strictly below `cutoff`,
// ordered increasingly, and stores the total count in `out_len`. Whenever
// `capacity` cannot hold a nonempty spectrum the call writes no values and
// returns [`BlowupStatus::BufferTooSmall`]; calling with `capacity` zero
// (and `buf` possibly null) is the intended way to query the count first.
//
// # Safety
// `m` must be a live handle, `out_len` a valid pointer, and `buf` valid
// for `capacity` elements when `capacity` is nonzero.
enum BlowupStatus blowup_spectrum_below(const struct BlowupManifold *m,
                                        double cutoff,
                                        struct BlowupEigenvalue *buf,
                                        size_t capacity,
                                        size_t *out_len);

// Fills `buf` with the circle radii `i / sqrt(n-2)`, `i = 1..=i_max`, at
// which the product manifold of total dimension `n` is degenerate. Buffer
// semantics match [`blowup_spectrum_below`].
//
// # Safety
// `out_len` must be a valid pointer and `buf` valid for `capacity`
// elements when `capacity` is nonzero.
enum BlowupStatus blowup_degenerate_radii(size_t n,
                                          uint32_t i_max,
                                          double *buf,
                                          size_t capacity,
                                          size_t *out_len);

// Runs the constant-solution degeneracy scan with tolerance `tol`.
//
// # Safety
// `m` must be a live handle and `out` a valid pointer.
enum BlowupStatus blowup_nondegeneracy_scan(const struct BlowupManifold *m,
                                            double tol,
                                            struct BlowupVerdict *out);

// Computes the closed-form expansion coefficients. With
// `use_geometric_coupling` true the `coupling` argument is ignored and the
// conformally natural value is used.
//
// # Safety
// `m` must be a live handle and `out` a valid pointer.
enum BlowupStatus blowup_coefficients(const struct BlowupManifold *m,
                                      bool use_geometric_coupling,
                                      double coupling,
                                      struct BlowupCoefficients *out);

// Closed-form optimal concentration scale for the given pointwise data.
// `out_interior` reports whether the landscape has an interior minimum at
// all; when false, `out_t` is set to zero and the status is still
// [`BlowupStatus::Ok`].
//
// # Safety
// `coeffs`, `out_t` and `out_interior` must be valid pointers.
enum BlowupStatus blowup_optimal_scale(const struct BlowupCoefficients *coeffs,
                                       struct BlowupPointData data,
                                       enum BlowupRegime regime,
                                       double *out_t,
                                       bool *out_interior);

// Closed-form reduced energy at scale `t` and subcritical shift `eps`.
//
// # Safety
// `coeffs` and `out` must be valid pointers.
enum BlowupStatus blowup_reduced_energy(const struct BlowupCoefficients *coeffs,
                                        struct BlowupPointData data,
                                        enum BlowupRegime regime,
                                        double t,
                                        double eps,
                                        double *out);

// Full quadrature energy of the glued bubble-plus-background ansatz at
// scale `t` and subcritical shift `eps`, with the geometric coupling and
// the default cutoff.
//
// # Safety
// `m` must be a live handle and `out` a valid pointer.
enum BlowupStatus blowup_energy_value(const struct BlowupManifold *m,
                                      double eps,
                                      double t,
                                      double *out);

// Critical-norm equation residual of the same ansatz as
// [`blowup_energy_value`].
//
// # Safety
// `m` must be a live handle and `out` a valid pointer.
enum BlowupStatus blowup_residual_norm(const struct BlowupManifold *m,
                                       double eps,
                                       double t,
                                       double *out);

// Value of the flat bubble profile of width `delta` in dimension `n` at
// chart radius `rho`.
//
// # Safety
// `out` must be a valid pointer.
enum BlowupStatus blowup_bubble_value(size_t n, double delta, double rho, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* BLOWUP_H */
