#ifndef PHARMONIC_H
#define PHARMONIC_H

/* Generated by cbindgen from the pharmonic-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Phase regime of an annulus pair.
 */
typedef enum PhRegime {
  PH_REGIME_HOMEOMORPHIC = 0,
  PH_REGIME_COLLAPSED = 1,
  PH_REGIME_NO_MINIMIZER = 2,
} PhRegime;

/**
 * Status code returned by every ABI function.
 */
typedef enum PhStatus {
  PH_STATUS_OK = 0,
  /**
   * A parameter is outside its documented domain.
   */
  PH_STATUS_INVALID_ARGUMENT = 1,
  /**
   * The instance has no minimizer (p = 1, target too thick).
   */
  PH_STATUS_NO_MINIMIZER = 2,
  /**
   * The query applies to a different phase regime.
   */
  PH_STATUS_REGIME_MISMATCH = 3,
  /**
   * A required pointer was null.
   */
  PH_STATUS_NULL_POINTER = 4,
  /**
   * Internal numerical failure.
   */
  PH_STATUS_INTERNAL_ERROR = 5,
} PhStatus;

/**
 * The free-boundary construction at one parameter value (opaque).
 */
typedef struct PhEpsMap PhEpsMap;

/**
 * A solved radial minimizer (opaque).
 */
typedef struct PhMinimizer PhMinimizer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *ph_status_message(enum PhStatus status);

/**
 * Classify the annulus pair `A(r, R) -> A(r_star, R_star)` at exponent `p`.
 *
 * `out_collapse_radius` receives the normalized collapse radius in the
 * collapsed regime and NaN otherwise; it may be null when not wanted.
 */
enum PhStatus ph_classify(double p,
                          double r,
                          double big_r,
                          double r_star,
                          double big_r_star,
                          enum PhRegime *out_regime,
                          double *out_collapse_radius);

/**
 * The critical modulus `m_p(x)` for a finite ratio `x >= 1`; the result may
 * be `+inf` when `p = 1` diverges, reported as the C infinity.
 */
enum PhStatus ph_modulus(double p, double x, double *out);

/**
 * Inverse critical modulus `m_p^{-1}(y)` for `y >= 1`.
 */
enum PhStatus ph_modulus_inverse(double p, double y, double *out);

/**
 * Closed-form identity energy `2^{p/2} pi (1 - r^2)` on `A(r, 1)`.
 */
enum PhStatus ph_identity_energy(double p, double r, double *out);

/**
 * Solve the minimizing radial profile on the normalized instance
 * `A(r, 1) -> A(r_star, 1)`; the handle must be released with
 * `ph_minimizer_free`.
 */
enum PhStatus ph_minimizer_solve(double p, double r, double r_star, struct PhMinimizer **out);

/**
 * Release a minimizer handle; null is accepted and ignored.
 */
void ph_minimizer_free(struct PhMinimizer *h);

/**
 * Energy of the solved minimizer.
 */
enum PhStatus ph_minimizer_energy(const struct PhMinimizer *h, double *out);

/**
 * Phase regime of the solved minimizer.
 */
enum PhStatus ph_minimizer_regime(const struct PhMinimizer *h, enum PhRegime *out);

/**
 * Collapse radius of a collapsed minimizer; `PH_STATUS_REGIME_MISMATCH`
 * in the homeomorphic regime.
 */
enum PhStatus ph_minimizer_collapse_radius(const struct PhMinimizer *h, double *out);

/**
 * Profile value `H0(s)` of the solved minimizer.
 */
enum PhStatus ph_minimizer_eval(const struct PhMinimizer *h, double s, double *out);

/**
 * Build the free-boundary construction at parameter `eps` in (0, 1/4);
 * release with `ph_eps_map_free`.
 */
enum PhStatus ph_eps_map_new(double eps, struct PhEpsMap **out);

/**
 * Release an eps-map handle; null is accepted and ignored.
 */
void ph_eps_map_free(struct PhEpsMap *h);

/**
 * Image of the point `s e^{i theta}` in target polar coordinates.
 */
enum PhStatus ph_eps_map_eval(const struct PhEpsMap *h,
                              double s,
                              double theta,
                              double *out_rho,
                              double *out_alpha);

/**
 * The simplified energy `e` and the full energy `E_1` of the construction,
 * by tensor quadrature with `panels` subdivisions per smooth cell.
 */
enum PhStatus ph_eps_map_energies(const struct PhEpsMap *h,
                                  uintptr_t panels,
                                  double *out_e,
                                  double *out_e1);

/**
 * Curve energy `B` of a closed polygon given as `n` interleaved (x, y)
 * vertex coordinates in the closed unit disk, evaluated at `quad_points`
 * parameter samples (at least `n`).
 */
enum PhStatus ph_curve_b_energy(const double *xy, uintptr_t n, uintptr_t quad_points, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* PHARMONIC_H */
