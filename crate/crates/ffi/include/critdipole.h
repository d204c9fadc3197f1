#ifndef CRITDIPOLE_H
#define CRITDIPOLE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CdStatus {
  CD_STATUS_OK = 0,
  CD_STATUS_INVALID_ARGUMENT = 1,
  CD_STATUS_NUMERICAL = 2,
  CD_STATUS_INCONCLUSIVE = 3,
  CD_STATUS_NULL_POINTER = 4,
  CD_STATUS_PANIC = 5,
} CdStatus;

typedef enum CdGridKind {
  CD_GRID_KIND_UNIFORM = 0,
  CD_GRID_KIND_LOGARITHMIC = 1,
} CdGridKind;

// Physical constants in SI.
typedef struct CdConstants CdConstants;

// Energies (hartree) and node counts of the lowest states.
typedef struct CdSpectrum CdSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *cd_version(void);

// Copies the calling thread's last error message into `buf` (truncated and
// NUL-terminated) and returns the full message length, excluding the NUL.
// Returns 0 when there is no message.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
size_t cd_last_error_message(char *buf, size_t len);

// CODATA 2018 constants. Never returns null.
struct CdConstants *cd_constants_codata2018(void);

// Custom constants (SI); rejects non-positive or non-finite values.
//
// # Safety
// `out` must be valid for writing a pointer.
enum CdStatus cd_constants_new(double hbar,
                               double m_electron,
                               double q_electron,
                               double epsilon0,
                               struct CdConstants **out);

// # Safety
// `c` must be null or a handle from this library, not yet freed.
void cd_constants_free(struct CdConstants *c);

// Closed-form critical dipole moment πε₀ħ²/(2qm) in C·m.
//
// # Safety
// `c` must be a live handle and `out` writable.
enum CdStatus cd_p_crit_exact_si(const struct CdConstants *c, double *out);

// Ratio of the ionization estimate to the exact critical moment.
//
// # Safety
// `c` must be a live handle and `out` writable.
enum CdStatus cd_estimate_ratio(const struct CdConstants *c, double *out);

// Dimensionless coupling α for a dipole moment given in C·m.
//
// # Safety
// `c` must be a live handle and `out` writable.
enum CdStatus cd_alpha_from_p_si(const struct CdConstants *c, double p_si, double *out);

// Zero-energy node count of the inverse-square problem on (delta, length).
//
// # Safety
// `out` must be writable.
enum CdStatus cd_zero_energy_node_count(double alpha, double delta, double length, size_t *out);

// Bisects for the first zero-energy node on (delta, length).
//
// # Safety
// `alpha_out` and `half_width_out` must be writable.
enum CdStatus cd_find_alpha_crit(double delta,
                                 double length,
                                 double tol_alpha,
                                 double *alpha_out,
                                 double *half_width_out);

// Evaluates the Frobenius series with `n_terms` terms and a₀ = 1 at y > 0.
//
// # Safety
// `re_out` and `im_out` must be writable.
enum CdStatus cd_series_eval(double alpha,
                             double xi,
                             double nu_re,
                             double nu_im,
                             size_t n_terms,
                             double y,
                             double *re_out,
                             double *im_out);

// Dirichlet hydrogen spectrum on the default logarithmic grid.
//
// # Safety
// `out` must be valid for writing a pointer.
enum CdStatus cd_hydrogen_spectrum(double lambda,
                                   size_t n_states,
                                   size_t refine_levels,
                                   struct CdSpectrum **out);

// Lowest `n_states` of a potential given as a `key=value` record such as
// `"kind=coulomb lambda=1"`, on a grid with `n` points over [x_min, x_max].
//
// # Safety
// `record` must be a NUL-terminated string and `out` valid for writing a
// pointer.
enum CdStatus cd_spectrum_from_record(const char *record,
                                      enum CdGridKind grid,
                                      double x_min,
                                      double x_max,
                                      size_t n,
                                      size_t n_states,
                                      struct CdSpectrum **out);

// Number of states held. Returns 0 for a null handle.
//
// # Safety
// `s` must be null or a live handle.
size_t cd_spectrum_len(const struct CdSpectrum *s);

// Energy (hartree) and node count of state `k`.
//
// # Safety
// `s` must be a live handle; `energy_out` and `nodes_out` writable.
enum CdStatus cd_spectrum_state(const struct CdSpectrum *s,
                                size_t k,
                                double *energy_out,
                                size_t *nodes_out);

// # Safety
// `s` must be null or a handle from this library, not yet freed.
void cd_spectrum_free(struct CdSpectrum *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CRITDIPOLE_H */
