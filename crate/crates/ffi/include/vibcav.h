#ifndef VIBCAV_H
#define VIBCAV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VibcavModel {
  VIBCAV_MODEL_FULL = 0,
  VIBCAV_MODEL_RWA = 1,
} VibcavModel;

typedef enum VibcavPolarization {
  VIBCAV_POLARIZATION_S = 0,
  VIBCAV_POLARIZATION_P = 1,
  VIBCAV_POLARIZATION_UNPOLARIZED = 2,
} VibcavPolarization;

typedef enum VibcavStatus {
  VIBCAV_STATUS_OK = 0,
  VIBCAV_STATUS_NULL_POINTER = 1,
  VIBCAV_STATUS_INVALID_ARGUMENT = 2,
  VIBCAV_STATUS_DOMAIN = 3,
  VIBCAV_STATUS_PARSE = 4,
  VIBCAV_STATUS_NUMERIC = 5,
  VIBCAV_STATUS_DATA = 6,
  VIBCAV_STATUS_IO = 7,
  VIBCAV_STATUS_PANIC = 8,
} VibcavStatus;

/*
 Opaque optical material.
 */
typedef struct VibcavMaterial VibcavMaterial;

/*
 Opaque multilayer stack under construction.
 */
typedef struct VibcavStack VibcavStack;

typedef struct VibcavPower {
  double transmittance;
  double reflectance;
  double absorptance;
} VibcavPower;

typedef struct VibcavHopfield {
  /*
   Vibrational energy, cm⁻¹.
   */
  double omega_nu;
  /*
   Rabi frequency, cm⁻¹ (ignored by the Rabi fit).
   */
  double omega_r;
  /*
   Background index of the cavity fill.
   */
  double n_b;
  /*
   Effective-length factor (>= 1).
   */
  double alpha;
} VibcavHopfield;

typedef struct VibcavPolariton {
  double energy;
  double photon_fraction;
  double matter_fraction;
} VibcavPolariton;

/*
 One dispersion point: `kind` 0 = thickness (µm), 1 = angle (deg);
 `sign` -1 = lower, +1 = upper branch.
 */
typedef struct VibcavObservation {
  double control;
  int kind;
  uint32_t order;
  int sign;
  double energy;
} VibcavObservation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the most recent failure on this thread, or null. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *vibcav_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *vibcav_version(void);

/*
 Bundled material by name (`fe_co5`, `au_film`, `au_bulk`, `znse`, `baf2`).

 # Safety
 `name` must be a NUL-terminated string; `out` must be writable.
 */
enum VibcavStatus vibcav_material_preset(const char *name, struct VibcavMaterial **out);

/*
 Material from a TOML material document.

 # Safety
 `toml` must be a NUL-terminated string; `out` must be writable.
 */
enum VibcavStatus vibcav_material_from_toml(const char *toml, struct VibcavMaterial **out);

/*
 Non-dispersive material with index `n_re + i n_im`.

 # Safety
 `out` must be writable.
 */
enum VibcavStatus vibcav_material_constant(double n_re, double n_im, struct VibcavMaterial **out);

/*
 Complex refractive index at wavenumber `k` (cm⁻¹).

 # Safety
 `material` must be a live handle; `n_re` and `n_im` must be writable.
 */
enum VibcavStatus vibcav_material_index(const struct VibcavMaterial *material,
                                        double k,
                                        double *n_re,
                                        double *n_im);

/*
 # Safety
 `material` must be null or a handle not yet freed.
 */
void vibcav_material_free(struct VibcavMaterial *material);

/*
 Empty stack between two semi-infinite media. The materials are copied.

 # Safety
 `entry` and `exit` must be live handles; `out` must be writable.
 */
enum VibcavStatus vibcav_stack_new(const struct VibcavMaterial *entry,
                                   const struct VibcavMaterial *exit,
                                   struct VibcavStack **out);

/*
 Appends a layer on the exit side. The material is copied.

 # Safety
 `stack` and `material` must be live handles.
 */
enum VibcavStatus vibcav_stack_push_layer(struct VibcavStack *stack,
                                          const struct VibcavMaterial *material,
                                          double thickness_um);

/*
 Sets the constant window amplitude factor C (0 <= C <= 1).

 # Safety
 `stack` must be a live handle.
 */
enum VibcavStatus vibcav_stack_set_window(struct VibcavStack *stack, double c);

/*
 Number of layers currently in the stack.

 # Safety
 `stack` must be null or a live handle.
 */
size_t vibcav_stack_layer_count(const struct VibcavStack *stack);

/*
 Power coefficients at one wavenumber and external angle.

 # Safety
 `stack` must be a live handle; `out` must be writable.
 */
enum VibcavStatus vibcav_stack_solve(const struct VibcavStack *stack,
                                     double k,
                                     double angle_deg,
                                     enum VibcavPolarization pol,
                                     struct VibcavPower *out);

/*
 Transmittance over `n` strictly increasing wavenumbers into `out[n]`.

 # Safety
 `ks` and `out` must point to `n` elements; `stack` must be a live handle.
 */
enum VibcavStatus vibcav_stack_spectrum(const struct VibcavStack *stack,
                                        const double *ks,
                                        size_t n,
                                        double angle_deg,
                                        enum VibcavPolarization pol,
                                        double *out);

/*
 # Safety
 `stack` must be null or a handle not yet freed.
 */
void vibcav_stack_free(struct VibcavStack *stack);

/*
 Lower and upper polariton at bare cavity energy `omega_c` (cm⁻¹).

 # Safety
 `params`, `lower` and `upper` must be valid pointers.
 */
enum VibcavStatus vibcav_polaritons(enum VibcavModel m,
                                    const struct VibcavHopfield *params_in,
                                    double omega_c,
                                    struct VibcavPolariton *lower,
                                    struct VibcavPolariton *upper);

/*
 Polaritonic gap (cm⁻¹) over detunings `omega_c - omega_nu` in `[lo, hi]`.

 # Safety
 `params` and `gap` must be valid pointers.
 */
enum VibcavStatus vibcav_bandgap(enum VibcavModel m,
                                 const struct VibcavHopfield *params_in,
                                 double detuning_lo,
                                 double detuning_hi,
                                 size_t samples,
                                 double *gap);

/*
 Fits the Rabi frequency to `n` dispersion points inside `[lo, hi]`.
 Writes the fitted value and χ²; `converged` receives 1 or 0.

 # Safety
 `obs` must point to `n` elements; the output pointers must be writable.
 */
enum VibcavStatus vibcav_fit_rabi(enum VibcavModel m,
                                  const struct VibcavHopfield *params_in,
                                  const struct VibcavObservation *obs,
                                  size_t n,
                                  double lo,
                                  double hi,
                                  double *omega_r,
                                  double *chi2,
                                  int *converged);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VIBCAV_H */
