#ifndef BSHQ_H
#define BSHQ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BshqConvention {
  BSHQ_CONVENTION_DIRAC = 0,
  BSHQ_CONVENTION_SEMICLASSICAL_SOURCE = 1,
  BSHQ_CONVENTION_SEMICLASSICAL_MIDPOINT = 2,
} BshqConvention;

typedef enum BshqStatus {
  BSHQ_STATUS_OK = 0,
  // Bad argument value.
  BSHQ_STATUS_USAGE = 1,
  // Unknown model or observable, malformed model, semantic violation.
  BSHQ_STATUS_MODEL = 2,
  // Numerical failure.
  BSHQ_STATUS_NUMERICAL = 3,
  BSHQ_STATUS_NULL_POINTER = 4,
  BSHQ_STATUS_INVALID_UTF8 = 5,
  // The buffer was too small; the required length was written.
  BSHQ_STATUS_BUFFER_TOO_SMALL = 6,
  BSHQ_STATUS_PANIC = 7,
} BshqStatus;

// Opaque model handle.
typedef struct BshqModel BshqModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread; empty after a success.
// Valid until the next call on the same thread.
const char *bshq_last_error(void);

// Builtin model by name. `n` is the so3 parameter; pass 0 for other models.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum BshqStatus bshq_model_builtin(const char *name,
                                   double hbar,
                                   uint32_t n,
                                   struct BshqModel **out);

// Model from a JSON model document.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum BshqStatus bshq_model_from_json(const char *json, double hbar, struct BshqModel **out);

// # Safety
// `model` must come from a constructor of this library and not be used
// afterwards. Null is ignored.
void bshq_model_free(struct BshqModel *model);

// Number of degrees of freedom.
//
// # Safety
// `model` and `dof` must be valid pointers.
enum BshqStatus bshq_model_dof(const struct BshqModel *model, uintptr_t *dof);

// Sorted eigenvalues of an observable on the model's default box. On
// `BSHQ_STATUS_BUFFER_TOO_SMALL`, `*len` holds the required capacity.
//
// # Safety
// `values` must have room for `capacity` doubles; the other pointers must
// be valid.
enum BshqStatus bshq_spectrum(const struct BshqModel *model,
                              const char *observable,
                              enum BshqConvention convention,
                              double *values,
                              uintptr_t capacity,
                              uintptr_t *len);

// Bohr-Sommerfeld energies `E_0, E_1, …` of a potential model. A negative
// `m_max` solves every level below the top of the oscillation range.
//
// # Safety
// As for [`bshq_spectrum`].
enum BshqStatus bshq_levels(const struct BshqModel *model,
                            int64_t m_max,
                            double *energies,
                            uintptr_t capacity,
                            uintptr_t *len);

// Run the identity suite; `*all_pass` reports the outcome.
//
// # Safety
// `model` and `all_pass` must be valid pointers.
enum BshqStatus bshq_verify(const struct BshqModel *model,
                            enum BshqConvention convention,
                            bool *all_pass);

// Band listing of a quantized observable as JSON. Release the string with
// [`bshq_string_free`].
//
// # Safety
// `model`, `observable` and `out` must be valid pointers.
enum BshqStatus bshq_export_json(const struct BshqModel *model,
                                 const char *observable,
                                 enum BshqConvention convention,
                                 char **out);

// # Safety
// `s` must come from this library. Null is ignored.
void bshq_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BSHQ_H */
