#ifndef DLMULT_H
#define DLMULT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DlmultStatus {
  DLMULT_STATUS_OK = 0,
  DLMULT_STATUS_NULL_POINTER = 1,
  DLMULT_STATUS_INVALID_ARGUMENT = 2,
  DLMULT_STATUS_OUT_OF_RANGE = 3,
  DLMULT_STATUS_PRECONDITION = 4,
  /**
   * The exact answer does not fit a [`DlmultRational`].
   */
  DLMULT_STATUS_OVERFLOW = 5,
  DLMULT_STATUS_ARITHMETIC = 6,
  DLMULT_STATUS_INTERNAL = 7,
  DLMULT_STATUS_PANIC = 8,
} DlmultStatus;

/**
 * Opaque handle holding the tables of one `GL_n(q)`.
 */
typedef struct DlmultGroup DlmultGroup;

/**
 * `num / den` in lowest terms with `den > 0`.
 */
typedef struct DlmultRational {
  int64_t num;
  int64_t den;
} DlmultRational;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or the empty string. The
 * pointer stays valid until the next call into this library on the thread.
 */
const char *dlmult_last_error(void);

/**
 * Static version string.
 */
const char *dlmult_version(void);

/**
 * Builds the tables of `GL_n(q)`; free the handle with [`dlmult_group_free`].
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum DlmultStatus dlmult_group_new(uint32_t n, uint64_t q, struct DlmultGroup **out);

/**
 * # Safety
 * `g` is null or a handle from [`dlmult_group_new`] not yet freed.
 */
void dlmult_group_free(struct DlmultGroup *g);

/**
 * # Safety
 * `g` is a live handle, `out` valid for writes.
 */
enum DlmultStatus dlmult_group_class_count(const struct DlmultGroup *g, size_t *out);

/**
 * `|GL_n(q)|`; `Overflow` past `u64`.
 *
 * # Safety
 * `g` is a live handle, `out` valid for writes.
 */
enum DlmultStatus dlmult_group_order(const struct DlmultGroup *g, uint64_t *out);

/**
 * Closed-form multiplicity of `U_{chi_1} x ... x R_{T_w}(theta_1) x ...` in
 * the trivial character.
 *
 * # Safety
 * `g` is a live handle; string arguments are null or NUL-terminated;
 * `out` valid for writes.
 */
enum DlmultStatus dlmult_multiplicity(const struct DlmultGroup *g,
                                      const char *chars_list,
                                      const char *torus_type,
                                      const char *theta_list,
                                      struct DlmultRational *out);

/**
 * The same multiplicity by summing character values over all classes.
 *
 * # Safety
 * As for [`dlmult_multiplicity`].
 */
enum DlmultStatus dlmult_brute_multiplicity(const struct DlmultGroup *g,
                                            const char *chars_list,
                                            const char *torus_type,
                                            const char *theta_list,
                                            struct DlmultRational *out);

/**
 * `<U_{chi_1} x ... x U_{chi_m}, 1>`.
 *
 * # Safety
 * As for [`dlmult_multiplicity`].
 */
enum DlmultStatus dlmult_u_only(const struct DlmultGroup *g,
                                const char *chars_list,
                                struct DlmultRational *out);

/**
 * Contribution of the regular semisimple classes to `<U_{chi_1} x ..., 1>`.
 *
 * # Safety
 * As for [`dlmult_multiplicity`].
 */
enum DlmultStatus dlmult_torus_part(const struct DlmultGroup *g,
                                    const char *chars_list,
                                    struct DlmultRational *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DLMULT_H */
