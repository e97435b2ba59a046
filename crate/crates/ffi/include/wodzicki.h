#ifndef WODZICKI_H
#define WODZICKI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define WZ_FLAG_NON_CLASSICAL (1 << 0)

#define WZ_FLAG_COMPONENT_MISSING (1 << 1)

#define WZ_FLAG_FOUR_PART_MISMATCH (1 << 2)

#define WZ_FLAG_HIGHER_ORDER_POLE (1 << 3)

#define WZ_FLAG_BUDGET_EXCEEDED (1 << 4)

#define WZ_FLAG_CROSS_CHECK_DISAGREEMENT (1 << 5)

#define WZ_FLAG_UNRELIABLE (1 << 6)

typedef enum WzStatus {
  WZ_STATUS_OK = 0,
  WZ_STATUS_INVALID_ARGUMENT = 1,
  WZ_STATUS_NUMERICAL_FAILURE = 2,
  WZ_STATUS_BUDGET_EXCEEDED = 3,
  WZ_STATUS_NULL_POINTER = 4,
  WZ_STATUS_PANIC = 5,
  WZ_STATUS_UTF8 = 6,
  WZ_STATUS_CONFIG = 7,
  WZ_STATUS_IO = 8,
} WzStatus;

typedef enum WzTraceMode {
  WZ_TRACE_MODE_ABS_TRACE = 0,
  WZ_TRACE_MODE_SIGNED_RE = 1,
  WZ_TRACE_MODE_SIGNED_IM = 2,
} WzTraceMode;

// Opaque symbol-field handle.
typedef struct WzField WzField;

// Opaque group handle.
typedef struct WzGroup WzGroup;

// Opaque quadrature-rule handle.
typedef struct WzQuadrature WzQuadrature;

// Opaque symbol handle.
typedef struct WzSymbol WzSymbol;

typedef struct WzSlope {
  double value;
  double error_bar;
  double fit_residual;
  bool non_classical;
} WzSlope;

typedef struct WzZetaSample {
  double re;
  double im;
  double truncation_cutoff;
  double tail_bound;
} WzZetaSample;

// Complex estimate with an error bar and a `WZ_FLAG_*` bit set.
typedef struct WzEstimate {
  double re;
  double im;
  double error_bar;
  uint32_t flags;
} WzEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Valid until the
// next `wz_*` call on the same thread.
const char *wz_last_error_message(void);

// Torus Tⁿ, n in 1..=3.
//
// # Safety
// `out` must be valid for a pointer write.
enum WzStatus wz_group_torus(int n, struct WzGroup **out);

// # Safety
// `out` must be valid for a pointer write.
enum WzStatus wz_group_su2(struct WzGroup **out);

// Manifold dimension n, or 0 for a null handle.
//
// # Safety
// `group` must be null or a live handle.
int wz_group_manifold_dim(const struct WzGroup *group);

// # Safety
// `group` must be null or a handle not yet freed.
void wz_group_free(struct WzGroup *group);

// σ(ξ) = (re + i·im)·⟨ξ⟩^alpha·I.
//
// # Safety
// `group` must be a live handle and `out` valid for a pointer write.
enum WzStatus wz_symbol_weight_power(const struct WzGroup *group,
                                     double re,
                                     double im,
                                     double alpha,
                                     struct WzSymbol **out);

// ±⟨ξ⟩^alpha diagonal test symbol.
//
// # Safety
// `group` must be a live handle and `out` valid for a pointer write.
enum WzStatus wz_symbol_diag_signed(const struct WzGroup *group,
                                    double alpha,
                                    struct WzSymbol **out);

// # Safety
// `a`, `b` must be live handles and `out` valid for a pointer write.
enum WzStatus wz_symbol_add(const struct WzSymbol *a,
                            const struct WzSymbol *b,
                            struct WzSymbol **out);

// # Safety
// `a` must be a live handle and `out` valid for a pointer write.
enum WzStatus wz_symbol_scale(const struct WzSymbol *a,
                              double re,
                              double im,
                              struct WzSymbol **out);

// # Safety
// `sym` must be null or a handle not yet freed.
void wz_symbol_free(struct WzSymbol *sym);

// Haar quadrature with the given resolution per coordinate.
//
// # Safety
// `group` must be a live handle and `out` valid for a pointer write.
enum WzStatus wz_quadrature_new(const struct WzGroup *group,
                                size_t resolution,
                                struct WzQuadrature **out);

// Number of nodes, or 0 for a null handle.
//
// # Safety
// `quad` must be null or a live handle.
size_t wz_quadrature_len(const struct WzQuadrature *quad);

// # Safety
// `quad` must be null or a handle not yet freed.
void wz_quadrature_free(struct WzQuadrature *quad);

// x-independent field equal to `sym` at every node. The degree is the
// symbol's declared order.
//
// # Safety
// `sym`, `quad` must be live handles and `out` valid for a pointer write.
enum WzStatus wz_field_invariant(const struct WzSymbol *sym,
                                 const struct WzQuadrature *quad,
                                 struct WzField **out);

// a(x)·σ with a(x) = Σ_k coeffs[k]·cos(k·(x₁+…+x_n)) on a torus.
//
// # Safety
// Handles must be live, `coeffs` readable for `len` doubles and `out`
// valid for a pointer write.
enum WzStatus wz_field_fourier(const struct WzSymbol *sym,
                               const struct WzQuadrature *quad,
                               const double *coeffs,
                               size_t len,
                               struct WzField **out);

// a(x)·σ with a(x) = Σ_k coeffs[k]·T_k(cos(θ/2)) on SU(2).
//
// # Safety
// Handles must be live, `coeffs` readable for `len` doubles and `out`
// valid for a pointer write.
enum WzStatus wz_field_class_poly(const struct WzSymbol *sym,
                                  const struct WzQuadrature *quad,
                                  const double *coeffs,
                                  size_t len,
                                  struct WzField **out);

// # Safety
// `field` must be null or a handle not yet freed.
void wz_field_free(struct WzField *field);

// Weak-ℓ¹ slope of the partial sums of `sym` over an increasing cutoff
// schedule.
//
// # Safety
// `sym` must be a live handle, `schedule` readable for `len` doubles and
// `out` valid for a write.
enum WzStatus wz_weakl1_slope(const struct WzSymbol *sym,
                              enum WzTraceMode mode,
                              const double *schedule,
                              size_t len,
                              struct WzSlope *out);

// f(−s) = Σ d_ξ Tr σ(ξ) ⟨ξ⟩^{−s} with tail completion.
//
// # Safety
// `sym` must be a live handle and `out` valid for a write.
enum WzStatus wz_zeta_trace(const struct WzSymbol *sym,
                            double s,
                            double tol,
                            struct WzZetaSample *out);

// Residue of the zeta trace at z = 0 from a decreasing s schedule.
//
// # Safety
// `sym` must be a live handle, `s` readable for `len` doubles and `out`
// valid for a write.
enum WzStatus wz_zeta_residue(const struct WzSymbol *sym,
                              const double *s,
                              size_t len,
                              double tol,
                              struct WzEstimate *out);

// Wodzicki residue of a field of degree −n.
//
// # Safety
// `field` must be a live handle, `schedule` readable for `len` doubles and
// `out` valid for a write.
enum WzStatus wz_residue(const struct WzField *field,
                         const double *schedule,
                         size_t len,
                         struct WzEstimate *out);

// Runs a JSON run configuration for `task` ("residue", "weakl1", "zeta" or
// "sweep"; NULL uses the config's own task). On success `*report_json`
// receives the report (free with [`wz_string_free`]) and `*exit_code` the
// CLI exit code. Sweep CSV output is not returned.
//
// # Safety
// `config_json` must be a NUL-terminated string, `task` null or
// NUL-terminated, and both out pointers valid for writes.
enum WzStatus wz_run_config_json(const char *config_json,
                                 const char *task,
                                 char **report_json,
                                 int *exit_code);

// Frees a string returned by this library.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void wz_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WODZICKI_H */
