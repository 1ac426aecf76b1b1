#ifndef VQCLAB_H
#define VQCLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define VQC_OK 0

// A required pointer argument was null.
#define VQC_ERR_NULL 1

// A string argument was not valid UTF-8.
#define VQC_ERR_UTF8 2

// Invalid gate, circuit, ansatz shape or parameter vector.
#define VQC_ERR_INVALID_ARGUMENT 3

// Malformed circuit text or JSON.
#define VQC_ERR_PARSE 4

// Invalid backend description.
#define VQC_ERR_BACKEND 5

// The circuit needs more qubits than the backend has.
#define VQC_ERR_DOES_NOT_FIT 6

#define VQC_ERR_IO 7

// Internal error; the library caught a panic.
#define VQC_ERR_INTERNAL 99

// Reparameterization modes for `vqc_transpiled_reparameterize`.
#define VQC_MODE_ALL_ANGLES 0

#define VQC_MODE_SYMBOL_DERIVED 1

typedef struct VqcBackend VqcBackend;

typedef struct VqcCircuit VqcCircuit;

typedef struct VqcTranspiled VqcTranspiled;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread, or null.
// The pointer stays valid until the next failing call on the same thread.
const char *vqc_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *vqc_version(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void vqc_string_free(char *s);

// Builds an ansatz (`"efficient_su2"`, `"ttn"` or `"real_amplitudes"`).
//
// # Safety
// `kind` must be a NUL-terminated string; `out` must be writable.
int32_t vqc_circuit_build_ansatz(const char *kind,
                                 size_t num_qubits,
                                 size_t reps,
                                 struct VqcCircuit **out);

// Parses the line-based circuit text format.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
int32_t vqc_circuit_from_text(const char *text, struct VqcCircuit **out);

// # Safety
// `circuit` must be a live handle; `out` must be writable.
int32_t vqc_circuit_to_text(const struct VqcCircuit *circuit, char **out);

// # Safety
// `circuit` must be a live handle; `out` must be writable.
int32_t vqc_circuit_num_qubits(const struct VqcCircuit *circuit, size_t *out);

// # Safety
// `circuit` must be a live handle; `out` must be writable.
int32_t vqc_circuit_num_symbols(const struct VqcCircuit *circuit, size_t *out);

// Expectation of Z on `qubit` after running the circuit from |0...0> with
// angles `theta[0..len]`.
//
// # Safety
// `circuit` must be a live handle, `theta` must point to `len` doubles
// (may be null when `len` is 0), and `out` must be writable.
int32_t vqc_circuit_expect_z(const struct VqcCircuit *circuit,
                             const double *theta,
                             size_t len,
                             size_t qubit,
                             double *out);

// Gradient variance over `samples` uniform draws, cost `<Z_cost_qubit>`.
//
// # Safety
// `circuit` must be a live handle; `out_var` and `out_stderr` must be
// writable.
int32_t vqc_grad_variance(const struct VqcCircuit *circuit,
                          size_t samples,
                          uint64_t seed,
                          size_t cost_qubit,
                          double *out_var,
                          double *out_stderr);

// # Safety
// `circuit` must be null or a handle not yet freed.
void vqc_circuit_free(struct VqcCircuit *circuit);

// # Safety
// `out` must be writable.
int32_t vqc_backend_line(size_t num_qubits, struct VqcBackend **out);

// # Safety
// `out` must be writable.
int32_t vqc_backend_heavy_hex(size_t rows, size_t cols, struct VqcBackend **out);

// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
int32_t vqc_backend_from_json(const char *json, struct VqcBackend **out);

// # Safety
// `backend` must be a live handle; `out` must be writable.
int32_t vqc_backend_to_json(const struct VqcBackend *backend, char **out);

// # Safety
// `backend` must be a live handle; `out` must be writable.
int32_t vqc_backend_num_physical(const struct VqcBackend *backend, size_t *out);

// # Safety
// `backend` must be null or a handle not yet freed.
void vqc_backend_free(struct VqcBackend *backend);

// Compiles `circuit` for `backend` with the trivial layout. The peephole
// optimizer runs when `optimize` is nonzero.
//
// # Safety
// `circuit` and `backend` must be live handles; `out` must be writable.
int32_t vqc_transpile(const struct VqcCircuit *circuit,
                      const struct VqcBackend *backend,
                      int32_t optimize,
                      struct VqcTranspiled **out);

// Copy of the compiled circuit (one symbol per physical rotation).
//
// # Safety
// `transpiled` must be a live handle; `out` must be writable.
int32_t vqc_transpiled_physical(const struct VqcTranspiled *transpiled, struct VqcCircuit **out);

// The compiled circuit under `mode` (`VQC_MODE_ALL_ANGLES` or
// `VQC_MODE_SYMBOL_DERIVED`).
//
// # Safety
// `transpiled` must be a live handle; `out` must be writable.
int32_t vqc_transpiled_reparameterize(const struct VqcTranspiled *transpiled,
                                      int32_t mode,
                                      struct VqcCircuit **out);

// Provenance of every physical parameter as JSON.
//
// # Safety
// `transpiled` must be a live handle; `out` must be writable.
int32_t vqc_transpiled_provenance_json(const struct VqcTranspiled *transpiled, char **out);

// Physical qubit holding logical qubit 0 at the end of the circuit.
//
// # Safety
// `transpiled` must be a live handle; `out` must be writable.
int32_t vqc_transpiled_cost_qubit(const struct VqcTranspiled *transpiled, size_t *out);

// Number of SWAPs inserted by routing.
//
// # Safety
// `transpiled` must be a live handle; `out` must be writable.
int32_t vqc_transpiled_num_swaps(const struct VqcTranspiled *transpiled, size_t *out);

// # Safety
// `transpiled` must be null or a handle not yet freed.
void vqc_transpiled_free(struct VqcTranspiled *transpiled);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VQCLAB_H */
