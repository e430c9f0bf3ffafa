#ifndef SPINENC_H
#define SPINENC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define SPINENC_OK 0

#define SPINENC_ERR_NULL 1

#define SPINENC_ERR_VALIDATION 2

#define SPINENC_ERR_RESOURCE 3

#define SPINENC_ERR_IO 4

#define SPINENC_ERR_PANIC 5

#define SPINENC_MAPPING_COMPACT 0

#define SPINENC_MAPPING_DIRECT 1

#define SPINENC_MAPPING_DICKE 2

#define SPINENC_MAPPING_QUDIT 3

/**
 * Encoded Heisenberg Hamiltonian of an open chain.
 */
typedef struct SpinencHamiltonian SpinencHamiltonian;

/**
 * Message of the last failed call on this thread, or null. Valid until the next failing call.
 */
const char *spinenc_last_error(void);

/**
 * Library version as a static string.
 */
const char *spinenc_version(void);

/**
 * Builds the encoded Hamiltonian of an open chain with `n_sites` spins of size `two_s / 2`.
 *
 * # Safety
 * `out` must be a valid pointer. The handle must be released with `spinenc_hamiltonian_free`.
 */
int spinenc_hamiltonian_new(int mapping,
                            uint32_t two_s,
                            size_t n_sites,
                            struct SpinencHamiltonian **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `h` must come from `spinenc_hamiltonian_new` and must not be used afterwards.
 */
void spinenc_hamiltonian_free(struct SpinencHamiltonian *h);

/**
 * Number of non-identity terms.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
int spinenc_hamiltonian_n_terms(const struct SpinencHamiltonian *h, size_t *out);

/**
 * Coefficient of the identity term.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
int spinenc_hamiltonian_offset(const struct SpinencHamiltonian *h, double *out);

/**
 * Number of qubits, or of qudits for the qudit mapping.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
int spinenc_hamiltonian_n_units(const struct SpinencHamiltonian *h, size_t *out);

/**
 * JSON dump of the Hamiltonian. Free the string with `spinenc_string_free`.
 *
 * # Safety
 * `h` must be a live handle and `out` a valid pointer.
 */
int spinenc_hamiltonian_to_json(const struct SpinencHamiltonian *h, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void spinenc_string_free(char *s);

#endif  /* SPINENC_H */
