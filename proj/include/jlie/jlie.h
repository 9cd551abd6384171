#ifndef JLIE_H
#define JLIE_H

/* C interface to the jlie library. Handles are opaque; every function
 * returns a status code and leaves a message in jlie_last_error() on
 * failure. Strings returned through char** are owned by the caller and must
 * be released with jlie_string_free. Reports are JSON documents. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define JLIE_API __declspec(dllexport)
#else
#define JLIE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum jlie_status {
  JLIE_OK = 0,
  JLIE_ERR_ARGUMENT = 1, /* bad parameter value, null pointer, unknown option */
  JLIE_ERR_PARSE = 2,    /* expression or catalog syntax */
  JLIE_ERR_DOMAIN = 3,   /* evaluation outside an expression's domain */
  JLIE_ERR_NOT_FOUND = 4,
  JLIE_ERR_IO = 5,
  JLIE_ERR_INTERNAL = 6
} jlie_status;

typedef struct jlie_catalog jlie_catalog;
typedef struct jlie_structure jlie_structure;
typedef struct jlie_system jlie_system;

typedef struct jlie_options {
  size_t samples;   /* default 200 */
  double tol;       /* default 1e-8 */
  uint64_t seed;    /* default 42 */
  unsigned threads; /* verify_all and report workers, 0 = hardware */
} jlie_options;

JLIE_API const char* jlie_version(void);
JLIE_API void jlie_options_default(jlie_options* opt);
/* Message of the last failure on this thread, "" if none. */
JLIE_API const char* jlie_last_error(void);
JLIE_API const char* jlie_status_name(jlie_status s);
JLIE_API void jlie_string_free(char* s);

/* Catalog */
JLIE_API jlie_status jlie_catalog_load(const char* path, jlie_catalog** out);
JLIE_API void jlie_catalog_free(jlie_catalog* cat);
/* [{id, label, table, params: [...], examples, paper_discrepancy}] */
JLIE_API jlie_status jlie_catalog_list(const jlie_catalog* cat, char** json);
/* One EntryReport per entry, ordered by id; *accepted is 1 when every entry
 * verifies or fails exactly as flagged. */
JLIE_API jlie_status jlie_verify_all(const jlie_catalog* cat, const jlie_options* opt, int* accepted, char** json);
/* Acceptance sweep; *unexpected counts failed criteria not known to be
 * unattainable. */
JLIE_API jlie_status jlie_report(const jlie_catalog* cat, const jlie_options* opt, int* unexpected, char** json);

/* Structures: a catalog entry with numeric parameter values. */
JLIE_API jlie_status jlie_structure_from_entry(const jlie_catalog* cat, const char* id, const char* const* names,
                                               const double* values, size_t n, jlie_structure** out);
JLIE_API void jlie_structure_free(jlie_structure* s);
/* {entry, params, coords, lambda, E} */
JLIE_API jlie_status jlie_structure_describe(const jlie_structure* s, char** json);
/* Both Schouten routes; *passed is 1 when both pass. */
JLIE_API jlie_status jlie_verify(const jlie_structure* s, const jlie_options* opt, int* passed, char** json);
/* {f,g}; with a non-null expect, *passed reports is_zero of the difference. */
JLIE_API jlie_status jlie_bracket(const jlie_structure* s, const char* f, const char* g, const char* expect,
                                  const jlie_options* opt, int* passed, char** json);
JLIE_API jlie_status jlie_hamiltonian_vf(const jlie_structure* s, const char* f, const jlie_options* opt, char** json);
/* X_h against the generators of the entry's example system. */
JLIE_API jlie_status jlie_symmetry(const jlie_structure* s, const char* h, const jlie_options* opt, int* passed,
                                   char** json);

/* Lie systems */
/* Generators of the entry's example: the one with a constant of motion when
 * present, else the first. example_index >= 1 picks one explicitly. */
JLIE_API jlie_status jlie_system_from_entry(const jlie_structure* s, int example_index, jlie_system** out);
/* components holds n_fields * n_coords expression strings, field by field. */
JLIE_API jlie_status jlie_system_inline(const char* const* coords, size_t n_coords, const char* const* components,
                                        size_t n_fields, jlie_system** out);
JLIE_API void jlie_system_free(jlie_system* sys);
JLIE_API size_t jlie_system_size(const jlie_system* sys);
/* RK4 from t0 to t1. The trajectory is CSV (format 0) or JSON (format 1).
 * summary is {stop, fault, points, t_end, invariant?}; a domain fault is data
 * here, not an error status. */
JLIE_API jlie_status jlie_integrate(const jlie_system* sys, const char* const* coefficients, size_t n_coefficients,
                                    const double* x0, size_t n_x0, double t0, double t1, double dt,
                                    const char* invariant, double tol, int format, char** trajectory,
                                    char** summary);

#ifdef __cplusplus
}
#endif

#endif
