#ifndef NSCF_NSCF_H
#define NSCF_NSCF_H

#include <stddef.h>
#include <stdint.h>

#if defined(NSCF_BUILDING_LIBRARY)
#define NSCF_API __attribute__((visibility("default")))
#else
#define NSCF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nscf_status {
  NSCF_OK = 0,
  NSCF_E_INVALID_ARGUMENT,
  NSCF_E_DIMENSION_MISMATCH,
  NSCF_E_NOT_POSITIVE_DEFINITE,
  NSCF_E_ILL_CONDITIONED,
  NSCF_E_UNBOUNDED_BALL,
  NSCF_E_INFEASIBLE,
  NSCF_E_INVALID_METRIC,
  NSCF_E_UNSUPPORTED,
  NSCF_E_ZERO_VECTOR,
  NSCF_E_OFF_SPHERE,
  NSCF_E_UNKNOWN_POINT,
  NSCF_E_NOT_INDEPENDENT,
  NSCF_E_NOT_EIGENVECTOR,
  NSCF_E_VACUOUS_LEMMA,
  NSCF_E_NOT_MULTIPLIER,
  NSCF_E_NOT_ISOMETRIC,
  NSCF_E_INCONSISTENT_COMPONENT,
  NSCF_E_IDENTITY_VIOLATED,
  NSCF_E_VACUOUS_CORE,
  NSCF_E_PARSE,
  NSCF_E_IO,
  NSCF_E_NULL_ARGUMENT,
  NSCF_E_INTERNAL
} nscf_status;

/* A parsed space file: a function space model or a bare norm, plus named
 * operators and weights. */
typedef struct nscf_space nscf_space;
typedef struct nscf_graph nscf_graph;

NSCF_API const char* nscf_version(void);
NSCF_API const char* nscf_status_name(nscf_status s);
/* Message of the last failure on the calling thread ("" if none). */
NSCF_API const char* nscf_last_error(void);
NSCF_API double nscf_default_tolerance(void);

/* Strings returned through char** are owned by the caller. */
NSCF_API void nscf_string_free(char* s);

NSCF_API nscf_status nscf_space_from_json(const char* json, nscf_space** out);
NSCF_API nscf_status nscf_space_from_file(const char* path, nscf_space** out);
NSCF_API void nscf_space_free(nscf_space* space);
/* 1 when the file defines a function space model, 0 for a bare norm. */
NSCF_API int nscf_space_has_model(const nscf_space* space);
NSCF_API size_t nscf_space_dim(const nscf_space* space);
NSCF_API size_t nscf_space_num_points(const nscf_space* space);

/* Orthogonality of e and f in both orders. Each vector is a JSON array of
 * scalars (numbers or [re, im]) in the coefficient norm, or a JSON string
 * naming a point, whose evaluation is measured in the dual norm; both must
 * be of the same kind. With `dual` set, the norming-functional test is
 * added. *indeterminate is set when either verdict falls in the
 * indeterminate band. */
NSCF_API nscf_status nscf_ortho(const nscf_space* space, const char* e_json, const char* f_json,
                                double tol, int dual, char** report_json, int* indeterminate);

/* threads = 0 picks the hardware concurrency. */
NSCF_API nscf_status nscf_graph_build(const nscf_space* space, double tol, unsigned threads,
                                      nscf_graph** out);
NSCF_API void nscf_graph_free(nscf_graph* g);
NSCF_API size_t nscf_graph_num_vertices(const nscf_graph* g);
NSCF_API size_t nscf_graph_num_edges(const nscf_graph* g);
NSCF_API size_t nscf_graph_num_components(const nscf_graph* g);
NSCF_API nscf_status nscf_graph_json(const nscf_graph* g, char** out);
NSCF_API nscf_status nscf_graph_dot(const nscf_graph* g, char** out);

/* Rigidity report for a named weight (multiplier check first) or a named
 * operator (multiplication check first). */
NSCF_API nscf_status nscf_rigidity_weight(const nscf_space* space, const char* name, double tol,
                                          char** report_json);
NSCF_API nscf_status nscf_rigidity_operator(const nscf_space* space, const char* name, double tol,
                                            char** report_json);

/* JSON array of scenario names. */
NSCF_API nscf_status nscf_corpus_scenarios(char** names_json);
/* Runs one scenario, or all of them when `scenario` is NULL. The JSON is an
 * array of reports; *all_passed is 1 iff every claim passed. */
NSCF_API nscf_status nscf_corpus_run(const char* scenario, uint64_t seed, char** reports_json,
                                     int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
