#ifndef PFENCE_PFENCE_H
#define PFENCE_PFENCE_H

#include <stddef.h>
#include <stdint.h>

#if defined(PF_BUILDING_LIBRARY)
#define PF_API __attribute__((visibility("default")))
#else
#define PF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Values 1..19 follow the library's error kinds. */
typedef enum pf_status {
    PF_OK = 0,
    PF_E_DEGENERATE_INPUT = 1,
    PF_E_GENERATION_FAILED = 2,
    PF_E_EMPTY_INTERSECTION = 3,
    PF_E_PROJECTION_FAILED = 4,
    PF_E_INVALID_ORDER = 5,
    PF_E_GRID_MISMATCH = 6,
    PF_E_CLOSURE_VIOLATION = 7,
    PF_E_NO_INTERSECTION = 8,
    PF_E_NOT_A_ZERO_POINT = 9,
    PF_E_INVALID_FENCE = 10,
    PF_E_SOLVER_FAILED = 11,
    PF_E_DOMAIN = 12,
    PF_E_ORACLE_VIOLATION = 13,
    PF_E_NOT_LOG_CONCAVE = 14,
    PF_E_NONPOSITIVE_MARGIN = 15,
    PF_E_NO_BALANCED_CUT = 16,
    PF_E_ILL_CONDITIONED = 17,
    PF_E_PARSE = 18,
    PF_E_IO = 19,
    PF_E_INVALID_ARGUMENT = 20,
    PF_E_INTERNAL = 21
} pf_status;

typedef enum pf_objective { PF_SIGMA1 = 0, PF_MU1 = 1 } pf_objective;

typedef enum pf_format { PF_FORMAT_CSV = 0, PF_FORMAT_JSON = 1 } pf_format;

typedef struct pf_body pf_body;
typedef struct pf_result pf_result;

typedef struct pf_options {
    uint64_t seed;
    /* NaN keeps the campaign's default tolerance. */
    double tol;
    /* Fence solver boundary grid; 0 keeps the default. */
    int grid;
    /* 0 means hardware concurrency. */
    int threads;
    /* Sweep instance count; negative keeps the default. */
    int count;
} pf_options;

typedef struct pf_fence_result {
    double value;
    double s1, s2, sagitta;
    double area_E, area_comp, fence_length;
    double contact_angle1, contact_angle2;
} pf_fence_result;

PF_API const char* pf_version(void);
PF_API const char* pf_status_string(pf_status status);
/* Nonzero for statuses caused by the caller's input (bad specs, arguments or
   preconditions) rather than by a failed computation. */
PF_API int pf_status_is_input_error(pf_status status);
/* Message of the last failure on the calling thread; never NULL. */
PF_API const char* pf_last_error(void);

PF_API void pf_options_default(pf_options* options);

/* A single body spec as JSON text. */
PF_API pf_status pf_body_from_json(const char* spec_json, pf_body** out);
PF_API void pf_body_free(pf_body* body);
PF_API pf_status pf_body_diameter(const pf_body* body, double* out);
PF_API pf_status pf_body_area(const pf_body* body, double* out);
PF_API pf_status pf_body_inradius(const pf_body* body, double* out);
PF_API pf_status pf_body_solve(const pf_body* body, pf_objective which, const pf_options* options,
                               pf_fence_result* out);

PF_API pf_status pf_truncated_disc_sigma1(double rho, double* out);
/* coeffs receives the fitted ρ², ρ⁴, ρ⁶ coefficients. */
PF_API pf_status pf_fit_series(const double* rho, size_t n, double coeffs[3]);

/* Campaigns. Results are owned by the caller and released with
   pf_result_free. */
PF_API pf_status pf_campaign_run(const char* name, const pf_options* options, pf_result** out);
/* specs_json holds one spec object or an array of them. */
PF_API pf_status pf_campaign_fence(const char* specs_json, pf_objective which, const pf_options* options,
                                   pf_result** out);
PF_API pf_status pf_campaign_series(const double* rho, size_t n, const pf_options* options, pf_result** out);
PF_API pf_status pf_campaign_perturb(const double* eps, size_t n, const pf_options* options, pf_result** out);
PF_API pf_status pf_campaign_appendix(const double* p, size_t n, double k_infinity, double ratio_threshold,
                                      const pf_options* options, pf_result** out);
PF_API pf_status pf_campaign_partition(int depth, const pf_options* options, pf_result** out);

PF_API int pf_result_passed(const pf_result* result);
PF_API size_t pf_result_record_count(const pf_result* result);
PF_API double pf_result_wall_seconds(const pf_result* result);
/* Manifest JSON; release with pf_string_free. */
PF_API pf_status pf_result_manifest(const pf_result* result, char** out);
PF_API pf_status pf_result_csv(const pf_result* result, char** out);
PF_API pf_status pf_result_emit(const pf_result* result, pf_format format, const char* dir);
PF_API void pf_result_free(pf_result* result);
PF_API void pf_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
