#ifndef GFDECAY_H
#define GFDECAY_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef GF_BUILDING_LIBRARY
#    define GF_API __declspec(dllexport)
#  else
#    define GF_API __declspec(dllimport)
#  endif
#else
#  define GF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gf_status {
  GF_OK = 0,
  GF_ERR_DOMAIN = 1,
  GF_ERR_STRUCTURAL = 2,
  GF_ERR_RESOURCE = 3,
  GF_ERR_DEGENERATE = 4,
  GF_ERR_IDENTITY = 5,
  GF_ERR_UNSUPPORTED = 6,
  GF_ERR_IO = 7,
  GF_ERR_CONFIG = 8,
  GF_ERR_ALIASING = 9,
  GF_ERR_NULL = 10,
  GF_ERR_BUFFER = 11,
  GF_ERR_INTERNAL = 12
} gf_status;

typedef enum gf_map { GF_MAP_GAUSS = 0, GF_MAP_LUEROTH = 1, GF_MAP_CANTOR = 2 } gf_map;

typedef struct gf_config gf_config;
typedef struct gf_system gf_system;
typedef struct gf_measure gf_measure;

/* Message for the last failing call on this thread; never NULL. */
GF_API const char* gf_last_error(void);
GF_API const char* gf_status_name(gf_status s);

/* Run configuration. Keys match the CLI long flags (alphabet as "1..2"). */
GF_API gf_status gf_config_create(const char* command, gf_config** out);
GF_API void gf_config_destroy(gf_config* cfg);
GF_API gf_status gf_config_set(gf_config* cfg, const char* key, const char* value);
GF_API gf_status gf_config_set_real(gf_config* cfg, const char* key, double value);
GF_API gf_status gf_config_set_int(gf_config* cfg, const char* key, int64_t value);
GF_API gf_status gf_config_load_json(gf_config* cfg, const char* path);
/* Runs the configured command; *exit_code gets the process exit status convention. */
GF_API gf_status gf_run(const gf_config* cfg, int* exit_code);
GF_API int gf_exit_code(gf_status s);

/* cutoff is the largest digit for Gauss and Lueroth; ignored for Cantor. */
GF_API gf_status gf_system_create(gf_map map, uint32_t cutoff, gf_system** out);
GF_API void gf_system_destroy(gf_system* sys);
GF_API gf_status gf_branch_point(const gf_system* sys, const uint32_t* word, size_t len, double x, double* out);
GF_API gf_status gf_branch_derivative(const gf_system* sys, const uint32_t* word, size_t len, double x, double* out);
GF_API gf_status gf_distortion(const gf_system* sys, const uint32_t* word, size_t len, double x, double* out);
GF_API gf_status gf_cylinder(const gf_system* sys, const uint32_t* word, size_t len, double* lo, double* hi);

/* Decimal p_n and q_n; buffers include the terminating NUL. */
GF_API gf_status gf_continuants(const uint32_t* word, size_t len, char* p, size_t p_cap, char* q, size_t q_cap);

/* Depth-n Gibbs measure of |T'|^s over digits lo..hi. */
GF_API gf_status gf_measure_gibbs(gf_map map, uint32_t lo, uint32_t hi, double s, int n, gf_measure** out);
GF_API void gf_measure_destroy(gf_measure* m);
GF_API size_t gf_measure_size(const gf_measure* m);
/* Copies up to cap atoms and weights (sorted by atom); either array may be NULL. */
GF_API gf_status gf_measure_atoms(const gf_measure* m, double* atoms, double* weights, size_t cap);
GF_API gf_status gf_fourier_transform(const gf_measure* m, double xi, double* re, double* im);

/* Zero of the collocation pressure for digits lo..hi. */
GF_API gf_status gf_pressure_root(gf_map map, uint32_t lo, uint32_t hi, double* out);

#ifdef __cplusplus
}
#endif

#endif
