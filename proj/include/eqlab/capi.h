/* eqlab C API: opaque handles and integer status codes over the C++ core.
 * All functions are thread-compatible (one session per thread); a session
 * stores the message for the most recent failure. Strings returned by the
 * API stay valid until the next call on the same handle. */
#ifndef EQLAB_CAPI_H
#define EQLAB_CAPI_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EQLAB_API __declspec(dllexport)
#else
#define EQLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eqlab_status {
    EQLAB_OK = 0,
    EQLAB_ERR_CONFIG = 1,  /* invalid configuration / arguments */
    EQLAB_ERR_RUNTIME = 2  /* propagation, training, I/O or internal failure */
} eqlab_status;

typedef struct eqlab_session eqlab_session;
typedef struct eqlab_model eqlab_model;

EQLAB_API eqlab_session* eqlab_session_new(void);
EQLAB_API void eqlab_session_free(eqlab_session* s);
/* Empty string when no error is pending. */
EQLAB_API const char* eqlab_session_error(const eqlab_session* s);

/* Pipeline stages; config_json is the experiment configuration document,
 * out_dir the artifact directory (created if missing). */
EQLAB_API eqlab_status eqlab_simulate(eqlab_session* s, const char* config_json,
                                      const char* out_dir);
EQLAB_API eqlab_status eqlab_train(eqlab_session* s, const char* config_json, const char* out_dir);
EQLAB_API eqlab_status eqlab_evaluate(eqlab_session* s, const char* config_json,
                                      const char* out_dir);
EQLAB_API eqlab_status eqlab_audit(eqlab_session* s, const char* config_json, const char* out_dir);
EQLAB_API eqlab_status eqlab_complexity(eqlab_session* s, const char* config_json,
                                        const char* out_dir);
EQLAB_API eqlab_status eqlab_report(eqlab_session* s, const char* config_json, const char* out_dir);

/* Direct calculators. */
EQLAB_API eqlab_status eqlab_q_from_ber(eqlab_session* s, double ber, double* q_db);
EQLAB_API eqlab_status eqlab_ber_from_evm(eqlab_session* s, double evm, int cardinality,
                                          double kappa, double* ber);
EQLAB_API eqlab_status eqlab_symbol_periodicity(eqlab_session* s, int prbs_order,
                                                int bits_per_symbol, uint64_t* symbols);
EQLAB_API eqlab_status eqlab_dac_effective_symbols(eqlab_session* s, uint64_t mem_samples,
                                                   int frames, double sps_effective,
                                                   uint64_t* symbols);
/* kind: "mlp2" | "mlp3" | "mlp4" (hidden = layer sizes) or "bilstm"
 * (hidden = {n_h}, hidden_len = 1). */
EQLAB_API eqlab_status eqlab_rmps(eqlab_session* s, const char* kind, int n_taps, const int* hidden,
                                  int hidden_len, int n_i, int n_o, uint64_t* rmps);
EQLAB_API eqlab_status eqlab_bops_dense(eqlab_session* s, int n, int m, int b_w, int b_i,
                                        double sparsity, uint64_t* bops);

/* Checkpointed model inference: windows are row-major
 * (batch, 2N+1, 4) float64 feature blocks, outputs (batch, out_dim). */
EQLAB_API eqlab_status eqlab_model_load(eqlab_session* s, const char* checkpoint_base,
                                        eqlab_model** out);
EQLAB_API void eqlab_model_free(eqlab_model* m);
EQLAB_API eqlab_status eqlab_model_output_dim(eqlab_session* s, const eqlab_model* m, int* dim);
EQLAB_API eqlab_status eqlab_model_window(eqlab_session* s, const eqlab_model* m, int* window);
EQLAB_API eqlab_status eqlab_model_forward(eqlab_session* s, eqlab_model* m,
                                           const double* features, int batch, double* outputs);

#ifdef __cplusplus
}
#endif

#endif /* EQLAB_CAPI_H */
