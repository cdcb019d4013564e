#include "eqlab/capi.h"

#include <cstring>
#include <string>

#include <json.hpp>

#include "eqlab/bitsource.hpp"
#include "eqlab/complexity.hpp"
#include "eqlab/dataset.hpp"
#include "eqlab/errors.hpp"
#include "eqlab/metrics.hpp"
#include "eqlab/nn.hpp"
#include "eqlab/pipeline.hpp"
#include "eqlab/trace_io.hpp"

struct eqlab_session {
    std::string error;
};

struct eqlab_model {
    std::unique_ptr<eqlab::nn::Model> impl;
};

namespace {

template <typename Fn>
eqlab_status guard(eqlab_session* s, Fn&& fn) {
    if (!s) return EQLAB_ERR_RUNTIME;
    s->error.clear();
    try {
        fn();
        return EQLAB_OK;
    } catch (const eqlab::ConfigError& e) {
        s->error = e.what();
        return EQLAB_ERR_CONFIG;
    } catch (const nlohmann::json::exception& e) {
        // missing keys / wrong types in a config document
        s->error = std::string("config: ") + e.what();
        return EQLAB_ERR_CONFIG;
    } catch (const std::exception& e) {
        s->error = e.what();
        return EQLAB_ERR_RUNTIME;
    } catch (...) {
        s->error = "unknown error";
        return EQLAB_ERR_RUNTIME;
    }
}

eqlab_status require(eqlab_session* s, bool ok, const char* msg) {
    if (ok) return EQLAB_OK;
    if (s) s->error = msg;
    return EQLAB_ERR_CONFIG;
}

}  // namespace

extern "C" {

eqlab_session* eqlab_session_new(void) { return new (std::nothrow) eqlab_session; }

void eqlab_session_free(eqlab_session* s) { delete s; }

const char* eqlab_session_error(const eqlab_session* s) { return s ? s->error.c_str() : ""; }

#define EQLAB_PIPELINE_FN(name, fn)                                                      \
    eqlab_status name(eqlab_session* s, const char* config_json, const char* out_dir) {  \
        if (require(s, config_json && out_dir, "null argument") != EQLAB_OK)             \
            return EQLAB_ERR_CONFIG;                                                     \
        return guard(s, [&] { eqlab::pipeline::fn(config_json, out_dir); });             \
    }

EQLAB_PIPELINE_FN(eqlab_simulate, run_simulate)
EQLAB_PIPELINE_FN(eqlab_train, run_train)
EQLAB_PIPELINE_FN(eqlab_evaluate, run_evaluate)
EQLAB_PIPELINE_FN(eqlab_audit, run_audit)
EQLAB_PIPELINE_FN(eqlab_complexity, run_complexity)
EQLAB_PIPELINE_FN(eqlab_report, run_report)

#undef EQLAB_PIPELINE_FN

eqlab_status eqlab_q_from_ber(eqlab_session* s, double ber, double* q_db) {
    if (require(s, q_db != nullptr, "null output") != EQLAB_OK) return EQLAB_ERR_CONFIG;
    return guard(s, [&] { *q_db = eqlab::metrics::q_db_from_ber(ber); });
}

eqlab_status eqlab_ber_from_evm(eqlab_session* s, double evm, int cardinality, double kappa,
                                double* ber) {
    if (require(s, ber != nullptr, "null output") != EQLAB_OK) return EQLAB_ERR_CONFIG;
    return guard(s, [&] { *ber = eqlab::metrics::ber_from_evm(evm, cardinality, kappa); });
}

eqlab_status eqlab_symbol_periodicity(eqlab_session* s, int prbs_order, int bits_per_symbol,
                                      uint64_t* symbols) {
    if (require(s, symbols != nullptr, "null output") != EQLAB_OK) return EQLAB_ERR_CONFIG;
    return guard(s, [&] {
        *symbols = eqlab::data::symbol_periodicity(prbs_order, bits_per_symbol);
    });
}

eqlab_status eqlab_dac_effective_symbols(eqlab_session* s, uint64_t mem_samples, int frames,
                                         double sps_effective, uint64_t* symbols) {
    if (require(s, symbols != nullptr, "null output") != EQLAB_OK) return EQLAB_ERR_CONFIG;
    return guard(s, [&] {
        *symbols = eqlab::data::dac_effective_symbols(mem_samples, frames, sps_effective);
    });
}

eqlab_status eqlab_rmps(eqlab_session* s, const char* kind, int n_taps, const int* hidden,
                        int hidden_len, int n_i, int n_o, uint64_t* out) {
    if (require(s, kind && out && (hidden || hidden_len == 0), "null argument") != EQLAB_OK)
        return EQLAB_ERR_CONFIG;
    return guard(s, [&] {
        eqlab::complexity::TopologySpec spec;
        spec.n_taps = n_taps;
        spec.n_i = n_i;
        spec.n_o = n_o;
        std::string k = kind;
        if (k == "bilstm") {
            spec.kind = eqlab::complexity::TopologyKind::kBiLstm;
            if (hidden_len != 1) throw eqlab::ConfigError("rmps: bilstm expects hidden = {n_h}");
            spec.n_h = hidden[0];
        } else {
            spec.kind = k == "mlp2"   ? eqlab::complexity::TopologyKind::kMlp2
                        : k == "mlp3" ? eqlab::complexity::TopologyKind::kMlp3
                        : k == "mlp4" ? eqlab::complexity::TopologyKind::kMlp4
                                      : throw eqlab::ConfigError("rmps: unknown kind " + k);
            spec.hidden.assign(hidden, hidden + hidden_len);
        }
        *out = eqlab::complexity::rmps(spec);
    });
}

eqlab_status eqlab_bops_dense(eqlab_session* s, int n, int m, int b_w, int b_i, double sparsity,
                              uint64_t* bops) {
    if (require(s, bops != nullptr, "null output") != EQLAB_OK) return EQLAB_ERR_CONFIG;
    return guard(s, [&] {
        eqlab::complexity::QuantSpec q;
        q.b_w = b_w;
        q.b_i = b_i;
        q.sparsity = sparsity;
        *bops = eqlab::complexity::bops_dense(n, m, q);
    });
}

eqlab_status eqlab_model_load(eqlab_session* s, const char* checkpoint_base, eqlab_model** out) {
    if (require(s, checkpoint_base && out, "null argument") != EQLAB_OK) return EQLAB_ERR_CONFIG;
    return guard(s, [&] {
        auto m = new eqlab_model;
        m->impl = eqlab::io::load_checkpoint(checkpoint_base);
        *out = m;
    });
}

void eqlab_model_free(eqlab_model* m) { delete m; }

eqlab_status eqlab_model_output_dim(eqlab_session* s, const eqlab_model* m, int* dim) {
    if (require(s, m && dim, "null argument") != EQLAB_OK) return EQLAB_ERR_CONFIG;
    *dim = m->impl->output_dim();
    return EQLAB_OK;
}

eqlab_status eqlab_model_window(eqlab_session* s, const eqlab_model* m, int* window) {
    if (require(s, m && window, "null argument") != EQLAB_OK) return EQLAB_ERR_CONFIG;
    *window = m->impl->input_dim() / 4;
    return EQLAB_OK;
}

eqlab_status eqlab_model_forward(eqlab_session* s, eqlab_model* m, const double* features,
                                 int batch, double* outputs) {
    if (require(s, m && features && outputs && batch > 0, "null argument or bad batch") != EQLAB_OK)
        return EQLAB_ERR_CONFIG;
    return guard(s, [&] {
        eqlab::nn::Matrix x(static_cast<std::size_t>(batch),
                            static_cast<std::size_t>(m->impl->input_dim()));
        std::memcpy(x.data.data(), features, x.data.size() * sizeof(double));
        eqlab::nn::Matrix out;
        m->impl->forward(x, out);
        std::memcpy(outputs, out.data.data(), out.data.size() * sizeof(double));
    });
}

}  // extern "C"
