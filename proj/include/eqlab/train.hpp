#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eqlab/constellation.hpp"
#include "eqlab/dataset.hpp"
#include "eqlab/errors.hpp"
#include "eqlab/nn.hpp"

namespace eqlab::nn {

enum class LossKind { kMse, kCategoricalCel };
enum class EarlyStopMetric { kValQ, kValLoss };

struct TrainConfig {
    LossKind loss = LossKind::kMse;
    double l2_lambda = 0.0;
    int batch_size = 2048;
    double learning_rate = 0.001;
    int max_epochs = 1000;
    EarlyStopMetric early_stop_metric = EarlyStopMetric::kValQ;
    int patience = 25;
    std::uint64_t seed = 1;       // epoch shuffling / sampling
    bool deterministic = true;    // fixed reduction order (always true here)
    std::size_t eval_cap = 0;     // 0 = evaluate on every provided record
    bool restore_best = true;     // false keeps the final-epoch parameters

    void validate() const;
};

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double train_q_db = 0.0;  // NaN unless a train probe set is supplied
    double val_q_db = 0.0;
    double val_mi = 0.0;
    double val_evm = 0.0;
    double grad_norm_last_layer = 0.0;  // epoch mean
};

struct TrainTrace {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;
    double best_metric = 0.0;

    std::string to_csv() const;
};

struct TrainDivergence : eqlab::TrainError {
    TrainDivergence(const std::string& msg, TrainTrace partial_)
        : eqlab::TrainError(msg), partial(std::move(partial_)) {}
    TrainTrace partial;
};

// Fixed evaluation split: record references into a windowed dataset pool.
struct EvalSet {
    const data::WindowedDataset* ds = nullptr;         // single-dataset case
    std::vector<std::uint32_t> indices;                // into ds
    const data::MultiTraceSource* pool = nullptr;      // multi-trace case
    std::vector<std::size_t> pool_records;             // into pool

    std::size_t count() const { return ds ? indices.size() : pool_records.size(); }
};

struct EvalResult {
    double q_db = 0.0;
    double mi_bits = 0.0;
    double evm = 0.0;
    double loss = 0.0;
    double ber = 0.0;
    std::vector<std::complex<double>> equalized;  // model outputs as complex symbols
    std::vector<std::complex<double>> reference;  // matching TX points
};

// Runs the model over an evaluation split and computes the metric suite.
EvalResult evaluate_model(Model& model, const EvalSet& eval, const data::QamConstellation& c,
                          LossKind loss, std::size_t cap = 0);

// Epoch loop: per-epoch shuffle, mini-batch Adam, validation metrics,
// gradient-norm telemetry, best-checkpoint early stopping. When train_probe
// is given, its counted Q is recorded per epoch (train-side curve).
struct TrainResult {
    TrainTrace trace;
    EvalResult final_val;
};
TrainResult train(Model& model, data::BatchSource& source, const EvalSet& val,
                  const data::QamConstellation& c, const TrainConfig& cfg,
                  const EvalSet* train_probe = nullptr);

}  // namespace eqlab::nn
