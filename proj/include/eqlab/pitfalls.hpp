#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eqlab/bitsource.hpp"
#include "eqlab/constellation.hpp"
#include "eqlab/metrics.hpp"
#include "eqlab/train.hpp"

namespace eqlab::pitfalls {

using cplx = std::complex<double>;

struct JailWindowResult {
    bool flagged = false;
    double q_gap_db = 0.0;       // q_est(EVM) - q_counted when both finite
    double q_counted_db = 0.0;
    double q_est_db = 0.0;
    double mean_excess_kurtosis = 0.0;  // secondary evidence, per-cluster
};

struct AuditReport {
    std::optional<std::uint64_t> detected_period_symbols;
    std::optional<double> prbs_gain_db;
    JailWindowResult jail_window;
    double overfit_gap_db = 0.0;
    std::vector<std::string> notes;

    std::string to_json() const;
};

// Linear (zero-padded, per-lag-normalized) autocorrelation peak search.
// Returns the smallest lag in [1, max_lag] whose normalized magnitude
// exceeds peak_threshold; a period of 1 means a degenerate (constant-like)
// stream. nullopt when no peak clears the threshold.
std::optional<std::uint64_t> autocorr_period(const std::vector<cplx>& symbols, std::size_t max_lag,
                                             double peak_threshold = 0.5);

// Normalized autocorrelation magnitudes for lags 0..max_lag (diagnostics).
std::vector<double> autocorr_magnitudes(const std::vector<cplx>& symbols, std::size_t max_lag);

// Q-gap jail-window detector: compares the EVM-derived Q estimate against
// the counted Q and flags when the estimate exceeds the count by more than
// gap_threshold_db. Degenerate inputs (zero errors or zero EVM) never flag.
JailWindowResult jail_window_detect(metrics::cspan rx_eq, metrics::cspan tx,
                                    const data::QamConstellation& c, double kappa,
                                    double gap_threshold_db = 2.0);

// Per-epoch train-test gap and overfitting verdict: flags when the test
// series declines for `patience` consecutive epochs while train keeps rising.
struct OverfitResult {
    std::vector<double> gap_db;
    bool overfit = false;
    int onset_epoch = -1;  // first epoch of the declining run (1)-based
};
OverfitResult overfit_gap(const std::vector<double>& train_q_db,
                          const std::vector<double>& test_q_db, int patience = 5);

// Trains the configured equalizer on a B2B AWGN dataset and reports the
// test-set Q gain over the channel's calibrated Q. Any material gain means
// the generator rule or its periodicity was learned, not the channel.
// A categorical_cel train loss selects a classification head (M outputs).
struct LearnabilityConfig {
    data::BitSource source;
    int cardinality = 64;
    double target_q_db = 6.9;
    std::size_t train_symbols = 1u << 15;
    std::size_t test_symbols = 1u << 15;
    int n_taps = 8;
    int hidden_units = 48;       // biLSTM probe size
    std::vector<int> mlp_hidden;  // non-empty selects an MLP probe instead
    nn::TrainConfig train;
    std::uint64_t noise_seed = 7;
    std::uint64_t init_seed = 11;
};
struct LearnabilityResult {
    double gain_db = 0.0;
    double test_q_db = 0.0;
    double reference_q_db = 0.0;
    nn::TrainTrace trace;
};
LearnabilityResult prbs_learnability_test(const LearnabilityConfig& cfg);

// Neighbors-only predictability probe: classifier trained on windows with
// the center symbol zeroed. Returns the achieved symbol error rate against
// the random-guess baseline 1 - 1/M.
struct NeighborProbeResult {
    double ser = 0.0;
    double baseline = 0.0;
};
NeighborProbeResult neighbor_only_probe(const data::WindowedDataset& train_ds,
                                        const data::WindowedDataset& test_ds,
                                        const data::QamConstellation& c,
                                        const nn::TrainConfig& train_cfg, int hidden_units,
                                        std::uint64_t init_seed);

}  // namespace eqlab::pitfalls
