#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "eqlab/constellation.hpp"

namespace eqlab::metrics {

using cspan = std::span<const std::complex<double>>;

// High-accuracy inverse complementary error function on (0, 2),
// Newton-polished from a rational seed with a bisection fallback.
double erfc_inv(double y);

// EVM_RMS = sqrt( sum|y-x|^2 / sum|x|^2 ).
double evm_rms(cspan rx, cspan tx);

// SNR ~= (1/EVM)^2, returned as 20*log10(1/evm). evm == 0 -> +inf.
double snr_db_from_evm(double evm);

struct ErrorCounts {
    std::uint64_t symbols = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t symbol_errors = 0;
    std::uint64_t total_bits = 0;
};

struct BerResult {
    double ber = 0.0;
    double ser = 0.0;
    ErrorCounts counts;
};

// Hard-decision direct error counting against the known transmit sequence.
BerResult ber_count(cspan rx, cspan tx, const data::QamConstellation& c);

// Q = sqrt(2)*erfc^-1(2*BER) in dB (20*log10). ber == 0 -> +inf sentinel,
// ber == 0.5 -> -inf sentinel, ber > 0.5 -> domain error.
double q_db_from_ber(double ber);

// Inverse of the above (exact forward direction), for round-trip checks.
double ber_from_q_db(double q_db);

// Gaussian-cluster lower bound on the mutual information, in bits/symbol.
// Fits a 2-D Gaussian (sample mean, sample covariance + reg_epsilon*I) to the
// received cloud of each constellation point and Monte-Carlo averages the
// log-likelihood ratio over the dataset with uniform priors. Clamped to
// [0, log2 M]. Every constellation point must appear in tx at least
// min_samples_per_point times.
double mi_lower_bound(cspan rx, cspan tx, const data::QamConstellation& c,
                      double reg_epsilon = 1e-6, int min_samples_per_point = 50);

// EVM -> BER estimate with correction factor kappa:
// BER = k * (1 - M^-1/2) / (0.5*log2 M) * erfc( sqrt( 1.5 / ((M-1)*EVM^2) ) ).
double ber_from_evm(double evm, int cardinality, double kappa);

// kappa = ber_ref / ber_from_evm(evm_ref, M, 1) from a pre-equalization
// reference pair.
double kappa_calibrate(double evm_ref, double ber_ref, int cardinality);

struct MetricsReport {
    double ber = 0.0;
    double q_db = 0.0;
    double evm_fraction = 0.0;
    double snr_db = 0.0;
    double mi_bits = 0.0;
    ErrorCounts counts;
    // where each number came from (counted / formula), keyed by field
    std::vector<std::pair<std::string, std::string>> provenance;

    std::string to_json() const;
};

// Full metric suite over an aligned rx/tx pair.
MetricsReport evaluate_all(cspan rx, cspan tx, const data::QamConstellation& c,
                           double reg_epsilon = 1e-6);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace eqlab::metrics
