#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace eqlab::complexity {

enum class TopologyKind { kMlp2, kMlp3, kMlp4, kBiLstm };

struct TopologySpec {
    TopologyKind kind = TopologyKind::kMlp3;
    int n_taps = 25;  // sequence length n_s = 2*n_taps + 1
    int n_i = 4;
    int n_o = 2;
    std::vector<int> hidden;  // MLP layer sizes
    int n_h = 0;              // biLSTM hidden units

    int n_s() const { return 2 * n_taps + 1; }
    void validate() const;
};

struct QuantSpec {
    int b_w = 8;
    int b_i = 8;
    double sparsity = 0.0;  // eta_s in [0, 1)

    void validate() const;
};

// Real multiplications per recovered symbol:
//   MLP_k:  n_s*n_i*n_1 + n_1*n_2 + ... + n_k*n_o
//   biLSTM: 2*n_s*n_h*(4*n_i + 4*n_h + 3 + n_o)
std::uint64_t rmps(const TopologySpec& spec);

// Trainable parameter count (weights + biases). For MLPs the weight count
// alone equals rmps().
std::uint64_t param_count(const TopologySpec& spec);
std::uint64_t weight_count(const TopologySpec& spec);

// Bit operations of a dense layer with n neurons and m input features:
//   n*m*(b_w*b_i*(1 - eta_s) + b_w + b_i + ceil(log2 m)),
// with ceil(log2 1) = 0.
std::uint64_t bops_dense(int n, int m, const QuantSpec& q);

// Uniformly quantized/pruned 3-hidden-layer MLP:
//   C_MLP3*(b_w*b_i*(1 - eta_s) + b_w + b_i) + ACC,
// ACC = m*n1*cl(m) + n1*n2*cl(n1) + n2*n3*cl(n2) + n3*no*cl(n3), m = n_s*n_i.
std::uint64_t bops_mlp3(const TopologySpec& spec, const QuantSpec& q);

// Per-layer composition for non-uniform pruning/quantization.
struct LayerBops {
    int n = 0, m = 0;
    std::uint64_t bops = 0;
};
std::vector<LayerBops> bops_mlp_layers(const TopologySpec& spec, const std::vector<QuantSpec>& qs);

// Warns when the per-axis input resolution does not clear the modulation
// floor log2(sqrt(M)).
bool signal_quantization_floor_ok(int b_i, int cardinality);

struct ComplexityReport {
    TopologySpec topology;
    std::uint64_t rmps = 0;
    std::uint64_t params = 0;
    std::vector<LayerBops> bops_layers;
    std::uint64_t bops_total = 0;
    double latency_s_per_symbol = -1.0;  // < 0 when not measured
    std::string machine;

    std::string to_json() const;
};

// Wall-clock mean of strictly sequential single-record inferences on a
// randomly initialized model built from spec.
double latency_bench(const TopologySpec& spec, std::size_t n_symbols, std::uint64_t init_seed = 1);

std::string machine_descriptor();

}  // namespace eqlab::complexity
