#include "eqlab/complexity.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "eqlab/errors.hpp"
#include "eqlab/nn.hpp"

namespace eqlab::complexity {

namespace {
int expected_layers(TopologyKind k) {
    switch (k) {
        case TopologyKind::kMlp2: return 2;
        case TopologyKind::kMlp3: return 3;
        case TopologyKind::kMlp4: return 4;
        default: return 0;
    }
}

std::uint64_t ceil_log2(std::uint64_t m) {
    if (m <= 1) return 0;  // ceil(log2 1) = 0 by convention
    std::uint64_t b = 0, v = 1;
    while (v < m) {
        v <<= 1;
        ++b;
    }
    return b;
}

std::uint64_t u(std::int64_t v) { return static_cast<std::uint64_t>(v); }
}  // namespace

void TopologySpec::validate() const {
    if (n_taps < 0) throw ConfigError("topology: n_taps must be >= 0");
    if (n_i < 1 || n_o < 1) throw ConfigError("topology: n_i and n_o must be >= 1");
    if (kind == TopologyKind::kBiLstm) {
        if (n_h < 1) throw ConfigError("topology: biLSTM needs n_h >= 1");
    } else {
        int want = expected_layers(kind);
        if (static_cast<int>(hidden.size()) != want)
            throw ConfigError("topology: kind expects " + std::to_string(want) + " hidden layers");
        for (int h : hidden)
            if (h < 1) throw ConfigError("topology: layer sizes must be >= 1");
    }
}

void QuantSpec::validate() const {
    if (b_w < 1 || b_i < 1) throw ConfigError("quant: bit widths must be >= 1");
    if (sparsity < 0.0 || sparsity >= 1.0) throw ConfigError("quant: sparsity must be in [0, 1)");
}

std::uint64_t rmps(const TopologySpec& spec) {
    spec.validate();
    const std::uint64_t ns = u(spec.n_s()), ni = u(spec.n_i), no = u(spec.n_o);
    if (spec.kind == TopologyKind::kBiLstm) {
        const std::uint64_t nh = u(spec.n_h);
        return 2 * ns * nh * (4 * ni + 4 * nh + 3 + no);
    }
    std::uint64_t total = ns * ni * u(spec.hidden[0]);
    for (std::size_t l = 0; l + 1 < spec.hidden.size(); ++l)
        total += u(spec.hidden[l]) * u(spec.hidden[l + 1]);
    total += u(spec.hidden.back()) * no;
    return total;
}

std::uint64_t weight_count(const TopologySpec& spec) {
    spec.validate();
    if (spec.kind != TopologyKind::kBiLstm) return rmps(spec);
    const std::uint64_t nh = u(spec.n_h), ni = u(spec.n_i);
    std::uint64_t per_dir = 4 * (nh * (ni + nh));
    std::uint64_t head = u(spec.n_o) * 2 * u(spec.n_s()) * nh;
    return 2 * per_dir + head;
}

std::uint64_t param_count(const TopologySpec& spec) {
    spec.validate();
    if (spec.kind == TopologyKind::kBiLstm) {
        const std::uint64_t nh = u(spec.n_h);
        return weight_count(spec) + 2 * 4 * nh + u(spec.n_o);  // gate + head biases
    }
    std::uint64_t biases = u(spec.n_o);
    for (int h : spec.hidden) biases += u(h);
    return rmps(spec) + biases;
}

std::uint64_t bops_dense(int n, int m, const QuantSpec& q) {
    if (n < 1 || m < 1) throw ConfigError("bops_dense: n and m must be >= 1");
    q.validate();
    double mult = static_cast<double>(q.b_w) * q.b_i * (1.0 - q.sparsity);
    double factor = mult + q.b_w + q.b_i + static_cast<double>(ceil_log2(u(m)));
    return static_cast<std::uint64_t>(
        std::llround(static_cast<double>(u(n) * u(m)) * factor));
}

// C_MLP3*(b_w*b_i*(1-eta) + b_w + b_i) + ACC, realized as the per-layer sum
// the expression regroups to; the accumulator widths ceil(log2 m_l) enter
// through each layer's own input count.
std::uint64_t bops_mlp3(const TopologySpec& spec, const QuantSpec& q) {
    spec.validate();
    q.validate();
    if (spec.kind != TopologyKind::kMlp3) throw ConfigError("bops_mlp3: spec must be mlp3");
    const int m = spec.n_s() * spec.n_i;
    const int n1 = spec.hidden[0], n2 = spec.hidden[1], n3 = spec.hidden[2];
    return bops_dense(n1, m, q) + bops_dense(n2, n1, q) + bops_dense(n3, n2, q) +
           bops_dense(spec.n_o, n3, q);
}

std::vector<LayerBops> bops_mlp_layers(const TopologySpec& spec, const std::vector<QuantSpec>& qs) {
    spec.validate();
    if (spec.kind == TopologyKind::kBiLstm) throw ConfigError("bops_mlp_layers: MLP kinds only");
    std::vector<std::pair<int, int>> dims;  // (n, m) per layer
    int m = spec.n_s() * spec.n_i;
    for (int h : spec.hidden) {
        dims.emplace_back(h, m);
        m = h;
    }
    dims.emplace_back(spec.n_o, m);
    if (qs.size() != dims.size())
        throw ConfigError("bops_mlp_layers: need one QuantSpec per layer (" +
                          std::to_string(dims.size()) + ")");
    std::vector<LayerBops> out;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        LayerBops lb;
        lb.n = dims[i].first;
        lb.m = dims[i].second;
        lb.bops = bops_dense(lb.n, lb.m, qs[i]);
        out.push_back(lb);
    }
    return out;
}

bool signal_quantization_floor_ok(int b_i, int cardinality) {
    double floor_bits = std::log2(std::sqrt(static_cast<double>(cardinality)));
    return static_cast<double>(b_i) > floor_bits;
}

std::string machine_descriptor() {
    std::string model = "unknown-cpu";
    std::ifstream f("/proc/cpuinfo");
    std::string line;
    while (std::getline(f, line)) {
        auto pos = line.find("model name");
        if (pos != std::string::npos) {
            auto colon = line.find(':');
            if (colon != std::string::npos) {
                model = line.substr(colon + 1);
                while (!model.empty() && model.front() == ' ') model.erase(model.begin());
            }
            break;
        }
    }
    return model + " x" + std::to_string(std::thread::hardware_concurrency());
}

namespace {
std::unique_ptr<nn::Model> build_model(const TopologySpec& spec) {
    if (spec.kind == TopologyKind::kBiLstm) {
        nn::BiLstmArch a;
        a.n_taps = spec.n_taps;
        a.n_features = spec.n_i;
        a.hidden_units = spec.n_h;
        a.n_outputs = spec.n_o;
        return nn::make_bilstm(a);
    }
    nn::MlpArch a;
    a.n_taps = spec.n_taps;
    a.n_features = spec.n_i;
    a.hidden = spec.hidden;
    a.n_outputs = spec.n_o;
    return nn::make_mlp(a);
}
}  // namespace

double latency_bench(const TopologySpec& spec, std::size_t n_symbols, std::uint64_t init_seed) {
    spec.validate();
    if (n_symbols < 1) throw ConfigError("latency_bench: n_symbols must be >= 1");
    auto model = build_model(spec);
    nn::init_params(*model, init_seed);

    nn::Matrix x(1, static_cast<std::size_t>(model->input_dim()));
    rng::Mt19937 gen(init_seed + 1);
    for (auto& v : x.data) v = gen.next_gaussian() * 0.3;
    nn::Matrix out;

    // warmup
    for (int i = 0; i < 16; ++i) model->forward(x, out);

    auto t0 = std::chrono::steady_clock::now();
    double sink = 0.0;
    for (std::size_t i = 0; i < n_symbols; ++i) {
        model->forward(x, out);
        sink += out.data[0];
    }
    auto t1 = std::chrono::steady_clock::now();
    if (sink == 12345.6789) return -1.0;  // defeat dead-code elimination
    double secs = std::chrono::duration<double>(t1 - t0).count();
    return secs / static_cast<double>(n_symbols);
}

std::string ComplexityReport::to_json() const {
    std::ostringstream os;
    const char* kind = topology.kind == TopologyKind::kBiLstm  ? "bilstm"
                       : topology.kind == TopologyKind::kMlp2 ? "mlp2"
                       : topology.kind == TopologyKind::kMlp3 ? "mlp3"
                                                              : "mlp4";
    os << "{\"topology\":{\"kind\":\"" << kind << "\",\"n_taps\":" << topology.n_taps
       << ",\"n_s\":" << topology.n_s() << ",\"n_i\":" << topology.n_i
       << ",\"n_o\":" << topology.n_o;
    if (topology.kind == TopologyKind::kBiLstm) {
        os << ",\"n_h\":" << topology.n_h;
    } else {
        os << ",\"hidden\":[";
        for (std::size_t i = 0; i < topology.hidden.size(); ++i) {
            if (i) os << ",";
            os << topology.hidden[i];
        }
        os << "]";
    }
    os << "},\"rmps\":" << rmps << ",\"params\":" << params;
    os << ",\"bops_layers\":[";
    for (std::size_t i = 0; i < bops_layers.size(); ++i) {
        if (i) os << ",";
        os << "{\"n\":" << bops_layers[i].n << ",\"m\":" << bops_layers[i].m
           << ",\"bops\":" << bops_layers[i].bops << "}";
    }
    os << "],\"bops_total\":" << bops_total;
    if (latency_s_per_symbol >= 0.0) {
        os.precision(9);
        os << ",\"latency_s_per_symbol\":" << latency_s_per_symbol;
    }
    os << ",\"machine\":\"" << machine << "\"}";
    return os.str();
}

}  // namespace eqlab::complexity
