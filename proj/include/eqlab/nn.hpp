#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "eqlab/rng.hpp"

namespace eqlab::nn {

// Row-major dense matrix.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) { resize(r, c); }
    void resize(std::size_t r, std::size_t c) {
        rows = r;
        cols = c;
        data.assign(r * c, 0.0);
    }
    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct TensorInfo {
    std::string name;
    std::vector<std::size_t> shape;
    std::size_t offset = 0;
    std::size_t size = 0;
    bool is_weight = false;  // participates in L2 and outlier stats
};

// Flat parameter/gradient storage with a named-tensor manifest. The layout
// doubles as the on-disk checkpoint format.
class ParamStore {
public:
    std::size_t add(const std::string& name, std::vector<std::size_t> shape, bool is_weight);
    const TensorInfo& info(const std::string& name) const;
    const std::vector<TensorInfo>& manifest() const { return tensors_; }

    std::size_t size() const { return value_.size(); }
    std::vector<double>& values() { return value_; }
    const std::vector<double>& values() const { return value_; }
    std::vector<double>& grads() { return grad_; }
    const std::vector<double>& grads() const { return grad_; }

    double* value_of(const TensorInfo& t) { return value_.data() + t.offset; }
    const double* value_of(const TensorInfo& t) const { return value_.data() + t.offset; }
    double* grad_of(const TensorInfo& t) { return grad_.data() + t.offset; }
    const double* grad_of(const TensorInfo& t) const { return grad_.data() + t.offset; }

    void zero_grads();

private:
    std::vector<double> value_, grad_;
    std::vector<TensorInfo> tensors_;
};

enum class Task { kRegression, kClassification };

struct MlpArch {
    int n_taps = 25;                     // window = 2*n_taps + 1
    int n_features = 4;
    std::vector<int> hidden = {481, 31, 263};  // 1..4 hidden layers, tanh
    int n_outputs = 2;
    Task task = Task::kRegression;

    int window() const { return 2 * n_taps + 1; }
    int input_dim() const { return window() * n_features; }
    void validate() const;
};

struct BiLstmArch {
    int n_taps = 25;
    int n_features = 4;
    int hidden_units = 226;
    int n_outputs = 2;
    Task task = Task::kRegression;

    int window() const { return 2 * n_taps + 1; }
    int head_inputs() const { return 2 * window() * hidden_units; }
    void validate() const;
};

// Trainable equalizer. forward() caches activations for the following
// backward(); single-threaded use per instance.
class Model {
public:
    virtual ~Model() = default;

    virtual void forward(const Matrix& x, Matrix& out) = 0;
    virtual void backward(const Matrix& x, const Matrix& d_out) = 0;  // accumulates into grads
    virtual std::string arch_json() const = 0;
    virtual int input_dim() const = 0;
    virtual int output_dim() const = 0;
    virtual Task task() const = 0;
    // recurrent models expose the concatenated hidden states of the last
    // forward() (head input); dense models return nullptr
    virtual const Matrix* head_inputs() const { return nullptr; }

    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }

protected:
    ParamStore params_;
};

std::unique_ptr<Model> make_mlp(const MlpArch& arch);
std::unique_ptr<Model> make_bilstm(const BiLstmArch& arch);
std::unique_ptr<Model> model_from_arch_json(const std::string& json_text);

// Uniform fan-in init for dense and recurrent weights, zero biases, LSTM
// forget-gate bias +1. Deterministic in (model manifest, seed).
void init_params(Model& model, std::uint64_t seed);

// Losses. Gradients are written for the mean over the batch.
double loss_mse(const Matrix& pred, const Matrix& target, Matrix* d_pred);
double loss_cel(const Matrix& logits, const std::vector<int>& labels, Matrix* d_logits);  // nats
void softmax_rows(const Matrix& logits, Matrix& probs);

// L2 term lambda * sum w^2 over weight tensors (biases excluded).
double loss_l2(double base, const ParamStore& params, double lambda);
void add_l2_grads(ParamStore& params, double lambda);

// Classical Adam with bias correction.
struct AdamState {
    std::vector<double> m, v;
    long long t = 0;
    double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;

    void ensure(std::size_t n);
};
void adam_step(std::vector<double>& values, const std::vector<double>& grads, AdamState& state,
               double lr);

// L2 norm of the output layer's weight gradient.
double grad_norm_last_layer(const ParamStore& params);

// Per-layer weight histograms and |w| > threshold outlier counts; the head
// layer is additionally broken down per output neuron.
struct LayerWeightStats {
    std::string name;
    std::vector<std::uint64_t> histogram;
    double hist_min = 0, hist_max = 0;
    std::vector<std::uint64_t> outliers;              // per threshold
    std::vector<std::vector<std::uint64_t>> per_row;  // head layer: [threshold][output neuron]
};
std::vector<LayerWeightStats> weight_stats(const ParamStore& params,
                                           const std::vector<double>& thresholds, int bins = 64);

}  // namespace eqlab::nn
