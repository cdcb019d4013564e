#include "eqlab/nn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eqlab/errors.hpp"

namespace eqlab::nn {

std::size_t ParamStore::add(const std::string& name, std::vector<std::size_t> shape, bool is_weight) {
    TensorInfo t;
    t.name = name;
    t.shape = std::move(shape);
    t.size = 1;
    for (auto s : t.shape) t.size *= s;
    t.offset = value_.size();
    t.is_weight = is_weight;
    value_.resize(value_.size() + t.size, 0.0);
    grad_.resize(value_.size(), 0.0);
    tensors_.push_back(t);
    return tensors_.back().offset;
}

const TensorInfo& ParamStore::info(const std::string& name) const {
    for (const auto& t : tensors_)
        if (t.name == name) return t;
    throw ConfigError("params: no tensor named " + name);
}

void ParamStore::zero_grads() { std::fill(grad_.begin(), grad_.end(), 0.0); }

void MlpArch::validate() const {
    if (n_taps < 0) throw ConfigError("mlp: n_taps must be >= 0");
    if (hidden.empty() || hidden.size() > 4) throw ConfigError("mlp: 1..4 hidden layers supported");
    for (int h : hidden)
        if (h < 1) throw ConfigError("mlp: layer sizes must be >= 1");
    if (n_outputs < 1 || n_features < 1) throw ConfigError("mlp: bad output/feature count");
}

void BiLstmArch::validate() const {
    if (n_taps < 0) throw ConfigError("bilstm: n_taps must be >= 0");
    if (hidden_units < 1) throw ConfigError("bilstm: hidden_units must be >= 1");
    if (n_outputs < 1 || n_features < 1) throw ConfigError("bilstm: bad output/feature count");
}

namespace {

// C (rows x n) = A (rows x k) * W^T, W is (n x k); optionally accumulate.
void matmul_nt(const double* a, std::size_t lda, const double* w, std::size_t ldw, double* c,
               std::size_t ldc, std::size_t rows, std::size_t k, std::size_t n, bool accumulate) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* ar = a + r * lda;
        double* cr = c + r * ldc;
        for (std::size_t j = 0; j < n; ++j) {
            const double* wr = w + j * ldw;
            double acc = accumulate ? cr[j] : 0.0;
            for (std::size_t i = 0; i < k; ++i) acc += ar[i] * wr[i];
            cr[j] = acc;
        }
    }
}

// C (rows x k) += D (rows x n) * W (n x k)
void matmul_nn_acc(const double* d, std::size_t ldd, const double* w, std::size_t ldw, double* c,
                   std::size_t ldc, std::size_t rows, std::size_t n, std::size_t k) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* dr = d + r * ldd;
        double* cr = c + r * ldc;
        for (std::size_t j = 0; j < n; ++j) {
            double s = dr[j];
            if (s == 0.0) continue;
            const double* wr = w + j * ldw;
            for (std::size_t i = 0; i < k; ++i) cr[i] += s * wr[i];
        }
    }
}

// W (n x k) += D^T * A, D is (rows x n), A is (rows x k)
void matmul_tn_acc(const double* d, std::size_t ldd, const double* a, std::size_t lda, double* w,
                   std::size_t ldw, std::size_t rows, std::size_t n, std::size_t k) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* dr = d + r * ldd;
        const double* ar = a + r * lda;
        for (std::size_t j = 0; j < n; ++j) {
            double s = dr[j];
            if (s == 0.0) continue;
            double* wr = w + j * ldw;
            for (std::size_t i = 0; i < k; ++i) wr[i] += s * ar[i];
        }
    }
}

void add_bias_rows(double* c, std::size_t ldc, std::size_t rows, const double* b, std::size_t n) {
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < n; ++j) c[r * ldc + j] += b[j];
}

void bias_grad_acc(const double* d, std::size_t ldd, std::size_t rows, double* db, std::size_t n) {
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t j = 0; j < n; ++j) db[j] += d[r * ldd + j];
}

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

class MlpModel final : public Model {
public:
    explicit MlpModel(const MlpArch& arch) : arch_(arch) {
        arch_.validate();
        int in = arch_.input_dim();
        for (std::size_t l = 0; l < arch_.hidden.size(); ++l) {
            int out = arch_.hidden[l];
            std::string base = "h" + std::to_string(l + 1);
            params_.add(base + ".w", {static_cast<std::size_t>(out), static_cast<std::size_t>(in)}, true);
            params_.add(base + ".b", {static_cast<std::size_t>(out)}, false);
            in = out;
        }
        params_.add("out.w",
                    {static_cast<std::size_t>(arch_.n_outputs), static_cast<std::size_t>(in)}, true);
        params_.add("out.b", {static_cast<std::size_t>(arch_.n_outputs)}, false);
    }

    void forward(const Matrix& x, Matrix& out) override {
        check_input(x);
        const std::size_t bsz = x.rows;
        const std::size_t n_hidden = arch_.hidden.size();
        acts_.resize(n_hidden);
        const Matrix* prev = &x;
        for (std::size_t l = 0; l < n_hidden; ++l) {
            const auto& w = params_.info("h" + std::to_string(l + 1) + ".w");
            const auto& b = params_.info("h" + std::to_string(l + 1) + ".b");
            Matrix& a = acts_[l];
            a.resize(bsz, w.shape[0]);
            matmul_nt(prev->data.data(), prev->cols, params_.value_of(w), w.shape[1], a.data.data(),
                      a.cols, bsz, w.shape[1], w.shape[0], false);
            add_bias_rows(a.data.data(), a.cols, bsz, params_.value_of(b), b.size);
            for (auto& v : a.data) v = std::tanh(v);
            prev = &a;
        }
        const auto& w = params_.info("out.w");
        const auto& b = params_.info("out.b");
        out.resize(bsz, w.shape[0]);
        matmul_nt(prev->data.data(), prev->cols, params_.value_of(w), w.shape[1], out.data.data(),
                  out.cols, bsz, w.shape[1], w.shape[0], false);
        add_bias_rows(out.data.data(), out.cols, bsz, params_.value_of(b), b.size);
    }

    void backward(const Matrix& x, const Matrix& d_out) override {
        const std::size_t bsz = x.rows;
        const std::size_t n_hidden = arch_.hidden.size();
        const Matrix* below = n_hidden ? &acts_[n_hidden - 1] : &x;

        const auto& wo = params_.info("out.w");
        const auto& bo = params_.info("out.b");
        matmul_tn_acc(d_out.data.data(), d_out.cols, below->data.data(), below->cols,
                      params_.grad_of(wo), wo.shape[1], bsz, wo.shape[0], wo.shape[1]);
        bias_grad_acc(d_out.data.data(), d_out.cols, bsz, params_.grad_of(bo), bo.size);

        Matrix delta(bsz, wo.shape[1]);
        matmul_nn_acc(d_out.data.data(), d_out.cols, params_.value_of(wo), wo.shape[1],
                      delta.data.data(), delta.cols, bsz, wo.shape[0], wo.shape[1]);

        for (std::size_t l = n_hidden; l-- > 0;) {
            Matrix& a = acts_[l];
            for (std::size_t i = 0; i < delta.data.size(); ++i)
                delta.data[i] *= 1.0 - a.data[i] * a.data[i];  // tanh'
            const Matrix* input = (l == 0) ? &x : &acts_[l - 1];
            const auto& w = params_.info("h" + std::to_string(l + 1) + ".w");
            const auto& b = params_.info("h" + std::to_string(l + 1) + ".b");
            matmul_tn_acc(delta.data.data(), delta.cols, input->data.data(), input->cols,
                          params_.grad_of(w), w.shape[1], bsz, w.shape[0], w.shape[1]);
            bias_grad_acc(delta.data.data(), delta.cols, bsz, params_.grad_of(b), b.size);
            if (l > 0) {
                Matrix next(bsz, w.shape[1]);
                matmul_nn_acc(delta.data.data(), delta.cols, params_.value_of(w), w.shape[1],
                              next.data.data(), next.cols, bsz, w.shape[0], w.shape[1]);
                delta = std::move(next);
            }
        }
    }

    std::string arch_json() const override {
        std::ostringstream os;
        os << "{\"kind\":\"mlp\",\"n_taps\":" << arch_.n_taps << ",\"n_features\":" << arch_.n_features
           << ",\"hidden\":[";
        for (std::size_t i = 0; i < arch_.hidden.size(); ++i) {
            if (i) os << ",";
            os << arch_.hidden[i];
        }
        os << "],\"n_outputs\":" << arch_.n_outputs << ",\"task\":\""
           << (arch_.task == Task::kRegression ? "regression" : "classification") << "\"}";
        return os.str();
    }
    int input_dim() const override { return arch_.input_dim(); }
    int output_dim() const override { return arch_.n_outputs; }
    Task task() const override { return arch_.task; }

private:
    void check_input(const Matrix& x) const {
        if (x.cols != static_cast<std::size_t>(arch_.input_dim()))
            throw ConfigError("mlp: input shape mismatch");
    }
    MlpArch arch_;
    std::vector<Matrix> acts_;
};

class BiLstmModel final : public Model {
public:
    explicit BiLstmModel(const BiLstmArch& arch) : arch_(arch) {
        arch_.validate();
        const std::size_t nh = static_cast<std::size_t>(arch_.hidden_units);
        const std::size_t ni = static_cast<std::size_t>(arch_.n_features);
        for (const char* dir : {"fwd", "bwd"}) {
            params_.add(std::string(dir) + ".wx", {4 * nh, ni}, true);
            params_.add(std::string(dir) + ".wh", {4 * nh, nh}, true);
            params_.add(std::string(dir) + ".b", {4 * nh}, false);
        }
        params_.add("out.w",
                    {static_cast<std::size_t>(arch_.n_outputs),
                     static_cast<std::size_t>(arch_.head_inputs())},
                    true);
        params_.add("out.b", {static_cast<std::size_t>(arch_.n_outputs)}, false);
    }

    void forward(const Matrix& x, Matrix& out) override {
        if (x.cols != static_cast<std::size_t>(arch_.window() * arch_.n_features))
            throw ConfigError("bilstm: input shape mismatch");
        const std::size_t bsz = x.rows;
        const std::size_t ns = static_cast<std::size_t>(arch_.window());
        const std::size_t nh = static_cast<std::size_t>(arch_.hidden_units);

        head_in_.resize(bsz, 2 * ns * nh);
        run_direction(x, 0);
        run_direction(x, 1);

        const auto& w = params_.info("out.w");
        const auto& b = params_.info("out.b");
        out.resize(bsz, w.shape[0]);
        matmul_nt(head_in_.data.data(), head_in_.cols, params_.value_of(w), w.shape[1],
                  out.data.data(), out.cols, bsz, w.shape[1], w.shape[0], false);
        add_bias_rows(out.data.data(), out.cols, bsz, params_.value_of(b), b.size);
    }

    void backward(const Matrix& x, const Matrix& d_out) override {
        const std::size_t bsz = x.rows;
        const auto& wo = params_.info("out.w");
        const auto& bo = params_.info("out.b");
        matmul_tn_acc(d_out.data.data(), d_out.cols, head_in_.data.data(), head_in_.cols,
                      params_.grad_of(wo), wo.shape[1], bsz, wo.shape[0], wo.shape[1]);
        bias_grad_acc(d_out.data.data(), d_out.cols, bsz, params_.grad_of(bo), bo.size);

        d_head_.resize(bsz, head_in_.cols);
        std::fill(d_head_.data.begin(), d_head_.data.end(), 0.0);
        matmul_nn_acc(d_out.data.data(), d_out.cols, params_.value_of(wo), wo.shape[1],
                      d_head_.data.data(), d_head_.cols, bsz, wo.shape[0], wo.shape[1]);

        back_direction(x, 0);
        back_direction(x, 1);
    }

    std::string arch_json() const override {
        std::ostringstream os;
        os << "{\"kind\":\"bilstm\",\"n_taps\":" << arch_.n_taps
           << ",\"n_features\":" << arch_.n_features << ",\"hidden_units\":" << arch_.hidden_units
           << ",\"n_outputs\":" << arch_.n_outputs << ",\"task\":\""
           << (arch_.task == Task::kRegression ? "regression" : "classification") << "\"}";
        return os.str();
    }
    int input_dim() const override { return arch_.window() * arch_.n_features; }
    int output_dim() const override { return arch_.n_outputs; }
    Task task() const override { return arch_.task; }
    const Matrix* head_inputs() const override { return &head_in_; }

private:
    struct DirCache {
        // per step, rows = batch: gates [i f g o] (B x 4nh), c, tanh(c) (B x nh)
        std::vector<Matrix> gates, c, tc;
    };

    // head layout: direction-major, then time-ascending, then unit
    std::size_t head_col(int dir, std::size_t t, std::size_t ns, std::size_t nh) const {
        return (static_cast<std::size_t>(dir) * ns + t) * nh;
    }

    void run_direction(const Matrix& x, int dir) {
        const std::size_t bsz = x.rows;
        const std::size_t ns = static_cast<std::size_t>(arch_.window());
        const std::size_t nh = static_cast<std::size_t>(arch_.hidden_units);
        const std::size_t ni = static_cast<std::size_t>(arch_.n_features);
        const char* dn = dir == 0 ? "fwd" : "bwd";
        const auto& wx = params_.info(std::string(dn) + ".wx");
        const auto& wh = params_.info(std::string(dn) + ".wh");
        const auto& b = params_.info(std::string(dn) + ".b");

        DirCache& cache = cache_[dir];
        cache.gates.resize(ns);
        cache.c.resize(ns);
        cache.tc.resize(ns);

        Matrix h_prev(bsz, nh), c_prev(bsz, nh);
        for (std::size_t step = 0; step < ns; ++step) {
            std::size_t t = (dir == 0) ? step : ns - 1 - step;
            Matrix& z = cache.gates[step];
            z.resize(bsz, 4 * nh);
            matmul_nt(x.data.data() + t * ni, x.cols, params_.value_of(wx), wx.shape[1],
                      z.data.data(), z.cols, bsz, ni, 4 * nh, false);
            matmul_nt(h_prev.data.data(), h_prev.cols, params_.value_of(wh), wh.shape[1],
                      z.data.data(), z.cols, bsz, nh, 4 * nh, true);
            add_bias_rows(z.data.data(), z.cols, bsz, params_.value_of(b), b.size);

            Matrix& c = cache.c[step];
            Matrix& tc = cache.tc[step];
            c.resize(bsz, nh);
            tc.resize(bsz, nh);
            for (std::size_t r = 0; r < bsz; ++r) {
                double* zr = z.row(r);
                double* cr = c.row(r);
                double* tcr = tc.row(r);
                const double* cpr = c_prev.row(r);
                double* hout = head_in_.row(r) + head_col(dir, t, ns, nh);
                for (std::size_t u = 0; u < nh; ++u) {
                    double ig = sigmoid(zr[u]);
                    double fg = sigmoid(zr[nh + u]);
                    double gg = std::tanh(zr[2 * nh + u]);
                    double og = sigmoid(zr[3 * nh + u]);
                    zr[u] = ig;
                    zr[nh + u] = fg;
                    zr[2 * nh + u] = gg;
                    zr[3 * nh + u] = og;
                    double cv = fg * cpr[u] + ig * gg;
                    cr[u] = cv;
                    double tcv = std::tanh(cv);
                    tcr[u] = tcv;
                    hout[u] = og * tcv;
                }
            }
            c_prev = c;
            for (std::size_t r = 0; r < bsz; ++r) {
                const double* hsrc = head_in_.row(r) + head_col(dir, t, ns, nh);
                std::copy(hsrc, hsrc + nh, h_prev.row(r));
            }
        }
    }

    void back_direction(const Matrix& x, int dir) {
        const std::size_t bsz = x.rows;
        const std::size_t ns = static_cast<std::size_t>(arch_.window());
        const std::size_t nh = static_cast<std::size_t>(arch_.hidden_units);
        const std::size_t ni = static_cast<std::size_t>(arch_.n_features);
        const char* dn = dir == 0 ? "fwd" : "bwd";
        const auto& wx = params_.info(std::string(dn) + ".wx");
        const auto& wh = params_.info(std::string(dn) + ".wh");
        const auto& b = params_.info(std::string(dn) + ".b");
        DirCache& cache = cache_[dir];

        Matrix dh(bsz, nh), dc(bsz, nh), dz(bsz, 4 * nh);
        for (std::size_t step = ns; step-- > 0;) {
            std::size_t t = (dir == 0) ? step : ns - 1 - step;
            const Matrix& z = cache.gates[step];
            const Matrix& c = cache.c[step];
            const Matrix& tc = cache.tc[step];
            (void)c;
            const Matrix* c_prev = (step == 0) ? nullptr : &cache.c[step - 1];

            for (std::size_t r = 0; r < bsz; ++r) {
                const double* zr = z.row(r);
                const double* tcr = tc.row(r);
                const double* dhd = d_head_.row(r) + head_col(dir, t, ns, nh);
                double* dhr = dh.row(r);
                double* dcr = dc.row(r);
                double* dzr = dz.row(r);
                const double* cpr = c_prev ? c_prev->row(r) : nullptr;
                for (std::size_t u = 0; u < nh; ++u) {
                    double ig = zr[u], fg = zr[nh + u], gg = zr[2 * nh + u], og = zr[3 * nh + u];
                    double dh_total = dhr[u] + dhd[u];
                    double d_og = dh_total * tcr[u];
                    double d_c = dcr[u] + dh_total * og * (1.0 - tcr[u] * tcr[u]);
                    double d_ig = d_c * gg;
                    double d_gg = d_c * ig;
                    double d_fg = cpr ? d_c * cpr[u] : 0.0;
                    dzr[u] = d_ig * ig * (1.0 - ig);
                    dzr[nh + u] = d_fg * fg * (1.0 - fg);
                    dzr[2 * nh + u] = d_gg * (1.0 - gg * gg);
                    dzr[3 * nh + u] = d_og * og * (1.0 - og);
                    dcr[u] = d_c * fg;  // carried to previous step
                }
            }

            matmul_tn_acc(dz.data.data(), dz.cols, x.data.data() + t * ni, x.cols,
                          params_.grad_of(wx), wx.shape[1], bsz, 4 * nh, ni);
            if (step > 0) {
                // h_prev of this step lives in head_in_ at the previous time index
                std::size_t tp = (dir == 0) ? t - 1 : t + 1;
                for (std::size_t r = 0; r < bsz; ++r) {
                    const double* hp = head_in_.row(r) + head_col(dir, tp, ns, nh);
                    const double* dzr = dz.row(r);
                    for (std::size_t j = 0; j < 4 * nh; ++j) {
                        double s = dzr[j];
                        if (s == 0.0) continue;
                        double* wr = params_.grad_of(wh) + j * wh.shape[1];
                        for (std::size_t u = 0; u < nh; ++u) wr[u] += s * hp[u];
                    }
                }
            }
            bias_grad_acc(dz.data.data(), dz.cols, bsz, params_.grad_of(b), b.size);

            std::fill(dh.data.begin(), dh.data.end(), 0.0);
            if (step > 0)
                matmul_nn_acc(dz.data.data(), dz.cols, params_.value_of(wh), wh.shape[1],
                              dh.data.data(), dh.cols, bsz, 4 * nh, nh);
        }
    }

    BiLstmArch arch_;
    Matrix head_in_, d_head_;
    DirCache cache_[2];
};

}  // namespace

std::unique_ptr<Model> make_mlp(const MlpArch& arch) { return std::make_unique<MlpModel>(arch); }
std::unique_ptr<Model> make_bilstm(const BiLstmArch& arch) {
    return std::make_unique<BiLstmModel>(arch);
}

void init_params(Model& model, std::uint64_t seed) {
    rng::Mt19937 gen(seed);
    auto& p = model.params();
    for (const auto& t : p.manifest()) {
        double* v = p.value_of(t);
        if (t.is_weight) {
            std::size_t fan_in = t.shape.size() > 1 ? t.shape[1] : t.shape[0];
            double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
            for (std::size_t i = 0; i < t.size; ++i) v[i] = (2.0 * gen.next_double() - 1.0) * bound;
        } else {
            std::fill(v, v + t.size, 0.0);
            // forget-gate bias starts open
            if (t.name == "fwd.b" || t.name == "bwd.b") {
                std::size_t nh = t.size / 4;
                for (std::size_t i = nh; i < 2 * nh; ++i) v[i] = 1.0;
            }
        }
    }
}

double loss_mse(const Matrix& pred, const Matrix& target, Matrix* d_pred) {
    if (pred.rows != target.rows || pred.cols != target.cols)
        throw ConfigError("loss_mse: shape mismatch");
    double acc = 0.0;
    const double inv_b = 1.0 / static_cast<double>(pred.rows);
    if (d_pred) d_pred->resize(pred.rows, pred.cols);
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        double e = pred.data[i] - target.data[i];
        acc += e * e;
        if (d_pred) d_pred->data[i] = 2.0 * e * inv_b;
    }
    return acc * inv_b;
}

void softmax_rows(const Matrix& logits, Matrix& probs) {
    probs.resize(logits.rows, logits.cols);
    for (std::size_t r = 0; r < logits.rows; ++r) {
        const double* lr = logits.row(r);
        double* pr = probs.row(r);
        double mx = lr[0];
        for (std::size_t j = 1; j < logits.cols; ++j) mx = std::max(mx, lr[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < logits.cols; ++j) {
            pr[j] = std::exp(lr[j] - mx);
            sum += pr[j];
        }
        double inv = 1.0 / sum;
        for (std::size_t j = 0; j < logits.cols; ++j) pr[j] *= inv;
    }
}

double loss_cel(const Matrix& logits, const std::vector<int>& labels, Matrix* d_logits) {
    if (labels.size() != logits.rows) throw ConfigError("loss_cel: label count mismatch");
    Matrix probs;
    softmax_rows(logits, probs);
    const double inv_b = 1.0 / static_cast<double>(logits.rows);
    double acc = 0.0;
    if (d_logits) d_logits->resize(logits.rows, logits.cols);
    for (std::size_t r = 0; r < logits.rows; ++r) {
        int y = labels[r];
        if (y < 0 || static_cast<std::size_t>(y) >= logits.cols)
            throw ConfigError("loss_cel: label out of range");
        acc -= std::log(std::max(probs.at(r, static_cast<std::size_t>(y)), 1e-300));
        if (d_logits) {
            double* dr = d_logits->row(r);
            const double* pr = probs.row(r);
            for (std::size_t j = 0; j < logits.cols; ++j) dr[j] = pr[j] * inv_b;
            dr[static_cast<std::size_t>(y)] -= inv_b;
        }
    }
    return acc * inv_b;
}

double loss_l2(double base, const ParamStore& params, double lambda) {
    if (lambda == 0.0) return base;
    double acc = 0.0;
    for (const auto& t : params.manifest()) {
        if (!t.is_weight) continue;
        const double* v = params.value_of(t);
        for (std::size_t i = 0; i < t.size; ++i) acc += v[i] * v[i];
    }
    return base + lambda * acc;
}

void add_l2_grads(ParamStore& params, double lambda) {
    if (lambda == 0.0) return;
    for (const auto& t : params.manifest()) {
        if (!t.is_weight) continue;
        const double* v = params.value_of(t);
        double* g = params.grad_of(t);
        for (std::size_t i = 0; i < t.size; ++i) g[i] += 2.0 * lambda * v[i];
    }
}

void AdamState::ensure(std::size_t n) {
    if (m.size() != n) {
        m.assign(n, 0.0);
        v.assign(n, 0.0);
        t = 0;
    }
}

void adam_step(std::vector<double>& values, const std::vector<double>& grads, AdamState& state,
               double lr) {
    if (values.size() != grads.size()) throw ConfigError("adam: size mismatch");
    state.ensure(values.size());
    ++state.t;
    const double b1 = state.beta1, b2 = state.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < values.size(); ++i) {
        double g = grads[i];
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
        double mhat = state.m[i] / c1;
        double vhat = state.v[i] / c2;
        values[i] -= lr * mhat / (std::sqrt(vhat) + state.epsilon);
    }
}

double grad_norm_last_layer(const ParamStore& params) {
    const auto& t = params.info("out.w");
    const double* g = params.grad_of(t);
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size; ++i) acc += g[i] * g[i];
    return std::sqrt(acc);
}

std::vector<LayerWeightStats> weight_stats(const ParamStore& params,
                                           const std::vector<double>& thresholds, int bins) {
    std::vector<LayerWeightStats> out;
    for (const auto& t : params.manifest()) {
        if (!t.is_weight) continue;
        LayerWeightStats s;
        s.name = t.name;
        const double* v = params.value_of(t);
        double lo = v[0], hi = v[0];
        for (std::size_t i = 0; i < t.size; ++i) {
            lo = std::min(lo, v[i]);
            hi = std::max(hi, v[i]);
        }
        if (hi == lo) hi = lo + 1e-12;
        s.hist_min = lo;
        s.hist_max = hi;
        s.histogram.assign(static_cast<std::size_t>(bins), 0);
        for (std::size_t i = 0; i < t.size; ++i) {
            auto bin = static_cast<std::size_t>((v[i] - lo) / (hi - lo) * (bins - 1) + 0.5);
            ++s.histogram[bin];
        }
        for (double th : thresholds) {
            std::uint64_t n = 0;
            for (std::size_t i = 0; i < t.size; ++i)
                if (std::abs(v[i]) > th) ++n;
            s.outliers.push_back(n);
        }
        if (t.name == "out.w" && t.shape.size() == 2) {
            for (double th : thresholds) {
                std::vector<std::uint64_t> row_counts(t.shape[0], 0);
                for (std::size_t r = 0; r < t.shape[0]; ++r)
                    for (std::size_t cidx = 0; cidx < t.shape[1]; ++cidx)
                        if (std::abs(v[r * t.shape[1] + cidx]) > th) ++row_counts[r];
                s.per_row.push_back(std::move(row_counts));
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace eqlab::nn
