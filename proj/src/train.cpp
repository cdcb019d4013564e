#include "eqlab/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "eqlab/errors.hpp"
#include "eqlab/metrics.hpp"

namespace eqlab::nn {

void TrainConfig::validate() const {
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (learning_rate < 0) throw ConfigError("train: learning_rate must be >= 0");
    if (max_epochs < 1) throw ConfigError("train: max_epochs must be >= 1");
    if (patience < 1) throw ConfigError("train: patience must be >= 1");
}

std::string TrainTrace::to_csv() const {
    std::ostringstream os;
    os << "epoch,train_loss,train_q_db,val_q_db,val_mi,val_evm,grad_norm\n";
    os.precision(12);
    for (const auto& e : epochs)
        os << e.epoch << ',' << e.train_loss << ',' << e.train_q_db << ',' << e.val_q_db << ','
           << e.val_mi << ',' << e.val_evm << ',' << e.grad_norm_last_layer << '\n';
    return os.str();
}

namespace {

struct BatchBuffers {
    Matrix x, target, d_out, out;
    std::vector<int> labels;
};

void gather_batch(const data::BatchSource& src, std::size_t begin, std::size_t end, Task task,
                  const data::QamConstellation& c, BatchBuffers& buf) {
    const std::size_t bsz = end - begin;
    const auto& ds0 = src.dataset_of(src.record_at(begin));
    buf.x.resize(bsz, static_cast<std::size_t>(ds0.feature_dim()));
    if (task == Task::kRegression)
        buf.target.resize(bsz, 2);
    else
        buf.labels.resize(bsz);
    for (std::size_t i = 0; i < bsz; ++i) {
        std::size_t rec = src.record_at(begin + i);
        const auto& ds = src.dataset_of(rec);
        std::size_t local = src.local_index(rec);
        ds.fill_features(local, buf.x.row(i));
        if (task == Task::kRegression) {
            auto t = ds.regression_target(local);
            buf.target.at(i, 0) = t.real();
            buf.target.at(i, 1) = t.imag();
        } else {
            buf.labels[i] = ds.class_target(local);
        }
    }
    (void)c;
}

}  // namespace

EvalResult evaluate_model(Model& model, const EvalSet& eval, const data::QamConstellation& c,
                          LossKind loss, std::size_t cap) {
    EvalResult res;
    std::size_t n = eval.count();
    if (cap > 0) n = std::min(n, cap);
    if (n == 0) throw ConfigError("evaluate_model: empty evaluation set");

    const std::size_t chunk = 4096;
    Matrix x, out, target;
    std::vector<int> labels;
    res.equalized.reserve(n);
    res.reference.reserve(n);
    double loss_acc = 0.0;

    for (std::size_t base = 0; base < n; base += chunk) {
        std::size_t bsz = std::min(chunk, n - base);
        const data::WindowedDataset* ds0 =
            eval.ds ? eval.ds : &eval.pool->dataset_of(eval.pool_records[base]);
        x.resize(bsz, static_cast<std::size_t>(ds0->feature_dim()));
        if (model.task() == Task::kRegression)
            target.resize(bsz, 2);
        else
            labels.resize(bsz);
        std::vector<std::complex<double>> ref_chunk(bsz);
        for (std::size_t i = 0; i < bsz; ++i) {
            const data::WindowedDataset* ds;
            std::size_t local;
            if (eval.ds) {
                ds = eval.ds;
                local = eval.indices[base + i];
            } else {
                std::size_t rec = eval.pool_records[base + i];
                ds = &eval.pool->dataset_of(rec);
                local = eval.pool->local_index(rec);
            }
            ds->fill_features(local, x.row(i));
            auto t = ds->regression_target(local);
            ref_chunk[i] = t;
            if (model.task() == Task::kRegression) {
                target.at(i, 0) = t.real();
                target.at(i, 1) = t.imag();
            } else {
                labels[i] = ds->class_target(local);
            }
        }
        model.forward(x, out);
        if (model.task() == Task::kRegression) {
            loss_acc += loss_mse(out, target, nullptr) * static_cast<double>(bsz);
            for (std::size_t i = 0; i < bsz; ++i)
                res.equalized.emplace_back(out.at(i, 0), out.at(i, 1));
        } else {
            loss_acc += loss_cel(out, labels, nullptr) * static_cast<double>(bsz);
            for (std::size_t i = 0; i < bsz; ++i) {
                const double* r = out.row(i);
                std::size_t best = 0;
                for (std::size_t j = 1; j < out.cols; ++j)
                    if (r[j] > r[best]) best = j;
                res.equalized.push_back(c.point(static_cast<int>(best)));
            }
        }
        res.reference.insert(res.reference.end(), ref_chunk.begin(), ref_chunk.end());
    }
    res.loss = loss_acc / static_cast<double>(n);
    (void)loss;

    auto counted = metrics::ber_count(res.equalized, res.reference, c);
    res.ber = counted.ber;
    // worse-than-chance bit decisions map to the -inf sentinel
    res.q_db = metrics::q_db_from_ber(std::min(counted.ber, 0.5));
    res.evm = metrics::evm_rms(res.equalized, res.reference);
    if (model.task() == Task::kClassification) {
        // exact MI of the classifier posterior: log2(M) - CEL in bits
        res.mi_bits = std::max(0.0, std::log2(static_cast<double>(c.cardinality())) -
                                        res.loss / std::log(2.0));
    } else {
        try {
            res.mi_bits = metrics::mi_lower_bound(res.equalized, res.reference, c, 1e-6, 2);
        } catch (const ConfigError&) {
            res.mi_bits = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return res;
}

TrainResult train(Model& model, data::BatchSource& source, const EvalSet& val,
                  const data::QamConstellation& c, const TrainConfig& cfg,
                  const EvalSet* train_probe) {
    cfg.validate();
    TrainTrace trace;
    AdamState adam;
    BatchBuffers buf;

    const bool maximize = cfg.early_stop_metric == EarlyStopMetric::kValQ;
    double best = maximize ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity();
    std::vector<double> best_params = model.params().values();
    int best_epoch = 0;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        source.begin_epoch(static_cast<std::uint64_t>(epoch));
        const std::size_t n = source.epoch_size();
        double loss_acc = 0.0;
        double grad_norm_acc = 0.0;
        std::size_t batches = 0;

        for (std::size_t base = 0; base < n; base += static_cast<std::size_t>(cfg.batch_size)) {
            std::size_t end = std::min(n, base + static_cast<std::size_t>(cfg.batch_size));
            gather_batch(source, base, end, model.task(), c, buf);
            model.forward(buf.x, buf.out);
            double batch_loss;
            if (model.task() == Task::kRegression)
                batch_loss = loss_mse(buf.out, buf.target, &buf.d_out);
            else
                batch_loss = loss_cel(buf.out, buf.labels, &buf.d_out);
            batch_loss = loss_l2(batch_loss, model.params(), cfg.l2_lambda);
            if (!std::isfinite(batch_loss))
                throw TrainDivergence("train: non-finite loss at epoch " + std::to_string(epoch),
                                      trace);
            model.params().zero_grads();
            model.backward(buf.x, buf.d_out);
            add_l2_grads(model.params(), cfg.l2_lambda);
            grad_norm_acc += grad_norm_last_layer(model.params());
            adam_step(model.params().values(), model.params().grads(), adam, cfg.learning_rate);
            loss_acc += batch_loss * static_cast<double>(end - base);
            ++batches;
        }

        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_acc / static_cast<double>(n);
        rec.grad_norm_last_layer = batches ? grad_norm_acc / static_cast<double>(batches) : 0.0;

        LossKind lk = model.task() == Task::kRegression ? LossKind::kMse : LossKind::kCategoricalCel;
        EvalResult ev = evaluate_model(model, val, c, lk, cfg.eval_cap);
        rec.val_q_db = ev.q_db;
        rec.val_mi = ev.mi_bits;
        rec.val_evm = ev.evm;
        rec.train_q_db = std::numeric_limits<double>::quiet_NaN();
        if (train_probe)
            rec.train_q_db = evaluate_model(model, *train_probe, c, lk, cfg.eval_cap).q_db;
        trace.epochs.push_back(rec);

        double monitored = cfg.early_stop_metric == EarlyStopMetric::kValQ ? ev.q_db : ev.loss;
        bool improved = maximize ? monitored > best : monitored < best;
        if (improved) {
            best = monitored;
            best_epoch = epoch;
            best_params = model.params().values();
        } else if (epoch - best_epoch >= cfg.patience) {
            break;
        }
    }

    if (cfg.restore_best) model.params().values() = best_params;
    trace.best_epoch = best_epoch;
    trace.best_metric = best;

    TrainResult out;
    LossKind lk = model.task() == Task::kRegression ? LossKind::kMse : LossKind::kCategoricalCel;
    out.final_val = evaluate_model(model, val, c, lk, cfg.eval_cap);
    out.trace = std::move(trace);
    return out;
}

}  // namespace eqlab::nn
