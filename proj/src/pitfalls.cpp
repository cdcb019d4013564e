#include "eqlab/pitfalls.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eqlab/channel.hpp"
#include "eqlab/errors.hpp"
#include "eqlab/fft.hpp"
#include "eqlab/metrics.hpp"

namespace eqlab::pitfalls {

std::vector<double> autocorr_magnitudes(const std::vector<cplx>& symbols, std::size_t max_lag) {
    const std::size_t n = symbols.size();
    if (n < 2 * max_lag || max_lag == 0)
        throw ConfigError("autocorr: need length >= 2*max_lag and max_lag >= 1");

    // linear autocorrelation via zero-padded FFT
    std::size_t m = 1;
    while (m < 2 * n) m <<= 1;
    std::vector<cplx> buf(m, cplx{0.0, 0.0});
    double power = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        buf[i] = symbols[i];
        power += std::norm(symbols[i]);
    }
    if (power == 0.0) {
        // all-zero stream: define R[0]=1, rest 0
        std::vector<double> r(max_lag + 1, 0.0);
        r[0] = 1.0;
        return r;
    }
    fft::Plan plan(m);
    plan.forward(buf);
    for (auto& v : buf) v = cplx{std::norm(v), 0.0};
    plan.inverse(buf);

    const double mean_power = power / static_cast<double>(n);
    std::vector<double> r(max_lag + 1);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double overlap = static_cast<double>(n - lag);
        r[lag] = std::abs(buf[lag]) / (overlap * mean_power);
    }
    return r;
}

std::optional<std::uint64_t> autocorr_period(const std::vector<cplx>& symbols, std::size_t max_lag,
                                             double peak_threshold) {
    auto r = autocorr_magnitudes(symbols, max_lag);
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        if (r[lag] > peak_threshold) return lag;
    }
    return std::nullopt;
}

JailWindowResult jail_window_detect(metrics::cspan rx_eq, metrics::cspan tx,
                                    const data::QamConstellation& c, double kappa,
                                    double gap_threshold_db) {
    JailWindowResult res;
    auto counted = metrics::ber_count(rx_eq, tx, c);
    double evm = metrics::evm_rms(rx_eq, tx);

    // per-cluster excess kurtosis (secondary evidence), averaged over the
    // real/imaginary axes of every populated cluster
    {
        const int m = c.cardinality();
        std::vector<std::vector<double>> res_r(m), res_i(m);
        for (std::size_t i = 0; i < rx_eq.size(); ++i) {
            int k = c.decide(tx[i]);
            auto e = rx_eq[i] - tx[i];
            res_r[k].push_back(e.real());
            res_i[k].push_back(e.imag());
        }
        double acc = 0.0;
        int used = 0;
        auto kurt = [](const std::vector<double>& v) {
            if (v.size() < 8) return 0.0;
            double n = static_cast<double>(v.size()), mu = 0.0;
            for (double x : v) mu += x;
            mu /= n;
            double m2 = 0.0, m4 = 0.0;
            for (double x : v) {
                double d = x - mu;
                m2 += d * d;
                m4 += d * d * d * d;
            }
            m2 /= n;
            m4 /= n;
            if (m2 <= 0) return 0.0;
            return m4 / (m2 * m2) - 3.0;
        };
        for (int k = 0; k < m; ++k) {
            if (res_r[k].size() >= 8) {
                acc += kurt(res_r[k]) + kurt(res_i[k]);
                used += 2;
            }
        }
        res.mean_excess_kurtosis = used ? acc / used : 0.0;
    }

    if (counted.counts.bit_errors == 0 || evm == 0.0) {
        // degenerate: perfect counting or perfect EVM, nothing to compare
        res.q_counted_db = counted.counts.bit_errors == 0 ? metrics::kInf
                                                          : metrics::q_db_from_ber(counted.ber);
        res.q_est_db = res.q_counted_db;
        return res;
    }

    res.q_counted_db = metrics::q_db_from_ber(counted.ber);
    double ber_est = metrics::ber_from_evm(evm, c.cardinality(), kappa);
    ber_est = std::clamp(ber_est, 1e-300, 0.5);
    res.q_est_db = metrics::q_db_from_ber(ber_est);
    res.q_gap_db = res.q_est_db - res.q_counted_db;
    res.flagged = res.q_gap_db > gap_threshold_db;
    return res;
}

OverfitResult overfit_gap(const std::vector<double>& train_q_db,
                          const std::vector<double>& test_q_db, int patience) {
    if (train_q_db.size() != test_q_db.size())
        throw ConfigError("overfit_gap: epoch series length mismatch");
    if (patience < 1) throw ConfigError("overfit_gap: patience must be >= 1");
    OverfitResult out;
    out.gap_db.resize(train_q_db.size());
    for (std::size_t i = 0; i < train_q_db.size(); ++i)
        out.gap_db[i] = train_q_db[i] - test_q_db[i];

    // flag when the test curve strictly declines for `patience` consecutive
    // epochs while the train curve holds at (or above) its running best; a
    // joint collapse of both curves is not overfitting
    const std::size_t n = test_q_db.size();
    double train_best = train_q_db[0];
    for (std::size_t i = 0; i + static_cast<std::size_t>(patience) < n; ++i) {
        train_best = std::max(train_best, train_q_db[i]);
        bool declining = true;
        for (std::size_t k = i; k < i + static_cast<std::size_t>(patience); ++k) {
            if (!(test_q_db[k + 1] < test_q_db[k])) {
                declining = false;
                break;
            }
        }
        std::size_t j = i + static_cast<std::size_t>(patience);
        if (declining && train_q_db[j] >= train_best - 0.1) {
            out.overfit = true;
            out.onset_epoch = static_cast<int>(i + 1);
            return out;
        }
    }
    return out;
}

LearnabilityResult prbs_learnability_test(const LearnabilityConfig& cfg) {
    auto constellation = data::QamConstellation::make(cfg.cardinality);
    const int bps = constellation.bits_per_symbol();
    const std::size_t n_total = cfg.train_symbols + cfg.test_symbols;

    auto bits = data::source_bits(cfg.source, n_total * static_cast<std::size_t>(2 * bps));
    auto syms = data::map_symbols(bits, constellation);

    rng::Mt19937 noise_gen(cfg.noise_seed);
    auto b2b = channel::awgn_b2b(syms.x, syms.y, cfg.target_q_db, constellation, noise_gen);

    data::WindowedDataset all(b2b.x, b2b.y, syms.x, syms.y, cfg.n_taps, constellation);
    // contiguous record split: first train_symbols records train, tail tests
    std::size_t usable = all.count();
    std::size_t n_train = std::min(cfg.train_symbols, usable);
    std::vector<std::uint32_t> train_idx, test_idx;
    for (std::size_t i = 0; i < n_train; ++i) train_idx.push_back(static_cast<std::uint32_t>(i));
    for (std::size_t i = n_train; i < usable; ++i) test_idx.push_back(static_cast<std::uint32_t>(i));

    // validation = tail of the training block, held out from updates
    std::size_t n_val = std::min<std::size_t>(n_train / 8, 8192);
    std::vector<std::uint32_t> val_idx(train_idx.end() - static_cast<std::ptrdiff_t>(n_val),
                                       train_idx.end());
    train_idx.resize(train_idx.size() - n_val);

    const bool classify = cfg.train.loss == nn::LossKind::kCategoricalCel;
    std::unique_ptr<nn::Model> model;
    if (!cfg.mlp_hidden.empty()) {
        nn::MlpArch arch;
        arch.n_taps = cfg.n_taps;
        arch.hidden = cfg.mlp_hidden;
        arch.n_outputs = classify ? cfg.cardinality : 2;
        arch.task = classify ? nn::Task::kClassification : nn::Task::kRegression;
        model = nn::make_mlp(arch);
    } else {
        nn::BiLstmArch arch;
        arch.n_taps = cfg.n_taps;
        arch.hidden_units = cfg.hidden_units;
        arch.n_outputs = classify ? cfg.cardinality : 2;
        arch.task = classify ? nn::Task::kClassification : nn::Task::kRegression;
        model = nn::make_bilstm(arch);
    }
    nn::init_params(*model, cfg.init_seed);

    data::SingleTraceSource source(all, train_idx, cfg.train.seed);
    nn::EvalSet val;
    val.ds = &all;
    val.indices = val_idx;
    auto result = nn::train(*model, source, val, constellation, cfg.train);

    nn::EvalSet test;
    test.ds = &all;
    test.indices = test_idx;
    auto test_eval = nn::evaluate_model(*model, test, constellation, cfg.train.loss);

    LearnabilityResult out;
    out.reference_q_db = b2b.calibrated_q_db;
    out.test_q_db = test_eval.q_db;
    out.gain_db = test_eval.q_db - cfg.target_q_db;
    out.trace = std::move(result.trace);
    return out;
}

NeighborProbeResult neighbor_only_probe(const data::WindowedDataset& train_ds,
                                        const data::WindowedDataset& test_ds,
                                        const data::QamConstellation& c,
                                        const nn::TrainConfig& train_cfg, int hidden_units,
                                        std::uint64_t init_seed) {
    if (!train_ds.mask_center() || !test_ds.mask_center())
        throw ConfigError("neighbor_only_probe: datasets must mask the center symbol");

    nn::MlpArch arch;
    arch.n_taps = train_ds.n_taps();
    arch.hidden = {hidden_units, hidden_units};
    arch.n_outputs = c.cardinality();
    arch.task = nn::Task::kClassification;
    auto model = nn::make_mlp(arch);
    nn::init_params(*model, init_seed);

    std::vector<std::uint32_t> train_idx(train_ds.count());
    for (std::size_t i = 0; i < train_idx.size(); ++i) train_idx[i] = static_cast<std::uint32_t>(i);
    std::vector<std::uint32_t> test_idx(test_ds.count());
    for (std::size_t i = 0; i < test_idx.size(); ++i) test_idx[i] = static_cast<std::uint32_t>(i);

    data::SingleTraceSource source(train_ds, train_idx, train_cfg.seed);
    nn::EvalSet val;
    val.ds = &test_ds;
    val.indices = test_idx;
    nn::train(*model, source, val, c, train_cfg);

    auto ev = nn::evaluate_model(*model, val, c, nn::LossKind::kCategoricalCel);
    // SER of the classifier against the true center labels
    std::uint64_t errors = 0;
    for (std::size_t i = 0; i < ev.equalized.size(); ++i)
        if (c.decide(ev.equalized[i]) != c.decide(ev.reference[i])) ++errors;

    NeighborProbeResult out;
    out.ser = static_cast<double>(errors) / static_cast<double>(ev.equalized.size());
    out.baseline = 1.0 - 1.0 / static_cast<double>(c.cardinality());
    return out;
}

std::string AuditReport::to_json() const {
    std::ostringstream os;
    os.precision(12);
    os << "{";
    os << "\"detected_period_symbols\":";
    if (detected_period_symbols)
        os << *detected_period_symbols;
    else
        os << "null";
    os << ",\"prbs_gain_db\":";
    if (prbs_gain_db)
        os << *prbs_gain_db;
    else
        os << "null";
    os << ",\"jail_window\":{\"flag\":" << (jail_window.flagged ? "true" : "false")
       << ",\"q_gap_db\":" << jail_window.q_gap_db
       << ",\"q_counted_db\":" << jail_window.q_counted_db
       << ",\"q_est_db\":" << jail_window.q_est_db
       << ",\"mean_excess_kurtosis\":" << jail_window.mean_excess_kurtosis << "}";
    os << ",\"overfit_gap_db\":" << overfit_gap_db;
    os << ",\"notes\":[";
    for (std::size_t i = 0; i < notes.size(); ++i) {
        if (i) os << ",";
        os << "\"" << notes[i] << "\"";
    }
    os << "]}";
    return os.str();
}

}  // namespace eqlab::pitfalls
