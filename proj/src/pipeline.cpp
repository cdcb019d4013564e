#include "eqlab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "eqlab/channel.hpp"
#include "eqlab/complexity.hpp"
#include "eqlab/dataset.hpp"
#include "eqlab/errors.hpp"
#include "eqlab/metrics.hpp"
#include "eqlab/pitfalls.hpp"
#include "eqlab/trace_io.hpp"
#include "eqlab/train.hpp"

namespace eqlab::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) ok = true;
        if (!ok) throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
    }
}

json parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    return j;
}

struct Seeds {
    std::uint64_t data = 0, noise = 0, init = 0, shuffle = 0;
};

Seeds parse_seeds(const json& j) {
    if (!j.contains("seeds")) throw ConfigError("config: missing 'seeds'");
    const auto& s = j.at("seeds");
    reject_unknown(s, {"data", "noise", "init", "shuffle"}, "seeds");
    Seeds out;
    out.data = s.at("data").get<std::uint64_t>();
    out.noise = s.at("noise").get<std::uint64_t>();
    out.init = s.at("init").get<std::uint64_t>();
    out.shuffle = s.at("shuffle").get<std::uint64_t>();
    return out;
}

data::BitSource parse_source(const json& j, std::uint64_t data_seed) {
    if (!j.contains("source")) throw ConfigError("config: missing 'source'");
    const auto& s = j.at("source");
    reject_unknown(s, {"kind", "prbs_order", "polynomial_taps"}, "source");
    data::BitSource src;
    std::string kind = s.at("kind").get<std::string>();
    if (kind == "mersenne_twister") {
        src.kind = data::SourceKind::kMersenneTwister;
    } else if (kind == "prbs_lfsr") {
        src.kind = data::SourceKind::kPrbsLfsr;
        src.prbs_order = s.at("prbs_order").get<int>();
        if (s.contains("polynomial_taps"))
            src.polynomial_taps = s.at("polynomial_taps").get<std::vector<int>>();
    } else {
        throw ConfigError("config: source.kind must be mersenne_twister or prbs_lfsr");
    }
    src.seed = data_seed;
    src.validate();
    return src;
}

int parse_cardinality(const json& j) {
    if (!j.contains("constellation")) throw ConfigError("config: missing 'constellation'");
    reject_unknown(j.at("constellation"), {"cardinality"}, "constellation");
    return j.at("constellation").at("cardinality").get<int>();
}

channel::FiberParams parse_fiber(const json& f) {
    reject_unknown(f,
                   {"attenuation_db_per_km", "dispersion_ps_nm_km", "gamma_per_w_km",
                    "center_wavelength_nm", "manakov_factor"},
                   "link.fiber");
    channel::FiberParams p;
    p.attenuation_db_per_km = f.at("attenuation_db_per_km").get<double>();
    p.dispersion_ps_nm_km = f.at("dispersion_ps_nm_km").get<double>();
    p.gamma_per_w_km = f.at("gamma_per_w_km").get<double>();
    p.center_wavelength_nm = f.at("center_wavelength_nm").get<double>();
    if (f.contains("manakov_factor")) p.manakov_factor = f.at("manakov_factor").get<double>();
    p.validate();
    return p;
}

channel::ShapingConfig parse_shaping(const json& s) {
    reject_unknown(s, {"rolloff", "samples_per_symbol", "symbol_rate_gbd", "filter_span_symbols"},
                   "link.shaping");
    channel::ShapingConfig c;
    c.rolloff = s.at("rolloff").get<double>();
    c.samples_per_symbol = s.at("samples_per_symbol").get<int>();
    c.symbol_rate_gbd = s.at("symbol_rate_gbd").get<double>();
    c.filter_span_symbols = s.at("filter_span_symbols").get<int>();
    c.validate();
    return c;
}

struct LinkSection {
    channel::FiberParams fiber;
    channel::LinkConfig link;
    channel::ShapingConfig shaping;
};

LinkSection parse_link(const json& j) {
    if (!j.contains("link")) throw ConfigError("config: missing 'link'");
    const auto& l = j.at("link");
    reject_unknown(l,
                   {"fiber", "span_length_km", "num_spans", "step_km", "edfa_noise_figure_db",
                    "launch_power_dbm", "shaping"},
                   "link");
    LinkSection out;
    out.fiber = parse_fiber(l.at("fiber"));
    out.shaping = parse_shaping(l.at("shaping"));
    out.link.span_length_km = l.at("span_length_km").get<double>();
    out.link.num_spans = l.at("num_spans").get<int>();
    out.link.step_km = l.at("step_km").get<double>();
    out.link.edfa_noise_figure_db = l.at("edfa_noise_figure_db").get<double>();
    out.link.launch_power_dbm = l.at("launch_power_dbm").get<double>();
    out.link.validate();
    return out;
}

nn::TrainConfig parse_train(const json& j, std::uint64_t shuffle_seed) {
    if (!j.contains("train")) throw ConfigError("config: missing 'train'");
    const auto& t = j.at("train");
    reject_unknown(t,
                   {"loss", "l2_lambda", "batch_size", "learning_rate", "max_epochs",
                    "early_stop_metric", "patience", "eval_cap", "track_train_q"},
                   "train");
    nn::TrainConfig cfg;
    std::string loss = t.value("loss", "mse");
    if (loss == "mse")
        cfg.loss = nn::LossKind::kMse;
    else if (loss == "categorical_cel")
        cfg.loss = nn::LossKind::kCategoricalCel;
    else
        throw ConfigError("config: train.loss must be mse or categorical_cel");
    cfg.l2_lambda = t.value("l2_lambda", 0.0);
    cfg.batch_size = t.value("batch_size", 2048);
    cfg.learning_rate = t.value("learning_rate", 0.001);
    cfg.max_epochs = t.value("max_epochs", 1000);
    std::string esm = t.value("early_stop_metric", "val_q");
    if (esm == "val_q")
        cfg.early_stop_metric = nn::EarlyStopMetric::kValQ;
    else if (esm == "val_loss")
        cfg.early_stop_metric = nn::EarlyStopMetric::kValLoss;
    else
        throw ConfigError("config: train.early_stop_metric must be val_q or val_loss");
    cfg.patience = t.value("patience", 25);
    cfg.eval_cap = t.value("eval_cap", 0ull);
    cfg.seed = shuffle_seed;
    cfg.validate();
    return cfg;
}

std::unique_ptr<nn::Model> parse_model(const json& j, int n_taps, int cardinality) {
    if (!j.contains("model")) throw ConfigError("config: missing 'model'");
    const auto& m = j.at("model");
    reject_unknown(m, {"kind", "hidden", "hidden_units", "task"}, "model");
    std::string kind = m.at("kind").get<std::string>();
    std::string task_s = m.value("task", "regression");
    nn::Task task;
    if (task_s == "regression")
        task = nn::Task::kRegression;
    else if (task_s == "classification")
        task = nn::Task::kClassification;
    else
        throw ConfigError("config: model.task must be regression or classification");
    int n_outputs = task == nn::Task::kRegression ? 2 : cardinality;
    if (kind == "mlp") {
        nn::MlpArch a;
        a.n_taps = n_taps;
        a.hidden = m.at("hidden").get<std::vector<int>>();
        a.n_outputs = n_outputs;
        a.task = task;
        return nn::make_mlp(a);
    }
    if (kind == "bilstm") {
        nn::BiLstmArch a;
        a.n_taps = n_taps;
        a.hidden_units = m.at("hidden_units").get<int>();
        a.n_outputs = n_outputs;
        a.task = task;
        return nn::make_bilstm(a);
    }
    throw ConfigError("config: model.kind must be mlp or bilstm");
}

void ensure_dir(const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output dir: " + out_dir);
}

std::string generator_name(const data::BitSource& src) {
    if (src.kind == data::SourceKind::kMersenneTwister) return "mersenne_twister";
    return "prbs_lfsr_" + std::to_string(src.prbs_order);
}

bool is_pow2_u64(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

struct SimOutputs {
    std::vector<std::complex<double>> tx_x, tx_y, rx_x, rx_y;
    double symbol_rate_hz = 0.0;
};

json known_top_keys_check(const json& j) {
    reject_unknown(j,
                   {"name", "seeds", "source", "constellation", "num_symbols", "mode",
                    "b2b_target_q_db", "link", "dac", "dataset", "model", "train", "train_input",
                    "evaluate_input", "audit", "complexity", "report", "deterministic"},
                   "top level");
    return j;
}

SimOutputs simulate_core(const json& j, const Seeds& seeds) {
    auto src = parse_source(j, seeds.data);
    int m = parse_cardinality(j);
    auto constellation = data::QamConstellation::make(m);
    if (!j.contains("num_symbols")) throw ConfigError("config: missing 'num_symbols'");
    std::uint64_t n_symbols = j.at("num_symbols").get<std::uint64_t>();
    if (n_symbols == 0) throw ConfigError("config: num_symbols must be > 0");
    std::string mode = j.value("mode", "link");

    auto bits = data::source_bits(
        src, static_cast<std::size_t>(n_symbols) * 2 * constellation.bits_per_symbol());
    auto syms = data::map_symbols(bits, constellation);

    SimOutputs out;
    out.tx_x = std::move(syms.x);
    out.tx_y = std::move(syms.y);

    if (j.contains("dac")) {
        const auto& d = j.at("dac");
        reject_unknown(d, {"memory_samples", "frames", "sample_rate_gsa"}, "dac");
        if (mode != "link") throw ConfigError("config: dac emulation requires link mode");
        auto shaping = parse_link(j).shaping;
        double sps_eff = d.at("sample_rate_gsa").get<double>() / shaping.symbol_rate_gbd;
        std::uint64_t mem = d.at("memory_samples").get<std::uint64_t>();
        int frames = d.at("frames").get<int>();
        out.tx_x = data::dac_frame_repeat(out.tx_x, mem, frames, sps_eff, out.tx_x.size());
        out.tx_y = data::dac_frame_repeat(out.tx_y, mem, frames, sps_eff, out.tx_y.size());
    }

    rng::Mt19937 noise_gen(seeds.noise);
    if (mode == "b2b") {
        double target = j.value("b2b_target_q_db", 6.9);
        auto b2b = channel::awgn_b2b(out.tx_x, out.tx_y, target, constellation, noise_gen);
        out.rx_x = std::move(b2b.x);
        out.rx_y = std::move(b2b.y);
        out.symbol_rate_hz = 0.0;
    } else if (mode == "link") {
        auto link = parse_link(j);
        if (!is_pow2_u64(n_symbols))
            throw ConfigError("config: link mode requires a power-of-two num_symbols");
        auto field = channel::pulse_shape(out.tx_x, out.tx_y, link.shaping,
                                          link.link.launch_power_dbm);
        field = channel::propagate_link(field, link.fiber, link.link, noise_gen);
        auto rx = channel::rx_frontend(field, link.shaping, out.tx_x, out.tx_y);
        out.rx_x = std::move(rx.x);
        out.rx_y = std::move(rx.y);
        out.symbol_rate_hz = link.shaping.symbol_rate_hz();
    } else {
        throw ConfigError("config: mode must be link or b2b");
    }
    return out;
}

}  // namespace

std::string config_hash(const std::string& config_json) {
    auto j = parse_config(config_json);
    return io::sha256_hex(j.dump());
}

void run_simulate(const std::string& config_json, const std::string& out_dir) {
    auto j = known_top_keys_check(parse_config(config_json));
    auto seeds = parse_seeds(j);
    auto src = parse_source(j, seeds.data);
    auto sim = simulate_core(j, seeds);
    ensure_dir(out_dir);
    std::string hash = config_hash(config_json);

    io::TraceSidecar meta;
    meta.symbol_rate = true;
    meta.sample_rate_hz = sim.symbol_rate_hz;
    meta.symbol_rate_hz = sim.symbol_rate_hz;
    meta.seed = seeds.data;
    meta.generator_kind = generator_name(src);
    meta.link_config_json = j.contains("link") ? j.at("link").dump() : "{}";
    meta.launch_power_dbm =
        j.contains("link") ? j.at("link").at("launch_power_dbm").get<double>() : 0.0;
    meta.config_hash = hash;

    io::write_trace((fs::path(out_dir) / "tx_symbols").string(), sim.tx_x, sim.tx_y, meta);
    meta.seed = seeds.noise;
    io::write_trace((fs::path(out_dir) / "rx_symbols").string(), sim.rx_x, sim.rx_y, meta);
    io::write_text_file((fs::path(out_dir) / "config.json").string(),
                        j.dump(2) + "\n");
}

namespace {

struct LoadedDatasets {
    std::vector<std::shared_ptr<const data::WindowedDataset>> traces;
    data::QamConstellation constellation = data::QamConstellation::make(16);
    int n_taps = 0;
};

LoadedDatasets load_datasets(const json& j) {
    if (!j.contains("train_input")) throw ConfigError("config: missing 'train_input'");
    const auto& ti = j.at("train_input");
    reject_unknown(ti, {"traces", "train_count", "epoch_sample"}, "train_input");
    if (!j.contains("dataset")) throw ConfigError("config: missing 'dataset'");
    const auto& ds = j.at("dataset");
    reject_unknown(ds, {"n_taps", "splits"}, "dataset");

    LoadedDatasets out;
    out.n_taps = ds.at("n_taps").get<int>();
    out.constellation = data::QamConstellation::make(parse_cardinality(j));
    for (const auto& tr : ti.at("traces")) {
        reject_unknown(tr, {"tx", "rx"}, "train_input.traces[]");
        auto tx = io::read_trace(tr.at("tx").get<std::string>());
        auto rx = io::read_trace(tr.at("rx").get<std::string>());
        out.traces.push_back(std::make_shared<data::WindowedDataset>(
            std::move(rx.x), std::move(rx.y), std::move(tx.x), std::move(tx.y), out.n_taps,
            out.constellation));
    }
    if (out.traces.empty()) throw ConfigError("config: train_input.traces is empty");
    return out;
}

}  // namespace

void run_train(const std::string& config_json, const std::string& out_dir) {
    auto j = known_top_keys_check(parse_config(config_json));
    auto seeds = parse_seeds(j);
    auto loaded = load_datasets(j);
    auto cfg = parse_train(j, seeds.shuffle);
    auto model = parse_model(j, loaded.n_taps, loaded.constellation.cardinality());
    nn::init_params(*model, seeds.init);
    bool track_train_q = j.at("train").value("track_train_q", false);

    ensure_dir(out_dir);
    std::string hash = config_hash(config_json);

    nn::TrainResult result;
    nn::EvalSet test;
    std::unique_ptr<data::BatchSource> source;
    std::unique_ptr<data::MultiTraceSource> multi;
    nn::EvalSet val, train_probe;

    if (loaded.traces.size() == 1) {
        const auto& ds = *loaded.traces[0];
        data::SplitFractions f;
        const auto& sp = j.at("dataset").at("splits");
        reject_unknown(sp, {"train", "val", "test"}, "dataset.splits");
        f.train = sp.at("train").get<double>();
        f.val = sp.at("val").get<double>();
        f.test = sp.at("test").get<double>();
        auto idx = data::split_dataset(ds, f, seeds.shuffle);
        source = std::make_unique<data::SingleTraceSource>(ds, idx.train, seeds.shuffle + 1);
        val.ds = &ds;
        val.indices = idx.val;
        test.ds = &ds;
        test.indices = idx.test;
        if (track_train_q) {
            train_probe.ds = &ds;
            std::size_t cap = std::min<std::size_t>(idx.train.size(), 16384);
            train_probe.indices.assign(idx.train.begin(),
                                       idx.train.begin() + static_cast<std::ptrdiff_t>(cap));
        }
        result = nn::train(*model, *source, val, loaded.constellation, cfg,
                           track_train_q ? &train_probe : nullptr);
    } else {
        const auto& ti = j.at("train_input");
        int train_count = ti.at("train_count").get<int>();
        std::uint64_t epoch_sample = ti.at("epoch_sample").get<std::uint64_t>();
        multi = std::make_unique<data::MultiTraceSource>(loaded.traces, train_count,
                                                         static_cast<std::size_t>(epoch_sample),
                                                         seeds.shuffle + 1);
        auto held_out = multi->test_records();
        // first half validates (early stopping), second half is the test set
        std::size_t half = held_out.size() / 2;
        val.pool = multi.get();
        val.pool_records.assign(held_out.begin(), held_out.begin() + static_cast<std::ptrdiff_t>(half));
        test.pool = multi.get();
        test.pool_records.assign(held_out.begin() + static_cast<std::ptrdiff_t>(half), held_out.end());
        if (track_train_q) {
            train_probe.pool = multi.get();
            std::size_t cap = std::min<std::size_t>(multi->pool_size(), 16384);
            for (std::size_t i = 0; i < cap; ++i) train_probe.pool_records.push_back(i);
        }
        result = nn::train(*model, *multi, val, loaded.constellation, cfg,
                           track_train_q ? &train_probe : nullptr);
    }

    io::save_checkpoint((fs::path(out_dir) / "model").string(), *model);
    io::write_text_file((fs::path(out_dir) / "trace.csv").string(), result.trace.to_csv());

    auto test_eval = nn::evaluate_model(*model, test, loaded.constellation, cfg.loss);
    json summary;
    summary["config_hash"] = hash;
    summary["best_epoch"] = result.trace.best_epoch;
    summary["epochs_run"] = result.trace.epochs.size();
    summary["val"] = {{"q_db", result.final_val.q_db},
                      {"mi_bits", result.final_val.mi_bits},
                      {"evm", result.final_val.evm},
                      {"ber", result.final_val.ber}};
    summary["test"] = {{"q_db", test_eval.q_db},
                       {"mi_bits", test_eval.mi_bits},
                       {"evm", test_eval.evm},
                       {"ber", test_eval.ber}};
    io::write_text_file((fs::path(out_dir) / "train_summary.json").string(),
                        summary.dump(2) + "\n");
}

void run_evaluate(const std::string& config_json, const std::string& out_dir) {
    auto j = known_top_keys_check(parse_config(config_json));
    if (!j.contains("evaluate_input")) throw ConfigError("config: missing 'evaluate_input'");
    const auto& ei = j.at("evaluate_input");
    reject_unknown(ei, {"tx", "rx", "checkpoint", "n_taps"}, "evaluate_input");
    int m = parse_cardinality(j);
    auto constellation = data::QamConstellation::make(m);

    auto tx = io::read_trace(ei.at("tx").get<std::string>());
    auto rx = io::read_trace(ei.at("rx").get<std::string>());
    ensure_dir(out_dir);
    std::string hash = config_hash(config_json);

    std::vector<std::complex<double>> eq, ref;
    if (ei.contains("checkpoint")) {
        auto model = io::load_checkpoint(ei.at("checkpoint").get<std::string>());
        int window = model->input_dim() / 4;
        int n_taps = (window - 1) / 2;
        data::WindowedDataset ds(rx.x, rx.y, tx.x, tx.y, n_taps, constellation);
        nn::EvalSet all;
        all.ds = &ds;
        all.indices.resize(ds.count());
        for (std::size_t i = 0; i < all.indices.size(); ++i)
            all.indices[i] = static_cast<std::uint32_t>(i);
        auto ev = nn::evaluate_model(*model, all, constellation,
                                     model->task() == nn::Task::kRegression
                                         ? nn::LossKind::kMse
                                         : nn::LossKind::kCategoricalCel);
        eq = std::move(ev.equalized);
        ref = std::move(ev.reference);
    } else {
        // reference metrics on the raw received symbols, X then Y
        eq = rx.x;
        eq.insert(eq.end(), rx.y.begin(), rx.y.end());
        ref = tx.x;
        ref.insert(ref.end(), tx.y.begin(), tx.y.end());
    }

    auto report = metrics::evaluate_all(eq, ref, constellation);
    std::ostringstream wrapped;
    wrapped << "{\"config_hash\":\"" << hash << "\",\"metrics\":" << report.to_json() << "}\n";
    io::write_text_file((fs::path(out_dir) / "metrics.json").string(), wrapped.str());

    std::ostringstream scatter;
    scatter << "re,im,tx_label\n";
    scatter.precision(10);
    for (std::size_t i = 0; i < eq.size(); ++i)
        scatter << eq[i].real() << ',' << eq[i].imag() << ',' << constellation.decide(ref[i])
                << '\n';
    io::write_text_file((fs::path(out_dir) / "scatter.csv").string(), scatter.str());
}

namespace {

// columns: epoch,train_loss,train_q_db,val_q_db,...
std::pair<std::vector<double>, std::vector<double>> parse_trace_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw IoError("trace csv: empty");
    std::vector<double> train_q, val_q;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() < 4) throw IoError("trace csv: malformed row");
        train_q.push_back(std::stod(cells[2]));
        val_q.push_back(std::stod(cells[3]));
    }
    return {train_q, val_q};
}

}  // namespace

void run_audit(const std::string& config_json, const std::string& out_dir) {
    auto j = known_top_keys_check(parse_config(config_json));
    if (!j.contains("audit")) throw ConfigError("config: missing 'audit'");
    const auto& a = j.at("audit");
    reject_unknown(a,
                   {"rx", "tx", "autocorr_max_lag", "autocorr_threshold", "kappa",
                    "jail_gap_threshold_db", "train_trace_csv", "overfit_patience"},
                   "audit");
    pitfalls::AuditReport report;

    if (a.contains("rx")) {
        auto rx = io::read_trace(a.at("rx").get<std::string>());
        std::size_t max_lag = a.value("autocorr_max_lag", 65536ull);
        max_lag = std::min<std::size_t>(max_lag, rx.x.size() / 2);
        double thr = a.value("autocorr_threshold", 0.5);
        report.detected_period_symbols = pitfalls::autocorr_period(rx.x, max_lag, thr);
        if (report.detected_period_symbols)
            report.notes.push_back("autocorrelation peak spacing " +
                                   std::to_string(*report.detected_period_symbols));
        else
            report.notes.push_back("no autocorrelation periodicity above threshold");

        if (a.contains("tx")) {
            auto tx = io::read_trace(a.at("tx").get<std::string>());
            int m = parse_cardinality(j);
            auto constellation = data::QamConstellation::make(m);
            std::vector<std::complex<double>> eq = rx.x, ref = tx.x;
            eq.insert(eq.end(), rx.y.begin(), rx.y.end());
            ref.insert(ref.end(), tx.y.begin(), tx.y.end());
            report.jail_window = pitfalls::jail_window_detect(
                eq, ref, constellation, a.value("kappa", 1.0),
                a.value("jail_gap_threshold_db", 2.0));
        }
    }

    if (a.contains("train_trace_csv")) {
        auto [train_q, val_q] = parse_trace_csv(io::read_text_file(a.at("train_trace_csv").get<std::string>()));
        auto of = pitfalls::overfit_gap(train_q, val_q, a.value("overfit_patience", 5));
        report.overfit_gap_db = of.gap_db.empty() ? 0.0 : of.gap_db.back();
        if (of.overfit)
            report.notes.push_back("overfit: test Q declining since epoch " +
                                   std::to_string(of.onset_epoch));
    }

    ensure_dir(out_dir);
    std::string hash = config_hash(config_json);
    std::ostringstream wrapped;
    wrapped << "{\"config_hash\":\"" << hash << "\",\"audit\":" << report.to_json() << "}\n";
    io::write_text_file((fs::path(out_dir) / "audit.json").string(), wrapped.str());
}

void run_complexity(const std::string& config_json, const std::string& out_dir) {
    auto j = known_top_keys_check(parse_config(config_json));
    if (!j.contains("complexity")) throw ConfigError("config: missing 'complexity'");
    const auto& c = j.at("complexity");
    reject_unknown(c, {"topology", "quant", "latency_symbols"}, "complexity");
    const auto& t = c.at("topology");
    reject_unknown(t, {"kind", "n_taps", "hidden", "n_h", "n_i", "n_o"}, "complexity.topology");

    complexity::TopologySpec spec;
    std::string kind = t.at("kind").get<std::string>();
    if (kind == "mlp2")
        spec.kind = complexity::TopologyKind::kMlp2;
    else if (kind == "mlp3")
        spec.kind = complexity::TopologyKind::kMlp3;
    else if (kind == "mlp4")
        spec.kind = complexity::TopologyKind::kMlp4;
    else if (kind == "bilstm")
        spec.kind = complexity::TopologyKind::kBiLstm;
    else
        throw ConfigError("config: topology.kind must be mlp2|mlp3|mlp4|bilstm");
    spec.n_taps = t.at("n_taps").get<int>();
    spec.n_i = t.value("n_i", 4);
    spec.n_o = t.value("n_o", 2);
    if (spec.kind == complexity::TopologyKind::kBiLstm)
        spec.n_h = t.at("n_h").get<int>();
    else
        spec.hidden = t.at("hidden").get<std::vector<int>>();
    spec.validate();

    complexity::QuantSpec quant;
    bool have_quant = c.contains("quant");
    if (have_quant) {
        const auto& q = c.at("quant");
        reject_unknown(q, {"b_w", "b_i", "sparsity"}, "complexity.quant");
        quant.b_w = q.at("b_w").get<int>();
        quant.b_i = q.at("b_i").get<int>();
        quant.sparsity = q.value("sparsity", 0.0);
        quant.validate();
    }

    complexity::ComplexityReport report;
    report.topology = spec;
    report.rmps = complexity::rmps(spec);
    report.params = complexity::param_count(spec);
    if (have_quant && spec.kind != complexity::TopologyKind::kBiLstm) {
        std::size_t layers = spec.hidden.size() + 1;
        report.bops_layers =
            complexity::bops_mlp_layers(spec, std::vector<complexity::QuantSpec>(layers, quant));
        for (const auto& lb : report.bops_layers) report.bops_total += lb.bops;
    }
    std::uint64_t lat_n = c.value("latency_symbols", 0ull);
    if (lat_n > 0) report.latency_s_per_symbol = complexity::latency_bench(spec, lat_n);
    report.machine = complexity::machine_descriptor();

    ensure_dir(out_dir);
    std::ostringstream wrapped;
    wrapped << "{\"config_hash\":\"" << config_hash(config_json)
            << "\",\"complexity\":" << report.to_json() << "}\n";
    io::write_text_file((fs::path(out_dir) / "complexity.json").string(), wrapped.str());
}

void run_report(const std::string& config_json, const std::string& out_dir) {
    auto j = known_top_keys_check(parse_config(config_json));
    (void)j;
    ensure_dir(out_dir);
    json combined = json::object();
    json rows = json::array();
    for (const char* name : {"metrics.json", "audit.json", "complexity.json", "train_summary.json"}) {
        fs::path p = fs::path(out_dir) / name;
        if (fs::exists(p)) {
            combined[name] = json::parse(io::read_text_file(p.string()));
            rows.push_back(name);
        }
    }
    combined["artifacts"] = rows;
    combined["config_hash"] = config_hash(config_json);
    io::write_text_file((fs::path(out_dir) / "report.json").string(), combined.dump(2) + "\n");

    // flat CSV for plotting, one row per metrics-carrying artifact
    std::ostringstream csv;
    csv << "artifact,q_db,evm,mi_bits,ber\n";
    if (combined.contains("metrics.json")) {
        const auto& m = combined["metrics.json"]["metrics"];
        auto num = [](const json& v) {
            return v.is_number() ? std::to_string(v.get<double>()) : std::string("inf");
        };
        csv << "metrics.json," << num(m["q_db"]) << ',' << num(m["evm_fraction"]) << ','
            << num(m["mi_bits"]) << ',' << num(m["ber"]) << '\n';
    }
    if (combined.contains("train_summary.json")) {
        const auto& t = combined["train_summary.json"]["test"];
        csv << "train_summary.json," << t["q_db"].get<double>() << ',' << t["evm"].get<double>()
            << ',' << t["mi_bits"].get<double>() << ',' << t["ber"].get<double>() << '\n';
    }
    io::write_text_file((fs::path(out_dir) / "report.csv").string(), csv.str());
}

}  // namespace eqlab::pipeline
