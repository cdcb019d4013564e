// Acceptance suite: runs the contract checks end to end and prints one
// pass/fail line per criterion. Usage: acceptance [criterion ...]; with no
// arguments every criterion runs. Exit code = number of failed criteria.
#include <quadmath.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "eqlab/bitsource.hpp"
#include "eqlab/channel.hpp"
#include "eqlab/complexity.hpp"
#include "eqlab/constellation.hpp"
#include "eqlab/dataset.hpp"
#include "eqlab/metrics.hpp"
#include "eqlab/nn.hpp"
#include "eqlab/pitfalls.hpp"
#include "eqlab/train.hpp"

using namespace eqlab;
using cplx = std::complex<double>;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string fmt(double v, int prec = 3) {
    std::ostringstream os;
    os.precision(prec);
    os << std::fixed << v;
    return os.str();
}

// ---------------------------------------------------------------- C1
// Complexity golden table: every published RMpS entry, exactly at printed
// precision (mantissa matches under round-to-nearest or truncation, covering
// the table's mixed convention).
Check criterion_1() {
    Check c;
    using namespace complexity;
    struct Row {
        TopologySpec spec;
        double printed;      // e-notation value
        std::int64_t exact;  // exact weight count for the MLP column, else -1
    };
    auto mlp = [](TopologyKind k, int taps, std::vector<int> h) {
        TopologySpec s;
        s.kind = k;
        s.n_taps = taps;
        s.hidden = std::move(h);
        return s;
    };
    auto lstm = [](int taps, int nh) {
        TopologySpec s;
        s.kind = TopologyKind::kBiLstm;
        s.n_taps = taps;
        s.n_h = nh;
        return s;
    };
    const std::vector<Row> rows = {
        {mlp(TopologyKind::kMlp2, 35, {600, 518}), 4.82e5, 482236},
        {mlp(TopologyKind::kMlp3, 35, {400, 460, 400}), 4.82e5, 482400},
        {mlp(TopologyKind::kMlp4, 35, {200, 156, 553, 555}), 4.82e5, 482293},
        {mlp(TopologyKind::kMlp2, 45, {1250, 458}), 1.02e6, 1028416},
        {mlp(TopologyKind::kMlp3, 45, {620, 564, 800}), 1.02e6, 1028160},
        {mlp(TopologyKind::kMlp4, 45, {610, 500, 500, 501}), 1.02e6, 1028542},
        {mlp(TopologyKind::kMlp3, 60, {1000, 1000, 600}), 2.08e6, 2085200},
        // the published layer list prints n4 = 200, inconsistent with the
        // same row's exact weight count 4,087,000 that n4 = 2000 reproduces
        {mlp(TopologyKind::kMlp4, 50, {2000, 500, 910, 2000}), 4.08e6, 4087000},
        {lstm(5, 73), 5.03e5, -1},
        {lstm(10, 52), 5.00e5, -1},
        {lstm(14, 44), 5.03e5, -1},
        {lstm(25, 48), 1.04e6, -1},
        {lstm(30, 43), 1.01e6, -1},
        {lstm(35, 40), 1.03e6, -1},
        {lstm(40, 53), 2.00e6, -1},
        {lstm(50, 68), 4.02e6, -1},
    };

    auto t0 = std::chrono::steady_clock::now();
    int idx = 0;
    for (const auto& row : rows) {
        ++idx;
        std::uint64_t got = rmps(row.spec);
        if (row.exact >= 0)
            c.expect(got == static_cast<std::uint64_t>(row.exact),
                     "row " + std::to_string(idx) + ": rmps " + std::to_string(got) + " != " +
                         std::to_string(row.exact));
        double exp10 = std::pow(10.0, std::floor(std::log10(row.printed)));
        double mant_printed = row.printed / exp10;
        double mant = static_cast<double>(got) / exp10;
        double rounded = std::round(mant * 100.0) / 100.0;
        double truncated = std::floor(mant * 100.0) / 100.0;
        bool match = std::abs(rounded - mant_printed) < 1e-9 ||
                     std::abs(truncated - mant_printed) < 1e-9;
        c.expect(match, "row " + std::to_string(idx) + ": " + std::to_string(got) +
                            " does not print at the table precision");
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < 1.0, "runtime " + fmt(secs) + " s >= 1 s");
    c.note("16/16 table entries, " + fmt(secs * 1e3, 1) + " ms");
    return c;
}

// ---------------------------------------------------------------- C2
Check criterion_2() {
    Check c;
    double q = metrics::q_db_from_ber(1e-3);
    c.expect(std::abs(q - 9.80) <= 0.01, "q(1e-3) = " + fmt(q, 4));
    double ber = metrics::ber_from_evm(0.094, 16, 1.076);
    double q_est = metrics::q_db_from_ber(ber);
    c.expect(std::abs(q_est - 13.62) <= 0.05, "evm->q = " + fmt(q_est, 4));
    c.note("q(1e-3)=" + fmt(q, 3) + " dB, overestimation example " + fmt(q_est, 3) + " dB");
    return c;
}

// ---------------------------------------------------------------- C3
Check criterion_3() {
    Check c;
    const struct {
        int order;
        std::uint64_t symbols;  // floor((2^order-1)/6), 64-QAM
    } rows[] = {
        {16, 10922},     {18, 43690},      {20, 174762},    {22, 699050},
        {24, 2796202},   {26, 11184810},   {28, 44739242},  {30, 178956970},
        {32, 715827882}, {34, 2863311530ull},
    };
    for (const auto& r : rows) {
        auto got = data::symbol_periodicity(r.order, 6);
        c.expect(got == r.symbols, "order " + std::to_string(r.order) + ": " +
                                       std::to_string(got) + " != " + std::to_string(r.symbols));
    }
    c.note("10/10 periodicity rows");
    return c;
}

// ---------------------------------------------------------------- C4
Check criterion_4() {
    Check c;
    auto p = data::dac_effective_symbols(512 * 1024, 10, 80.0 / 34.4);
    c.expect(p == 22544, "effective symbols " + std::to_string(p));
    c.expect(p / 1000 == 22, "not ~22k");

    auto constellation = data::QamConstellation::make(16);
    auto syms = data::map_symbols(data::mt_bits(9, 2 * 22544 * 4), constellation);
    auto tiled = data::dac_frame_repeat(syms.x, 512 * 1024, 10, 80.0 / 34.4, 4 * 22544);
    auto period = pitfalls::autocorr_period(tiled, 2 * 22544);
    c.expect(period.has_value() && *period == 22544,
             "autocorr period " + (period ? std::to_string(*period) : std::string("none")));
    c.note("P=22544 recovered by the detector");
    return c;
}

// ---------------------------------------------------------------- C5
Check criterion_5() {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    channel::ShapingConfig sh;
    sh.rolloff = 0.1;
    sh.samples_per_symbol = 8;
    sh.symbol_rate_gbd = 34.4;
    sh.filter_span_symbols = 32;
    auto constellation = data::QamConstellation::make(16);
    auto syms = data::map_symbols(data::mt_bits(5, 2 * (1u << 12) * 4), constellation);

    auto dual_evm = [&](const channel::RxSymbols& rx) {
        std::vector<cplx> r = rx.x, t = syms.x;
        r.insert(r.end(), rx.y.begin(), rx.y.end());
        t.insert(t.end(), syms.y.begin(), syms.y.end());
        return metrics::evm_rms(r, t);
    };

    // energy conservation, lossless linear
    {
        auto f = channel::pulse_shape(syms.x, syms.y, sh, 0.0);
        channel::FiberParams fib;
        fib.attenuation_db_per_km = 0.0;
        fib.gamma_per_w_km = 0.0;
        auto out = channel::ssfm_span(f, fib, 50.0, 1.0);
        double e_in = 0.0, e_out = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            e_in += std::norm(f.x[i]) + std::norm(f.y[i]);
            e_out += std::norm(out.x[i]) + std::norm(out.y[i]);
        }
        double rel = std::abs(e_out - e_in) / e_in;
        c.expect(rel <= 1e-12, "energy conservation rel err " + fmt(rel, 16));
    }

    // CW Manakov phase with loss
    {
        channel::FiberParams fib;
        fib.dispersion_ps_nm_km = 0.0;
        channel::OpticalField cw;
        cw.sample_rate_hz = 64e9;
        cw.symbol_rate_hz = 8e9;
        cw.x.assign(1u << 10, cplx{std::sqrt(0.002), 0.0});
        cw.y.assign(1u << 10, cplx{std::sqrt(0.001), 0.0});
        auto out = channel::ssfm_span(cw, fib, 80.0, 1.0);
        double alpha_km = fib.attenuation_db_per_km * std::log(10.0) / 10.0;
        double l_eff = (1.0 - std::exp(-alpha_km * 80.0)) / alpha_km;
        double want = (8.0 / 9.0) * fib.gamma_per_w_km * 0.003 * l_eff;
        double got = std::arg(out.x[0] / cw.x[0]);
        double rel = std::abs(got - want) / want;
        c.expect(rel <= 1e-6, "cw phase rel err " + fmt(rel, 10));
    }

    // dispersion round trip through a full linear link
    {
        channel::FiberParams lin;
        lin.gamma_per_w_km = 0.0;
        auto f = channel::pulse_shape(syms.x, syms.y, sh, 0.0);
        channel::OpticalField field = f;
        double amp = std::pow(10.0, lin.attenuation_db_per_km * 50.0 / 20.0);
        for (int s = 0; s < 5; ++s) {
            field = channel::ssfm_span(field, lin, 50.0, 1.0);
            for (auto& v : field.x) v *= amp;
            for (auto& v : field.y) v *= amp;
        }
        field = channel::cdc(field, lin, 250.0);
        double evm = dual_evm(channel::rx_frontend(field, sh, syms.x, syms.y));
        c.expect(evm < 0.005, "cd round-trip evm " + fmt(evm, 5));
    }

    // step-size convergence at the stock power level
    {
        channel::FiberParams fib;
        channel::LinkConfig link;
        link.num_spans = 2;
        link.launch_power_dbm = 6.0;
        link.edfa_noise_figure_db = -300.0;  // isolate deterministic propagation
        auto f = channel::pulse_shape(syms.x, syms.y, sh, link.launch_power_dbm);
        rng::Mt19937 g1(3), g2(3);
        channel::LinkConfig fine = link;
        fine.step_km = 0.5;
        double e1 = dual_evm(
            channel::rx_frontend(channel::propagate_link(f, fib, link, g1), sh, syms.x, syms.y));
        double e2 = dual_evm(
            channel::rx_frontend(channel::propagate_link(f, fib, fine, g2), sh, syms.x, syms.y));
        c.expect(std::abs(e1 - e2) < 0.001,
                 "step halving delta " + fmt(std::abs(e1 - e2) * 100, 4) + " pp");
    }

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < 300.0, "runtime " + fmt(secs, 1) + " s >= 5 min");
    c.note("channel numerics in " + fmt(secs, 1) + " s");
    return c;
}

// ---------------------------------------------------------------- C6
// Gradient oracle: independent quad-precision forward reimplementation,
// central differences at h = 1e-6.
namespace gradcheck {
using quad = __float128;

quad qsigmoid(quad v) { return quad(1) / (quad(1) + expq(-v)); }

quad mlp_loss(const nn::MlpArch& arch, const std::vector<quad>& p, const nn::ParamStore& layout,
              const nn::Matrix& x, bool mse, const nn::Matrix& target,
              const std::vector<int>& labels) {
    quad total = 0;
    for (std::size_t r = 0; r < x.rows; ++r) {
        std::vector<quad> act(x.cols);
        for (std::size_t i = 0; i < x.cols; ++i) act[i] = x.at(r, i);
        for (std::size_t l = 0; l <= arch.hidden.size(); ++l) {
            bool is_out = l == arch.hidden.size();
            std::string base = is_out ? "out" : "h" + std::to_string(l + 1);
            const auto& w = layout.info(base + ".w");
            const auto& b = layout.info(base + ".b");
            std::vector<quad> next(w.shape[0]);
            for (std::size_t j = 0; j < w.shape[0]; ++j) {
                quad acc = p[b.offset + j];
                for (std::size_t i = 0; i < w.shape[1]; ++i)
                    acc += p[w.offset + j * w.shape[1] + i] * act[i];
                next[j] = is_out ? acc : tanhq(acc);
            }
            act = std::move(next);
        }
        if (mse) {
            for (std::size_t j = 0; j < act.size(); ++j) {
                quad e = act[j] - quad(target.at(r, j));
                total += e * e;
            }
        } else {
            quad mx = act[0];
            for (auto& v : act) mx = v > mx ? v : mx;
            quad denom = 0;
            for (auto& v : act) denom += expq(v - mx);
            total -= (act[static_cast<std::size_t>(labels[r])] - mx - logq(denom));
        }
    }
    return total / quad(x.rows);
}

quad bilstm_loss(const nn::BiLstmArch& arch, const std::vector<quad>& p,
                 const nn::ParamStore& layout, const nn::Matrix& x, bool mse,
                 const nn::Matrix& target, const std::vector<int>& labels) {
    const std::size_t ns = static_cast<std::size_t>(arch.window());
    const std::size_t nh = static_cast<std::size_t>(arch.hidden_units);
    const std::size_t ni = static_cast<std::size_t>(arch.n_features);
    quad total = 0;
    for (std::size_t r = 0; r < x.rows; ++r) {
        std::vector<quad> head(2 * ns * nh);
        for (int dir = 0; dir < 2; ++dir) {
            std::string dn = dir == 0 ? "fwd" : "bwd";
            const auto& wx = layout.info(dn + ".wx");
            const auto& wh = layout.info(dn + ".wh");
            const auto& bb = layout.info(dn + ".b");
            std::vector<quad> h(nh, 0), cc(nh, 0);
            for (std::size_t step = 0; step < ns; ++step) {
                std::size_t t = dir == 0 ? step : ns - 1 - step;
                std::vector<quad> z(4 * nh);
                for (std::size_t j = 0; j < 4 * nh; ++j) {
                    quad acc = p[bb.offset + j];
                    for (std::size_t i = 0; i < ni; ++i)
                        acc += p[wx.offset + j * ni + i] * quad(x.at(r, t * ni + i));
                    for (std::size_t u = 0; u < nh; ++u) acc += p[wh.offset + j * nh + u] * h[u];
                    z[j] = acc;
                }
                for (std::size_t u = 0; u < nh; ++u) {
                    quad ig = qsigmoid(z[u]);
                    quad fg = qsigmoid(z[nh + u]);
                    quad gg = tanhq(z[2 * nh + u]);
                    quad og = qsigmoid(z[3 * nh + u]);
                    cc[u] = fg * cc[u] + ig * gg;
                    h[u] = og * tanhq(cc[u]);
                    head[(static_cast<std::size_t>(dir) * ns + t) * nh + u] = h[u];
                }
            }
        }
        const auto& w = layout.info("out.w");
        const auto& b = layout.info("out.b");
        std::vector<quad> out(w.shape[0]);
        for (std::size_t j = 0; j < w.shape[0]; ++j) {
            quad acc = p[b.offset + j];
            for (std::size_t i = 0; i < w.shape[1]; ++i)
                acc += p[w.offset + j * w.shape[1] + i] * head[i];
            out[j] = acc;
        }
        if (mse) {
            for (std::size_t j = 0; j < out.size(); ++j) {
                quad e = out[j] - quad(target.at(r, j));
                total += e * e;
            }
        } else {
            quad mx = out[0];
            for (auto& v : out) mx = v > mx ? v : mx;
            quad denom = 0;
            for (auto& v : out) denom += expq(v - mx);
            total -= (out[static_cast<std::size_t>(labels[r])] - mx - logq(denom));
        }
    }
    return total / quad(x.rows);
}

double worst_rel_error(nn::Model& model, bool is_mlp, const nn::MlpArch& ma,
                       const nn::BiLstmArch& ba, const nn::Matrix& x, bool mse, double lambda,
                       const std::vector<int>& labels, const nn::Matrix& target) {
    nn::Matrix out, d_out;
    model.forward(x, out);
    if (mse)
        nn::loss_mse(out, target, &d_out);
    else
        nn::loss_cel(out, labels, &d_out);
    model.params().zero_grads();
    model.backward(x, d_out);
    nn::add_l2_grads(model.params(), lambda);
    const auto& analytic = model.params().grads();

    std::vector<quad> p(model.params().size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = model.params().values()[i];
    auto eval = [&](const std::vector<quad>& q) {
        quad base = is_mlp ? mlp_loss(ma, q, model.params(), x, mse, target, labels)
                           : bilstm_loss(ba, q, model.params(), x, mse, target, labels);
        if (lambda > 0) {
            quad w2 = 0;
            for (const auto& t : model.params().manifest()) {
                if (!t.is_weight) continue;
                for (std::size_t i = 0; i < t.size; ++i) w2 += q[t.offset + i] * q[t.offset + i];
            }
            base += quad(lambda) * w2;
        }
        return base;
    };
    const quad h = 1e-6;
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        quad keep = p[i];
        p[i] = keep + h;
        quad up = eval(p);
        p[i] = keep - h;
        quad dn = eval(p);
        p[i] = keep;
        double numeric = static_cast<double>((up - dn) / (2 * h));
        double rel = std::abs(analytic[i] - numeric) / (std::abs(analytic[i]) + 1e-8);
        worst = std::max(worst, rel);
    }
    return worst;
}
}  // namespace gradcheck

Check criterion_6() {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    nn::MlpArch mlp;
    mlp.n_taps = 1;
    mlp.hidden = {6, 5, 4};
    nn::BiLstmArch lstm;
    lstm.n_taps = 1;
    lstm.hidden_units = 4;

    nn::Matrix x(7, 12), target(7, 2);
    rng::Mt19937 gen(23);
    for (auto& v : x.data) v = 0.5 * gen.next_gaussian();
    for (auto& v : target.data) v = 0.5 * gen.next_gaussian();
    std::vector<int> labels = {0, 1, 2, 3, 1, 0, 2};

    double worst = 0.0;
    for (double lambda : {0.0, 0.01}) {
        {
            auto m = nn::make_mlp(mlp);
            nn::init_params(*m, 31);
            c.expect(m->params().size() <= 500, "mlp too large");
            worst = std::max(worst, gradcheck::worst_rel_error(*m, true, mlp, lstm, x, true,
                                                               lambda, {}, target));
        }
        {
            auto m = nn::make_bilstm(lstm);
            nn::init_params(*m, 37);
            c.expect(m->params().size() <= 500, "bilstm too large");
            worst = std::max(worst, gradcheck::worst_rel_error(*m, false, mlp, lstm, x, true,
                                                               lambda, {}, target));
        }
        {
            nn::MlpArch cls = mlp;
            cls.n_outputs = 4;
            cls.task = nn::Task::kClassification;
            auto m = nn::make_mlp(cls);
            nn::init_params(*m, 41);
            worst = std::max(worst, gradcheck::worst_rel_error(*m, true, cls, lstm, x, false,
                                                               lambda, labels, target));
        }
        {
            nn::BiLstmArch cls = lstm;
            cls.n_outputs = 4;
            cls.task = nn::Task::kClassification;
            auto m = nn::make_bilstm(cls);
            nn::init_params(*m, 43);
            worst = std::max(worst, gradcheck::worst_rel_error(*m, false, mlp, cls, x, false,
                                                               lambda, labels, target));
        }
    }
    c.expect(worst < 1e-5, "worst rel grad error " + fmt(worst, 8));
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < 120.0, "runtime " + fmt(secs, 1) + " s >= 2 min");
    { std::ostringstream w; w.precision(2); w << std::scientific << worst; c.note("worst rel err " + w.str() + ", " + fmt(secs, 1) + " s"); }
    return c;
}

// ---------------------------------------------------------------- C9
Check criterion_9() {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    auto constellation = data::QamConstellation::make(16);
    rng::Mt19937 gen(23);
    const std::size_t n = 1u << 16;
    std::vector<cplx> tx(n);
    for (auto& v : tx) v = constellation.point(static_cast<int>(gen.next_below(16)));

    // constructed line-cluster dataset
    {
        const double spacing = 2.0 / std::sqrt(10.0);
        std::vector<cplx> rx(n);
        for (std::size_t i = 0; i < n; ++i) {
            rx[i] = tx[i] + 0.015 * gen.next_cgaussian();
            if (gen.next_double() < 0.03)
                rx[i] += cplx{(gen.next_u32() & 1u) ? spacing : -spacing, 0.0};
        }
        auto res = pitfalls::jail_window_detect(rx, tx, constellation, 1.0, 2.0);
        c.expect(res.flagged, "line cluster not flagged");
        c.expect(res.q_gap_db >= 3.0, "gap " + fmt(res.q_gap_db) + " dB < 3 dB");
        c.note("line-cluster gap " + fmt(res.q_gap_db, 2) + " dB");
    }

    // AWGN clusters across SNR 10..25 dB never flag
    for (double snr_db = 10.0; snr_db <= 25.0; snr_db += 1.0) {
        double sigma = std::pow(10.0, -snr_db / 20.0);
        std::vector<cplx> rx(n);
        for (std::size_t i = 0; i < n; ++i) rx[i] = tx[i] + sigma * gen.next_cgaussian();
        auto res = pitfalls::jail_window_detect(rx, tx, constellation, 1.0, 2.0);
        c.expect(!res.flagged, "false positive at snr " + fmt(snr_db, 1) + " dB");
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < 60.0, "runtime " + fmt(secs, 1) + " s >= 1 min");
    return c;
}

// ---------------------------------------------------------------- C11
Check criterion_11() {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    auto constellation = data::QamConstellation::make(16);
    rng::Mt19937 gen(31);
    const std::size_t n = 1u << 18;
    std::vector<cplx> tx(n);
    for (auto& v : tx) v = constellation.point(static_cast<int>(gen.next_below(16)));

    double mi0 = metrics::mi_lower_bound(tx, tx, constellation, 1e-6);
    c.expect(std::abs(mi0 - 4.0) <= 0.01, "noiseless mi " + fmt(mi0, 4));

    // 2-D quadrature oracle for the AWGN mutual information
    auto oracle = [&](double sigma) {
        const int nq = 121;
        const double half = 6.0 * sigma / std::sqrt(2.0);
        const double h = 2.0 * half / (nq - 1);
        const double axis_var = sigma * sigma / 2.0;
        std::vector<double> node(nq), wgt(nq);
        for (int i = 0; i < nq; ++i) {
            node[i] = -half + i * h;
            double simpson = (i == 0 || i == nq - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            wgt[i] = simpson * h / 3.0 * std::exp(-node[i] * node[i] / (2.0 * axis_var)) /
                     std::sqrt(2.0 * M_PI * axis_var);
        }
        const int m = constellation.cardinality();
        const double s2 = sigma * sigma;
        double expected = 0.0;
        for (int k = 0; k < m; ++k) {
            double inner = 0.0;
            for (int a = 0; a < nq; ++a)
                for (int b = 0; b < nq; ++b) {
                    cplx z{node[a], node[b]};
                    double sum = 0.0;
                    for (int i2 = 0; i2 < m; ++i2) {
                        double d =
                            std::norm(constellation.point(k) - constellation.point(i2) + z) -
                            std::norm(z);
                        sum += std::exp(-d / s2);
                    }
                    inner += wgt[a] * wgt[b] * std::log2(sum);
                }
            expected += inner;
        }
        return std::log2(static_cast<double>(m)) - expected / m;
    };

    double prev = 4.0 + 1e-9;
    for (double sigma : {0.1, 0.18, 0.25, 0.35}) {
        std::vector<cplx> rx(n);
        rng::Mt19937 g2(101);
        for (std::size_t i = 0; i < n; ++i) rx[i] = tx[i] + sigma * g2.next_cgaussian();
        double est = metrics::mi_lower_bound(rx, tx, constellation, 1e-9);
        double want = oracle(sigma);
        c.expect(std::abs(est - want) <= 0.05, "sigma " + fmt(sigma, 2) + ": est " + fmt(est, 4) +
                                                   " vs oracle " + fmt(want, 4));
        c.expect(est <= prev + 1e-9, "not monotone at sigma " + fmt(sigma, 2));
        prev = est;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < 120.0, "runtime " + fmt(secs, 1) + " s >= 2 min");
    c.note("noiseless " + fmt(mi0, 3) + " bits, ladder within 0.05 of quadrature");
    return c;
}

// ---------------------------------------------------------------- C12
Check criterion_12() {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    using namespace complexity;
    rng::Mt19937 gen(11);
    const double sparsities[] = {0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875};
    for (int trial = 0; trial < 50; ++trial) {
        TopologySpec s;
        s.kind = TopologyKind::kMlp3;
        s.n_taps = static_cast<int>(gen.next_below(40));
        s.hidden = {1 + static_cast<int>(gen.next_below(700)),
                    1 + static_cast<int>(gen.next_below(700)),
                    1 + static_cast<int>(gen.next_below(700))};
        QuantSpec q;
        q.b_w = 1 + static_cast<int>(gen.next_below(16));
        q.b_i = 1 + static_cast<int>(gen.next_below(16));
        q.sparsity = sparsities[gen.next_below(8)];
        auto layers = bops_mlp_layers(s, std::vector<QuantSpec>(4, q));
        std::uint64_t total = 0;
        for (const auto& lb : layers) total += lb.bops;
        if (bops_mlp3(s, q) != total) {
            c.expect(false, "composition mismatch at trial " + std::to_string(trial));
            break;
        }
    }

    // exact quadratic bit-width scaling of the multiplicative term
    TopologySpec s;
    s.kind = TopologyKind::kMlp3;
    s.n_taps = 10;
    s.hidden = {32, 24, 16};
    QuantSpec q1{1, 1, 0.0}, q4{4, 4, 0.0}, q8{8, 8, 0.0}, q16{16, 16, 0.0};
    std::uint64_t cc = rmps(s);
    std::uint64_t acc_only = bops_mlp3(s, q1) - cc * 3;
    auto mult = [&](const QuantSpec& q) {
        return bops_mlp3(s, q) - acc_only - cc * static_cast<std::uint64_t>(q.b_w + q.b_i);
    };
    c.expect(mult(q8) == 4 * mult(q4), "4->8 bit scaling not exactly 4x");
    c.expect(mult(q16) == 4 * mult(q8), "8->16 bit scaling not exactly 4x");

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < 1.0, "runtime " + fmt(secs) + " s >= 1 s");
    c.note("50-spec identity + quadratic scaling, " + fmt(secs * 1e3, 1) + " ms");
    return c;
}

// ------------------------------------------------- shared helpers for 7/8/10

struct TraceOut {
    std::vector<cplx> tx_x, tx_y, rx_x, rx_y;
};

TraceOut simulate_link_trace(std::uint64_t data_seed, std::uint64_t noise_seed, std::size_t n_syms,
                             std::size_t dac_unique, double power_dbm, int spans) {
    auto constellation = data::QamConstellation::make(16);
    auto syms = data::map_symbols(data::mt_bits(data_seed, 2 * n_syms * 4), constellation);
    TraceOut t;
    if (dac_unique > 0) {
        t.tx_x = data::dac_frame_repeat(syms.x, dac_unique, 1, 1.0, n_syms);
        t.tx_y = data::dac_frame_repeat(syms.y, dac_unique, 1, 1.0, n_syms);
    } else {
        t.tx_x = std::move(syms.x);
        t.tx_y = std::move(syms.y);
    }
    channel::ShapingConfig sh;
    sh.rolloff = 0.1;
    sh.samples_per_symbol = 8;
    sh.symbol_rate_gbd = 34.4;
    sh.filter_span_symbols = 16;
    channel::FiberParams fiber;
    channel::LinkConfig link;
    link.span_length_km = 50;
    link.num_spans = spans;
    link.step_km = 2;
    link.launch_power_dbm = power_dbm;
    link.edfa_noise_figure_db = 4.5;
    rng::Mt19937 noise(noise_seed);
    auto field = channel::pulse_shape(t.tx_x, t.tx_y, sh, power_dbm);
    field = channel::propagate_link(field, fiber, link, noise);
    auto rx = channel::rx_frontend(field, sh, t.tx_x, t.tx_y);
    t.rx_x = std::move(rx.x);
    t.rx_y = std::move(rx.y);
    return t;
}

std::vector<double> median3(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i == 0 || i + 1 == v.size()) {
            out[i] = v[i];
            continue;
        }
        double a = v[i - 1], b = v[i], d = v[i + 1];
        out[i] = std::max(std::min(a, b), std::min(std::max(a, b), d));
    }
    return out;
}

// ---------------------------------------------------------------- C7
Check criterion_7() {
    Check c;
    auto t0 = std::chrono::steady_clock::now();

    pitfalls::LearnabilityConfig cfg;
    cfg.cardinality = 8;
    cfg.target_q_db = 6.9;
    cfg.train_symbols = 1u << 15;
    cfg.test_symbols = 1u << 14;
    cfg.n_taps = 2;
    cfg.mlp_hidden = {512};  // wide single-layer probe
    cfg.train.loss = nn::LossKind::kCategoricalCel;
    cfg.train.batch_size = 128;
    cfg.train.learning_rate = 0.003;
    cfg.train.max_epochs = 400;
    cfg.train.patience = 120;
    cfg.train.eval_cap = 4096;
    cfg.train.seed = 5;
    cfg.noise_seed = 7;
    cfg.init_seed = 11;

    cfg.source.kind = data::SourceKind::kPrbsLfsr;
    cfg.source.prbs_order = 16;
    cfg.source.seed = 3;
    auto lfsr = pitfalls::prbs_learnability_test(cfg);
    c.expect(lfsr.gain_db > 0.5, "lfsr-16 gain " + fmt(lfsr.gain_db) + " dB <= 0.5");
    c.note("lfsr-16 gain " + fmt(lfsr.gain_db, 2) + " dB");

    cfg.source.kind = data::SourceKind::kMersenneTwister;
    cfg.train.max_epochs = 60;  // flat by construction; bounded probe
    cfg.train.patience = 20;
    for (std::uint64_t seed : {1001ull, 2002ull, 3003ull}) {
        cfg.source.seed = seed;
        auto mt = pitfalls::prbs_learnability_test(cfg);
        c.expect(mt.gain_db <= 0.1,
                 "mt seed " + std::to_string(seed) + " gain " + fmt(mt.gain_db) + " dB > 0.1");
        c.note("mt " + std::to_string(seed) + ": " + fmt(mt.gain_db, 2) + " dB");
    }

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < 1800.0, "runtime " + fmt(secs, 1) + " s >= 30 min");
    c.note(fmt(secs, 0) + " s");
    return c;
}

// ---------------------------------------------------------------- C8
Check criterion_8() {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    auto constellation = data::QamConstellation::make(16);
    const std::size_t n_syms = 1u << 13;
    const int taps = 4, spans = 5;
    const double power = 6.0;
    const std::size_t dac_unique = 600;

    nn::MlpArch arch;
    arch.n_taps = taps;
    arch.hidden = {64, 32};
    nn::TrainConfig cfg;
    cfg.batch_size = 256;
    cfg.learning_rate = 0.002;
    cfg.max_epochs = 50;
    cfg.patience = 50;
    cfg.eval_cap = 8192;
    cfg.seed = 5;

    // single limited-variability trace, tested against an independent trace
    auto tr_single = simulate_link_trace(100, 200, n_syms, dac_unique, power, spans);
    auto tr_probe = simulate_link_trace(999, 888, n_syms, 0, power, spans);
    data::WindowedDataset ds_single(tr_single.rx_x, tr_single.rx_y, tr_single.tx_x, tr_single.tx_y,
                                    taps, constellation);
    data::WindowedDataset ds_probe(tr_probe.rx_x, tr_probe.rx_y, tr_probe.tx_x, tr_probe.tx_y,
                                   taps, constellation);
    std::vector<std::uint32_t> all_single(ds_single.count()), all_probe(ds_probe.count());
    for (std::size_t i = 0; i < all_single.size(); ++i)
        all_single[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 0; i < all_probe.size(); ++i) all_probe[i] = static_cast<std::uint32_t>(i);

    auto model_a = nn::make_mlp(arch);
    nn::init_params(*model_a, 7);
    data::SingleTraceSource src_a(ds_single, all_single, 9);
    nn::EvalSet test_a;
    test_a.ds = &ds_probe;
    test_a.indices = all_probe;
    nn::EvalSet probe_a;
    probe_a.ds = &ds_single;
    probe_a.indices = all_single;
    auto res_a = nn::train(*model_a, src_a, test_a, constellation, cfg, &probe_a);

    std::vector<double> train_a, test_curve_a;
    for (const auto& e : res_a.trace.epochs) {
        train_a.push_back(e.train_q_db);
        test_curve_a.push_back(e.val_q_db);
    }
    auto smooth_a = median3(test_curve_a);
    auto verdict_a = pitfalls::overfit_gap(train_a, smooth_a, 4);
    double peak_a = *std::max_element(smooth_a.begin(), smooth_a.end());
    double final_a = smooth_a.back();
    c.expect(verdict_a.overfit, "single-trace run not flagged as overfit");
    c.expect(final_a < peak_a - 0.3,
             "single-trace test did not decline (" + fmt(peak_a) + " -> " + fmt(final_a) + ")");
    c.note("single: test " + fmt(peak_a, 2) + " -> " + fmt(final_a, 2) + " dB");

    // multi-trace mix: 4 training + 2 held-out traces
    std::vector<std::shared_ptr<const data::WindowedDataset>> traces;
    for (std::uint64_t k = 0; k < 6; ++k) {
        auto t = simulate_link_trace(300 + k, 400 + k, n_syms, dac_unique, power, spans);
        traces.push_back(std::make_shared<data::WindowedDataset>(t.rx_x, t.rx_y, t.tx_x, t.tx_y,
                                                                 taps, constellation));
    }
    data::MultiTraceSource pool(traces, 4, all_single.size(), 11);
    nn::EvalSet test_b;
    test_b.pool = &pool;
    test_b.pool_records = pool.test_records();
    nn::EvalSet probe_b;
    probe_b.pool = &pool;
    for (std::size_t i = 0; i < 8192; ++i) probe_b.pool_records.push_back(i);

    auto model_b = nn::make_mlp(arch);
    nn::init_params(*model_b, 7);
    auto res_b = nn::train(*model_b, pool, test_b, constellation, cfg, &probe_b);

    std::vector<double> train_b, test_curve_b;
    for (const auto& e : res_b.trace.epochs) {
        train_b.push_back(e.train_q_db);
        test_curve_b.push_back(e.val_q_db);
    }
    auto smooth_b = median3(test_curve_b);
    auto verdict_b = pitfalls::overfit_gap(train_b, smooth_b, 4);
    double final_b = smooth_b.back();
    double early_b = smooth_b.front();
    c.expect(!verdict_b.overfit, "multi-trace run flagged as overfit");
    c.expect(final_b > early_b, "multi-trace test curve did not rise");
    c.expect(final_b > final_a + 0.5,
             "multi final " + fmt(final_b) + " not above single final " + fmt(final_a));
    c.note("multi: test " + fmt(early_b, 2) + " -> " + fmt(final_b, 2) + " dB");

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < 3600.0, "runtime " + fmt(secs, 1) + " s >= 1 h");
    c.note(fmt(secs, 0) + " s");
    return c;
}

// ---------------------------------------------------------------- C10
// Fixed-epoch-budget protocol (equal epochs and learning rate, final-state
// models), with the final models scored on a longer independent trace so
// the counted Q is statistically stable.
Check criterion_10() {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    auto constellation = data::QamConstellation::make(16);
    const int taps = 3, spans = 5;

    auto trace = simulate_link_trace(42, 77, 1u << 14, 0, 6.0, spans);
    data::WindowedDataset ds(trace.rx_x, trace.rx_y, trace.tx_x, trace.tx_y, taps, constellation);
    auto fresh = simulate_link_trace(4242, 7777, 1u << 15, 0, 6.0, spans);
    data::WindowedDataset ds_fresh(fresh.rx_x, fresh.rx_y, fresh.tx_x, fresh.tx_y, taps,
                                   constellation);

    // contiguous block split keeps overlapping windows out of the val set
    std::vector<std::uint32_t> train_idx, val_idx;
    for (std::size_t i = 0; i < ds.count(); ++i) {
        if (i < ds.count() * 8 / 10)
            train_idx.push_back(static_cast<std::uint32_t>(i));
        else
            val_idx.push_back(static_cast<std::uint32_t>(i));
    }
    nn::EvalSet test;
    test.ds = &ds_fresh;
    test.indices.resize(ds_fresh.count());
    for (std::size_t i = 0; i < test.indices.size(); ++i)
        test.indices[i] = static_cast<std::uint32_t>(i);

    auto run_with_batch = [&](int batch, double* evm_out) {
        nn::BiLstmArch arch;
        arch.n_taps = taps;
        arch.hidden_units = 32;
        auto model = nn::make_bilstm(arch);
        nn::init_params(*model, 7);
        nn::TrainConfig cfg;
        cfg.batch_size = batch;
        cfg.learning_rate = 0.003;
        cfg.max_epochs = 150;
        cfg.patience = 150;
        cfg.restore_best = false;  // fixed-budget end states, per-arm identical
        cfg.eval_cap = 3000;
        cfg.seed = 5;
        data::SingleTraceSource src(ds, train_idx, 9);
        nn::EvalSet val;
        val.ds = &ds;
        val.indices = val_idx;
        nn::train(*model, src, val, constellation, cfg);
        auto ev = nn::evaluate_model(*model, test, constellation, nn::LossKind::kMse);
        *evm_out = ev.evm;
        return ev.q_db;
    };

    double evm_small = 0.0, evm_large = 0.0;
    double q_small = run_with_batch(8, &evm_small);
    double q_large = run_with_batch(1024, &evm_large);
    c.expect(q_large >= q_small + 0.5, "batch 1024 q " + fmt(q_large) + " not >= batch 8 q " +
                                           fmt(q_small) + " + 0.5");
    c.note("batch 8: " + fmt(q_small, 2) + " dB (evm " + fmt(evm_small, 3) + "), batch 1024: " +
           fmt(q_large, 2) + " dB (evm " + fmt(evm_large, 3) + ")");
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(secs < 7200.0, "runtime " + fmt(secs, 1) + " s >= 2 h");
    c.note(fmt(secs, 0) + " s");
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    std::map<int, std::function<Check()>> criteria = {
        {1, criterion_1}, {2, criterion_2},  {3, criterion_3},  {4, criterion_4},
        {5, criterion_5}, {6, criterion_6},  {7, criterion_7},  {8, criterion_8},
        {9, criterion_9}, {10, criterion_10}, {11, criterion_11}, {12, criterion_12},
    };
    static const char* names[13] = {"",
                                    "complexity golden tables",
                                    "metric formulas",
                                    "prbs periodicity table",
                                    "dac arithmetic + detector round trip",
                                    "channel numerics",
                                    "gradient oracle",
                                    "prbs learnability (directional)",
                                    "overfitting reproduction (directional)",
                                    "jail-window detector",
                                    "mini-batch trend (directional)",
                                    "mi estimator",
                                    "bops identities"};

    std::vector<int> selected;
    for (int a = 1; a < argc; ++a) selected.push_back(std::atoi(argv[a]));
    if (selected.empty())
        for (auto& [k, fn] : criteria) selected.push_back(k);

    int failures = 0;
    for (int k : selected) {
        auto it = criteria.find(k);
        if (it == criteria.end()) {
            std::fprintf(stderr, "unknown criterion %d\n", k);
            return 2;
        }
        Check res;
        try {
            res = it->second();
        } catch (const std::exception& e) {
            res.ok = false;
            res.detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %2d (%s)%s%s\n", res.ok ? "PASS" : "FAIL", k, names[k],
                    res.detail.empty() ? "" : ": ", res.detail.c_str());
        std::fflush(stdout);
        if (!res.ok) ++failures;
    }
    return failures;
}
