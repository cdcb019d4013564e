#include "eqlab/channel.hpp"

#include <algorithm>
#include <cmath>

#include "eqlab/errors.hpp"
#include "eqlab/fft.hpp"
#include "eqlab/metrics.hpp"

namespace eqlab::channel {

namespace {
constexpr double kC = 299792458.0;          // m/s
constexpr double kPlanck = 6.62607015e-34;  // J*s
constexpr double kLn10 = 2.302585092994045684;

// Zero-phase circular FIR: multiplies the spectrum by the DFT of the tap
// vector laid out symmetrically around index 0.
void filter_circular(std::vector<cplx>& samples, const std::vector<double>& taps,
                     const fft::Plan& plan) {
    const std::size_t n = samples.size();
    const std::size_t half = taps.size() / 2;
    if (taps.size() > n) throw ConfigError("filter: tap count exceeds signal length");
    std::vector<cplx> h(n, cplx{0.0, 0.0});
    for (std::size_t k = 0; k <= half; ++k) h[k] = taps[half + k];
    for (std::size_t k = 1; k <= half; ++k) h[n - k] = taps[half - k];
    plan.forward(h);
    plan.forward(samples);
    for (std::size_t k = 0; k < n; ++k) samples[k] *= h[k];
    plan.inverse(samples);
}
}  // namespace

void FiberParams::validate() const {
    if (attenuation_db_per_km < 0) throw ConfigError("fiber: attenuation must be >= 0");
    if (gamma_per_w_km < 0) throw ConfigError("fiber: gamma must be >= 0");
    if (center_wavelength_nm <= 0) throw ConfigError("fiber: wavelength must be > 0");
}

double FiberParams::alpha_per_m() const { return attenuation_db_per_km * kLn10 / 10.0 / 1000.0; }

double FiberParams::beta2_s2_per_m() const {
    double lambda_m = center_wavelength_nm * 1e-9;
    double d_s_per_m2 = dispersion_ps_nm_km * 1e-6;  // ps/(nm*km) -> s/m^2
    return -d_s_per_m2 * lambda_m * lambda_m / (2.0 * M_PI * kC);
}

double FiberParams::carrier_freq_hz() const { return kC / (center_wavelength_nm * 1e-9); }

void LinkConfig::validate() const {
    if (span_length_km <= 0) throw ConfigError("link: span length must be > 0");
    if (num_spans < 0) throw ConfigError("link: num_spans must be >= 0");
    if (step_km <= 0 || step_km > span_length_km) throw ConfigError("link: step must be in (0, span]");
    double ratio = span_length_km / step_km;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
        throw ConfigError("link: span length must be an integer multiple of the step");
}

void ShapingConfig::validate() const {
    if (rolloff < 0.0 || rolloff > 1.0) throw ConfigError("shaping: roll-off must be in [0, 1]");
    if (samples_per_symbol < 2) throw ConfigError("shaping: need >= 2 samples per symbol");
    if (filter_span_symbols < 8) throw ConfigError("shaping: filter span must be >= 8 symbols");
    if (symbol_rate_gbd <= 0) throw ConfigError("shaping: symbol rate must be > 0");
}

double OpticalField::mean_power_w() const {
    if (x.empty()) return 0.0;
    double p = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) p += std::norm(x[i]) + std::norm(y[i]);
    return p / static_cast<double>(x.size());
}

// Taps cover +-filter_span_symbols symbols; at roll-off 0.1 a span of 32
// keeps the cascaded-RRC symbol-spaced ISI below 1e-3.
std::vector<double> rrc_taps(const ShapingConfig& cfg) {
    cfg.validate();
    const int sps = cfg.samples_per_symbol;
    const int half = cfg.filter_span_symbols * sps;
    const double beta = cfg.rolloff;
    std::vector<double> h(static_cast<std::size_t>(2 * half + 1));
    for (int k = -half; k <= half; ++k) {
        double t = static_cast<double>(k) / sps;  // in symbols
        double v;
        if (k == 0) {
            v = 1.0 + beta * (4.0 / M_PI - 1.0);
        } else if (beta > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * beta)) < 1e-12) {
            double s = M_PI / (4.0 * beta);
            v = (beta / std::sqrt(2.0)) *
                ((1.0 + 2.0 / M_PI) * std::sin(s) + (1.0 - 2.0 / M_PI) * std::cos(s));
        } else {
            double num = std::sin(M_PI * t * (1.0 - beta)) +
                         4.0 * beta * t * std::cos(M_PI * t * (1.0 + beta));
            double den = M_PI * t * (1.0 - std::pow(4.0 * beta * t, 2.0));
            v = num / den;
        }
        h[static_cast<std::size_t>(k + half)] = v;
    }
    double energy = 0.0;
    for (double v : h) energy += v * v;
    double s = 1.0 / std::sqrt(energy);
    for (double& v : h) v *= s;
    return h;
}

OpticalField pulse_shape(const std::vector<cplx>& symbols_x, const std::vector<cplx>& symbols_y,
                         const ShapingConfig& cfg, double power_dbm) {
    cfg.validate();
    if (symbols_x.empty() || symbols_x.size() != symbols_y.size())
        throw ConfigError("pulse_shape: empty or mismatched symbol sequences");
    const int sps = cfg.samples_per_symbol;
    const std::size_t n = symbols_x.size() * static_cast<std::size_t>(sps);

    OpticalField f;
    f.sample_rate_hz = cfg.sample_rate_hz();
    f.symbol_rate_hz = cfg.symbol_rate_hz();
    f.x.assign(n, cplx{0.0, 0.0});
    f.y.assign(n, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < symbols_x.size(); ++k) {
        f.x[k * sps] = symbols_x[k];
        f.y[k * sps] = symbols_y[k];
    }
    auto taps = rrc_taps(cfg);
    fft::Plan plan(n);
    filter_circular(f.x, taps, plan);
    filter_circular(f.y, taps, plan);

    double current = f.mean_power_w();
    if (current > 0.0) {
        double target_w = 1e-3 * std::pow(10.0, power_dbm / 10.0);
        double scale = std::sqrt(target_w / current);
        for (auto& v : f.x) v *= scale;
        for (auto& v : f.y) v *= scale;
    }
    return f;
}

OpticalField ssfm_span(const OpticalField& field, const FiberParams& fiber, double span_km,
                       double step_km) {
    fiber.validate();
    if (span_km <= 0 || step_km <= 0) throw ConfigError("ssfm: span and step must be > 0");
    double ratio = span_km / step_km;
    long steps = std::lround(ratio);
    if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio)
        throw ConfigError("ssfm: step does not divide span");
    if (field.size() == 0) throw ConfigError("ssfm: empty field");

    OpticalField out = field;
    const std::size_t n = out.size();
    fft::Plan plan(n);
    auto w = fft::angular_freqs(n, out.sample_rate_hz);

    const double h_m = step_km * 1000.0;
    const double alpha = fiber.alpha_per_m();
    const double beta2 = fiber.beta2_s2_per_m();
    const double gamma_eff = fiber.manakov_factor * fiber.gamma_per_w_m();
    const double l_eff = (alpha > 0.0) ? (1.0 - std::exp(-alpha * h_m)) / alpha : h_m;
    const double amp_loss = std::exp(-alpha * h_m / 2.0);

    // half-step dispersion phasor per bin
    std::vector<cplx> half_disp(n);
    for (std::size_t k = 0; k < n; ++k) {
        double ph = 0.5 * beta2 * w[k] * w[k] * (h_m / 2.0);
        half_disp[k] = {std::cos(ph), std::sin(ph)};
    }

    auto apply_half_disp = [&](std::vector<cplx>& pol) {
        plan.forward(pol);
        for (std::size_t k = 0; k < n; ++k) pol[k] *= half_disp[k];
        plan.inverse(pol);
    };

    for (long s = 0; s < steps; ++s) {
        apply_half_disp(out.x);
        apply_half_disp(out.y);
        for (std::size_t k = 0; k < n; ++k) {
            double p = std::norm(out.x[k]) + std::norm(out.y[k]);
            double ph = gamma_eff * p * l_eff;
            cplx rot{std::cos(ph), std::sin(ph)};
            out.x[k] *= rot * amp_loss;
            out.y[k] *= rot * amp_loss;
        }
        apply_half_disp(out.x);
        apply_half_disp(out.y);
        for (std::size_t k = 0; k < n; ++k) {
            if (!std::isfinite(out.x[k].real()) || !std::isfinite(out.x[k].imag()) ||
                !std::isfinite(out.y[k].real()) || !std::isfinite(out.y[k].imag()))
                throw PropagationError("ssfm: non-finite field value (numerical blow-up)",
                                       static_cast<std::size_t>(s));
        }
    }
    return out;
}

OpticalField edfa(const OpticalField& field, double gain_db, double noise_figure_db,
                  rng::Mt19937& gen, double carrier_wavelength_nm) {
    if (carrier_wavelength_nm <= 0) throw ConfigError("edfa: wavelength must be > 0");
    OpticalField out = field;
    double g = std::pow(10.0, gain_db / 10.0);
    double f_lin = std::pow(10.0, noise_figure_db / 10.0);
    double nu = kC / (carrier_wavelength_nm * 1e-9);
    double amp = std::sqrt(g);
    // single-sided ASE PSD per polarization over the simulation bandwidth
    double psd = (g - 1.0) * f_lin * kPlanck * nu / 2.0;
    double p_noise = psd * field.sample_rate_hz;
    double sigma = std::sqrt(p_noise);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out.x[k] = out.x[k] * amp + sigma * gen.next_cgaussian();
        out.y[k] = out.y[k] * amp + sigma * gen.next_cgaussian();
    }
    return out;
}

OpticalField apply_dispersion(const OpticalField& field, const FiberParams& fiber, double total_km) {
    OpticalField out = field;
    if (total_km == 0.0 || out.size() == 0) return out;
    const std::size_t n = out.size();
    fft::Plan plan(n);
    auto w = fft::angular_freqs(n, out.sample_rate_hz);
    double l_m = total_km * 1000.0;
    double beta2 = fiber.beta2_s2_per_m();
    std::vector<cplx> op(n);
    for (std::size_t k = 0; k < n; ++k) {
        double ph = 0.5 * beta2 * w[k] * w[k] * l_m;
        op[k] = {std::cos(ph), std::sin(ph)};
    }
    for (auto* pol : {&out.x, &out.y}) {
        plan.forward(*pol);
        for (std::size_t k = 0; k < n; ++k) (*pol)[k] *= op[k];
        plan.inverse(*pol);
    }
    return out;
}

OpticalField cdc(const OpticalField& field, const FiberParams& fiber, double total_km) {
    return apply_dispersion(field, fiber, -total_km);
}

RxSymbols rx_frontend(const OpticalField& field, const ShapingConfig& cfg,
                      const std::vector<cplx>& tx_x, const std::vector<cplx>& tx_y) {
    cfg.validate();
    const int sps = cfg.samples_per_symbol;
    if (tx_x.size() != tx_y.size()) throw ConfigError("rx_frontend: TX polarization length mismatch");
    if (field.size() != tx_x.size() * static_cast<std::size_t>(sps))
        throw ConfigError("rx_frontend: field length does not match TX reference");

    OpticalField mf = field;
    auto taps = rrc_taps(cfg);
    fft::Plan plan(mf.size());
    filter_circular(mf.x, taps, plan);
    filter_circular(mf.y, taps, plan);

    // decimation phase by maximum symbol-spaced energy
    int best_phase = 0;
    double best_energy = -1.0;
    for (int p = 0; p < sps; ++p) {
        double e = 0.0;
        for (std::size_t k = static_cast<std::size_t>(p); k < mf.size(); k += sps)
            e += std::norm(mf.x[k]) + std::norm(mf.y[k]);
        if (e > best_energy) {
            best_energy = e;
            best_phase = p;
        }
    }

    RxSymbols rx;
    rx.x.resize(tx_x.size());
    rx.y.resize(tx_y.size());
    for (std::size_t k = 0; k < tx_x.size(); ++k) {
        rx.x[k] = mf.x[static_cast<std::size_t>(best_phase) + k * sps];
        rx.y[k] = mf.y[static_cast<std::size_t>(best_phase) + k * sps];
    }

    // per-polarization complex LS normalization to the known TX sequence
    auto normalize = [](std::vector<cplx>& r, const std::vector<cplx>& t) {
        cplx num{0.0, 0.0};
        double den = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k) {
            num += std::conj(r[k]) * t[k];
            den += std::norm(r[k]);
        }
        if (den == 0.0) return;
        cplx c = num / den;
        for (auto& v : r) v *= c;
    };
    normalize(rx.x, tx_x);
    normalize(rx.y, tx_y);
    return rx;
}

OpticalField propagate_link(const OpticalField& tx_field, const FiberParams& fiber,
                            const LinkConfig& link, rng::Mt19937& noise_gen) {
    fiber.validate();
    link.validate();
    OpticalField f = tx_field;
    double span_loss_db = fiber.attenuation_db_per_km * link.span_length_km;
    for (int s = 0; s < link.num_spans; ++s) {
        f = ssfm_span(f, fiber, link.span_length_km, link.step_km);
        f = edfa(f, span_loss_db, link.edfa_noise_figure_db, noise_gen, fiber.center_wavelength_nm);
    }
    return cdc(f, fiber, link.span_length_km * link.num_spans);
}

B2bResult awgn_b2b(const std::vector<cplx>& tx_x, const std::vector<cplx>& tx_y, double target_q_db,
                   const data::QamConstellation& constellation, rng::Mt19937& gen) {
    if (tx_x.empty() || tx_x.size() != tx_y.size())
        throw ConfigError("awgn_b2b: empty or mismatched symbol streams");

    const std::size_t cal = std::min<std::size_t>(tx_x.size(), 1u << 16);
    const double ber_target = metrics::ber_from_q_db(target_q_db);

    // reject targets the calibration block cannot resolve
    double expected_bit_errors = ber_target * static_cast<double>(cal) * 2.0 *
                                 constellation.bits_per_symbol();
    if (expected_bit_errors < 50.0)
        throw ConfigError("awgn_b2b: target Q above calibration cap for this block size");

    // fixed unit-noise realization; counted Q is monotone in sigma
    std::vector<cplx> unit(cal * 2);
    for (auto& v : unit) v = gen.next_cgaussian();

    std::vector<cplx> rx(cal * 2), tx(cal * 2);
    for (std::size_t k = 0; k < cal; ++k) {
        tx[k] = tx_x[k];
        tx[cal + k] = tx_y[k];
    }
    auto measure = [&](double sigma) {
        for (std::size_t k = 0; k < 2 * cal; ++k) rx[k] = tx[k] + sigma * unit[k];
        auto r = metrics::ber_count(rx, tx, constellation);
        if (r.counts.bit_errors == 0) return metrics::kInf;
        return metrics::q_db_from_ber(r.ber);
    };

    double lo = 1e-4, hi = 4.0;
    if (measure(lo) < target_q_db)
        throw ConfigError("awgn_b2b: target Q unreachable even at minimal noise");
    double q_mid = 0.0;
    for (int it = 0; it < 60; ++it) {
        double mid = std::sqrt(lo * hi);
        q_mid = measure(mid);
        if (std::abs(q_mid - target_q_db) < 0.02) {
            lo = hi = mid;
            break;
        }
        if (q_mid > target_q_db)
            lo = mid;
        else
            hi = mid;
    }
    double sigma = std::sqrt(lo * hi);

    B2bResult out;
    out.noise_sigma = sigma;
    out.calibrated_q_db = measure(sigma);
    out.x.resize(tx_x.size());
    out.y.resize(tx_y.size());
    for (std::size_t k = 0; k < tx_x.size(); ++k) out.x[k] = tx_x[k] + sigma * gen.next_cgaussian();
    for (std::size_t k = 0; k < tx_y.size(); ++k) out.y[k] = tx_y[k] + sigma * gen.next_cgaussian();
    return out;
}

}  // namespace eqlab::channel
