#include "eqlab/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "eqlab/errors.hpp"

namespace eqlab::metrics {

namespace {

// Acklam's rational approximation to the inverse normal CDF, used only to
// seed Newton iterations.
double inv_norm_cdf_approx(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1 - plow;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p > phigh) {
        q = std::sqrt(-2 * std::log(1 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

constexpr double kTwoOverSqrtPi = 1.1283791670955125738961589031215;

}  // namespace

double erfc_inv(double y) {
    if (!(y > 0.0) || !(y < 2.0)) throw ConfigError("erfc_inv: argument must be in (0, 2)");
    if (y == 1.0) return 0.0;
    // erfc(x) = y  <=>  x = -Phi^-1(y/2)/sqrt(2)
    double x = -inv_norm_cdf_approx(0.5 * y) * 0.70710678118654752440;
    // Newton with a widening bisection bracket as safety net.
    double lo = x - 1.0, hi = x + 1.0;
    while (std::erfc(lo) < y) lo -= 1.0;
    while (std::erfc(hi) > y) hi += 1.0;
    for (int it = 0; it < 100; ++it) {
        double f = std::erfc(x) - y;
        if (f > 0)
            lo = std::max(lo, x);
        else
            hi = std::min(hi, x);
        double deriv = -kTwoOverSqrtPi * std::exp(-x * x);
        double step = f / deriv;
        double next = x - step;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        double scale = std::max(std::abs(x), 1e-300);
        if (std::abs(next - x) <= 1e-13 * scale) return next;
        x = next;
    }
    return x;
}

double evm_rms(cspan rx, cspan tx) {
    if (rx.empty() || rx.size() != tx.size()) throw ConfigError("evm_rms: empty or mismatched inputs");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        num += std::norm(rx[i] - tx[i]);
        den += std::norm(tx[i]);
    }
    if (den == 0.0) throw ConfigError("evm_rms: all-zero reference");
    return std::sqrt(num / den);
}

double snr_db_from_evm(double evm) {
    if (evm < 0.0) throw ConfigError("snr_from_evm: negative EVM");
    if (evm == 0.0) return kInf;
    return 20.0 * std::log10(1.0 / evm);
}

BerResult ber_count(cspan rx, cspan tx, const data::QamConstellation& c) {
    if (rx.empty() || rx.size() != tx.size()) throw ConfigError("ber_count: empty or mismatched inputs");
    BerResult r;
    const int bps = c.bits_per_symbol();
    for (std::size_t i = 0; i < rx.size(); ++i) {
        int truth = c.decide(tx[i]);  // tx holds exact constellation points
        int hat = c.decide(rx[i]);
        if (hat != truth) ++r.counts.symbol_errors;
        r.counts.bit_errors +=
            static_cast<std::uint64_t>(std::popcount(c.bits_of(hat) ^ c.bits_of(truth)));
    }
    r.counts.symbols = rx.size();
    r.counts.total_bits = rx.size() * static_cast<std::uint64_t>(bps);
    r.ber = static_cast<double>(r.counts.bit_errors) / static_cast<double>(r.counts.total_bits);
    r.ser = static_cast<double>(r.counts.symbol_errors) / static_cast<double>(r.counts.symbols);
    return r;
}

double q_db_from_ber(double ber) {
    if (ber < 0.0 || ber > 0.5) throw ConfigError("q_from_ber: BER must be in [0, 0.5]");
    if (ber == 0.0) return kInf;
    if (ber == 0.5) return -kInf;
    double q_lin = std::sqrt(2.0) * erfc_inv(2.0 * ber);
    return 20.0 * std::log10(q_lin);
}

double ber_from_q_db(double q_db) {
    double q_lin = std::pow(10.0, q_db / 20.0);
    return 0.5 * std::erfc(q_lin / std::sqrt(2.0));
}

namespace {

struct Gauss2 {
    double mx = 0, my = 0;           // mean
    double a = 0, b = 0, c = 0;      // covariance [[a,b],[b,c]]
    double log_norm = 0;             // -log(2*pi*sqrt(det))
    double ia = 0, ib = 0, ic = 0;   // inverse covariance

    void finalize(double reg_eps) {
        a += reg_eps;
        c += reg_eps;
        double det = a * c - b * b;
        if (!(det > 0.0)) throw ConfigError("mi_lower_bound: singular cluster covariance");
        ia = c / det;
        ib = -b / det;
        ic = a / det;
        log_norm = -std::log(2.0 * M_PI * std::sqrt(det));
    }
    double log_pdf(double x, double y) const {
        double dx = x - mx, dy = y - my;
        double quad = ia * dx * dx + 2.0 * ib * dx * dy + ic * dy * dy;
        return log_norm - 0.5 * quad;
    }
};

}  // namespace

double mi_lower_bound(cspan rx, cspan tx, const data::QamConstellation& c, double reg_epsilon,
                      int min_samples_per_point) {
    if (rx.empty() || rx.size() != tx.size())
        throw ConfigError("mi_lower_bound: empty or mismatched inputs");
    const int m = c.cardinality();
    std::vector<Gauss2> g(static_cast<std::size_t>(m));
    std::vector<std::uint64_t> count(static_cast<std::size_t>(m), 0);
    std::vector<int> label(rx.size());

    for (std::size_t i = 0; i < rx.size(); ++i) {
        int k = c.decide(tx[i]);
        label[i] = k;
        auto& gk = g[static_cast<std::size_t>(k)];
        gk.mx += rx[i].real();
        gk.my += rx[i].imag();
        ++count[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < m; ++k) {
        if (count[static_cast<std::size_t>(k)] < static_cast<std::uint64_t>(min_samples_per_point))
            throw ConfigError("mi_lower_bound: constellation point " + std::to_string(k) +
                              " has fewer than " + std::to_string(min_samples_per_point) + " samples");
        double n = static_cast<double>(count[static_cast<std::size_t>(k)]);
        g[static_cast<std::size_t>(k)].mx /= n;
        g[static_cast<std::size_t>(k)].my /= n;
    }
    for (std::size_t i = 0; i < rx.size(); ++i) {
        auto& gk = g[static_cast<std::size_t>(label[i])];
        double dx = rx[i].real() - gk.mx, dy = rx[i].imag() - gk.my;
        gk.a += dx * dx;
        gk.b += dx * dy;
        gk.c += dy * dy;
    }
    for (int k = 0; k < m; ++k) {
        auto& gk = g[static_cast<std::size_t>(k)];
        double n = static_cast<double>(count[static_cast<std::size_t>(k)]);
        gk.a /= n;
        gk.b /= n;
        gk.c /= n;
        gk.finalize(reg_epsilon);
    }

    // I(X;Y) >= E[ log2( p(y|x_k) / (1/M) sum_i p(y|x_i) ) ], log-sum-exp mixture.
    const double log2e = 1.4426950408889634074;
    double acc = 0.0;
    std::vector<double> lp(static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < rx.size(); ++i) {
        double px = rx[i].real(), py = rx[i].imag();
        double max_lp = -kInf;
        for (int k = 0; k < m; ++k) {
            lp[static_cast<std::size_t>(k)] = g[static_cast<std::size_t>(k)].log_pdf(px, py);
            max_lp = std::max(max_lp, lp[static_cast<std::size_t>(k)]);
        }
        double sum = 0.0;
        for (int k = 0; k < m; ++k) sum += std::exp(lp[static_cast<std::size_t>(k)] - max_lp);
        double log_mix = max_lp + std::log(sum) - std::log(static_cast<double>(m));
        acc += (lp[static_cast<std::size_t>(label[i])] - log_mix) * log2e;
    }
    double mi = acc / static_cast<double>(rx.size());
    double cap = std::log2(static_cast<double>(m));
    return std::clamp(mi, 0.0, cap);
}

double ber_from_evm(double evm, int cardinality, double kappa) {
    if (evm <= 0.0) throw ConfigError("ber_from_evm: EVM must be positive");
    double m = static_cast<double>(cardinality);
    double pref = kappa * (1.0 - 1.0 / std::sqrt(m)) / (0.5 * std::log2(m));
    return pref * std::erfc(std::sqrt(1.5 / ((m - 1.0) * evm * evm)));
}

double kappa_calibrate(double evm_ref, double ber_ref, int cardinality) {
    if (ber_ref <= 0.0) throw ConfigError("kappa_calibrate: reference BER must be positive");
    double base = ber_from_evm(evm_ref, cardinality, 1.0);
    if (base <= 0.0) throw ConfigError("kappa_calibrate: degenerate reference EVM");
    return ber_ref / base;
}

namespace {
std::string fmt_double(double v) {
    if (v == kInf) return "\"inf\"";
    if (v == -kInf) return "\"-inf\"";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}
}  // namespace

std::string MetricsReport::to_json() const {
    std::ostringstream os;
    os << "{\"ber\":" << fmt_double(ber) << ",\"q_db\":" << fmt_double(q_db)
       << ",\"evm_fraction\":" << fmt_double(evm_fraction) << ",\"snr_db\":" << fmt_double(snr_db)
       << ",\"mi_bits\":" << fmt_double(mi_bits) << ",\"counts\":{\"symbols\":" << counts.symbols
       << ",\"bit_errors\":" << counts.bit_errors << ",\"symbol_errors\":" << counts.symbol_errors
       << ",\"total_bits\":" << counts.total_bits << "},\"provenance\":{";
    for (std::size_t i = 0; i < provenance.size(); ++i) {
        if (i) os << ",";
        os << "\"" << provenance[i].first << "\":\"" << provenance[i].second << "\"";
    }
    os << "}}";
    return os.str();
}

MetricsReport evaluate_all(cspan rx, cspan tx, const data::QamConstellation& c, double reg_epsilon) {
    MetricsReport r;
    auto b = ber_count(rx, tx, c);
    r.ber = b.ber;
    r.counts = b.counts;
    r.q_db = q_db_from_ber(b.ber);
    r.evm_fraction = evm_rms(rx, tx);
    r.snr_db = snr_db_from_evm(r.evm_fraction);
    r.mi_bits = mi_lower_bound(rx, tx, c, reg_epsilon);
    r.provenance = {{"ber", "direct error counting"},
                    {"q_db", "sqrt(2)*erfcinv(2*ber), dB"},
                    {"evm_fraction", "rms error vector"},
                    {"snr_db", "20*log10(1/evm)"},
                    {"mi_bits", "gaussian-cluster lower bound"}};
    return r;
}

}  // namespace eqlab::metrics
