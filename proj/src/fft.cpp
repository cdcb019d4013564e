#include "eqlab/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace eqlab::fft {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}
}  // namespace

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

struct Plan::Bluestein {
    std::vector<cplx> chirp;     // exp(-i*pi*k^2/n)
    std::vector<cplx> kernel_f;  // FFT of conj(chirp) wrapped, premultiplied by 1/m
    Plan inner;
    explicit Bluestein(std::size_t n) : inner(next_pow2(2 * n - 1)) {
        std::size_t m = inner.size();
        chirp.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            // k^2 mod 2n keeps the phase argument small and exact
            std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
            double ph = -M_PI * static_cast<double>(k2) / static_cast<double>(n);
            chirp[k] = {std::cos(ph), std::sin(ph)};
        }
        std::vector<cplx> b(m, cplx{0.0, 0.0});
        b[0] = std::conj(chirp[0]);
        for (std::size_t k = 1; k < n; ++k) {
            b[k] = std::conj(chirp[k]);
            b[m - k] = std::conj(chirp[k]);
        }
        inner.forward(b);
        double inv_m = 1.0 / static_cast<double>(m);
        for (auto& v : b) v *= inv_m;
        kernel_f = std::move(b);
    }
};

Plan::Plan(std::size_t n) : n_(n) {
    if (n == 0) throw std::invalid_argument("fft: zero-length plan");
    if (is_pow2(n)) {
        twiddle_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            double ph = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
            twiddle_[k] = {std::cos(ph), std::sin(ph)};
        }
        bitrev_.resize(n);
        std::size_t log2n = 0;
        while ((std::size_t{1} << log2n) < n) ++log2n;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < log2n; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
            bitrev_[i] = static_cast<std::uint32_t>(r);
        }
    } else if (n > 1) {
        blue_ = std::make_unique<Bluestein>(n);
    }
}

Plan::~Plan() = default;
Plan::Plan(Plan&&) noexcept = default;
Plan& Plan::operator=(Plan&&) noexcept = default;

void Plan::radix2(cplx* a, bool inv) const {
    std::size_t n = n_;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = bitrev_[i];
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        std::size_t half = len >> 1;
        std::size_t step = n / len;
        for (std::size_t base = 0; base < n; base += len) {
            for (std::size_t k = 0; k < half; ++k) {
                cplx w = twiddle_[k * step];
                if (inv) w = std::conj(w);
                cplx u = a[base + k];
                cplx v = a[base + k + half] * w;
                a[base + k] = u + v;
                a[base + k + half] = u - v;
            }
        }
    }
}

void Plan::forward(cplx* data) const {
    if (n_ == 1) return;
    if (!blue_) {
        radix2(data, false);
        return;
    }
    std::size_t m = blue_->inner.size();
    std::vector<cplx> work(m, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < n_; ++k) work[k] = data[k] * blue_->chirp[k];
    blue_->inner.forward(work);
    for (std::size_t k = 0; k < m; ++k) work[k] *= blue_->kernel_f[k];
    // inverse of the inner transform without its 1/m (already folded into kernel_f)
    for (auto& v : work) v = std::conj(v);
    blue_->inner.forward(work);
    for (auto& v : work) v = std::conj(v);
    for (std::size_t k = 0; k < n_; ++k) data[k] = work[k] * blue_->chirp[k];
}

void Plan::inverse(cplx* data) const {
    if (n_ == 1) return;
    if (!blue_) {
        radix2(data, true);
        double s = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i) data[i] *= s;
        return;
    }
    // x = conj(F(conj(X)))/n
    for (std::size_t k = 0; k < n_; ++k) data[k] = std::conj(data[k]);
    forward(data);
    double s = 1.0 / static_cast<double>(n_);
    for (std::size_t k = 0; k < n_; ++k) data[k] = std::conj(data[k]) * s;
}

std::vector<double> angular_freqs(std::size_t n, double sample_rate_hz) {
    std::vector<double> w(n);
    double df = sample_rate_hz / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        double f = (2 * k < n) ? static_cast<double>(k) * df
                               : (static_cast<double>(k) - static_cast<double>(n)) * df;
        w[k] = kTwoPi * f;
    }
    return w;
}

void forward(std::vector<cplx>& v) { Plan(v.size()).forward(v); }
void inverse(std::vector<cplx>& v) { Plan(v.size()).inverse(v); }

}  // namespace eqlab::fft
