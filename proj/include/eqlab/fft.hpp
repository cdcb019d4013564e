#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace eqlab::fft {

using cplx = std::complex<double>;

bool is_pow2(std::size_t n);

// Reusable transform plan. Power-of-two lengths run the radix-2 path;
// other lengths go through Bluestein's chirp-z on an internal pow2 plan.
class Plan {
public:
    explicit Plan(std::size_t n);
    ~Plan();
    Plan(Plan&&) noexcept;
    Plan& operator=(Plan&&) noexcept;
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;

    std::size_t size() const { return n_; }
    void forward(cplx* data) const;  // no scaling
    void inverse(cplx* data) const;  // scales by 1/n

    void forward(std::vector<cplx>& v) const { forward(v.data()); }
    void inverse(std::vector<cplx>& v) const { inverse(v.data()); }

private:
    struct Bluestein;
    void radix2(cplx* data, bool inv) const;

    std::size_t n_;
    std::vector<cplx> twiddle_;          // pow2 path, forward twiddles
    std::vector<std::uint32_t> bitrev_;  // pow2 path
    std::unique_ptr<Bluestein> blue_;    // non-pow2 path
};

// Angular frequency grid in FFT bin order: w[k] = 2*pi*f_k,
// f_k = k/n*fs for k < n/2, (k-n)/n*fs otherwise.
std::vector<double> angular_freqs(std::size_t n, double sample_rate_hz);

// Convenience one-shot transforms.
void forward(std::vector<cplx>& v);
void inverse(std::vector<cplx>& v);

}  // namespace eqlab::fft
