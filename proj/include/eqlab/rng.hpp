#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace eqlab::rng {

// MT19937 (Matsumoto & Nishimura, 1998). Implemented from the published
// algorithm so that generated streams are stable across platforms and
// standard-library versions; matches std::mt19937 word-for-word.
class Mt19937 {
public:
    explicit Mt19937(std::uint64_t seed = 5489u);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // Uniform in [0,1) with 53-bit resolution.
    double next_double();

    // Uniform integer in [0, n), unbiased via rejection. n must be > 0.
    std::uint64_t next_below(std::uint64_t n);

    // Standard normal via Box-Muller (second value cached).
    double next_gaussian();

    // Circular complex Gaussian with E|z|^2 = 1.
    std::complex<double> next_cgaussian();

private:
    void seed32(std::uint32_t s);
    void seed_array(const std::uint32_t* key, std::size_t len);
    void twist();

    static constexpr int kN = 624;
    static constexpr int kM = 397;
    std::uint32_t state_[kN];
    int index_ = kN;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Fisher-Yates shuffle driven by an explicit generator.
template <typename T>
void shuffle(std::vector<T>& v, Mt19937& gen) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(gen.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace eqlab::rng
