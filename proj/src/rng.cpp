#include "eqlab/rng.hpp"

#include <cmath>

namespace eqlab::rng {

namespace {
constexpr std::uint32_t kMatrixA = 0x9908b0dfu;
constexpr std::uint32_t kUpperMask = 0x80000000u;
constexpr std::uint32_t kLowerMask = 0x7fffffffu;
}  // namespace

Mt19937::Mt19937(std::uint64_t seed) {
    if (seed <= 0xffffffffull) {
        seed32(static_cast<std::uint32_t>(seed));
    } else {
        std::uint32_t key[2] = {static_cast<std::uint32_t>(seed & 0xffffffffull),
                                static_cast<std::uint32_t>(seed >> 32)};
        seed_array(key, 2);
    }
}

void Mt19937::seed32(std::uint32_t s) {
    state_[0] = s;
    for (int i = 1; i < kN; ++i)
        state_[i] = 1812433253u * (state_[i - 1] ^ (state_[i - 1] >> 30)) + static_cast<std::uint32_t>(i);
    index_ = kN;
    have_spare_ = false;
}

void Mt19937::seed_array(const std::uint32_t* key, std::size_t len) {
    seed32(19650218u);
    std::size_t i = 1, j = 0;
    std::size_t k = (static_cast<std::size_t>(kN) > len) ? static_cast<std::size_t>(kN) : len;
    for (; k != 0; --k) {
        state_[i] = (state_[i] ^ ((state_[i - 1] ^ (state_[i - 1] >> 30)) * 1664525u)) + key[j] +
                    static_cast<std::uint32_t>(j);
        ++i;
        ++j;
        if (i >= static_cast<std::size_t>(kN)) {
            state_[0] = state_[kN - 1];
            i = 1;
        }
        if (j >= len) j = 0;
    }
    for (k = kN - 1; k != 0; --k) {
        state_[i] = (state_[i] ^ ((state_[i - 1] ^ (state_[i - 1] >> 30)) * 1566083941u)) -
                    static_cast<std::uint32_t>(i);
        ++i;
        if (i >= static_cast<std::size_t>(kN)) {
            state_[0] = state_[kN - 1];
            i = 1;
        }
    }
    state_[0] = 0x80000000u;
}

void Mt19937::twist() {
    for (int i = 0; i < kN; ++i) {
        std::uint32_t y = (state_[i] & kUpperMask) | (state_[(i + 1) % kN] & kLowerMask);
        state_[i] = state_[(i + kM) % kN] ^ (y >> 1) ^ ((y & 1u) ? kMatrixA : 0u);
    }
    index_ = 0;
}

std::uint32_t Mt19937::next_u32() {
    if (index_ >= kN) twist();
    std::uint32_t y = state_[index_++];
    y ^= y >> 11;
    y ^= (y << 7) & 0x9d2c5680u;
    y ^= (y << 15) & 0xefc60000u;
    y ^= y >> 18;
    return y;
}

std::uint64_t Mt19937::next_u64() {
    std::uint64_t hi = next_u32();
    std::uint64_t lo = next_u32();
    return (hi << 32) | lo;
}

double Mt19937::next_double() {
    // genrand_res53 from the reference implementation.
    std::uint32_t a = next_u32() >> 5, b = next_u32() >> 6;
    return (a * 67108864.0 + b) * (1.0 / 9007199254740992.0);
}

std::uint64_t Mt19937::next_below(std::uint64_t n) {
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % n;
}

double Mt19937::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = 1.0 - next_double();  // (0, 1]
    double u2 = next_double();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

std::complex<double> Mt19937::next_cgaussian() {
    return {next_gaussian() * 0.7071067811865475244, next_gaussian() * 0.7071067811865475244};
}

}  // namespace eqlab::rng
