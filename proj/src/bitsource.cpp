#include "eqlab/bitsource.hpp"

#include <bit>

#include "eqlab/errors.hpp"
#include "eqlab/rng.hpp"

namespace eqlab::data {

namespace {

// Maximal-length LFSR feedback taps (XAPP052 table).
const std::vector<int>& taps_table(int order) {
    static const std::vector<int> table[] = {
        /*16*/ {16, 15, 13, 4},
        /*17*/ {17, 14},
        /*18*/ {18, 11},
        /*19*/ {19, 6, 2, 1},
        /*20*/ {20, 17},
        /*21*/ {21, 19},
        /*22*/ {22, 21},
        /*23*/ {23, 18},
        /*24*/ {24, 23, 22, 17},
        /*25*/ {25, 22},
        /*26*/ {26, 6, 2, 1},
        /*27*/ {27, 5, 2, 1},
        /*28*/ {28, 25},
        /*29*/ {29, 27},
        /*30*/ {30, 6, 4, 1},
        /*31*/ {31, 28},
        /*32*/ {32, 22, 2, 1},
        /*33*/ {33, 20},
        /*34*/ {34, 27, 2, 1},
    };
    if (order < 16 || order > 34) throw ConfigError("lfsr: order must be in 16..34");
    return table[order - 16];
}

struct Lfsr {
    std::uint64_t state;
    std::uint64_t tap_mask;
    std::uint64_t reg_mask;
    int order;

    Lfsr(int order_, const std::vector<int>& taps, std::uint64_t seed) : order(order_) {
        reg_mask = (order == 64) ? ~0ull : ((1ull << order) - 1);
        tap_mask = 0;
        for (int t : taps) {
            if (t < 1 || t > order) throw ConfigError("lfsr: tap outside 1..order");
            tap_mask |= 1ull << (t - 1);
        }
        state = seed & reg_mask;
        if (state == 0) state = 1;
    }

    std::uint8_t next_bit() {
        std::uint8_t out = static_cast<std::uint8_t>((state >> (order - 1)) & 1ull);
        std::uint64_t fb = static_cast<std::uint64_t>(std::popcount(state & tap_mask) & 1);
        state = ((state << 1) | fb) & reg_mask;
        return out;
    }
};

}  // namespace

std::vector<int> default_lfsr_taps(int order) { return taps_table(order); }

std::uint64_t lfsr_cycle_length(int order, const std::vector<int>& taps, std::uint64_t cap) {
    Lfsr reg(order, taps, 1);
    std::uint64_t start = reg.state;
    for (std::uint64_t n = 1; n <= cap; ++n) {
        reg.next_bit();
        if (reg.state == start) return n;
    }
    return 0;  // no recurrence within cap
}

void BitSource::validate() const {
    if (kind == SourceKind::kMersenneTwister) return;
    if (prbs_order < 16 || prbs_order > 34) throw ConfigError("prbs: order must be in 16..34");
    const auto& taps = polynomial_taps.empty() ? taps_table(prbs_order) : polynomial_taps;
    if (prbs_order <= 20) {
        std::uint64_t period = (1ull << prbs_order) - 1;
        if (lfsr_cycle_length(prbs_order, taps, period) != period)
            throw ConfigError("prbs: polynomial is not primitive for order " +
                              std::to_string(prbs_order) + " (cycle < 2^order - 1)");
    }
}

std::vector<std::uint8_t> prbs_bits(const BitSource& src, std::size_t n) {
    if (src.kind != SourceKind::kPrbsLfsr) throw ConfigError("prbs_bits: source is not an LFSR");
    src.validate();
    const auto& taps = src.polynomial_taps.empty() ? taps_table(src.prbs_order) : src.polynomial_taps;
    Lfsr reg(src.prbs_order, taps, src.seed);
    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = reg.next_bit();
    return bits;
}

std::vector<std::uint8_t> mt_bits(std::uint64_t seed, std::size_t n) {
    rng::Mt19937 gen(seed);
    std::vector<std::uint8_t> bits(n);
    std::uint32_t word = 0;
    int have = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (have == 0) {
            word = gen.next_u32();
            have = 32;
        }
        bits[i] = static_cast<std::uint8_t>((word >> 31) & 1u);
        word <<= 1;
        --have;
    }
    return bits;
}

std::vector<std::uint8_t> source_bits(const BitSource& src, std::size_t n) {
    if (src.kind == SourceKind::kMersenneTwister) return mt_bits(src.seed, n);
    return prbs_bits(src, n);
}

std::uint64_t symbol_periodicity(int order, int bits_per_symbol) {
    if (order < 1 || order > 63) throw ConfigError("symbol_periodicity: order out of range");
    if (bits_per_symbol < 1) throw ConfigError("symbol_periodicity: bits_per_symbol < 1");
    std::uint64_t period_bits = (1ull << order) - 1;
    return period_bits / static_cast<std::uint64_t>(bits_per_symbol);
}

}  // namespace eqlab::data
