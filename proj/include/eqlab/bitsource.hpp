#pragma once

#include <cstdint>
#include <vector>

namespace eqlab::data {

enum class SourceKind { kPrbsLfsr, kMersenneTwister };

// Bit generator description. For the LFSR kind, `polynomial_taps` lists the
// feedback stage numbers (1-based, highest = order); when empty, a published
// maximal-length tap set for the order is used. The tap set is checked by
// full cycle detection for orders <= 20.
struct BitSource {
    SourceKind kind = SourceKind::kMersenneTwister;
    int prbs_order = 32;                 // LFSR only, 16..34
    std::uint64_t seed = 1;
    std::vector<int> polynomial_taps;    // LFSR only; empty -> table default

    void validate() const;
};

// Published maximal-length feedback taps for a Fibonacci LFSR of the given
// order (includes the highest stage).
std::vector<int> default_lfsr_taps(int order);

// First n bits of the LFSR stream (full stream has period 2^order - 1).
std::vector<std::uint8_t> prbs_bits(const BitSource& src, std::size_t n);

// First n bits of the MT19937 word stream, MSB-first within each 32-bit word.
std::vector<std::uint8_t> mt_bits(std::uint64_t seed, std::size_t n);

// Bits for either source kind.
std::vector<std::uint8_t> source_bits(const BitSource& src, std::size_t n);

// Number of symbols containing one full bit period: floor((2^order-1)/bps).
// Conservative bound; the aligned symbol period can be up to bps times longer.
std::uint64_t symbol_periodicity(int order, int bits_per_symbol);

// Measured state-recurrence cycle length (capped scan; used for validation
// and tests on small orders).
std::uint64_t lfsr_cycle_length(int order, const std::vector<int>& taps, std::uint64_t cap);

}  // namespace eqlab::data
