#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace eqlab::data {

// Gray-labelled rectangular QAM with unit average energy.
//
// The grid is cols x rows with cols >= rows (8-QAM is two rows of four,
// following the usual qammod arrangement; 32/128-QAM are 8x4 / 16x8
// rectangles so the one-bit-per-step Gray property holds on every axis).
// A point's index equals its integer bit label; the in-phase bits occupy
// the high half of the label, quadrature the low half, each axis Gray
// coded. Label 0 sits at the lower-left corner.
class QamConstellation {
public:
    static QamConstellation make(int cardinality);  // one of {8,16,32,64,128}

    int cardinality() const { return static_cast<int>(points_.size()); }
    int bits_per_symbol() const { return bits_; }
    std::complex<double> point(int index) const { return points_[static_cast<std::size_t>(index)]; }
    const std::vector<std::complex<double>>& points() const { return points_; }

    // Hard decision by minimum Euclidean distance; exact ties resolve to
    // the lowest index.
    int decide(std::complex<double> y) const;

    int index_of_bits(std::uint32_t bits) const { return static_cast<int>(bits); }
    std::uint32_t bits_of(int index) const { return static_cast<std::uint32_t>(index); }

private:
    QamConstellation() = default;
    std::vector<std::complex<double>> points_;
    int bits_ = 0;
    int cols_ = 0, rows_ = 0;
};

// Maps an interleaved bit stream onto two polarization symbol streams:
// one block of log2(M) bits for X, then one for Y, repeating. The bit
// count must divide evenly into dual-pol symbols.
struct DualPolSymbols {
    std::vector<std::complex<double>> x, y;
    std::vector<int> labels_x, labels_y;  // constellation indices
};
DualPolSymbols map_symbols(const std::vector<std::uint8_t>& bits, const QamConstellation& c);

// Hard-decides both streams back to bits (inverse of map_symbols on a
// clean channel).
std::vector<std::uint8_t> demap_symbols(const std::vector<std::complex<double>>& x,
                                        const std::vector<std::complex<double>>& y,
                                        const QamConstellation& c);

}  // namespace eqlab::data
