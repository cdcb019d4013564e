#include "eqlab/constellation.hpp"

#include <cmath>

#include "eqlab/errors.hpp"

namespace eqlab::data {

namespace {
std::uint32_t gray_encode(std::uint32_t b) { return b ^ (b >> 1); }

int ilog2(int v) {
    int b = 0;
    while ((1 << b) < v) ++b;
    return b;
}
}  // namespace

QamConstellation QamConstellation::make(int cardinality) {
    QamConstellation c;
    switch (cardinality) {
        case 8: c.cols_ = 4; c.rows_ = 2; break;
        case 16: c.cols_ = 4; c.rows_ = 4; break;
        case 32: c.cols_ = 8; c.rows_ = 4; break;
        case 64: c.cols_ = 8; c.rows_ = 8; break;
        case 128: c.cols_ = 16; c.rows_ = 8; break;
        default:
            throw ConfigError("constellation: unsupported cardinality " + std::to_string(cardinality));
    }
    c.bits_ = ilog2(cardinality);
    int qbits = ilog2(c.rows_);

    // Gray label -> grid level, per axis.
    std::vector<int> icol(static_cast<std::size_t>(c.cols_));
    std::vector<int> qrow(static_cast<std::size_t>(c.rows_));
    for (int level = 0; level < c.cols_; ++level) icol[gray_encode(static_cast<std::uint32_t>(level))] = level;
    for (int level = 0; level < c.rows_; ++level) qrow[gray_encode(static_cast<std::uint32_t>(level))] = level;

    c.points_.resize(static_cast<std::size_t>(cardinality));
    double energy = 0.0;
    for (int label = 0; label < cardinality; ++label) {
        int ig = label >> qbits;
        int qg = label & ((1 << qbits) - 1);
        int ii = icol[static_cast<std::size_t>(ig)];
        int qq = qrow[static_cast<std::size_t>(qg)];
        double re = static_cast<double>(2 * ii - (c.cols_ - 1));
        double im = static_cast<double>(2 * qq - (c.rows_ - 1));
        c.points_[static_cast<std::size_t>(label)] = {re, im};
        energy += re * re + im * im;
    }
    double scale = 1.0 / std::sqrt(energy / cardinality);
    for (auto& p : c.points_) p *= scale;
    return c;
}

int QamConstellation::decide(std::complex<double> y) const {
    int best = 0;
    double best_d = std::norm(y - points_[0]);
    for (int i = 1; i < cardinality(); ++i) {
        double d = std::norm(y - points_[static_cast<std::size_t>(i)]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

DualPolSymbols map_symbols(const std::vector<std::uint8_t>& bits, const QamConstellation& c) {
    const int bps = c.bits_per_symbol();
    if (bits.size() % static_cast<std::size_t>(2 * bps) != 0)
        throw ConfigError("map_symbols: bit count not divisible by 2*log2(M)");
    std::size_t n = bits.size() / static_cast<std::size_t>(2 * bps);
    DualPolSymbols out;
    out.x.reserve(n);
    out.y.reserve(n);
    out.labels_x.reserve(n);
    out.labels_y.reserve(n);
    std::size_t pos = 0;
    auto take = [&]() {
        std::uint32_t v = 0;
        for (int b = 0; b < bps; ++b) v = (v << 1) | (bits[pos++] & 1u);
        return v;
    };
    for (std::size_t k = 0; k < n; ++k) {
        int lx = c.index_of_bits(take());
        int ly = c.index_of_bits(take());
        out.labels_x.push_back(lx);
        out.labels_y.push_back(ly);
        out.x.push_back(c.point(lx));
        out.y.push_back(c.point(ly));
    }
    return out;
}

std::vector<std::uint8_t> demap_symbols(const std::vector<std::complex<double>>& x,
                                        const std::vector<std::complex<double>>& y,
                                        const QamConstellation& c) {
    if (x.size() != y.size()) throw ConfigError("demap_symbols: polarization length mismatch");
    const int bps = c.bits_per_symbol();
    std::vector<std::uint8_t> bits;
    bits.reserve(x.size() * static_cast<std::size_t>(2 * bps));
    auto push = [&](int label) {
        std::uint32_t v = c.bits_of(label);
        for (int b = bps - 1; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((v >> b) & 1u));
    };
    for (std::size_t k = 0; k < x.size(); ++k) {
        push(c.decide(x[k]));
        push(c.decide(y[k]));
    }
    return bits;
}

}  // namespace eqlab::data
