#include "mimobsp/constellation.hpp"

#include <cmath>
#include <stdexcept>

namespace mimobsp {

namespace {

// Inverse of g(u) = u ^ (u >> 1).
int gray_decode(int g) {
    int u = g;
    for (int shift = 1; shift < 16; shift <<= 1) u ^= u >> shift;
    return u;
}

} // namespace

Constellation build_constellation(int bits_per_symbol) {
    if (bits_per_symbol < 2 || bits_per_symbol > 8 || bits_per_symbol % 2 != 0) {
        throw std::invalid_argument("build_constellation: M must be even and within [2, 8]");
    }
    const int m_half = bits_per_symbol / 2;
    const int levels = 1 << m_half;
    const int size = 1 << bits_per_symbol;

    // Average energy of {+-1, +-3, ..., +-(levels-1)} per axis, two axes.
    const double mean_energy = 2.0 * (static_cast<double>(levels) * levels - 1.0) / 3.0;
    const double scale = 1.0 / std::sqrt(mean_energy);

    Constellation c;
    c.bits_per_symbol = bits_per_symbol;
    c.points.resize(size);
    for (int label = 0; label < size; ++label) {
        const int vi = label >> m_half;
        const int vq = label & (levels - 1);
        const int ui = gray_decode(vi);
        const int uq = gray_decode(vq);
        const double amp_i = static_cast<double>(2 * ui - (levels - 1));
        const double amp_q = static_cast<double>(2 * uq - (levels - 1));
        c.points[label] = Complex{amp_i * scale, amp_q * scale};
    }
    return c;
}

CVector modulate(std::span<const uint8_t> bits, const Constellation& c) {
    const int m = c.bits_per_symbol;
    if (bits.size() % static_cast<size_t>(m) != 0) {
        throw std::invalid_argument("modulate: bit count not divisible by M");
    }
    const size_t n = bits.size() / m;
    CVector s(n);
    for (size_t j = 0; j < n; ++j) {
        int label = 0;
        for (int b = 0; b < m; ++b) label = (label << 1) | (bits[j * m + b] & 1);
        s[j] = c.points[label];
    }
    return s;
}

std::vector<uint8_t> hard_bits_from_llrs(std::span<const double> llrs, int bits_per_symbol) {
    if (bits_per_symbol <= 0 || llrs.size() % static_cast<size_t>(bits_per_symbol) != 0) {
        throw std::invalid_argument("hard_bits_from_llrs: length not divisible by M");
    }
    std::vector<uint8_t> bits(llrs.size());
    for (size_t i = 0; i < llrs.size(); ++i) {
        if (!std::isfinite(llrs[i])) throw std::invalid_argument("hard_bits_from_llrs: non-finite LLR");
        bits[i] = llrs[i] > 0.0 ? 1 : 0;
    }
    return bits;
}

int nearest_point_index(const Constellation& c, Complex z) {
    int best = 0;
    double best_d = std::norm(z - c.points[0]);
    for (int k = 1; k < c.order(); ++k) {
        const double d = std::norm(z - c.points[k]);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

} // namespace mimobsp
