#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mimobsp/linalg.hpp"

namespace mimobsp {

/// Square QAM with Gray labeling and unit average energy.
///
/// Points are enumerated by ascending label value, so the point index *is*
/// the label: index 0 carries the all-zero label and serves as the reference
/// symbol of every LLR vector.  The first M/2 label bits (most significant
/// first) Gray-code the I level, the last M/2 the Q level.
struct Constellation {
    int bits_per_symbol = 0;       ///< M, even
    std::vector<Complex> points;   ///< 2^M points, average energy 1

    static constexpr int kReferenceIndex = 0;

    int order() const noexcept { return static_cast<int>(points.size()); }

    /// m-th label bit (m = 0 is the most significant) of point k.
    int label_bit(int k, int m) const noexcept {
        return (k >> (bits_per_symbol - 1 - m)) & 1;
    }
};

/// Builds the order-2^M square QAM.  M must be even and within [2, 8].
Constellation build_constellation(int bits_per_symbol);

/// Maps a bit vector of length M*N onto N symbols, M bits per symbol,
/// most significant label bit first.
CVector modulate(std::span<const uint8_t> bits, const Constellation& c);

/// Sign rule of the max-log bit LLR convention: positive LLR decides 1,
/// zero decides 0.  `llrs` holds M entries per symbol, concatenated.
std::vector<uint8_t> hard_bits_from_llrs(std::span<const double> llrs, int bits_per_symbol);

/// Index of the constellation point closest to z; ties resolve to the
/// lowest index.
int nearest_point_index(const Constellation& c, Complex z);

} // namespace mimobsp
