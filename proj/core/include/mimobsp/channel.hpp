#pragma once

#include <cstdint>
#include <vector>

#include "mimobsp/linalg.hpp"
#include "mimobsp/random.hpp"

namespace mimobsp {

/// One channel use: everything a detector roster needs to run a paired
/// comparison on identical data.
struct ChannelInstance {
    ComplexMatrix h;               ///< N_r x N_t
    std::vector<uint8_t> s_bits;   ///< transmitted bits, M per symbol
    CVector s;                     ///< transmitted symbols
    CVector y;                     ///< received vector
    double sigma2 = 0.0;           ///< noise variance per real dimension
};

/// i.i.d. Rayleigh flat fading: entries are circularly symmetric complex
/// Gaussian with E[|h|^2] = 1 (variance 1/2 per real dimension).
ComplexMatrix sample_channel(RandomStream& rng, int n_rx, int n_tx);

/// Receive-energy convention.  Unit-energy symbols give a received energy of
/// N_r*N_t per use and M*N_t bits per use, so E_b = N_r/M and, with
/// N_0 = 2 sigma^2, sigma^2 = N_r / (2 M 10^(ebn0_db/10)).
double noise_variance_from_ebn0(double ebn0_db, int bits_per_symbol, int n_tx, int n_rx);

/// y = H s + n, noise variance sigma2 per real dimension.
CVector transmit(const ComplexMatrix& h, std::span<const Complex> s, double sigma2, RandomStream& rng);

} // namespace mimobsp
