#include "mimobsp/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace mimobsp {

ComplexMatrix sample_channel(RandomStream& rng, int n_rx, int n_tx) {
    if (n_rx < 1 || n_tx < 1) throw std::invalid_argument("sample_channel: antenna counts must be >= 1");
    ComplexMatrix h(n_rx, n_tx);
    for (int i = 0; i < n_rx; ++i) {
        for (int j = 0; j < n_tx; ++j) h(i, j) = sample_complex_gaussian(rng, 0.5);
    }
    return h;
}

double noise_variance_from_ebn0(double ebn0_db, int bits_per_symbol, int n_tx, int n_rx) {
    if (bits_per_symbol * n_tx < 1) throw std::invalid_argument("noise_variance_from_ebn0: M*N_t must be >= 1");
    const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
    return static_cast<double>(n_rx) / (2.0 * bits_per_symbol * ebn0);
}

CVector transmit(const ComplexMatrix& h, std::span<const Complex> s, double sigma2, RandomStream& rng) {
    if (static_cast<int>(s.size()) != h.cols()) throw std::invalid_argument("transmit: dimension mismatch");
    if (!(sigma2 >= 0.0)) throw std::invalid_argument("transmit: sigma2 must be >= 0");
    CVector y = matvec(h, s);
    for (Complex& yi : y) yi += sample_complex_gaussian(rng, sigma2);
    return y;
}

} // namespace mimobsp
