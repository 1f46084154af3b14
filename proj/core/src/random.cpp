#include "mimobsp/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mimobsp {

namespace {

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

void RandomStream::reseed(uint64_t seed) {
    uint64_t sm = seed;
    for (uint64_t& s : state_) s = splitmix64(sm);
    has_spare_ = false;
}

uint64_t RandomStream::next_u64() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RandomStream::next_unit() {
    // (0, 1]: keeps log() finite in Box-Muller.
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RandomStream::next_gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

RandomStream derive_stream(uint64_t master_seed, uint64_t point_index, uint64_t trial_index) {
    uint64_t sm = master_seed;
    uint64_t key = splitmix64(sm);
    sm ^= 0x9e3779b97f4a7c15ULL * (point_index + 1);
    key ^= splitmix64(sm);
    sm ^= 0xbf58476d1ce4e5b9ULL * (trial_index + 1);
    key ^= splitmix64(sm);
    return RandomStream(key);
}

std::complex<double> sample_complex_gaussian(RandomStream& rng, double var_per_real_dim) {
    if (!(var_per_real_dim >= 0.0) || !std::isfinite(var_per_real_dim)) {
        throw std::invalid_argument("sample_complex_gaussian: variance must be finite and >= 0");
    }
    const double s = std::sqrt(var_per_real_dim);
    const double re = s * rng.next_gaussian();
    const double im = s * rng.next_gaussian();
    return {re, im};
}

} // namespace mimobsp
