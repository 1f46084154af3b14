#pragma once

#include <complex>
#include <cstdint>

namespace mimobsp {

/// xoshiro256++ stream with splitmix64 seeding.  One stream per owner; never
/// share an instance across concurrent workers.  Gaussian draws use
/// Box-Muller with one cached value, so consumption order is part of the
/// reproducible state.
class RandomStream {
public:
    explicit RandomStream(uint64_t seed) { reseed(seed); }

    void reseed(uint64_t seed);

    uint64_t next_u64();

    /// Uniform on (0, 1].
    double next_unit();

    /// Standard normal.
    double next_gaussian();

    /// One uniformly random bit.
    int next_bit() { return static_cast<int>(next_u64() >> 63); }

private:
    uint64_t state_[4]{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Independent stream for one Monte Carlo trial, derived from the master
/// seed and the (sweep point, trial) coordinates with splitmix64 mixing.
/// Same inputs, same stream, regardless of which worker runs the trial.
RandomStream derive_stream(uint64_t master_seed, uint64_t point_index, uint64_t trial_index);

/// Complex sample with independent real/imag N(0, var_per_real_dim) parts.
/// var = 0 yields exactly 0 + 0i.
std::complex<double> sample_complex_gaussian(RandomStream& rng, double var_per_real_dim);

} // namespace mimobsp
