#include "mimobsp/opcount.hpp"

#include <stdexcept>

namespace mimobsp {

OpCounters counters_snapshot(const OpCounters* run_counters) {
    if (run_counters == nullptr) throw std::logic_error("counters_snapshot: counters not enabled for this run");
    return *run_counters;
}

uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 acc = 1;
    for (int i = 1; i <= k; ++i) {
        acc = acc * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    }
    if (acc > UINT64_MAX) throw std::overflow_error("binomial: result exceeds 64 bits");
    return static_cast<uint64_t>(acc);
}

uint64_t predicted_multiplications(Algorithm algorithm, int n_rx, int n_tx, int bits_per_symbol,
                                   int d_m, int d_f) {
    if (n_rx < 1 || n_tx < 1 || bits_per_symbol < 1 || d_m < 1 || d_f < 1) {
        throw std::invalid_argument("predicted_multiplications: parameters must be >= 1");
    }
    const uint64_t order = uint64_t{1} << bits_per_symbol;
    unsigned __int128 count = 0;
    switch (algorithm) {
    case Algorithm::OriginalBp:
    case Algorithm::Map: {
        unsigned __int128 space = 1;
        for (int t = 0; t < n_tx; ++t) {
            space *= order;
            if (space > (static_cast<unsigned __int128>(UINT64_MAX) << 10)) {
                throw std::overflow_error("predicted_multiplications: search space exceeds 64 bits");
            }
        }
        count = 4 * space * static_cast<unsigned>(n_tx) * static_cast<unsigned>(n_rx);
        break;
    }
    case Algorithm::Bsp: {
        const int dm = std::min<int>(d_m, static_cast<int>(order));
        const int df = std::min(d_f, n_tx);
        unsigned __int128 cfg = binomial(n_tx - 1, df - 1);
        for (int t = 0; t < df - 1; ++t) cfg *= static_cast<unsigned>(dm);
        count = 4 * order * cfg * static_cast<unsigned>(n_tx) * static_cast<unsigned>(n_rx);
        break;
    }
    }
    if (count > UINT64_MAX) throw std::overflow_error("predicted_multiplications: result exceeds 64 bits");
    return static_cast<uint64_t>(count);
}

} // namespace mimobsp
