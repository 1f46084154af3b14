#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mimobsp/bsp.hpp"
#include "mimobsp/channel.hpp"
#include "mimobsp/constellation.hpp"

namespace mimobsp {

enum class DetectorKind { Map, MmseHard, OriginalBp, Ebrdf, Bsp };

struct DetectorSpec {
    DetectorKind kind = DetectorKind::MmseHard;
    int d_m = 1;                        ///< BsP only
    int d_f = 1;                        ///< BsP / EBRDF
    InitMode init = InitMode::Lmmse;    ///< BsP / Original-BP
    int q_l = 0;                        ///< 0: use the sweep-wide iteration count

    std::string id() const;
};

struct SweepPoint {
    double ebn0_db = 0.0;
    double sigma2 = 0.0;
};

struct SimulationConfig {
    int n_rx = 8;
    int n_tx = 4;
    int bits_per_symbol = 4;
    int iterations = 10;
    std::vector<SweepPoint> points;
    uint64_t max_vectors = 100000;
    uint64_t target_bit_errors = 400;   ///< early stop once every detector reaches it
    std::vector<DetectorSpec> detectors;
    uint64_t master_seed = 1;
    int workers = 0;                    ///< 0: hardware concurrency
};

struct TrialCounts {
    uint64_t bit_errors = 0;
    uint64_t symbol_errors = 0;
    bool failed = false;
};

struct BerRecord {
    std::string detector;
    double ebn0_db = 0.0;
    double sigma2 = 0.0;
    uint64_t vectors = 0;
    uint64_t bit_errors = 0;
    uint64_t bits_total = 0;
    double ber = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    uint64_t symbol_errors = 0;
    uint64_t mults_per_use = 0;
    uint64_t failures = 0;
};

/// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(uint64_t errors, uint64_t total, double confidence);

/// One paired channel use: the trial stream is derived from
/// (master_seed, point, trial), the instance is drawn once, and every
/// detector in the roster sees the identical data.  Numerical failures are
/// flagged per detector without aborting the trial.  When `counters` is
/// non-null it must hold one entry per detector.
std::vector<TrialCounts> run_trial(const SimulationConfig& cfg, const Constellation& c,
                                   uint64_t point_index, uint64_t trial_index,
                                   std::vector<OpCounters>* counters = nullptr);

/// Full Monte Carlo sweep.  Worker count and scheduling never change the
/// result: trials are aggregated with order-independent integer sums over
/// fixed batches, and early stopping is decided only at batch boundaries
/// from the slowest detector's error count.
std::vector<BerRecord> run_sweep(const SimulationConfig& cfg);

} // namespace mimobsp
