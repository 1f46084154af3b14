#include "mimobsp/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "mimobsp/detectors.hpp"

namespace mimobsp {

namespace {

// Detectors need a strictly positive noise variance; a sigma2 of exactly 0
// (infinite SNR) is simulated with noiseless data and this floor in the
// metric scale.
constexpr double kSigma2Floor = 1e-12;

// z for the Wilson interval via the Acklam inverse-normal approximation,
// refined with one Halley step against std::erfc.
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must be in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double qv = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * qv + c[1]) * qv + c[2]) * qv + c[3]) * qv + c[4]) * qv + c[5]) /
            ((((d[0] * qv + d[1]) * qv + d[2]) * qv + d[3]) * qv + 1.0);
    } else if (p <= 1.0 - plow) {
        const double qv = p - 0.5;
        const double r = qv * qv;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * qv /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double qv = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * qv + c[1]) * qv + c[2]) * qv + c[3]) * qv + c[4]) * qv + c[5]) /
            ((((d[0] * qv + d[1]) * qv + d[2]) * qv + d[3]) * qv + 1.0);
    }
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * std::acos(-1.0)) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

std::vector<uint8_t> detect_hard_bits(const DetectorSpec& det, const SimulationConfig& cfg,
                                      const ChannelInstance& ch, const Constellation& c,
                                      double sigma2_eff,
                                      const std::optional<LinearEstimate>& lmmse,
                                      OpCounters* counters) {
    const int q_l = det.q_l > 0 ? det.q_l : cfg.iterations;
    switch (det.kind) {
    case DetectorKind::Map:
        return map_detect(ch.y, ch.h, sigma2_eff, c, counters).hard_bits;
    case DetectorKind::MmseHard:
        return lmmse_hard_detect(*lmmse, c);
    case DetectorKind::OriginalBp: {
        if (det.init == InitMode::Lmmse) {
            const std::vector<double> priors = lmmse_prior_llrs(*lmmse, c);
            return run_original_bp(ch.y, ch.h, sigma2_eff, c, q_l, priors, counters).hard_bits;
        }
        return run_original_bp(ch.y, ch.h, sigma2_eff, c, q_l, {}, counters).hard_bits;
    }
    case DetectorKind::Ebrdf:
        return run_ebrdf_bp(ch.y, ch.h, sigma2_eff, c, q_l, det.d_f, counters).hard_bits;
    case DetectorKind::Bsp: {
        BspConfig bsp_cfg{det.d_m, det.d_f, q_l, det.init};
        return run_bsp(ch.y, ch.h, sigma2_eff, c, bsp_cfg, counters).hard_bits;
    }
    }
    throw std::logic_error("detect_hard_bits: unknown detector kind");
}

struct PointTotals {
    std::vector<uint64_t> bit_errors;
    std::vector<uint64_t> symbol_errors;
    std::vector<uint64_t> failures;
    uint64_t vectors = 0;

    explicit PointTotals(size_t n)
        : bit_errors(n, 0), symbol_errors(n, 0), failures(n, 0) {}

    void absorb(const PointTotals& other) {
        for (size_t d = 0; d < bit_errors.size(); ++d) {
            bit_errors[d] += other.bit_errors[d];
            symbol_errors[d] += other.symbol_errors[d];
            failures[d] += other.failures[d];
        }
        vectors += other.vectors;
    }
};

} // namespace

std::string DetectorSpec::id() const {
    switch (kind) {
    case DetectorKind::Map:
        return "map";
    case DetectorKind::MmseHard:
        return "mmse";
    case DetectorKind::OriginalBp:
        return init == InitMode::Lmmse ? "obp:lmmse" : "obp";
    case DetectorKind::Ebrdf:
        return "ebrdf:" + std::to_string(d_f);
    case DetectorKind::Bsp: {
        std::string s = "bsp:" + std::to_string(d_m) + ":" + std::to_string(d_f);
        if (init == InitMode::Uniform) s += ":uniform";
        return s;
    }
    }
    return "unknown";
}

std::pair<double, double> wilson_interval(uint64_t errors, uint64_t total, double confidence) {
    if (total == 0 || errors > total) throw std::invalid_argument("wilson_interval: bad counts");
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument("wilson_interval: confidence must be in (0,1)");
    }
    const double z = normal_quantile(0.5 + confidence / 2.0);
    const double n = static_cast<double>(total);
    const double p = static_cast<double>(errors) / n;
    const double z2n = z * z / n;
    const double center = (p + z2n / 2.0) / (1.0 + z2n);
    const double half = z / (1.0 + z2n) * std::sqrt(p * (1.0 - p) / n + z2n / (4.0 * n));
    double low = errors == 0 ? 0.0 : center - half;
    double high = errors == total ? 1.0 : center + half;
    return {std::max(0.0, low), std::min(1.0, high)};
}

std::vector<TrialCounts> run_trial(const SimulationConfig& cfg, const Constellation& c,
                                   uint64_t point_index, uint64_t trial_index,
                                   std::vector<OpCounters>* counters) {
    if (point_index >= cfg.points.size()) throw std::invalid_argument("run_trial: point index out of range");
    const SweepPoint& point = cfg.points[point_index];

    RandomStream rng = derive_stream(cfg.master_seed, point_index, trial_index);

    ChannelInstance ch;
    ch.sigma2 = point.sigma2;
    ch.s_bits.resize(static_cast<size_t>(cfg.bits_per_symbol) * cfg.n_tx);
    for (uint8_t& b : ch.s_bits) b = static_cast<uint8_t>(rng.next_bit());
    ch.s = modulate(ch.s_bits, c);
    ch.h = sample_channel(rng, cfg.n_rx, cfg.n_tx);
    ch.y = transmit(ch.h, ch.s, ch.sigma2, rng);

    const double sigma2_eff = std::max(ch.sigma2, kSigma2Floor);

    bool needs_lmmse = false;
    for (const DetectorSpec& det : cfg.detectors) {
        needs_lmmse |= det.kind == DetectorKind::MmseHard;
        needs_lmmse |= (det.kind == DetectorKind::Bsp || det.kind == DetectorKind::OriginalBp) &&
                       det.init == InitMode::Lmmse;
    }
    std::optional<LinearEstimate> lmmse;
    bool lmmse_failed = false;
    if (needs_lmmse) {
        try {
            lmmse = lmmse_estimate(ch.y, ch.h, sigma2_eff);
        } catch (const NumericalError&) {
            lmmse_failed = true;
        }
    }

    std::vector<TrialCounts> out(cfg.detectors.size());
    const int m = cfg.bits_per_symbol;
    for (size_t d = 0; d < cfg.detectors.size(); ++d) {
        const DetectorSpec& det = cfg.detectors[d];
        OpCounters* det_counters = counters != nullptr ? &(*counters)[d] : nullptr;
        const bool wants_lmmse =
            det.kind == DetectorKind::MmseHard ||
            ((det.kind == DetectorKind::Bsp || det.kind == DetectorKind::OriginalBp) &&
             det.init == InitMode::Lmmse);
        if (wants_lmmse && lmmse_failed) {
            out[d].failed = true;
            continue;
        }
        try {
            const std::vector<uint8_t> hard =
                detect_hard_bits(det, cfg, ch, c, sigma2_eff, lmmse, det_counters);
            for (int j = 0; j < cfg.n_tx; ++j) {
                uint64_t symbol_bit_errors = 0;
                for (int b = 0; b < m; ++b) {
                    const size_t idx = static_cast<size_t>(j) * m + b;
                    symbol_bit_errors += hard[idx] != ch.s_bits[idx];
                }
                out[d].bit_errors += symbol_bit_errors;
                out[d].symbol_errors += symbol_bit_errors > 0;
            }
        } catch (const NumericalError&) {
            out[d].failed = true;
        }
    }
    return out;
}

std::vector<BerRecord> run_sweep(const SimulationConfig& cfg) {
    if (cfg.detectors.empty()) throw std::invalid_argument("run_sweep: empty detector roster");
    if (cfg.max_vectors < 1) throw std::invalid_argument("run_sweep: max_vectors must be >= 1");
    const Constellation c = build_constellation(cfg.bits_per_symbol);
    const size_t n_det = cfg.detectors.size();

    int workers = cfg.workers;
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(workers, 1);

    // Fixed batch size: stop decisions land on the same trial boundaries for
    // every worker count.
    constexpr uint64_t kBatch = 1024;

    std::vector<BerRecord> records;
    records.reserve(cfg.points.size() * n_det);
    for (size_t p = 0; p < cfg.points.size(); ++p) {
        PointTotals totals(n_det);

        // Trial 0 doubles as the instrumentation run.
        std::vector<OpCounters> counters(n_det);
        const std::vector<TrialCounts> first = run_trial(cfg, c, p, 0, &counters);
        for (size_t d = 0; d < n_det; ++d) {
            totals.bit_errors[d] += first[d].bit_errors;
            totals.symbol_errors[d] += first[d].symbol_errors;
            totals.failures[d] += first[d].failed ? 1 : 0;
        }
        totals.vectors = 1;

        uint64_t next_trial = 1;
        while (totals.vectors < cfg.max_vectors) {
            uint64_t slowest = UINT64_MAX;
            for (size_t d = 0; d < n_det; ++d) slowest = std::min(slowest, totals.bit_errors[d]);
            if (slowest >= cfg.target_bit_errors) break;

            const uint64_t batch_end = std::min(next_trial + kBatch, cfg.max_vectors);
            std::atomic<uint64_t> cursor{next_trial};
            std::vector<PointTotals> local(workers, PointTotals(n_det));
            auto work = [&](int w) {
                PointTotals& mine = local[w];
                while (true) {
                    const uint64_t t = cursor.fetch_add(1);
                    if (t >= batch_end) break;
                    const std::vector<TrialCounts> res = run_trial(cfg, c, p, t, nullptr);
                    for (size_t d = 0; d < n_det; ++d) {
                        mine.bit_errors[d] += res[d].bit_errors;
                        mine.symbol_errors[d] += res[d].symbol_errors;
                        mine.failures[d] += res[d].failed ? 1 : 0;
                    }
                    ++mine.vectors;
                }
            };
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (int w = 1; w < workers; ++w) pool.emplace_back(work, w);
            work(0);
            for (std::thread& th : pool) th.join();
            for (const PointTotals& l : local) totals.absorb(l);
            next_trial = batch_end;
        }

        const uint64_t bits_per_vector = static_cast<uint64_t>(cfg.bits_per_symbol) * cfg.n_tx;
        for (size_t d = 0; d < n_det; ++d) {
            BerRecord rec;
            rec.detector = cfg.detectors[d].id();
            rec.ebn0_db = cfg.points[p].ebn0_db;
            rec.sigma2 = cfg.points[p].sigma2;
            rec.vectors = totals.vectors;
            rec.bit_errors = totals.bit_errors[d];
            rec.bits_total = totals.vectors * bits_per_vector;
            rec.ber = static_cast<double>(rec.bit_errors) / static_cast<double>(rec.bits_total);
            const auto [lo, hi] = wilson_interval(rec.bit_errors, rec.bits_total, 0.95);
            rec.ci_low = lo;
            rec.ci_high = hi;
            rec.symbol_errors = totals.symbol_errors[d];
            rec.mults_per_use = counters[d].real_multiplications();
            rec.failures = totals.failures[d];
            records.push_back(std::move(rec));
        }
    }
    return records;
}

} // namespace mimobsp
