#include <doctest.h>

#include <cmath>

#include "mimobsp/report.hpp"
#include "mimobsp/sim.hpp"

using namespace mimobsp;

namespace {

SimulationConfig fig4_config() {
    SimulationConfig cfg;
    cfg.n_rx = 8;
    cfg.n_tx = 4;
    cfg.bits_per_symbol = 4;
    cfg.iterations = 10;
    cfg.master_seed = 777;
    cfg.workers = 0;
    cfg.target_bit_errors = 1ull << 60;
    return cfg;
}

std::vector<SweepPoint> points_at(const SimulationConfig& cfg, std::initializer_list<double> dbs) {
    std::vector<SweepPoint> pts;
    for (const double x : dbs) {
        pts.push_back({x, noise_variance_from_ebn0(x, cfg.bits_per_symbol, cfg.n_tx, cfg.n_rx)});
    }
    return pts;
}

double ber_of(const std::vector<BerRecord>& records, const std::string& det, double ebn0) {
    for (const BerRecord& r : records) {
        if (r.detector == det && r.ebn0_db == ebn0) return r.ber;
    }
    FAIL("record not found for " << det);
    return 0.0;
}

} // namespace

TEST_CASE("bsp improves with snr and beats mmse at moderate snr") {
    SimulationConfig cfg = fig4_config();
    cfg.points = points_at(cfg, {10.0, 12.0, 14.0});
    cfg.max_vectors = 20000;
    cfg.detectors = {
        DetectorSpec{DetectorKind::Bsp, 2, 2, InitMode::Lmmse},
        DetectorSpec{DetectorKind::MmseHard},
    };
    const std::vector<BerRecord> records = run_sweep(cfg);
    const double b10 = ber_of(records, "bsp:2:2", 10.0);
    const double b12 = ber_of(records, "bsp:2:2", 12.0);
    const double b14 = ber_of(records, "bsp:2:2", 14.0);
    CHECK(b10 > b12);
    CHECK(b12 > b14);
    CHECK(b14 < ber_of(records, "mmse", 14.0));
}

TEST_CASE("edge pruning floors while mmse keeps falling") {
    SimulationConfig cfg = fig4_config();
    cfg.points = points_at(cfg, {16.0, 20.0});
    cfg.max_vectors = 30000;
    cfg.detectors = {
        DetectorSpec{DetectorKind::Ebrdf, 1, 3},
        DetectorSpec{DetectorKind::MmseHard},
    };
    const std::vector<BerRecord> records = run_sweep(cfg);
    const double e16 = ber_of(records, "ebrdf:3", 16.0);
    const double e20 = ber_of(records, "ebrdf:3", 20.0);
    const double m20 = ber_of(records, "mmse", 20.0);
    // flattening: the pruned detector loses little between 16 and 20 dB and
    // sits at least a factor four above the mmse curve by 20 dB
    CHECK(e20 > 0.25 * e16);
    CHECK(e20 > 4.0 * m20);
    CHECK(e20 > 1e-4);
}

TEST_CASE("csv output is byte-identical across worker counts at scale") {
    SimulationConfig cfg = fig4_config();
    cfg.points = points_at(cfg, {8.0, 12.0});
    cfg.max_vectors = 500;
    cfg.detectors = {
        DetectorSpec{DetectorKind::Map},
        DetectorSpec{DetectorKind::MmseHard},
        DetectorSpec{DetectorKind::Bsp, 1, 1, InitMode::Lmmse},
        DetectorSpec{DetectorKind::Bsp, 2, 2, InitMode::Lmmse},
        DetectorSpec{DetectorKind::Ebrdf, 1, 3},
    };
    cfg.workers = 1;
    const std::string one = render_csv(run_sweep(cfg));
    cfg.workers = 4;
    const std::string four = render_csv(run_sweep(cfg));
    CHECK(one == four);
}
