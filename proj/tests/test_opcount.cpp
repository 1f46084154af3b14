#include <doctest.h>

#include <cmath>
#include <tuple>

#include "mimobsp/bp.hpp"
#include "mimobsp/bsp.hpp"
#include "mimobsp/channel.hpp"
#include "mimobsp/detectors.hpp"
#include "mimobsp/opcount.hpp"
#include "mimobsp/random.hpp"

using namespace mimobsp;

namespace {

struct Instance {
    ComplexMatrix h;
    CVector y;
    Constellation c;
};

Instance make_instance(RandomStream& rng, int n_rx, int n_tx, int m) {
    Instance inst;
    inst.c = build_constellation(m);
    inst.h = sample_channel(rng, n_rx, n_tx);
    std::vector<uint8_t> bits(static_cast<size_t>(m) * n_tx);
    for (uint8_t& b : bits) b = static_cast<uint8_t>(rng.next_bit());
    const CVector s = modulate(bits, inst.c);
    inst.y = transmit(inst.h, s, 0.1, rng);
    return inst;
}

void check_within(uint64_t measured, uint64_t predicted, double slack) {
    CHECK(static_cast<double>(measured) >= (1.0 - slack) * static_cast<double>(predicted));
    CHECK(static_cast<double>(measured) <= (1.0 + slack) * static_cast<double>(predicted));
}

} // namespace

TEST_CASE("closed forms for the 8x4 16-QAM reference point") {
    CHECK(predicted_multiplications(Algorithm::OriginalBp, 8, 4, 4) == 8388608);
    CHECK(predicted_multiplications(Algorithm::Bsp, 8, 4, 4, 1, 1) == 2048);
    CHECK(predicted_multiplications(Algorithm::Bsp, 8, 4, 4, 2, 2) == 12288);
    CHECK(predicted_multiplications(Algorithm::Map, 8, 4, 4) == 8388608);
    CHECK(predicted_multiplications(Algorithm::OriginalBp, 8, 4, 4) /
              predicted_multiplications(Algorithm::Bsp, 8, 4, 4, 1, 1) ==
          4096);
}

TEST_CASE("closed form clamps oversized parameters") {
    CHECK(predicted_multiplications(Algorithm::Bsp, 4, 2, 2, 99, 99) ==
          predicted_multiplications(Algorithm::Bsp, 4, 2, 2, 4, 2));
}

TEST_CASE("measured counts match the closed forms") {
    RandomStream rng(71);

    SUBCASE("original bp") {
        const Instance inst = make_instance(rng, 3, 2, 4);
        OpCounters counters;
        run_original_bp(inst.y, inst.h, 0.1, inst.c, 2, {}, &counters);
        CHECK(counters.real_multiplications() ==
              predicted_multiplications(Algorithm::OriginalBp, 3, 2, 4));
    }

    SUBCASE("counts are iteration independent") {
        const Instance inst = make_instance(rng, 2, 2, 2);
        OpCounters one, three;
        run_original_bp(inst.y, inst.h, 0.1, inst.c, 1, {}, &one);
        run_original_bp(inst.y, inst.h, 0.1, inst.c, 3, {}, &three);
        CHECK(one.real_multiplications() == three.real_multiplications());

        OpCounters b1, b3;
        const BspConfig cfg{2, 2, 1, InitMode::Uniform};
        run_bsp(inst.y, inst.h, 0.1, inst.c, cfg, &b1);
        BspConfig cfg3 = cfg;
        cfg3.q_l = 3;
        run_bsp(inst.y, inst.h, 0.1, inst.c, cfg3, &b3);
        CHECK(b1.real_multiplications() == b3.real_multiplications());
    }

    SUBCASE("bsp parameter grid") {
        for (const auto& [n_rx, n_tx, m] :
             {std::tuple{8, 4, 4}, std::tuple{4, 2, 2}, std::tuple{16, 8, 2},
              std::tuple{8, 4, 6}}) {
            const Instance inst = make_instance(rng, n_rx, n_tx, m);
            for (const auto& [d_m, d_f] :
                 std::vector<std::pair<int, int>>{{1, 1}, {2, 2}, {4, 4}, {4, 2}, {1, 4}}) {
                OpCounters counters;
                const BspConfig cfg{d_m, d_f, 2, InitMode::Uniform};
                run_bsp(inst.y, inst.h, 0.1, inst.c, cfg, &counters);
                check_within(counters.real_multiplications(),
                             predicted_multiplications(Algorithm::Bsp, n_rx, n_tx, m, d_m, d_f),
                             0.10);
            }
        }
    }

    SUBCASE("map") {
        const Instance inst = make_instance(rng, 4, 2, 4);
        OpCounters counters;
        map_detect(inst.y, inst.h, 0.1, inst.c, &counters);
        CHECK(counters.real_multiplications() ==
              predicted_multiplications(Algorithm::Map, 4, 2, 4));
    }
}

TEST_CASE("a zero-iteration run pays only for the product table") {
    RandomStream rng(72);
    const Instance inst = make_instance(rng, 3, 2, 4);
    OpCounters counters;
    const BspConfig cfg{2, 2, 0, InitMode::Uniform};
    run_bsp(inst.y, inst.h, 0.1, inst.c, cfg, &counters);
    CHECK(counters.real_multiplications() == 4ull * 3 * 2 * 16);
}

TEST_CASE("instrumentation does not change detector output") {
    RandomStream rng(73);
    const Instance inst = make_instance(rng, 4, 3, 4);
    OpCounters counters;
    const BspConfig cfg{2, 2, 4, InitMode::Uniform};
    const BitLlrOutput with = run_bsp(inst.y, inst.h, 0.1, inst.c, cfg, &counters);
    const BitLlrOutput without = run_bsp(inst.y, inst.h, 0.1, inst.c, cfg, nullptr);
    CHECK(with.llrs == without.llrs);

    const BitLlrOutput obp_with = run_original_bp(inst.y, inst.h, 0.1, inst.c, 3, {}, &counters);
    const BitLlrOutput obp_without = run_original_bp(inst.y, inst.h, 0.1, inst.c, 3);
    CHECK(obp_with.llrs == obp_without.llrs);
}

TEST_CASE("ebrdf accounting follows its searched space") {
    RandomStream rng(74);
    const Instance inst = make_instance(rng, 4, 3, 2);
    for (int d_f = 1; d_f <= 3; ++d_f) {
        OpCounters counters;
        run_ebrdf_bp(inst.y, inst.h, 0.1, inst.c, 2, d_f, &counters);
        uint64_t searched = 1;
        for (int r = 0; r < d_f; ++r) searched *= 4;
        CHECK(counters.real_multiplications() == 4ull * searched * 3 * 4);
    }
}

TEST_CASE("snapshot requires an instrumented run") {
    CHECK_THROWS_AS(counters_snapshot(nullptr), std::logic_error);
    OpCounters counters;
    counters.add_candidate_products(5);
    const OpCounters snap = counters_snapshot(&counters);
    CHECK(snap.real_multiplications() == 20);
}

TEST_CASE("overflow in the closed form is reported") {
    CHECK_THROWS_AS(predicted_multiplications(Algorithm::OriginalBp, 16, 16, 8),
                    std::overflow_error);
    CHECK_THROWS_AS(predicted_multiplications(Algorithm::Bsp, 0, 4, 4), std::invalid_argument);
}
