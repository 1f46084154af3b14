#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mimobsp/constellation.hpp"
#include "mimobsp/random.hpp"

using namespace mimobsp;

namespace {

int popcount_diff(int a, int b) { return __builtin_popcount(static_cast<unsigned>(a ^ b)); }

// Gray check along one axis: group points by the other coordinate, sort by
// this coordinate, neighbours must differ in exactly one label bit.
void check_axis_gray(const Constellation& c, bool along_i) {
    std::map<long long, std::vector<std::pair<double, int>>> lanes;
    for (int k = 0; k < c.order(); ++k) {
        const double key = along_i ? c.points[k].imag() : c.points[k].real();
        const double val = along_i ? c.points[k].real() : c.points[k].imag();
        lanes[std::llround(key * 1e9)].push_back({val, k});
    }
    for (auto& [key, lane] : lanes) {
        std::sort(lane.begin(), lane.end());
        for (size_t t = 1; t < lane.size(); ++t) {
            CHECK(popcount_diff(lane[t - 1].second, lane[t].second) == 1);
        }
    }
}

} // namespace

TEST_CASE("constellation argument validation") {
    CHECK_THROWS_AS(build_constellation(3), std::invalid_argument);
    CHECK_THROWS_AS(build_constellation(0), std::invalid_argument);
    CHECK_THROWS_AS(build_constellation(10), std::invalid_argument);
}

TEST_CASE("qpsk points and reference symbol") {
    const Constellation c = build_constellation(2);
    REQUIRE(c.order() == 4);
    const double s = 1.0 / std::sqrt(2.0);
    std::set<std::pair<long long, long long>> expect = {
        {-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
    for (const Complex& p : c.points) {
        const auto key = std::make_pair(std::llround(p.real() / s), std::llround(p.imag() / s));
        CHECK(expect.erase(key) == 1);
    }
    CHECK(expect.empty());
    // reference point carries the all-zero label
    CHECK(Constellation::kReferenceIndex == 0);
    for (int m = 0; m < 2; ++m) CHECK(c.label_bit(0, m) == 0);
}

TEST_CASE("16-QAM levels are the scaled odd integers") {
    const Constellation c = build_constellation(4);
    REQUIRE(c.order() == 16);
    const double s = 1.0 / std::sqrt(10.0);
    std::set<long long> levels;
    for (const Complex& p : c.points) levels.insert(std::llround(p.real() / s));
    CHECK(levels == std::set<long long>{-3, -1, 1, 3});
}

TEST_CASE("unit average energy for every supported order") {
    for (int m : {2, 4, 6, 8}) {
        const Constellation c = build_constellation(m);
        double energy = 0.0;
        for (const Complex& p : c.points) energy += std::norm(p);
        energy /= c.order();
        CHECK(std::abs(energy - 1.0) <= 1e-12);
    }
}

TEST_CASE("gray property holds along both axes") {
    for (int m : {2, 4, 6, 8}) {
        const Constellation c = build_constellation(m);
        check_axis_gray(c, true);
        check_axis_gray(c, false);
    }
}

TEST_CASE("modulate maps labels to points") {
    const Constellation c = build_constellation(2);
    const std::vector<uint8_t> zeros{0, 0, 0, 0};
    const CVector s = modulate(zeros, c);
    REQUIRE(s.size() == 2);
    CHECK(s[0] == c.points[0]);
    CHECK(s[1] == c.points[0]);

    const Constellation c16 = build_constellation(4);
    for (int k = 0; k < 16; ++k) {
        std::vector<uint8_t> bits;
        for (int rep = 0; rep < 3; ++rep) {
            for (int b = 0; b < 4; ++b) bits.push_back(static_cast<uint8_t>(c16.label_bit(k, b)));
        }
        const CVector sv = modulate(bits, c16);
        for (const Complex& p : sv) CHECK(p == c16.points[k]);
    }

    CHECK_THROWS_AS(modulate(std::vector<uint8_t>{1, 0, 1}, c16), std::invalid_argument);
}

TEST_CASE("modulate round-trips through exact point lookup") {
    RandomStream rng(77);
    const Constellation c = build_constellation(6);
    std::vector<uint8_t> bits(6 * 5);
    for (int trial = 0; trial < 50; ++trial) {
        for (uint8_t& b : bits) b = static_cast<uint8_t>(rng.next_bit());
        const CVector s = modulate(bits, c);
        for (size_t j = 0; j < s.size(); ++j) {
            const auto it = std::find(c.points.begin(), c.points.end(), s[j]);
            REQUIRE(it != c.points.end());
            const int k = static_cast<int>(it - c.points.begin());
            for (int b = 0; b < 6; ++b) CHECK(c.label_bit(k, b) == bits[j * 6 + b]);
        }
    }
}

TEST_CASE("hard decision sign rule with zero tie to bit 0") {
    const std::vector<double> llrs{3.2, -1.0};
    CHECK(hard_bits_from_llrs(llrs, 2) == std::vector<uint8_t>{1, 0});
    const std::vector<double> ties{0.0, 0.0};
    CHECK(hard_bits_from_llrs(ties, 2) == std::vector<uint8_t>{0, 0});
    const std::vector<double> bad{1.0, std::nan("")};
    CHECK_THROWS_AS(hard_bits_from_llrs(bad, 2), std::invalid_argument);
}

TEST_CASE("nearest point tie breaks to the lowest index") {
    const Constellation c = build_constellation(4);
    const int k = nearest_point_index(c, Complex{0.0, 0.0});
    // the four inner points are equidistant from the origin
    const double d = std::norm(c.points[k]);
    int equidistant = 0;
    for (int t = 0; t < 16; ++t) {
        if (std::abs(std::norm(c.points[t]) - d) < 1e-12) ++equidistant;
        if (std::norm(c.points[t]) < d - 1e-12) FAIL("found a closer point");
    }
    CHECK(equidistant == 4);
    for (int t = 0; t < k; ++t) CHECK(std::norm(c.points[t]) > d + 1e-12);
}
