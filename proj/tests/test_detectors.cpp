#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "mimobsp/channel.hpp"
#include "mimobsp/detectors.hpp"
#include "mimobsp/random.hpp"

using namespace mimobsp;

namespace {

// Independent max-log MAP oracle: plain nested loops over every candidate
// vector, metric -||y - Hs||^2 / (2 sigma2), no shared tables.
std::vector<double> brute_force_map_llrs(const CVector& y, const ComplexMatrix& h, double sigma2,
                                         const Constellation& c) {
    const int n_tx = h.cols();
    const int q = c.order();
    const int m = c.bits_per_symbol;
    long total = 1;
    for (int t = 0; t < n_tx; ++t) total *= q;

    std::vector<double> llrs(static_cast<size_t>(n_tx) * m);
    for (int j = 0; j < n_tx; ++j) {
        for (int b = 0; b < m; ++b) {
            double best0 = -std::numeric_limits<double>::infinity();
            double best1 = best0;
            for (long code = 0; code < total; ++code) {
                long rem = code;
                std::vector<int> ks(n_tx);
                for (int t = 0; t < n_tx; ++t) {
                    ks[t] = static_cast<int>(rem % q);
                    rem /= q;
                }
                double metric = 0.0;
                for (int i = 0; i < h.rows(); ++i) {
                    Complex acc = y[i];
                    for (int t = 0; t < n_tx; ++t) acc -= h(i, t) * c.points[ks[t]];
                    metric += std::norm(acc);
                }
                metric = -metric / (2.0 * sigma2);
                if (c.label_bit(ks[j], b)) {
                    best1 = std::max(best1, metric);
                } else {
                    best0 = std::max(best0, metric);
                }
            }
            llrs[static_cast<size_t>(j) * m + b] = best1 - best0;
        }
    }
    return llrs;
}

void check_llrs_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({1.0, std::abs(a[i]), std::abs(b[i])});
        CHECK(std::abs(a[i] - b[i]) <= tol * scale);
    }
}

} // namespace

TEST_CASE("map detection is exact in the noiseless limit") {
    RandomStream rng(21);
    const Constellation c = build_constellation(4);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix h = sample_channel(rng, 4, 2);
        std::vector<uint8_t> bits(8);
        for (uint8_t& b : bits) b = static_cast<uint8_t>(rng.next_bit());
        const CVector s = modulate(bits, c);
        const CVector y = transmit(h, s, 0.0, rng);
        const BitLlrOutput out = map_detect(y, h, 1e-9, c);
        CHECK(out.hard_bits == bits);
    }
}

TEST_CASE("single antenna map recovers every label") {
    const Constellation c = build_constellation(4);
    ComplexMatrix h(1, 1);
    h(0, 0) = Complex{1.0, 0.0};
    for (int k = 0; k < 16; ++k) {
        const CVector y{c.points[k]};
        const BitLlrOutput out = map_detect(y, h, 1e-6, c);
        for (int b = 0; b < 4; ++b) CHECK(out.hard_bits[b] == c.label_bit(k, b));
    }
}

TEST_CASE("map matches an independent brute force") {
    RandomStream rng(33);
    const Constellation c = build_constellation(2);
    for (int trial = 0; trial < 25; ++trial) {
        const ComplexMatrix h = sample_channel(rng, 2, 2);
        std::vector<uint8_t> bits(4);
        for (uint8_t& b : bits) b = static_cast<uint8_t>(rng.next_bit());
        const CVector s = modulate(bits, c);
        const CVector y = transmit(h, s, 0.2, rng);
        const BitLlrOutput out = map_detect(y, h, 0.2, c);
        check_llrs_close(out.llrs, brute_force_map_llrs(y, h, 0.2, c), 1e-9);
    }
}

TEST_CASE("map fallback path handles wide channels") {
    RandomStream rng(34);
    const Constellation c = build_constellation(2);
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix h = sample_channel(rng, 1, 2);
        std::vector<uint8_t> bits{1, 0, 0, 1};
        const CVector s = modulate(bits, c);
        const CVector y = transmit(h, s, 0.3, rng);
        const BitLlrOutput out = map_detect(y, h, 0.3, c);
        check_llrs_close(out.llrs, brute_force_map_llrs(y, h, 0.3, c), 1e-9);
    }
}

TEST_CASE("map enforces the enumeration cap") {
    RandomStream rng(35);
    const Constellation c = build_constellation(4);
    const ComplexMatrix h = sample_channel(rng, 4, 4);
    const CVector y(4, Complex{0.0, 0.0});
    CHECK_THROWS_AS(map_detect(y, h, 0.1, c, nullptr, 1000), ScaleError);
}

TEST_CASE("lmmse closed form on the identity channel") {
    ComplexMatrix eye(2, 2);
    eye(0, 0) = eye(1, 1) = Complex{1.0, 0.0};
    const CVector y{Complex{1.0, 0.0}, Complex{1.0, 0.0}};
    const LinearEstimate est = lmmse_estimate(y, eye, 1.0);
    CHECK(est.s_hat[0].real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(est.s_hat[1].real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(est.k_diag[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(est.k_diag[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("lmmse approaches zero forcing as noise vanishes") {
    RandomStream rng(41);
    const Constellation c = build_constellation(4);
    const ComplexMatrix h = sample_channel(rng, 8, 4);
    std::vector<uint8_t> bits(16);
    for (uint8_t& b : bits) b = static_cast<uint8_t>(rng.next_bit());
    const CVector s = modulate(bits, c);
    const CVector y = transmit(h, s, 0.0, rng);
    const LinearEstimate est = lmmse_estimate(y, h, 1e-12);
    for (int j = 0; j < 4; ++j) CHECK(std::abs(est.s_hat[j] - s[j]) <= 1e-4);
}

TEST_CASE("lmmse solve satisfies the residual bound") {
    RandomStream rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        const ComplexMatrix h = sample_channel(rng, 8, 4);
        CVector y(8);
        for (Complex& v : y) v = sample_complex_gaussian(rng, 1.0);
        const LinearEstimate est = lmmse_estimate(y, h, 0.1);
        const ComplexMatrix a = gram_regularized(h, 0.1);
        const CVector rhs = conj_transpose_times(h, y);
        const CVector as = matvec(a, est.s_hat);
        double res = 0.0;
        for (int j = 0; j < 4; ++j) res += std::norm(as[j] - rhs[j]);
        res = std::sqrt(res);
        const double scale = fro_norm(a) * vec_norm(est.s_hat) + vec_norm(rhs);
        CHECK(res <= 1e-10 * scale);
    }
}

TEST_CASE("lmmse hard decisions") {
    const Constellation c = build_constellation(4);
    LinearEstimate est;
    est.s_hat = {c.points[11]};
    est.k_diag = {0.1};
    std::vector<uint8_t> expect;
    for (int b = 0; b < 4; ++b) expect.push_back(static_cast<uint8_t>(c.label_bit(11, b)));
    CHECK(lmmse_hard_detect(est, c) == expect);

    // equidistant estimate resolves to the lowest-index inner point
    est.s_hat = {Complex{0.0, 0.0}};
    const std::vector<uint8_t> tie = lmmse_hard_detect(est, c);
    const int k = nearest_point_index(c, Complex{0.0, 0.0});
    for (int b = 0; b < 4; ++b) CHECK(tie[b] == c.label_bit(k, b));
}

TEST_CASE("pseudo-prior llrs are referenced and ordered") {
    const Constellation c = build_constellation(4);
    LinearEstimate est;
    est.s_hat = {c.points[0], c.points[9]};
    est.k_diag = {0.2, 0.05};
    const std::vector<double> alpha = lmmse_prior_llrs(est, c);
    CHECK(alpha[0] == 0.0);
    for (int k = 0; k < 16; ++k) CHECK(alpha[k] <= 0.0);
    int argmax = 0;
    for (int k = 1; k < 16; ++k) {
        if (alpha[16 + k] > alpha[16 + argmax]) argmax = k;
    }
    CHECK(argmax == 9);
    CHECK(alpha[16 + 0] == 0.0);
}

TEST_CASE("pseudo-prior llrs match exponentiated probability ratios") {
    RandomStream rng(47);
    const Constellation c = build_constellation(4);
    for (int trial = 0; trial < 50; ++trial) {
        LinearEstimate est;
        est.s_hat = {sample_complex_gaussian(rng, 1.0)};
        est.k_diag = {0.05 + 0.5 * rng.next_unit()};
        const std::vector<double> alpha = lmmse_prior_llrs(est, c);
        for (int k = 0; k < 16; ++k) {
            const double d_k = std::norm(c.points[k] - est.s_hat[0]);
            const double d_0 = std::norm(c.points[0] - est.s_hat[0]);
            const double e_k = -d_k / (2.0 * est.k_diag[0]);
            const double e_0 = -d_0 / (2.0 * est.k_diag[0]);
            if (std::abs(e_k) > 700.0 || std::abs(e_0) > 700.0) continue;
            const double ratio = std::exp(e_k) / std::exp(e_0);
            CHECK(std::exp(alpha[k]) == doctest::Approx(ratio).epsilon(1e-12));
        }
    }
}

TEST_CASE("linear detectors validate sigma2") {
    ComplexMatrix eye(1, 1);
    eye(0, 0) = Complex{1.0, 0.0};
    const CVector y{Complex{1.0, 0.0}};
    const Constellation c = build_constellation(2);
    CHECK_THROWS_AS(lmmse_estimate(y, eye, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(map_detect(y, eye, 0.0, c), std::invalid_argument);
}
