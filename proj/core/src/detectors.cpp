#include "mimobsp/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mimobsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BitLlrOutput bit_llrs_from_min_metrics(const std::vector<double>& min_q, int n_tx,
                                       const Constellation& c, double inv_two_sigma2) {
    const int q = c.order();
    const int m = c.bits_per_symbol;
    BitLlrOutput out;
    out.n_tx = n_tx;
    out.bits_per_symbol = m;
    out.llrs.resize(static_cast<size_t>(n_tx) * m);
    for (int j = 0; j < n_tx; ++j) {
        const double* row = min_q.data() + static_cast<size_t>(j) * q;
        for (int b = 0; b < m; ++b) {
            double best0 = kInf;
            double best1 = kInf;
            for (int k = 0; k < q; ++k) {
                if (c.label_bit(k, b)) {
                    best1 = std::min(best1, row[k]);
                } else {
                    best0 = std::min(best0, row[k]);
                }
            }
            out.llrs[static_cast<size_t>(j) * m + b] = (best0 - best1) * inv_two_sigma2;
        }
    }
    out.hard_bits = hard_bits_from_llrs(out.llrs, m);
    return out;
}

/// Enumerates all |A|^Nt candidates of ||U (s - s_zf)||^2 with U = L^H upper
/// triangular, recording per-(symbol, point) minima.  Digits are fixed from
/// the last symbol down so each recursion level closes one row of U.
class TriangularEnumerator {
public:
    TriangularEnumerator(const ComplexMatrix& l, std::span<const Complex> s_zf,
                         const Constellation& c, std::vector<double>& min_q)
        : n_(l.rows()), q_(c.order()), s_zf_(s_zf), c_(c), min_q_(min_q) {
        u_ = ComplexMatrix(n_, n_);
        for (int r = 0; r < n_; ++r) {
            for (int t = r; t < n_; ++t) u_(r, t) = std::conj(l(t, r));
        }
        row_partials_.assign(static_cast<size_t>(n_) * n_, Complex{0.0, 0.0});
        const double u00 = u_(0, 0).real();
        leaf_re_.resize(q_);
        leaf_im_.resize(q_);
        for (int k = 0; k < q_; ++k) {
            const Complex t = u00 * (c_.points[k] - s_zf_[0]);
            leaf_re_[k] = t.real();
            leaf_im_[k] = t.imag();
        }
        leaf_min_.resize(q_);
    }

    void run() { descend(n_ - 1, 0.0); }

private:
    // row_partials_ row d holds sum_{t>d} U_{r,t} (s_t - s_zf_t) for r <= d.
    Complex& partial(int depth, int r) { return row_partials_[static_cast<size_t>(depth) * n_ + r]; }

    double descend(int d, double acc) {
        double* bucket = min_q_.data() + static_cast<size_t>(d) * q_;
        if (d == 0) {
            const Complex base = partial(0, 0);
            const double bre = base.real();
            const double bim = base.imag();
            double* lm = leaf_min_.data();
            const double* tre = leaf_re_.data();
            const double* tim = leaf_im_.data();
            for (int k = 0; k < q_; ++k) {
                const double re = bre + tre[k];
                const double im = bim + tim[k];
                lm[k] = acc + re * re + im * im;
            }
            double sub_min = kInf;
            for (int k = 0; k < q_; ++k) {
                bucket[k] = std::min(bucket[k], lm[k]);
                sub_min = std::min(sub_min, lm[k]);
            }
            return sub_min;
        }
        double sub_min = kInf;
        for (int k = 0; k < q_; ++k) {
            const Complex delta = c_.points[k] - s_zf_[d];
            const Complex res = partial(d, d) + u_(d, d).real() * delta;
            const double metric = acc + std::norm(res);
            for (int r = 0; r < d; ++r) partial(d - 1, r) = partial(d, r) + u_(r, d) * delta;
            const double child = descend(d - 1, metric);
            bucket[k] = std::min(bucket[k], child);
            sub_min = std::min(sub_min, child);
        }
        return sub_min;
    }

    int n_;
    int q_;
    std::span<const Complex> s_zf_;
    const Constellation& c_;
    std::vector<double>& min_q_;
    ComplexMatrix u_;
    std::vector<Complex> row_partials_;
    std::vector<double> leaf_re_, leaf_im_, leaf_min_;
};

/// Fallback for rank-deficient H: carries the full residual vector down the
/// tree.  Costs an extra factor N_r per leaf, used only off the hot path.
class ResidualEnumerator {
public:
    ResidualEnumerator(std::span<const Complex> y, const ComplexMatrix& h,
                       const Constellation& c, std::vector<double>& min_q)
        : n_rx_(h.rows()), n_tx_(h.cols()), q_(c.order()), h_(h), c_(c), min_q_(min_q) {
        residuals_.assign(static_cast<size_t>(n_tx_ + 1) * n_rx_, Complex{0.0, 0.0});
        std::copy(y.begin(), y.end(), residuals_.begin());
    }

    void run() { descend(0); }

private:
    Complex* residual(int depth) { return residuals_.data() + static_cast<size_t>(depth) * n_rx_; }

    double descend(int j) {
        double* bucket = min_q_.data() + static_cast<size_t>(j) * q_;
        double sub_min = kInf;
        for (int k = 0; k < q_; ++k) {
            const Complex* prev = residual(j);
            double value;
            if (j == n_tx_ - 1) {
                double acc = 0.0;
                for (int i = 0; i < n_rx_; ++i) acc += std::norm(prev[i] - h_(i, j) * c_.points[k]);
                value = acc;
            } else {
                Complex* next = residual(j + 1);
                for (int i = 0; i < n_rx_; ++i) next[i] = prev[i] - h_(i, j) * c_.points[k];
                value = descend(j + 1);
            }
            bucket[k] = std::min(bucket[k], value);
            sub_min = std::min(sub_min, value);
        }
        return sub_min;
    }

    int n_rx_, n_tx_, q_;
    const ComplexMatrix& h_;
    const Constellation& c_;
    std::vector<double>& min_q_;
    std::vector<Complex> residuals_;
};

} // namespace

BitLlrOutput map_detect(std::span<const Complex> y, const ComplexMatrix& h, double sigma2,
                        const Constellation& c, OpCounters* counters, uint64_t enumeration_cap) {
    const int n_tx = h.cols();
    const int n_rx = h.rows();
    const int q = c.order();
    if (static_cast<int>(y.size()) != n_rx) throw std::invalid_argument("map_detect: y dimension mismatch");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("map_detect: sigma2 must be > 0");

    unsigned __int128 space = 1;
    for (int t = 0; t < n_tx; ++t) {
        space *= static_cast<unsigned>(q);
        if (space > enumeration_cap) {
            throw ScaleError("map_detect: |A|^Nt exceeds the enumeration cap");
        }
    }
    if (counters != nullptr) {
        counters->add_product_table(static_cast<uint64_t>(q) * n_rx * n_tx);
        counters->add_candidate_products(static_cast<uint64_t>(space) * n_tx * n_rx);
        counters->add_additions(static_cast<uint64_t>(space) * n_rx * 2);
        counters->add_comparisons(static_cast<uint64_t>(space) * n_tx);
    }

    std::vector<double> min_q(static_cast<size_t>(n_tx) * q, kInf);
    bool triangular_done = false;
    if (n_rx >= n_tx) {
        try {
            const ComplexMatrix g = gram_regularized(h, 0.0);
            const ComplexMatrix l = cholesky_factor(g);
            const CVector s_zf = cholesky_solve(l, conj_transpose_times(h, y));
            TriangularEnumerator(l, s_zf, c, min_q).run();
            triangular_done = true;
        } catch (const NumericalError&) {
            // fall through to the direct enumeration
        }
    }
    if (!triangular_done) {
        ResidualEnumerator(y, h, c, min_q).run();
    }
    return bit_llrs_from_min_metrics(min_q, n_tx, c, 1.0 / (2.0 * sigma2));
}

LinearEstimate lmmse_estimate(std::span<const Complex> y, const ComplexMatrix& h, double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("lmmse_estimate: sigma2 must be > 0");
    const int n_tx = h.cols();
    const ComplexMatrix a = gram_regularized(h, sigma2);
    const ComplexMatrix l = cholesky_factor(a);

    LinearEstimate est;
    est.s_hat = cholesky_solve(l, conj_transpose_times(h, y));
    est.k_diag.resize(n_tx);
    CVector e(n_tx, Complex{0.0, 0.0});
    for (int j = 0; j < n_tx; ++j) {
        e[j] = Complex{1.0, 0.0};
        const CVector col = cholesky_solve(l, e);
        e[j] = Complex{0.0, 0.0};
        const double kjj = col[j].real();
        if (!(kjj > 0.0)) throw NumericalError("lmmse_estimate: K diagonal not positive", j);
        est.k_diag[j] = kjj;
    }
    return est;
}

std::vector<uint8_t> lmmse_hard_detect(const LinearEstimate& est, const Constellation& c) {
    const int m = c.bits_per_symbol;
    std::vector<uint8_t> bits(est.s_hat.size() * m);
    for (size_t j = 0; j < est.s_hat.size(); ++j) {
        const int k = nearest_point_index(c, est.s_hat[j]);
        for (int b = 0; b < m; ++b) bits[j * m + b] = static_cast<uint8_t>(c.label_bit(k, b));
    }
    return bits;
}

std::vector<double> lmmse_prior_llrs(const LinearEstimate& est, const Constellation& c) {
    const int q = c.order();
    std::vector<double> alpha(est.s_hat.size() * q);
    for (size_t j = 0; j < est.s_hat.size(); ++j) {
        const double kjj = est.k_diag[j];
        if (!(kjj > 0.0)) {
            throw NumericalError("lmmse_prior_llrs: K diagonal not positive", static_cast<int>(j));
        }
        const double inv = 1.0 / (2.0 * kjj);
        const double d_ref = std::norm(c.points[Constellation::kReferenceIndex] - est.s_hat[j]);
        double* row = alpha.data() + j * q;
        for (int k = 0; k < q; ++k) {
            row[k] = (d_ref - std::norm(c.points[k] - est.s_hat[j])) * inv;
        }
    }
    return alpha;
}

} // namespace mimobsp
