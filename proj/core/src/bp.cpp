#include "mimobsp/bp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mimobsp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxTx = 64;

struct OdometerSums {
    // Prefix partials over digits < d: residual y_i - sum h mu and the
    // alpha sum of the assigned interferer symbols.
    double res_re[kMaxTx + 1];
    double res_im[kMaxTx + 1];
    double asum[kMaxTx + 1];
};

/// One factor node's exhaustive pass: fills bucket[j][k] with
/// max over {s : s_j = mu_k} of -|y_i - h_i s|^2/(2 sigma^2) + sum_t alpha_ti(k_t),
/// the sum running over all N_t symbols.  Leave-one-out corrections happen
/// in the caller, so the |A|^Nt space is walked once per factor node
/// instead of once per edge.
void factor_enumeration(int i, Complex y_i, const ProductTable& pt, const MessageGrid& grid,
                        double inv_two_sigma2, std::vector<double>& bucket) {
    const int n = pt.n_tx();
    const int q = pt.order();
    std::fill(bucket.begin(), bucket.end(), kNegInf);

    const int last = n - 1;
    const double* lre = pt.re(i, last);
    const double* lim = pt.im(i, last);
    const double* lnorm = pt.norm2(i, last);
    const double* lalpha = grid.alpha(last, i).data();
    double* lbucket = bucket.data() + static_cast<size_t>(last) * q;

    double mbuf[256];
    int digits[kMaxTx] = {0};
    OdometerSums s;
    s.res_re[0] = y_i.real();
    s.res_im[0] = y_i.imag();
    s.asum[0] = 0.0;

    auto extend = [&](int d) {
        // digit d fixed at digits[d]; fill partials for depth d + 1
        const int k = digits[d];
        s.res_re[d + 1] = s.res_re[d] - pt.re(i, d)[k];
        s.res_im[d + 1] = s.res_im[d] - pt.im(i, d)[k];
        s.asum[d + 1] = s.asum[d] + grid.alpha(d, i)[k];
    };
    for (int d = 0; d < n - 1; ++d) extend(d);

    while (true) {
        const double zre = s.res_re[last];
        const double zim = s.res_im[last];
        const double znorm = zre * zre + zim * zim;
        const double abase = s.asum[last];
        for (int k = 0; k < q; ++k) {
            const double dist2 = znorm - 2.0 * (zre * lre[k] + zim * lim[k]) + lnorm[k];
            mbuf[k] = abase - inv_two_sigma2 * dist2 + lalpha[k];
        }
        for (int k = 0; k < q; ++k) {
            lbucket[k] = std::max(lbucket[k], mbuf[k]);
        }
        // q is a power of four; four independent max lanes keep the
        // reduction order fixed and the loop branch-free.
        double m0 = kNegInf, m1 = kNegInf, m2 = kNegInf, m3 = kNegInf;
        for (int k = 0; k < q; k += 4) {
            m0 = std::max(m0, mbuf[k]);
            m1 = std::max(m1, mbuf[k + 1]);
            m2 = std::max(m2, mbuf[k + 2]);
            m3 = std::max(m3, mbuf[k + 3]);
        }
        const double inner_best = std::max(std::max(m0, m1), std::max(m2, m3));
        for (int d = 0; d < n - 1; ++d) {
            double& b = bucket[static_cast<size_t>(d) * q + digits[d]];
            if (inner_best > b) b = inner_best;
        }

        int pos = n - 2;
        while (pos >= 0 && digits[pos] == q - 1) {
            digits[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++digits[pos];
        for (int d = pos; d < n - 1; ++d) extend(d);
    }
}

void betas_from_buckets(int i, const std::vector<double>& bucket, MessageGrid& grid) {
    const int n = grid.n_tx;
    const int q = grid.order;
    for (int j = 0; j < n; ++j) {
        const double* bj = bucket.data() + static_cast<size_t>(j) * q;
        std::span<const double> aj = grid.alpha(j, i);
        std::span<double> bij = grid.beta(i, j);
        const double ref = bj[0] - aj[0];
        for (int k = 0; k < q; ++k) bij[k] = (bj[k] - aj[k]) - ref;
        bij[0] = 0.0;
    }
}

int argmax_alpha(std::span<const double> a) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(a.size()); ++k) {
        if (a[k] > a[best]) best = k;
    }
    return best;
}

} // namespace

MessageGrid MessageGrid::zeros(int n_tx, int n_rx, int order) {
    MessageGrid g;
    g.n_tx = n_tx;
    g.n_rx = n_rx;
    g.order = order;
    g.alpha_store.assign(static_cast<size_t>(n_tx) * n_rx * order, 0.0);
    g.beta_store.assign(static_cast<size_t>(n_rx) * n_tx * order, 0.0);
    return g;
}

ProductTable::ProductTable(const ComplexMatrix& h, const Constellation& c)
    : n_rx_(h.rows()), n_tx_(h.cols()), order_(c.order()) {
    const size_t total = static_cast<size_t>(n_rx_) * n_tx_ * order_;
    re_.resize(total);
    im_.resize(total);
    norm2_.resize(total);
    for (int i = 0; i < n_rx_; ++i) {
        for (int j = 0; j < n_tx_; ++j) {
            const Complex hij = h(i, j);
            const size_t b = base(i, j);
            for (int k = 0; k < order_; ++k) {
                const Complex p = hij * c.points[k];
                re_[b + k] = p.real();
                im_[b + k] = p.imag();
                norm2_[b + k] = std::norm(p);
            }
        }
    }
}

std::vector<double> beta_update_full(int i, int j, Complex y_i, const ProductTable& pt,
                                     const MessageGrid& grid, double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("beta_update_full: sigma2 must be > 0");
    const int n = pt.n_tx();
    const int q = pt.order();
    const double inv_two_sigma2 = 1.0 / (2.0 * sigma2);

    int interferers[kMaxTx];
    int n_int = 0;
    for (int t = 0; t < n; ++t) {
        if (t != j) interferers[n_int++] = t;
    }

    std::vector<double> best(q, kNegInf);
    const double* tre = pt.re(i, j);
    const double* tim = pt.im(i, j);

    int digits[kMaxTx] = {0};
    while (true) {
        double cre = y_i.real();
        double cim = y_i.imag();
        double asum = 0.0;
        for (int r = 0; r < n_int; ++r) {
            const int t = interferers[r];
            const int kt = digits[r];
            cre -= pt.re(i, t)[kt];
            cim -= pt.im(i, t)[kt];
            asum += grid.alpha(t, i)[kt];
        }
        for (int k = 0; k < q; ++k) {
            const double zre = cre - tre[k];
            const double zim = cim - tim[k];
            const double m = asum - inv_two_sigma2 * (zre * zre + zim * zim);
            if (m > best[k]) best[k] = m;
        }
        int pos = n_int - 1;
        while (pos >= 0 && digits[pos] == q - 1) {
            digits[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++digits[pos];
    }

    std::vector<double> beta(q);
    const double ref = best[0];
    for (int k = 0; k < q; ++k) beta[k] = best[k] - ref;
    beta[0] = 0.0;
    return beta;
}

std::vector<double> symbol_llrs(const MessageGrid& grid) {
    std::vector<double> gamma(static_cast<size_t>(grid.n_tx) * grid.order, 0.0);
    for (int j = 0; j < grid.n_tx; ++j) {
        double* gj = gamma.data() + static_cast<size_t>(j) * grid.order;
        for (int i = 0; i < grid.n_rx; ++i) {
            std::span<const double> bij = grid.beta(i, j);
            for (int k = 0; k < grid.order; ++k) gj[k] += bij[k];
        }
    }
    return gamma;
}

void update_alpha(MessageGrid& grid) {
    const std::vector<double> gamma = symbol_llrs(grid);
    for (int j = 0; j < grid.n_tx; ++j) {
        const double* gj = gamma.data() + static_cast<size_t>(j) * grid.order;
        for (int i = 0; i < grid.n_rx; ++i) {
            std::span<const double> bij = grid.beta(i, j);
            std::span<double> aji = grid.alpha(j, i);
            for (int k = 0; k < grid.order; ++k) aji[k] = gj[k] - bij[k];
        }
    }
}

BitLlrOutput bit_llrs(std::span<const double> gamma, int n_tx, const Constellation& c) {
    const int q = c.order();
    const int m = c.bits_per_symbol;
    BitLlrOutput out;
    out.n_tx = n_tx;
    out.bits_per_symbol = m;
    out.llrs.resize(static_cast<size_t>(n_tx) * m);
    for (int j = 0; j < n_tx; ++j) {
        const double* gj = gamma.data() + static_cast<size_t>(j) * q;
        for (int b = 0; b < m; ++b) {
            double best0 = kNegInf;
            double best1 = kNegInf;
            for (int k = 0; k < q; ++k) {
                if (c.label_bit(k, b)) {
                    best1 = std::max(best1, gj[k]);
                } else {
                    best0 = std::max(best0, gj[k]);
                }
            }
            out.llrs[static_cast<size_t>(j) * m + b] = best1 - best0;
        }
    }
    out.hard_bits = hard_bits_from_llrs(out.llrs, m);
    return out;
}

BitLlrOutput run_original_bp(std::span<const Complex> y, const ComplexMatrix& h, double sigma2,
                             const Constellation& c, int q_l, std::span<const double> init_alpha,
                             OpCounters* counters) {
    const int n_tx = h.cols();
    const int n_rx = h.rows();
    const int q = c.order();
    if (n_tx > kMaxTx) throw std::invalid_argument("run_original_bp: N_t too large");
    if (q_l < 0) throw std::invalid_argument("run_original_bp: Q_L must be >= 0");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("run_original_bp: sigma2 must be > 0");

    MessageGrid grid = MessageGrid::zeros(n_tx, n_rx, q);
    if (!init_alpha.empty()) {
        if (init_alpha.size() != static_cast<size_t>(n_tx) * q) {
            throw std::invalid_argument("run_original_bp: init_alpha must hold N_t * |A| values");
        }
        for (int j = 0; j < n_tx; ++j) {
            for (int i = 0; i < n_rx; ++i) {
                std::span<double> aji = grid.alpha(j, i);
                std::copy_n(init_alpha.data() + static_cast<size_t>(j) * q, q, aji.data());
            }
        }
    }

    const ProductTable pt(h, c);
    if (counters != nullptr) counters->add_product_table(pt.entry_count());

    const double inv_two_sigma2 = 1.0 / (2.0 * sigma2);
    uint64_t space = 1;
    for (int t = 0; t < n_tx; ++t) space *= static_cast<uint64_t>(q);

    std::vector<double> bucket(static_cast<size_t>(n_tx) * q);
    for (int iter = 0; iter < q_l; ++iter) {
        for (int i = 0; i < n_rx; ++i) {
            factor_enumeration(i, y[i], pt, grid, inv_two_sigma2, bucket);
            betas_from_buckets(i, bucket, grid);
            if (counters != nullptr && iter == 0) {
                counters->add_candidate_products(space * n_tx);
                counters->add_additions(space * (n_tx + 1));
                counters->add_comparisons(space * n_tx);
            }
        }
        update_alpha(grid);
        if (counters != nullptr) {
            counters->add_additions(static_cast<uint64_t>(n_rx) * n_tx * q * 2);
        }
    }
    return bit_llrs(symbol_llrs(grid), n_tx, c);
}

BitLlrOutput run_ebrdf_bp(std::span<const Complex> y, const ComplexMatrix& h, double sigma2,
                          const Constellation& c, int q_l, int d_f, OpCounters* counters) {
    const int n_tx = h.cols();
    const int n_rx = h.rows();
    const int q = c.order();
    if (n_tx > kMaxTx) throw std::invalid_argument("run_ebrdf_bp: N_t too large");
    if (q_l < 0) throw std::invalid_argument("run_ebrdf_bp: Q_L must be >= 0");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("run_ebrdf_bp: sigma2 must be > 0");
    if (d_f < 1) throw std::invalid_argument("run_ebrdf_bp: d_f must be >= 1");
    d_f = std::min(d_f, n_tx);

    MessageGrid grid = MessageGrid::zeros(n_tx, n_rx, q);
    const ProductTable pt(h, c);
    if (counters != nullptr) counters->add_product_table(pt.entry_count());
    const double inv_two_sigma2 = 1.0 / (2.0 * sigma2);

    // Per factor node, interfering edges ranked by channel magnitude.
    std::vector<std::vector<int>> edge_rank(n_rx);
    for (int i = 0; i < n_rx; ++i) {
        std::vector<int>& rank = edge_rank[i];
        rank.resize(n_tx);
        std::iota(rank.begin(), rank.end(), 0);
        std::stable_sort(rank.begin(), rank.end(), [&](int a, int b) {
            return std::norm(h(i, a)) > std::norm(h(i, b));
        });
    }

    uint64_t searched = 1;
    for (int t = 0; t < d_f - 1; ++t) searched *= static_cast<uint64_t>(q);

    std::vector<double> best(q);
    int chosen[kMaxTx];
    int digits[kMaxTx];

    for (int iter = 0; iter < q_l; ++iter) {
        for (int i = 0; i < n_rx; ++i) {
            for (int j = 0; j < n_tx; ++j) {
                int n_chosen = 0;
                for (int r = 0; r < n_tx && n_chosen < d_f - 1; ++r) {
                    if (edge_rank[i][r] != j) chosen[n_chosen++] = edge_rank[i][r];
                }
                // Pinned interferers contribute a fixed offset.
                double base_re = y[i].real();
                double base_im = y[i].imag();
                double base_a = 0.0;
                for (int t = 0; t < n_tx; ++t) {
                    if (t == j) continue;
                    bool is_chosen = false;
                    for (int r = 0; r < n_chosen; ++r) is_chosen |= (chosen[r] == t);
                    if (is_chosen) continue;
                    const int kt = argmax_alpha(grid.alpha(t, i));
                    base_re -= pt.re(i, t)[kt];
                    base_im -= pt.im(i, t)[kt];
                    base_a += grid.alpha(t, i)[kt];
                }

                std::fill(best.begin(), best.end(), kNegInf);
                const double* tre = pt.re(i, j);
                const double* tim = pt.im(i, j);
                std::fill_n(digits, n_chosen, 0);
                while (true) {
                    double cre = base_re;
                    double cim = base_im;
                    double asum = base_a;
                    for (int r = 0; r < n_chosen; ++r) {
                        const int t = chosen[r];
                        const int kt = digits[r];
                        cre -= pt.re(i, t)[kt];
                        cim -= pt.im(i, t)[kt];
                        asum += grid.alpha(t, i)[kt];
                    }
                    for (int k = 0; k < q; ++k) {
                        const double zre = cre - tre[k];
                        const double zim = cim - tim[k];
                        const double m = asum - inv_two_sigma2 * (zre * zre + zim * zim);
                        if (m > best[k]) best[k] = m;
                    }
                    int pos = n_chosen - 1;
                    while (pos >= 0 && digits[pos] == q - 1) {
                        digits[pos] = 0;
                        --pos;
                    }
                    if (pos < 0) break;
                    ++digits[pos];
                }
                if (counters != nullptr && iter == 0) {
                    counters->add_candidate_products(searched * q);
                }
                std::span<double> bij = grid.beta(i, j);
                const double ref = best[0];
                for (int k = 0; k < q; ++k) bij[k] = best[k] - ref;
                bij[0] = 0.0;
            }
        }
        update_alpha(grid);
    }
    return bit_llrs(symbol_llrs(grid), n_tx, c);
}

} // namespace mimobsp
