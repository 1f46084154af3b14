#include "mimobsp/bsp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace mimobsp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxTx = 64;

struct BetaScratch {
    std::vector<double> best;
    std::vector<const TruncatedMessage*> interferers;
    std::vector<int> nodes;
};

void beta_update_bsp_into(int i, int j, Complex y_i, const ProductTable& pt,
                          std::span<const TruncatedMessage> trunc, double inv_two_sigma2,
                          int d_m, int d_f, BetaScratch& scratch, std::span<double> beta_out,
                          uint64_t* emitted) {
    const int n = pt.n_tx();
    const int q = pt.order();

    scratch.interferers.clear();
    scratch.nodes.clear();
    for (int t = 0; t < n; ++t) {
        if (t == j) continue;
        scratch.interferers.push_back(&trunc[t]);
        scratch.nodes.push_back(t);
    }

    std::vector<double>& best = scratch.best;
    best.assign(q, kNegInf);
    const double* tre = pt.re(i, j);
    const double* tim = pt.im(i, j);
    const double* tnorm = pt.norm2(i, j);
    const int* nodes = scratch.nodes.data();

    uint64_t count = 0;
    detail::enumerate_config_set_ptrs(
        std::span<const TruncatedMessage* const>{scratch.interferers}, d_m, d_f,
        [&](std::span<const uint16_t> assign, std::span<const uint16_t> rank) {
            ++count;
            double cre = y_i.real();
            double cim = y_i.imag();
            double asum = 0.0;
            for (size_t r = 0; r < assign.size(); ++r) {
                const int node = nodes[r];
                const int kt = assign[r];
                cre -= pt.re(i, node)[kt];
                cim -= pt.im(i, node)[kt];
                asum += trunc[node].llr(rank[r]);
            }
            const double znorm = cre * cre + cim * cim;
            double* bp = best.data();
            for (int k = 0; k < q; ++k) {
                const double dist2 = znorm - 2.0 * (cre * tre[k] + cim * tim[k]) + tnorm[k];
                const double m = asum - inv_two_sigma2 * dist2;
                if (m > bp[k]) bp[k] = m;
            }
        });
    if (emitted != nullptr) *emitted += count;

    const double ref = best[0];
    for (int k = 0; k < q; ++k) beta_out[k] = best[k] - ref;
    beta_out[0] = 0.0;
}

} // namespace

TruncatedMessage truncate_alpha(std::span<const double> alpha, int d_m) {
    const int q = static_cast<int>(alpha.size());
    if (d_m < 1) throw std::invalid_argument("truncate_alpha: d_m must be >= 1");
    const int d = std::min(d_m, q);

    TruncatedMessage t;
    t.indices.reserve(d);
    t.llrs.reserve(d);
    for (int k = 0; k < q; ++k) {
        const double v = alpha[k];
        if (!std::isfinite(v)) throw std::invalid_argument("truncate_alpha: non-finite LLR");
        int pos = static_cast<int>(t.llrs.size());
        while (pos > 0 && t.llrs[pos - 1] < v) --pos;
        if (pos >= d) continue;
        if (static_cast<int>(t.llrs.size()) == d) {
            t.llrs.pop_back();
            t.indices.pop_back();
        }
        t.llrs.insert(t.llrs.begin() + pos, v);
        t.indices.insert(t.indices.begin() + pos, static_cast<uint16_t>(k));
    }
    return t;
}

std::vector<ConfigAssignment> enumerate_config_set(std::span<const TruncatedMessage> interferers,
                                                   int d_m, int d_f) {
    std::vector<ConfigAssignment> out;
    enumerate_config_set(interferers, d_m, d_f,
                         [&](std::span<const uint16_t> assign, std::span<const uint16_t>) {
                             out.push_back(ConfigAssignment{{assign.begin(), assign.end()}});
                         });
    return out;
}

std::vector<double> beta_update_bsp(int i, int j, Complex y_i, const ProductTable& pt,
                                    std::span<const TruncatedMessage> trunc, double sigma2,
                                    const BspConfig& cfg, OpCounters* counters) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("beta_update_bsp: sigma2 must be > 0");
    const int q = pt.order();
    const int d_m = std::min(cfg.d_m, q);
    const int d_f = std::min(cfg.d_f, pt.n_tx());

    BetaScratch scratch;
    std::vector<double> beta(q);
    uint64_t emitted = 0;
    beta_update_bsp_into(i, j, y_i, pt, trunc, 1.0 / (2.0 * sigma2), d_m, d_f, scratch, beta,
                         &emitted);
    if (counters != nullptr) counters->add_candidate_products(emitted * q);
    return beta;
}

BitLlrOutput run_bsp(std::span<const Complex> y, const ComplexMatrix& h, double sigma2,
                     const Constellation& c, const BspConfig& cfg, OpCounters* counters) {
    const int n_tx = h.cols();
    const int n_rx = h.rows();
    const int q = c.order();
    if (n_tx > kMaxTx) throw std::invalid_argument("run_bsp: N_t too large");
    if (cfg.q_l < 0) throw std::invalid_argument("run_bsp: Q_L must be >= 0");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("run_bsp: sigma2 must be > 0");
    if (cfg.d_m < 1 || cfg.d_f < 1) throw std::invalid_argument("run_bsp: d_m and d_f must be >= 1");

    int d_m = cfg.d_m;
    int d_f = cfg.d_f;
    if (d_m > q) {
        std::fprintf(stderr, "run_bsp: warning: d_m=%d clamped to |A|=%d\n", d_m, q);
        d_m = q;
    }
    if (d_f > n_tx) {
        std::fprintf(stderr, "run_bsp: warning: d_f=%d clamped to N_t=%d\n", d_f, n_tx);
        d_f = n_tx;
    }

    MessageGrid grid = MessageGrid::zeros(n_tx, n_rx, q);
    if (cfg.init == InitMode::Lmmse) {
        const LinearEstimate est = lmmse_estimate(y, h, sigma2);
        const std::vector<double> priors = lmmse_prior_llrs(est, c);
        // One prior vector per symbol, replicated to every factor node.
        for (int j = 0; j < n_tx; ++j) {
            for (int i = 0; i < n_rx; ++i) {
                std::copy_n(priors.data() + static_cast<size_t>(j) * q, q,
                            grid.alpha(j, i).data());
            }
        }
    }

    const ProductTable pt(h, c);
    if (counters != nullptr) counters->add_product_table(pt.entry_count());
    const double inv_two_sigma2 = 1.0 / (2.0 * sigma2);

    std::vector<TruncatedMessage> trunc(n_tx);
    BetaScratch scratch;
    for (int iter = 0; iter < cfg.q_l; ++iter) {
        uint64_t emitted = 0;
        for (int i = 0; i < n_rx; ++i) {
            // Sorted once per incoming edge, reused by all beta updates of
            // this factor node.
            for (int j = 0; j < n_tx; ++j) trunc[j] = truncate_alpha(grid.alpha(j, i), d_m);
            for (int j = 0; j < n_tx; ++j) {
                beta_update_bsp_into(i, j, y[i], pt, trunc, inv_two_sigma2, d_m, d_f, scratch,
                                     grid.beta(i, j), iter == 0 ? &emitted : nullptr);
            }
        }
        if (counters != nullptr && iter == 0) {
            counters->add_candidate_products(emitted * q);
        }
        if (counters != nullptr) {
            counters->add_comparisons(static_cast<uint64_t>(d_m) * q * n_rx * n_tx);
        }
        update_alpha(grid);
    }
    return bit_llrs(symbol_llrs(grid), n_tx, c);
}

} // namespace mimobsp
