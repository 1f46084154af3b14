#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mimobsp/bp.hpp"
#include "mimobsp/constellation.hpp"
#include "mimobsp/detectors.hpp"
#include "mimobsp/opcount.hpp"

namespace mimobsp {

/// Head of a sorted alpha message: the d_m largest symbol LLRs, values
/// non-increasing, ties broken toward the lower symbol index.
struct TruncatedMessage {
    std::vector<uint16_t> indices;
    std::vector<double> llrs;

    int size() const noexcept { return static_cast<int>(indices.size()); }
    uint16_t index(int r) const { return indices[r]; }
    double llr(int r) const { return llrs[r]; }
};

enum class InitMode { Uniform, Lmmse };

struct BspConfig {
    int d_m = 1;
    int d_f = 1;
    int q_l = 10;
    InitMode init = InitMode::Lmmse;
};

/// One interferer assignment: a constellation index per interfering symbol
/// node, in ascending node order.
struct ConfigAssignment {
    std::vector<uint16_t> symbol_indices;
};

/// Keeps the min(d_m, |A|) largest entries of an alpha message.
TruncatedMessage truncate_alpha(std::span<const double> alpha, int d_m);

namespace detail {

/// Shared enumeration core over pointers so the beta kernel can splice out
/// the target edge without copying messages.  Emits every combination of
/// d_f - 1 chosen edges with every product of their top-d_m entries; the
/// remaining edges stay pinned to their top entry.  Duplicates across
/// subset choices are emitted as-is.  The visitor receives the assigned
/// constellation indices and, in parallel, each interferer's entry rank
/// inside its truncated message (0 for pinned edges).
template <typename Visit>
void enumerate_config_set_ptrs(std::span<const TruncatedMessage* const> interferers, int d_m,
                               int d_f, Visit&& visit) {
    constexpr int kMax = 64;
    const int n_int = static_cast<int>(interferers.size());
    const int n_chosen = std::min(d_f - 1, n_int);

    uint16_t assign[kMax];
    uint16_t rank[kMax];
    for (int t = 0; t < n_int; ++t) {
        assign[t] = interferers[t]->index(0);
        rank[t] = 0;
    }
    std::span<const uint16_t> idx_view{assign, static_cast<size_t>(n_int)};
    std::span<const uint16_t> rank_view{rank, static_cast<size_t>(n_int)};

    if (n_chosen <= 0) {
        visit(idx_view, rank_view);
        return;
    }

    int comb[kMax];
    for (int r = 0; r < n_chosen; ++r) comb[r] = r;
    int pick[kMax];

    while (true) {
        for (int r = 0; r < n_chosen; ++r) {
            pick[r] = 0;
            assign[comb[r]] = interferers[comb[r]]->index(0);
            rank[comb[r]] = 0;
        }
        while (true) {
            visit(idx_view, rank_view);
            int pos = n_chosen - 1;
            while (pos >= 0) {
                const int t = comb[pos];
                const int width = std::min(d_m, interferers[t]->size());
                if (pick[pos] + 1 < width) break;
                pick[pos] = 0;
                assign[t] = interferers[t]->index(0);
                rank[t] = 0;
                --pos;
            }
            if (pos < 0) break;
            ++pick[pos];
            assign[comb[pos]] = interferers[comb[pos]]->index(pick[pos]);
            rank[comb[pos]] = static_cast<uint16_t>(pick[pos]);
        }
        // next d_f-1 subset of the interferer set, lexicographic
        int r = n_chosen - 1;
        while (r >= 0 && comb[r] == n_int - n_chosen + r) --r;
        if (r < 0) break;
        ++comb[r];
        for (int t = r + 1; t < n_chosen; ++t) comb[t] = comb[t - 1] + 1;
    }
}

} // namespace detail

template <typename Visit>
void enumerate_config_set(std::span<const TruncatedMessage> interferers, int d_m, int d_f,
                          Visit&& visit) {
    std::vector<const TruncatedMessage*> ptrs(interferers.size());
    for (size_t t = 0; t < interferers.size(); ++t) ptrs[t] = &interferers[t];
    detail::enumerate_config_set_ptrs(std::span<const TruncatedMessage* const>{ptrs}, d_m, d_f,
                                      std::forward<Visit>(visit));
}

/// Materialized assignment stream, mostly for tests and inspection.
std::vector<ConfigAssignment> enumerate_config_set(std::span<const TruncatedMessage> interferers,
                                                   int d_m, int d_f);

/// Truncated beta update: maximizes the factor metric plus interferer alpha
/// sum over the configuration set crossed with every candidate for the
/// target symbol, referenced to candidate 0.  `trunc` holds one truncated
/// message per symbol node of factor i; entry j is ignored.
std::vector<double> beta_update_bsp(int i, int j, Complex y_i, const ProductTable& pt,
                                    std::span<const TruncatedMessage> trunc, double sigma2,
                                    const BspConfig& cfg, OpCounters* counters = nullptr);

/// Algorithm: initialize alpha (LMMSE pseudo-priors or zeros), then per
/// iteration truncate every incoming alpha once per factor node, update all
/// beta over the configuration set, and close with gamma and the
/// leave-one-out alpha update.  Emits max-log bit LLRs after q_l iterations.
BitLlrOutput run_bsp(std::span<const Complex> y, const ComplexMatrix& h, double sigma2,
                     const Constellation& c, const BspConfig& cfg, OpCounters* counters = nullptr);

} // namespace mimobsp
