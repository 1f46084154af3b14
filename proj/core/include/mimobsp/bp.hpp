#pragma once

#include <span>
#include <vector>

#include "mimobsp/constellation.hpp"
#include "mimobsp/detectors.hpp"
#include "mimobsp/linalg.hpp"
#include "mimobsp/opcount.hpp"

namespace mimobsp {

/// alpha/beta LLR messages on the fully connected factor graph.  Every
/// message is an |A|-vector against the reference point, so component 0 is 0
/// at every iteration boundary.
struct MessageGrid {
    int n_tx = 0;
    int n_rx = 0;
    int order = 0;
    std::vector<double> alpha_store;  ///< [j][i][k]
    std::vector<double> beta_store;   ///< [i][j][k]

    static MessageGrid zeros(int n_tx, int n_rx, int order);

    std::span<double> alpha(int j, int i) {
        return {alpha_store.data() + (static_cast<size_t>(j) * n_rx + i) * order,
                static_cast<size_t>(order)};
    }
    std::span<const double> alpha(int j, int i) const {
        return {alpha_store.data() + (static_cast<size_t>(j) * n_rx + i) * order,
                static_cast<size_t>(order)};
    }
    std::span<double> beta(int i, int j) {
        return {beta_store.data() + (static_cast<size_t>(i) * n_tx + j) * order,
                static_cast<size_t>(order)};
    }
    std::span<const double> beta(int i, int j) const {
        return {beta_store.data() + (static_cast<size_t>(i) * n_tx + j) * order,
                static_cast<size_t>(order)};
    }
};

/// Cached h_ij * mu_k products, the only multiplications the beta kernels
/// consume.  Layout is contiguous in k for every (i, j) pair.
class ProductTable {
public:
    ProductTable(const ComplexMatrix& h, const Constellation& c);

    int n_rx() const noexcept { return n_rx_; }
    int n_tx() const noexcept { return n_tx_; }
    int order() const noexcept { return order_; }
    uint64_t entry_count() const noexcept { return static_cast<uint64_t>(n_rx_) * n_tx_ * order_; }

    const double* re(int i, int j) const { return re_.data() + base(i, j); }
    const double* im(int i, int j) const { return im_.data() + base(i, j); }
    const double* norm2(int i, int j) const { return norm2_.data() + base(i, j); }

    Complex product(int i, int j, int k) const {
        const size_t b = base(i, j) + k;
        return {re_[b], im_[b]};
    }

private:
    size_t base(int i, int j) const { return (static_cast<size_t>(i) * n_tx_ + j) * order_; }

    int n_rx_, n_tx_, order_;
    std::vector<double> re_, im_, norm2_;
};

/// Direct evaluation of the factor-to-symbol update: for each candidate k,
/// the best metric over every interferer assignment, referenced to k = 0.
/// This is the per-pair reference route; run_original_bp uses a shared
/// per-factor enumeration that must agree with it.
std::vector<double> beta_update_full(int i, int j, Complex y_i, const ProductTable& pt,
                                     const MessageGrid& grid, double sigma2);

/// gamma_j(k) = sum_i beta_ij(k)
std::vector<double> symbol_llrs(const MessageGrid& grid);

/// In-place flooding alpha update: alpha_ji = gamma_j - beta_ij, the exact
/// leave-one-out sum.
void update_alpha(MessageGrid& grid);

/// Max-log bit LLRs from per-symbol LLR vectors.
BitLlrOutput bit_llrs(std::span<const double> gamma, int n_tx, const Constellation& c);

/// Original-BP: all beta messages from the previous alpha, then all alpha,
/// for q_l iterations; output through the symbol and bit LLRs.  `init_alpha`
/// (n_tx * |A|, one vector per symbol replicated to every factor node)
/// selects a warm start; null means uniform priors.
BitLlrOutput run_original_bp(std::span<const Complex> y, const ComplexMatrix& h, double sigma2,
                             const Constellation& c, int q_l,
                             std::span<const double> init_alpha = {},
                             OpCounters* counters = nullptr);

/// Edge-pruned variant: when updating beta_ij, the d_f - 1 interfering edges
/// with the largest |h_it| are searched over the full constellation and all
/// remaining interferers are pinned to the argmax of their incoming alpha.
BitLlrOutput run_ebrdf_bp(std::span<const Complex> y, const ComplexMatrix& h, double sigma2,
                          const Constellation& c, int q_l, int d_f,
                          OpCounters* counters = nullptr);

} // namespace mimobsp
