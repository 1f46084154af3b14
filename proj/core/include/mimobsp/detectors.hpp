#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mimobsp/constellation.hpp"
#include "mimobsp/linalg.hpp"
#include "mimobsp/opcount.hpp"

namespace mimobsp {

/// Soft output of a detector: M bit LLRs per transmit symbol, concatenated,
/// plus the hard decisions under the sign rule.
struct BitLlrOutput {
    int n_tx = 0;
    int bits_per_symbol = 0;
    std::vector<double> llrs;        ///< n_tx * M
    std::vector<uint8_t> hard_bits;  ///< n_tx * M

    std::span<const double> symbol_llrs(int j) const {
        return {llrs.data() + static_cast<size_t>(j) * bits_per_symbol,
                static_cast<size_t>(bits_per_symbol)};
    }
};

/// LMMSE point estimate and the per-stream diagonal of the error covariance
/// K = (H^H H + sigma^2 I)^-1.
struct LinearEstimate {
    CVector s_hat;
    std::vector<double> k_diag;
};

inline constexpr uint64_t kDefaultEnumerationCap = uint64_t{1} << 24;

/// Exhaustive max-log MAP over all |A|^Nt candidate vectors with metric
/// -||y - Hs||^2 / (2 sigma^2).  Throws ScaleError above `enumeration_cap`.
BitLlrOutput map_detect(std::span<const Complex> y, const ComplexMatrix& h, double sigma2,
                        const Constellation& c, OpCounters* counters = nullptr,
                        uint64_t enumeration_cap = kDefaultEnumerationCap);

/// s_hat = (H^H H + sigma^2 I)^-1 H^H y, with k_diag from the same solve
/// applied to the identity columns.
LinearEstimate lmmse_estimate(std::span<const Complex> y, const ComplexMatrix& h, double sigma2);

/// Per-stream nearest constellation point, labels concatenated.  This is
/// the hard-decision reading of an MMSE baseline; max-log demapping of the
/// per-stream Gaussian posterior (see lmmse_prior_llrs) would be the soft
/// alternative.
std::vector<uint8_t> lmmse_hard_detect(const LinearEstimate& est, const Constellation& c);

/// Log-domain pseudo-prior symbol LLRs against the reference point:
/// alpha_j(k) = (|mu_1 - s_hat_j|^2 - |mu_k - s_hat_j|^2) / (2 K_jj).
/// Returns one |A|-vector per symbol, concatenated; entry 0 is exactly 0.
std::vector<double> lmmse_prior_llrs(const LinearEstimate& est, const Constellation& c);

} // namespace mimobsp
