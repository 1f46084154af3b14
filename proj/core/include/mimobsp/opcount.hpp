#pragma once

#include <cstdint>

namespace mimobsp {

enum class Algorithm { OriginalBp, Bsp, Map };

/// Multiplication tallies per channel use under the product-reuse
/// convention: the constellation products h_ij * mu_k are the only counted
/// multiplications (4 real each), candidate metrics consume them without
/// re-multiplying across iterations, and metric-assembly arithmetic
/// (squares, the 1/(2 sigma^2) scale, computed once per use) is not counted.
///
/// Construction of the product table is the first consumption of its
/// entries, so `real_multiplications()` reports the candidate-combination
/// tally once any beta or metric enumeration has run, and the bare table
/// cost otherwise (a zero-iteration run).
class OpCounters {
public:
    void add_product_table(uint64_t complex_products) { table_mults_ += 4 * complex_products; }
    void add_candidate_products(uint64_t complex_products) { combo_mults_ += 4 * complex_products; }
    void add_additions(uint64_t n) { additions_ += n; }
    void add_comparisons(uint64_t n) { comparisons_ += n; }

    uint64_t real_multiplications() const {
        return combo_mults_ > 0 ? combo_mults_ : table_mults_;
    }
    uint64_t additions() const { return additions_; }
    uint64_t comparisons() const { return comparisons_; }

    void reset() { *this = OpCounters{}; }

private:
    uint64_t table_mults_ = 0;
    uint64_t combo_mults_ = 0;
    uint64_t additions_ = 0;
    uint64_t comparisons_ = 0;
};

/// Copy of the tallies accumulated by a run.  Throws std::logic_error when
/// the run was not instrumented.
OpCounters counters_snapshot(const OpCounters* run_counters);

/// Closed-form multiplication count per channel use:
///   Original-BP / MAP:  4 |A|^Nt Nt Nr
///   BsP:                4 |A| C(Nt-1, df-1) dm^(df-1) Nt Nr
/// d_m clamps to |A| and d_f to N_t, matching the runtime behavior.  The BsP
/// form excludes LMMSE initialization.  Throws std::overflow_error when the
/// count does not fit 64 bits.
uint64_t predicted_multiplications(Algorithm algorithm, int n_rx, int n_tx, int bits_per_symbol,
                                   int d_m = 1, int d_f = 1);

uint64_t binomial(int n, int k);

} // namespace mimobsp
