#pragma once

#include <complex>
#include <span>
#include <vector>

#include "mimobsp/errors.hpp"

namespace mimobsp {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

/// Dense complex matrix, row major.  Small sizes only (antenna counts),
/// so everything is kept simple and value-typed.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {}

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }

    Complex& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    const Complex& operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    std::span<const Complex> row(int r) const {
        return {data_.data() + static_cast<size_t>(r) * cols_, static_cast<size_t>(cols_)};
    }

    std::vector<Complex>& data() noexcept { return data_; }
    const std::vector<Complex>& data() const noexcept { return data_; }

    bool all_finite() const noexcept;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Complex> data_;
};

/// y = A x
CVector matvec(const ComplexMatrix& a, std::span<const Complex> x);

/// C = A B
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

/// x = A^H y
CVector conj_transpose_times(const ComplexMatrix& a, std::span<const Complex> y);

double fro_norm(const ComplexMatrix& a);
double vec_norm(std::span<const Complex> v);

/// A = H^H H + sigma2 I.  The upper triangle is computed and mirrored so the
/// result is Hermitian exactly, entry by entry.
ComplexMatrix gram_regularized(const ComplexMatrix& h, double sigma2);

/// Cholesky factor L (lower triangular) of a Hermitian positive definite A.
/// Pivots at or below 1e-12 * max |diagonal| raise NumericalError with the
/// failing pivot index.
ComplexMatrix cholesky_factor(const ComplexMatrix& a);

/// Solves A X = B for Hermitian positive definite A via Cholesky.
ComplexMatrix hermitian_solve(const ComplexMatrix& a, const ComplexMatrix& b);
CVector hermitian_solve(const ComplexMatrix& a, std::span<const Complex> b);

/// Forward/backward substitution against an already computed factor.
CVector cholesky_solve(const ComplexMatrix& l, std::span<const Complex> b);

} // namespace mimobsp
