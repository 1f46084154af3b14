#include "mimobsp/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace mimobsp {

bool ComplexMatrix::all_finite() const noexcept {
    for (const Complex& z : data_) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

CVector matvec(const ComplexMatrix& a, std::span<const Complex> x) {
    if (static_cast<int>(x.size()) != a.cols()) {
        throw std::invalid_argument("matvec: dimension mismatch");
    }
    CVector y(a.rows(), Complex{0.0, 0.0});
    for (int r = 0; r < a.rows(); ++r) {
        Complex acc{0.0, 0.0};
        for (int c = 0; c < a.cols(); ++c) acc += a(r, c) * x[c];
        y[r] = acc;
    }
    return y;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: dimension mismatch");
    ComplexMatrix c(a.rows(), b.cols());
    for (int r = 0; r < a.rows(); ++r) {
        for (int k = 0; k < a.cols(); ++k) {
            const Complex av = a(r, k);
            for (int j = 0; j < b.cols(); ++j) c(r, j) += av * b(k, j);
        }
    }
    return c;
}

CVector conj_transpose_times(const ComplexMatrix& a, std::span<const Complex> y) {
    if (static_cast<int>(y.size()) != a.rows()) {
        throw std::invalid_argument("conj_transpose_times: dimension mismatch");
    }
    CVector x(a.cols(), Complex{0.0, 0.0});
    for (int r = 0; r < a.rows(); ++r) {
        const Complex yr = y[r];
        for (int c = 0; c < a.cols(); ++c) x[c] += std::conj(a(r, c)) * yr;
    }
    return x;
}

double fro_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (const Complex& z : a.data()) s += std::norm(z);
    return std::sqrt(s);
}

double vec_norm(std::span<const Complex> v) {
    double s = 0.0;
    for (const Complex& z : v) s += std::norm(z);
    return std::sqrt(s);
}

ComplexMatrix gram_regularized(const ComplexMatrix& h, double sigma2) {
    if (h.rows() == 0 || h.cols() == 0) throw std::invalid_argument("gram_regularized: empty H");
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
        throw std::invalid_argument("gram_regularized: sigma2 must be finite and >= 0");
    }
    const int n = h.cols();
    ComplexMatrix a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            Complex acc{0.0, 0.0};
            for (int r = 0; r < h.rows(); ++r) acc += std::conj(h(r, i)) * h(r, j);
            if (i == j) {
                a(i, i) = Complex{acc.real() + sigma2, 0.0};
            } else {
                a(i, j) = acc;
                a(j, i) = std::conj(acc);  // mirror: Hermitian by construction
            }
        }
    }
    return a;
}

ComplexMatrix cholesky_factor(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("cholesky_factor: A not square");
    const int n = a.rows();

    double max_diag = 0.0;
    for (int i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i).real()));
    const double pivot_tol = 1e-12 * max_diag;

    ComplexMatrix l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (int k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (!(d > pivot_tol)) {
            throw NumericalError("cholesky_factor: non-positive pivot at index " + std::to_string(j), j);
        }
        const double ljj = std::sqrt(d);
        l(j, j) = Complex{ljj, 0.0};
        for (int i = j + 1; i < n; ++i) {
            Complex acc = a(i, j);
            for (int k = 0; k < j; ++k) acc -= l(i, k) * std::conj(l(j, k));
            l(i, j) = acc / ljj;
        }
    }
    return l;
}

CVector cholesky_solve(const ComplexMatrix& l, std::span<const Complex> b) {
    const int n = l.rows();
    if (static_cast<int>(b.size()) != n) throw std::invalid_argument("cholesky_solve: dimension mismatch");
    CVector x(b.begin(), b.end());
    // L z = b
    for (int i = 0; i < n; ++i) {
        Complex acc = x[i];
        for (int k = 0; k < i; ++k) acc -= l(i, k) * x[k];
        x[i] = acc / l(i, i).real();
    }
    // L^H x = z
    for (int i = n - 1; i >= 0; --i) {
        Complex acc = x[i];
        for (int k = i + 1; k < n; ++k) acc -= std::conj(l(k, i)) * x[k];
        x[i] = acc / l(i, i).real();
    }
    return x;
}

ComplexMatrix hermitian_solve(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("hermitian_solve: B row count mismatch");
    const ComplexMatrix l = cholesky_factor(a);
    ComplexMatrix x(b.rows(), b.cols());
    CVector col(b.rows());
    for (int j = 0; j < b.cols(); ++j) {
        for (int i = 0; i < b.rows(); ++i) col[i] = b(i, j);
        CVector sol = cholesky_solve(l, col);
        for (int i = 0; i < b.rows(); ++i) x(i, j) = sol[i];
    }
    return x;
}

CVector hermitian_solve(const ComplexMatrix& a, std::span<const Complex> b) {
    const ComplexMatrix l = cholesky_factor(a);
    return cholesky_solve(l, b);
}

} // namespace mimobsp
