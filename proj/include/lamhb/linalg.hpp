#pragma once

// Tridiagonal systems with a symmetric low-rank correction,
//   A = T + sum_k c_k u_k u_k^T   (plain transpose, also for complex T),
// solved by the Thomas algorithm plus a Woodbury update.

#include <complex>
#include <cstddef>
#include <vector>

namespace lamhb {

template <class T>
struct Tridiagonal {
    std::vector<T> lower;  // lower[i] = A(i+1, i)
    std::vector<T> diag;
    std::vector<T> upper;  // upper[i] = A(i, i+1)

    Tridiagonal() = default;
    explicit Tridiagonal(std::size_t n) : lower(n ? n - 1 : 0), diag(n), upper(n ? n - 1 : 0) {}

    [[nodiscard]] std::size_t size() const { return diag.size(); }

    /// Adds a 2x2 element block at rows/cols (i, i+1).
    void add_element(std::size_t i, T a00, T a01, T a11) {
        diag[i] += a00;
        diag[i + 1] += a11;
        upper[i] += a01;
        lower[i] += a01;
    }

    [[nodiscard]] std::vector<T> apply(const std::vector<T>& x) const;
};

/// Thomas algorithm; throws NumericalError on a vanishing pivot.
template <class T>
std::vector<T> thomas_solve(const Tridiagonal<T>& a, std::vector<T> rhs);

template <class T>
struct LowRankSystem {
    Tridiagonal<T> tri;
    std::vector<std::vector<double>> columns;  // u_k, full length
    std::vector<T> coeffs;                     // c_k

    LowRankSystem() = default;
    explicit LowRankSystem(std::size_t n) : tri(n) {}

    [[nodiscard]] std::size_t size() const { return tri.size(); }

    [[nodiscard]] std::vector<T> apply(const std::vector<T>& x) const;

    /// Imposes x[node] = value, moving the eliminated column to `rhs`.
    void constrain(std::size_t node, T value, std::vector<T>& rhs);

    [[nodiscard]] std::vector<T> solve(const std::vector<T>& rhs) const;
};

extern template struct Tridiagonal<double>;
extern template struct Tridiagonal<std::complex<double>>;
extern template struct LowRankSystem<double>;
extern template struct LowRankSystem<std::complex<double>>;
extern template std::vector<double> thomas_solve(const Tridiagonal<double>&, std::vector<double>);
extern template std::vector<std::complex<double>> thomas_solve(
    const Tridiagonal<std::complex<double>>&, std::vector<std::complex<double>>);

}  // namespace lamhb
