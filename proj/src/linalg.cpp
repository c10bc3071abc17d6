#include "lamhb/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lamhb/errors.hpp"

namespace lamhb {

template <class T>
std::vector<T> Tridiagonal<T>::apply(const std::vector<T>& x) const {
    const std::size_t n = size();
    if (x.size() != n) throw std::invalid_argument("tridiagonal apply: size mismatch");
    std::vector<T> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        T v = diag[i] * x[i];
        if (i > 0) v += lower[i - 1] * x[i - 1];
        if (i + 1 < n) v += upper[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

template <class T>
std::vector<T> thomas_solve(const Tridiagonal<T>& a, std::vector<T> rhs) {
    const std::size_t n = a.size();
    if (rhs.size() != n) throw std::invalid_argument("tridiagonal solve: size mismatch");
    if (n == 0) return rhs;
    double scale = 0.0;
    for (const auto& v : a.diag) scale = std::max(scale, std::abs(v));
    const double tiny = std::max(scale, 1e-300) * 1e-14;

    std::vector<T> c(n);
    T pivot = a.diag[0];
    double pmin = std::abs(pivot);
    double pmax = pmin;
    if (std::abs(pivot) <= tiny) throw NumericalError("singular tridiagonal system (pivot 0)", 0.0);
    c[0] = n > 1 ? a.upper[0] / pivot : T{};
    rhs[0] /= pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = a.diag[i] - a.lower[i - 1] * c[i - 1];
        pmin = std::min(pmin, std::abs(pivot));
        pmax = std::max(pmax, std::abs(pivot));
        if (std::abs(pivot) <= tiny) {
            std::ostringstream os;
            os << "singular tridiagonal system at row " << i << " (pivot ratio " << pmin / pmax << ")";
            throw NumericalError(os.str(), pmin / pmax);
        }
        if (i + 1 < n) c[i] = a.upper[i] / pivot;
        rhs[i] = (rhs[i] - a.lower[i - 1] * rhs[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
    return rhs;
}

template <class T>
std::vector<T> LowRankSystem<T>::apply(const std::vector<T>& x) const {
    auto y = tri.apply(x);
    for (std::size_t k = 0; k < columns.size(); ++k) {
        T dot{};
        const auto& u = columns[k];
        for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * x[i];
        dot *= coeffs[k];
        for (std::size_t i = 0; i < u.size(); ++i) y[i] += u[i] * dot;
    }
    return y;
}

template <class T>
void LowRankSystem<T>::constrain(std::size_t node, T value, std::vector<T>& rhs) {
    const std::size_t n = size();
    if (node >= n || rhs.size() != n) throw std::invalid_argument("constrain: bad node or rhs size");
    if (value != T{}) {
        std::vector<T> e(n);
        e[node] = value;
        const auto col = apply(e);
        for (std::size_t i = 0; i < n; ++i) rhs[i] -= col[i];
    }
    if (node > 0) {
        tri.lower[node - 1] = T{};
        tri.upper[node - 1] = T{};
    }
    if (node + 1 < n) {
        tri.lower[node] = T{};
        tri.upper[node] = T{};
    }
    tri.diag[node] = T{1.0};
    for (auto& u : columns) u[node] = 0.0;
    rhs[node] = value;
}

template <class T>
std::vector<T> LowRankSystem<T>::solve(const std::vector<T>& rhs) const {
    auto x0 = thomas_solve(tri, rhs);
    std::vector<std::size_t> active;
    for (std::size_t k = 0; k < columns.size(); ++k) {
        if (coeffs[k] != T{} &&
            std::any_of(columns[k].begin(), columns[k].end(), [](double v) { return v != 0.0; })) {
            active.push_back(k);
        }
    }
    if (active.empty()) return x0;

    const std::size_t n = size();
    const auto r = static_cast<Eigen::Index>(active.size());
    std::vector<std::vector<T>> z(active.size());
    using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
    Mat s = Mat::Zero(r, r);
    Vec g(r);
    for (Eigen::Index a = 0; a < r; ++a) {
        const auto& u = columns[active[a]];
        z[a] = thomas_solve(tri, std::vector<T>(u.begin(), u.end()));
        s(a, a) += T{1.0} / coeffs[active[a]];
        T gx{};
        for (std::size_t i = 0; i < n; ++i) gx += u[i] * x0[i];
        g(a) = gx;
    }
    for (Eigen::Index a = 0; a < r; ++a) {
        const auto& u = columns[active[a]];
        for (Eigen::Index b = 0; b < r; ++b) {
            T v{};
            for (std::size_t i = 0; i < n; ++i) v += u[i] * z[b][i];
            s(a, b) += v;
        }
    }
    const Vec y = s.partialPivLu().solve(g);
    for (Eigen::Index b = 0; b < r; ++b) {
        for (std::size_t i = 0; i < n; ++i) x0[i] -= z[b][i] * y(b);
    }
    return x0;
}

template struct Tridiagonal<double>;
template struct Tridiagonal<std::complex<double>>;
template struct LowRankSystem<double>;
template struct LowRankSystem<std::complex<double>>;
template std::vector<double> thomas_solve(const Tridiagonal<double>&, std::vector<double>);
template std::vector<std::complex<double>> thomas_solve(const Tridiagonal<std::complex<double>>&,
                                                        std::vector<std::complex<double>>);

}  // namespace lamhb
