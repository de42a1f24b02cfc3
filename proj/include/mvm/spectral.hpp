#ifndef MVM_SPECTRAL_HPP
#define MVM_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "mvm/matrix.hpp"

namespace mvm {

/// Eigen-decomposition of a real symmetric matrix. Values ascending; column k
/// of `vectors` is the unit eigenvector for values[k].
struct SymEigen {
  Vector values;
  Matrix vectors;

  double min() const { return values.front(); }
  double max() const { return values.back(); }
  Vector vector(std::size_t k) const {
    Vector v(vectors.rows());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = vectors(i, k);
    return v;
  }
};

namespace detail {

inline double symmetry_tolerance(const Matrix& a) { return 1e-12 * std::max(1.0, norm_inf(a)); }

inline double off_diagonal_norm(const Matrix& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) acc += a(i, j) * a(i, j);
  return std::sqrt(acc);
}

}  // namespace detail

/// Cyclic Jacobi eigensolver. Sweeps until the off-diagonal Frobenius norm
/// drops below 1e-14 * ||A||_F.
inline SymEigen sym_eigen(const Matrix& input) {
  if (!input.is_square()) throw InvalidArgument("sym_eigen: matrix is not square");
  if (!is_symmetric(input, detail::symmetry_tolerance(input))) {
    throw InvalidArgument("sym_eigen: matrix is not symmetric");
  }
  const std::size_t n = input.rows();
  Matrix a = input;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(j, i) = a(i, j);
  Matrix v = Matrix::identity(n);

  const double scale = norm_frobenius(a);
  const double target = 1e-14 * scale;
  constexpr int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps && scale > 0.0; ++sweep) {
    if (detail::off_diagonal_norm(a) <= target) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::abs(theta) > 1e150
                             ? 0.5 / theta
                             : std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  SymEigen out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

/// 1e-10 * max(1, ||A||_inf)
inline double default_pd_tolerance(const Matrix& a) { return 1e-10 * std::max(1.0, norm_inf(a)); }

inline bool is_positive_definite(const Matrix& a, std::optional<double> tol = std::nullopt) {
  const double t = tol.value_or(default_pd_tolerance(a));
  if (a.rows() == 0) return false;
  return sym_eigen(a).min() > t;
}

/// Cholesky factorisation that fails as soon as a pivot is <= pivot_floor.
/// Independent route to positive definiteness.
inline bool cholesky_succeeds(const Matrix& a, double pivot_floor) {
  if (!a.is_square() || a.rows() == 0) return false;
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > pivot_floor)) return false;
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return true;
}

/// Gershgorin discs B(a_ii, sum_{j != i} |a_ij|).
struct GershgorinReport {
  Vector centers;
  Vector radii;
  /// No closed disc contains 0.
  bool excludes_zero = false;

  bool operator==(const GershgorinReport&) const = default;
};

inline GershgorinReport gershgorin(const Matrix& a) {
  if (!a.is_square()) throw InvalidArgument("gershgorin: matrix is not square");
  GershgorinReport r;
  r.centers.resize(a.rows());
  r.radii.resize(a.rows());
  r.excludes_zero = a.rows() > 0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    r.centers[i] = a(i, i);
    double radius = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (j != i) radius += std::abs(a(i, j));
    r.radii[i] = radius;
    if (std::abs(r.centers[i]) <= radius) r.excludes_zero = false;
  }
  return r;
}

/// Product of the eigenvalues.
inline double determinant(const Matrix& a) {
  const SymEigen e = sym_eigen(a);
  double d = 1.0;
  for (double v : e.values) d *= v;
  return d;
}

}  // namespace mvm

#endif  // MVM_SPECTRAL_HPP
