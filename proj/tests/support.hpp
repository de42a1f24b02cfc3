#ifndef MVM_TEST_SUPPORT_HPP
#define MVM_TEST_SUPPORT_HPP

// Shared oracles for the unit tests and the acceptance binary. Everything here
// is written independently of the library code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mvm/mvm.hpp"

namespace testing {

using mvm::Matrix;
using mvm::MvmParams;
using mvm::TorusPoint;
using mvm::Vector;

inline Matrix random_lambda(std::size_t p, double scale, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix m(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) m(i, j) = m(j, i) = u(gen);
  return m;
}

inline TorusPoint random_point(std::size_t p, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, mvm::two_pi);
  std::vector<double> a(p);
  for (double& v : a) v = u(gen);
  return TorusPoint(a);
}

inline MvmParams random_params(std::size_t p, double kappa_max, double lambda_scale, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, kappa_max);
  Vector kappa(p);
  for (double& k : kappa) k = u(gen);
  return MvmParams(random_point(p, gen), kappa, random_lambda(p, lambda_scale, gen));
}

// Direct evaluation from the definition, without TrigCache or Matrix products.
inline double exponent_direct(const MvmParams& params, std::span<const double> theta) {
  const std::size_t p = params.dimension();
  double f = 0.0;
  for (std::size_t i = 0; i < p; ++i) f += params.kappa()[i] * std::cos(theta[i] - params.mu()[i]);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      f += 0.5 * params.lambda()(i, j) * std::sin(theta[i] - params.mu()[i]) * std::sin(theta[j] - params.mu()[j]);
  return f;
}

inline Vector fd_gradient(const MvmParams& params, const TorusPoint& theta, double h) {
  const std::size_t p = params.dimension();
  Vector g(p);
  std::vector<double> x(theta.angles().begin(), theta.angles().end());
  for (std::size_t i = 0; i < p; ++i) {
    std::vector<double> a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (exponent_direct(params, a) - exponent_direct(params, b)) / (2.0 * h);
  }
  return g;
}

// Central differences of the analytic gradient, shifted without re-wrapping.
inline Matrix fd_hessian(const MvmParams& params, const TorusPoint& theta, double h) {
  const std::size_t p = params.dimension();
  Matrix hm(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    Vector d(p, 0.0);
    d[j] = h;
    const Vector gp = mvm::gradient(params, theta.shifted(d));
    d[j] = -h;
    const Vector gm = mvm::gradient(params, theta.shifted(d));
    for (std::size_t i = 0; i < p; ++i) hm(i, j) = (gp[i] - gm[i]) / (2.0 * h);
  }
  return hm;
}

// Error relative to the larger of |reference| and a unit floor.
inline double rel_error(double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

inline double cofactor_determinant(const Matrix& a) {
  const std::size_t n = a.rows();
  if (n == 1) return a(0, 0);
  double det = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    Matrix minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      std::size_t cc = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == c) continue;
        minor(i - 1, cc++) = a(i, j);
      }
    }
    det += ((c % 2 == 0) ? 1.0 : -1.0) * a(0, c) * cofactor_determinant(minor);
  }
  return det;
}

// (x/2)^{2k} / (k!)^2 summed directly.
inline double i0_series_oracle(double x, int terms = 30) {
  double sum = 0.0, term = 1.0;
  for (int k = 0; k < terms; ++k) {
    if (k > 0) term *= (x * x / 4.0) / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
  }
  return sum;
}

inline double i1_series_oracle(double x, int terms = 30) {
  double sum = 0.0, term = x / 2.0;
  for (int k = 0; k < terms; ++k) {
    if (k > 0) term *= (x * x / 4.0) / (static_cast<double>(k) * static_cast<double>(k + 1));
    sum += term;
  }
  return sum;
}

inline Matrix random_orthogonal(std::size_t p, std::mt19937_64& gen) {
  std::normal_distribution<double> n01;
  std::vector<Vector> cols;
  while (cols.size() < p) {
    Vector v(p);
    for (double& x : v) x = n01(gen);
    for (const auto& c : cols) {
      const double d = mvm::dot(v, c);
      for (std::size_t i = 0; i < p; ++i) v[i] -= d * c[i];
    }
    const double nv = std::sqrt(mvm::dot(v, v));
    if (nv < 1e-8) continue;
    for (double& x : v) x /= nv;
    cols.push_back(v);
  }
  Matrix q(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) q(i, j) = cols[j][i];
  return q;
}

inline std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

// Compare a histogram of `angles` on [0, 2pi) with bin probabilities from
// `density` (midpoint rule with `sub` points per bin). Returns the largest
// |observed - expected| in units of the binomial standard error.
template <class Density>
double histogram_worst_z(std::span<const double> angles, std::size_t bins, Density density, int sub = 64) {
  std::vector<double> counts(bins, 0.0);
  const double width = mvm::two_pi / static_cast<double>(bins);
  for (double a : angles) {
    std::size_t b = static_cast<std::size_t>(a / width);
    if (b >= bins) b = bins - 1;
    counts[b] += 1.0;
  }
  const double n = static_cast<double>(angles.size());
  double worst = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    double prob = 0.0;
    for (int k = 0; k < sub; ++k) prob += density((static_cast<double>(b) + (k + 0.5) / sub) * width);
    prob *= width / sub;
    const double se = std::sqrt(n * prob * (1.0 - prob));
    worst = std::max(worst, std::abs(counts[b] - n * prob) / se);
  }
  return worst;
}

inline std::vector<double> coordinate(const std::vector<TorusPoint>& draws, std::size_t i) {
  std::vector<double> out;
  out.reserve(draws.size());
  for (const auto& d : draws) out.push_back(d[i]);
  return out;
}

}  // namespace testing

#endif  // MVM_TEST_SUPPORT_HPP
