#ifndef MVM_PRESETS_HPP
#define MVM_PRESETS_HPP

#include <array>
#include <cmath>

#include "mvm/params.hpp"

// Parameter sets with known mode structure, used by the regression tests and
// the CLI `eta` shortcut.

namespace mvm::presets {

/// Eigenvalues {-4, 2, 2}. With kappa = 3*1, P is positive definite but the
/// Hessian at mu + pi*1 is not.
inline Matrix sign_counterexample_lambda() {
  return Matrix::from_rows({{0.0, -2.0, 2.0}, {-2.0, 0.0, 2.0}, {2.0, 2.0, 0.0}});
}

/// kappa = 0: two isolated modes at s = +-(1,1,1).
inline Matrix two_mode_lambda() {
  return Matrix::from_rows({{0.0, 1.75, 0.77}, {1.75, 0.0, 0.06}, {0.77, 0.06, 0.0}});
}

/// kappa = 0: the maximum is a closed loop along six edges of the s-cube.
inline Matrix ring_lambda() {
  return Matrix::from_rows({{0.0, -1.0, 1.0}, {-1.0, 0.0, 1.0}, {1.0, 1.0, 0.0}});
}

/// kappa = sin(eta) * 1 with the ring Lambda: the loop breaks into six maxima.
inline MvmParams six_mode_params(double eta) {
  const double eps = std::sin(eta);
  return MvmParams::centered({eps, eps, eps}, ring_lambda());
}

/// The six maxima of six_mode_params(eta) (mu = 0).
inline std::array<TorusPoint, 6> six_mode_maxima(double eta) {
  const double lo = 0.5 * pi - eta;
  const double hi = 1.5 * pi + eta;
  return {TorusPoint{0.0, hi, hi}, TorusPoint{lo, hi, 0.0}, TorusPoint{lo, 0.0, lo},
          TorusPoint{0.0, lo, lo}, TorusPoint{hi, lo, 0.0}, TorusPoint{hi, 0.0, hi}};
}

/// Closed-form Hessians at six_mode_maxima(eta), same order.
inline std::array<Matrix, 6> six_mode_hessians(double eta) {
  const double e = std::sin(eta);
  const double e2 = e * e;
  const Matrix h1 = Matrix::from_rows({{-e, -e, e}, {-e, -1.0, e2}, {e, e2, -1.0}});
  const Matrix h2 = Matrix::from_rows({{-1.0, -e2, e}, {-e2, -1.0, e}, {e, e, -e}});
  const Matrix h3 = Matrix::from_rows({{-1.0, -e, e2}, {-e, -e, e}, {e2, e, -1.0}});
  return {h1, h2, h3, h1, h2, h3};
}

}  // namespace mvm::presets

#endif  // MVM_PRESETS_HPP
