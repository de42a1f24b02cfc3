#ifndef MVM_PARAMS_HPP
#define MVM_PARAMS_HPP

#include <cmath>
#include <string>

#include "mvm/errors.hpp"
#include "mvm/matrix.hpp"
#include "mvm/torus.hpp"

namespace mvm {

/// Absolute tolerance for symmetry and zero diagonal of a user-supplied Lambda.
inline constexpr double lambda_validation_tol = 1e-12;

/// Parameters (mu, kappa, Lambda) of a multivariate von Mises (sine) distribution.
///
/// Construction validates everything: kappa_i >= 0, Lambda p x p, symmetric and
/// with zero diagonal within lambda_validation_tol. Entries inside the tolerance
/// are stored exactly symmetric with an exact zero diagonal; anything outside
/// it is rejected.
class MvmParams {
 public:
  MvmParams(TorusPoint mu, Vector kappa, Matrix lambda)
      : mu_(std::move(mu)), kappa_(std::move(kappa)), lambda_(std::move(lambda)) {
    const std::size_t p = kappa_.size();
    if (p == 0) throw InvalidArgument("MvmParams: dimension must be positive");
    detail::require_dimension(mu_.size(), p, "MvmParams mu");
    if (lambda_.rows() != p || lambda_.cols() != p) {
      throw DimensionMismatch("MvmParams lambda: expected " + std::to_string(p) + "x" +
                              std::to_string(p));
    }
    for (std::size_t i = 0; i < p; ++i) {
      if (!std::isfinite(kappa_[i])) throw InvalidArgument("MvmParams kappa: non-finite entry");
      if (kappa_[i] < 0.0) {
        throw InvalidArgument("MvmParams kappa[" + std::to_string(i) + "] is negative");
      }
    }
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        if (!std::isfinite(lambda_(i, j))) throw InvalidArgument("MvmParams lambda: non-finite entry");
      }
      if (std::abs(lambda_(i, i)) > lambda_validation_tol) {
        throw InvalidArgument("MvmParams lambda[" + std::to_string(i) + "][" + std::to_string(i) +
                              "] must be zero");
      }
      lambda_(i, i) = 0.0;
      for (std::size_t j = i + 1; j < p; ++j) {
        if (std::abs(lambda_(i, j) - lambda_(j, i)) > lambda_validation_tol) {
          throw InvalidArgument("MvmParams lambda is not symmetric at (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
        }
        const double m = 0.5 * (lambda_(i, j) + lambda_(j, i));
        lambda_(i, j) = m;
        lambda_(j, i) = m;
      }
    }
  }

  /// mu = 0.
  static MvmParams centered(Vector kappa, Matrix lambda) {
    const std::size_t p = kappa.size();
    return MvmParams(TorusPoint::origin(p), std::move(kappa), std::move(lambda));
  }

  std::size_t dimension() const noexcept { return kappa_.size(); }
  const TorusPoint& mu() const noexcept { return mu_; }
  const Vector& kappa() const noexcept { return kappa_; }
  const Matrix& lambda() const noexcept { return lambda_; }

  /// P = diag(kappa) - Lambda; equals minus the Hessian of the exponent at mu.
  Matrix precision_matrix() const { return Matrix::diagonal(kappa_) - lambda_; }

  MvmParams with_mu(TorusPoint mu) const { return MvmParams(std::move(mu), kappa_, lambda_); }
  MvmParams with_kappa(Vector kappa) const { return MvmParams(mu_, std::move(kappa), lambda_); }

  bool operator==(const MvmParams&) const = default;

 private:
  TorusPoint mu_;
  Vector kappa_;
  Matrix lambda_;
};

}  // namespace mvm

#endif  // MVM_PARAMS_HPP
