#ifndef MVM_TORUS_HPP
#define MVM_TORUS_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "mvm/errors.hpp"
#include "mvm/matrix.hpp"

namespace mvm {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Reduces an angle to [0, 2pi) with an exact floating remainder.
inline double wrap_angle(double x) {
  double r = std::fmod(x, two_pi);
  if (r < 0.0) r += two_pi;
  // -tiny + 2pi rounds up to 2pi
  if (r >= two_pi) r = 0.0;
  return r;
}

/// Point on the p-torus. Angles are reduced once, on construction.
class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(std::vector<double> angles) : angles_(std::move(angles)) {
    for (double& a : angles_) {
      if (!std::isfinite(a)) throw InvalidArgument("TorusPoint: non-finite angle");
      a = wrap_angle(a);
    }
  }
  TorusPoint(std::initializer_list<double> angles) : TorusPoint(std::vector<double>(angles)) {}

  static TorusPoint origin(std::size_t p) { return TorusPoint(std::vector<double>(p, 0.0)); }

  std::size_t size() const noexcept { return angles_.size(); }
  double operator[](std::size_t i) const { return angles_[i]; }
  std::span<const double> angles() const noexcept { return angles_; }

  /// wrap(theta + delta)
  TorusPoint shifted(std::span<const double> delta) const {
    detail::require_dimension(delta.size(), size(), "TorusPoint::shifted");
    std::vector<double> out(angles_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += delta[i];
    return TorusPoint(std::move(out));
  }

  /// wrap(theta + a * 1)
  TorusPoint shifted_all(double a) const {
    std::vector<double> out(angles_);
    for (double& v : out) v += a;
    return TorusPoint(std::move(out));
  }

  bool operator==(const TorusPoint&) const = default;

 private:
  std::vector<double> angles_;
};

/// Sup-metric geodesic distance: max_i min(|d_i|, 2pi - |d_i|).
inline double angular_distance(const TorusPoint& a, const TorusPoint& b) {
  detail::require_dimension(b.size(), a.size(), "angular_distance");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = std::abs(a[i] - b[i]);
    d = std::max(d, std::min(diff, two_pi - diff));
  }
  return d;
}

/// c_i = cos(theta_i - mu_i), s_i = sin(theta_i - mu_i), computed once per point.
struct TrigCache {
  Vector c;
  Vector s;

  static TrigCache at(const TorusPoint& theta, const TorusPoint& mu) {
    detail::require_dimension(theta.size(), mu.size(), "TrigCache");
    TrigCache t;
    t.c.resize(theta.size());
    t.s.resize(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double d = theta[i] - mu[i];
      t.c[i] = std::cos(d);
      t.s[i] = std::sin(d);
    }
    return t;
  }

  std::size_t size() const noexcept { return c.size(); }
};

}  // namespace mvm

#endif  // MVM_TORUS_HPP
