#ifndef MVM_MODEL_HPP
#define MVM_MODEL_HPP

#include "mvm/params.hpp"

// Exact evaluation of the unnormalised log-density
//   f(theta) = kappa' c(theta) + 1/2 s(theta)' Lambda s(theta)
// together with its gradient and Hessian. Every quantity can be evaluated from
// a shared TrigCache so that value, gradient and Hessian at a point are
// computed from the same c and s.

namespace mvm {

namespace detail {

inline void check_cache(const MvmParams& params, const TrigCache& trig) {
  require_dimension(trig.size(), params.dimension(), "model evaluation");
}

/// (Lambda s)_i
inline Vector lambda_times_sine(const MvmParams& params, const TrigCache& trig) {
  return params.lambda() * std::span<const double>(trig.s);
}

}  // namespace detail

inline TrigCache trig_cache(const MvmParams& params, const TorusPoint& theta) {
  detail::require_dimension(theta.size(), params.dimension(), "theta");
  return TrigCache::at(theta, params.mu());
}

inline double exponent(const MvmParams& params, const TrigCache& trig) {
  detail::check_cache(params, trig);
  const Vector ls = detail::lambda_times_sine(params, trig);
  return dot(params.kappa(), trig.c) + 0.5 * dot(trig.s, ls);
}

inline double exponent(const MvmParams& params, const TorusPoint& theta) {
  return exponent(params, trig_cache(params, theta));
}

/// d_i f = -kappa_i s_i + c_i sum_k lambda_ik s_k
inline Vector gradient(const MvmParams& params, const TrigCache& trig) {
  detail::check_cache(params, trig);
  const Vector ls = detail::lambda_times_sine(params, trig);
  Vector g(params.dimension());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = -params.kappa()[i] * trig.s[i] + trig.c[i] * ls[i];
  }
  return g;
}

inline Vector gradient(const MvmParams& params, const TorusPoint& theta) {
  return gradient(params, trig_cache(params, theta));
}

/// d_ij f = -(kappa_i c_i + s_i (Lambda s)_i) delta_ij + c_i lambda_ij c_j.
/// Only the upper triangle is computed; the result is exactly symmetric.
inline Matrix hessian(const MvmParams& params, const TrigCache& trig) {
  detail::check_cache(params, trig);
  const std::size_t p = params.dimension();
  const Vector ls = detail::lambda_times_sine(params, trig);
  const Matrix& lam = params.lambda();
  Matrix h(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    h(i, i) = -(params.kappa()[i] * trig.c[i] + trig.s[i] * ls[i]) + trig.c[i] * lam(i, i) * trig.c[i];
    for (std::size_t j = i + 1; j < p; ++j) {
      const double v = trig.c[i] * lam(i, j) * trig.c[j];
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

inline Matrix hessian(const MvmParams& params, const TorusPoint& theta) {
  return hessian(params, trig_cache(params, theta));
}

/// Value, gradient and Hessian at one point from a single TrigCache.
struct LocalExpansion {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

inline LocalExpansion expand(const MvmParams& params, const TorusPoint& theta) {
  const TrigCache trig = trig_cache(params, theta);
  return {exponent(params, trig), gradient(params, trig), hessian(params, trig)};
}

/// log phi(theta) = f(theta) - log Z, with log Z supplied by the caller
/// (Lebesgue measure on [0, 2pi)^p).
inline double log_density(const MvmParams& params, const TorusPoint& theta, double log_z) {
  return exponent(params, theta) - log_z;
}

}  // namespace mvm

#endif  // MVM_MODEL_HPP
