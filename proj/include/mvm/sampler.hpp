#ifndef MVM_SAMPLER_HPP
#define MVM_SAMPLER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "mvm/bessel.hpp"
#include "mvm/model.hpp"
#include "mvm/oracle.hpp"
#include "mvm/rng.hpp"
#include "mvm/spectral.hpp"

// Exact rejection sampler for the multivariate von Mises distribution when
// P = diag(kappa) - Lambda is positive definite.
//
// Proposal: independent doubled-angle von Mises coordinates with density
//   g(theta) = prod_i exp((l/4) cos 2 theta_i) / (2 pi I0(l/4)),
// where 0 < l <= lambda_min(P). The envelope f <= C g holds with
//   log C = -p l / 4 + sum kappa_i + p log(2 pi I0(l / 4)),
// and a proposal is accepted with probability
//   exp(sum kappa_i (c_i - 1) + 1/2 s' (Lambda + l I) s).

namespace mvm {

/// Univariate von Mises VM(0, kappa) on (-pi, pi].
///
/// kappa >= 1e-6 uses the Best-Fisher wrapped-Cauchy envelope; 0 < kappa < 1e-6
/// inverts a 4096-point tabulated CDF; kappa = 0 is uniform. Best-Fisher
/// consumes two uniforms per envelope trial (u1, u2) and one more (u3) for
/// the sign once a trial is accepted.
class VonMisesDistribution {
 public:
  static constexpr double table_threshold = 1e-6;
  static constexpr std::size_t table_size = 4096;

  explicit VonMisesDistribution(double kappa) : kappa_(kappa) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
      throw InvalidArgument("VonMisesDistribution: kappa must be finite and >= 0");
    }
    if (kappa >= table_threshold) {
      const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
      const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
      r_ = (1.0 + rho * rho) / (2.0 * rho);
    } else if (kappa > 0.0) {
      build_table();
    }
  }

  double kappa() const noexcept { return kappa_; }

  double operator()(Rng& rng) const {
    if (kappa_ == 0.0) return to_half_open(two_pi * rng.uniform() - pi);
    if (kappa_ < table_threshold) return from_table(rng.uniform());
    for (;;) {
      const double z = std::cos(pi * rng.uniform());
      const double f = (1.0 + r_ * z) / (r_ + z);
      const double c = kappa_ * (r_ - f);
      const double u2 = rng.uniform();
      const bool accept = c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0;
      if (!accept) continue;
      const double u3 = rng.uniform();
      const double a = std::acos(std::clamp(f, -1.0, 1.0));
      return to_half_open(u3 > 0.5 ? a : -a);
    }
  }

 private:
  static double to_half_open(double x) { return x <= -pi ? pi : x; }

  void build_table() {
    // cumulative trapezoid of exp(kappa cos x) on a uniform grid over [-pi, pi]
    nodes_.resize(table_size + 1);
    cdf_.resize(table_size + 1);
    const double h = two_pi / static_cast<double>(table_size);
    double acc = 0.0;
    double prev = std::exp(-kappa_);
    nodes_[0] = -pi;
    cdf_[0] = 0.0;
    for (std::size_t k = 1; k <= table_size; ++k) {
      nodes_[k] = -pi + h * static_cast<double>(k);
      const double cur = std::exp(kappa_ * std::cos(nodes_[k]));
      acc += 0.5 * h * (prev + cur);
      cdf_[k] = acc;
      prev = cur;
    }
    for (double& v : cdf_) v /= acc;
  }

  double from_table(double u) const {
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), 1, table_size);
    const double t = (u - cdf_[k - 1]) / (cdf_[k] - cdf_[k - 1]);
    return to_half_open(nodes_[k - 1] + t * (nodes_[k] - nodes_[k - 1]));
  }

  double kappa_;
  double r_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> cdf_;
};

inline Vector sample_vm1(double kappa, std::size_t n, Rng& rng) {
  if (!(kappa >= 0.0)) throw InvalidArgument("sample_vm1: kappa must be >= 0");
  const VonMisesDistribution vm(kappa);
  Vector out(n);
  for (double& v : out) v = vm(rng);
  return out;
}

/// Eigenvalue lower bound defining the doubled-angle proposal.
class ProposalSpec {
 public:
  static constexpr double default_slack = 1e-12;

  /// Bound = lambda_min(P) - 1e-12 unless `lambda_min_override` is given, which
  /// must satisfy 0 < override <= lambda_min(P).
  static ProposalSpec for_params(const MvmParams& params, std::optional<double> lambda_min_override = std::nullopt) {
    const double lmin = sym_eigen(params.precision_matrix()).min();
    if (!(lmin > 0.0)) {
      throw NotPositiveDefinite("P = diag(kappa) - Lambda is not positive definite (smallest eigenvalue " +
                                std::to_string(lmin) + "); run certify first");
    }
    const double bound = lambda_min_override.value_or(lmin - default_slack);
    if (!(bound > 0.0)) throw InvalidArgument("ProposalSpec: eigenvalue bound must be > 0");
    if (bound > lmin) {
      throw InvalidArgument("ProposalSpec: bound " + std::to_string(bound) +
                            " exceeds the smallest eigenvalue of P " + std::to_string(lmin));
    }
    return ProposalSpec(bound);
  }

  double lambda_min_bound() const noexcept { return bound_; }
  /// Per-coordinate von Mises concentration of the doubled angle.
  double concentration() const noexcept { return 0.25 * bound_; }
  const VonMisesDistribution& coordinate_law() const noexcept { return vm_; }

 private:
  explicit ProposalSpec(double bound) : bound_(bound), vm_(0.25 * bound) {}

  double bound_;
  VonMisesDistribution vm_;
};

/// One proposal, relative to mu = 0. Per coordinate: a VM(0, l/4) draw t in
/// (-pi, pi], then a coin u < 1/2 selecting t/2 or t/2 + pi.
inline TorusPoint sample_proposal_g(const ProposalSpec& spec, std::size_t p, Rng& rng) {
  std::vector<double> a(p);
  for (double& v : a) {
    const double t = spec.coordinate_law()(rng);
    v = rng.uniform() < 0.5 ? 0.5 * t : 0.5 * t + pi;
  }
  return TorusPoint(std::move(a));
}

/// log g at a point given relative to mu.
inline double log_proposal_density(const ProposalSpec& spec, const TorusPoint& relative) {
  const double k = spec.concentration();
  const double log_norm = std::log(two_pi) + log_bessel_i0(k);
  double acc = 0.0;
  for (double a : relative.angles()) acc += k * std::cos(2.0 * a) - log_norm;
  return acc;
}

/// log C, with f <= C g.
inline double log_envelope_constant(const MvmParams& params, const ProposalSpec& spec) {
  const double p = static_cast<double>(params.dimension());
  double sum_kappa = 0.0;
  for (double k : params.kappa()) sum_kappa += k;
  return -p * spec.lambda_min_bound() / 4.0 + sum_kappa + p * (std::log(two_pi) + log_bessel_i0(spec.concentration()));
}

namespace detail {

inline double acceptance_log_ratio(const MvmParams& params, const ProposalSpec& spec, const TrigCache& trig) {
  const std::size_t p = params.dimension();
  const Vector ls = params.lambda() * std::span<const double>(trig.s);
  double acc = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    acc += params.kappa()[i] * (trig.c[i] - 1.0);
    acc += 0.5 * trig.s[i] * (ls[i] + spec.lambda_min_bound() * trig.s[i]);
  }
  return acc;
}

inline double checked_acceptance(double log_ratio) {
  const double prob = std::exp(log_ratio);
  if (prob > 1.0 + 1e-12) {
    throw InvariantViolation("acceptance probability " + std::to_string(prob) +
                             " exceeds 1: eigenvalue bound is invalid");
  }
  return std::min(prob, 1.0);
}

}  // namespace detail

/// f(theta) / (C g(theta)) for an absolute point theta.
inline double acceptance_probability(const MvmParams& params, const ProposalSpec& spec, const TorusPoint& theta) {
  return detail::checked_acceptance(detail::acceptance_log_ratio(params, spec, trig_cache(params, theta)));
}

struct SampleBatch {
  std::vector<TorusPoint> draws;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;

  double empirical_acceptance() const {
    return trials == 0 ? 0.0 : static_cast<double>(draws.size()) / static_cast<double>(trials);
  }
};

struct SamplerOptions {
  /// Worker threads. Output does not depend on this.
  unsigned shards = 1;
  /// Draws per independently seeded block; block b uses Rng::derive_seed(seed, b).
  std::size_t block_size = 1024;
  /// A block of m draws fails after more than m * stall_multiplier trials.
  double stall_multiplier = 1e6;
};

namespace detail {

struct BlockResult {
  std::vector<TorusPoint> draws;
  std::uint64_t trials = 0;
};

/// Trial order: proposal coordinates (VM draw, coin) for i = 1..p, then U.
inline BlockResult sample_block(const MvmParams& params, const ProposalSpec& spec, std::size_t count,
                                std::uint64_t block_seed, double stall_multiplier) {
  Rng rng(block_seed);
  const std::size_t p = params.dimension();
  const TorusPoint zero = TorusPoint::origin(p);
  const double max_trials = static_cast<double>(count) * stall_multiplier;
  BlockResult out;
  out.draws.reserve(count);
  while (out.draws.size() < count) {
    const TorusPoint proposal = sample_proposal_g(spec, p, rng);
    const double u = rng.uniform();
    ++out.trials;
    const double prob = checked_acceptance(acceptance_log_ratio(params, spec, TrigCache::at(proposal, zero)));
    if (u <= prob) out.draws.push_back(proposal.shifted(params.mu().angles()));
    if (static_cast<double>(out.trials) > max_trials) {
      throw SamplerStall("sampler stalled: " + std::to_string(out.trials) + " trials for " +
                         std::to_string(out.draws.size()) + " of " + std::to_string(count) +
                         " draws in a block; the eigenvalue bound is too small");
    }
  }
  return out;
}

}  // namespace detail

/// n exact draws from MVM(mu, kappa, Lambda).
inline SampleBatch sample_mvm(const MvmParams& params, std::size_t n, const ProposalSpec& spec, std::uint64_t seed,
                              const SamplerOptions& opts = {}) {
  const SymEigen eig = sym_eigen(params.precision_matrix());
  if (!(eig.min() > 0.0)) {
    throw NotPositiveDefinite("sample_mvm: P is not positive definite; run certify first");
  }
  if (spec.lambda_min_bound() > eig.min()) {
    throw InvalidArgument("sample_mvm: proposal bound exceeds the smallest eigenvalue of P");
  }
  const std::size_t block = std::max<std::size_t>(1, opts.block_size);
  const std::size_t n_blocks = (n + block - 1) / block;
  std::vector<detail::BlockResult> blocks(n_blocks);
  std::vector<std::exception_ptr> errors(n_blocks);
  const auto work = [&](std::size_t b) {
    try {
      const std::size_t count = std::min(block, n - b * block);
      blocks[b] = detail::sample_block(params, spec, count, Rng::derive_seed(seed, b), opts.stall_multiplier);
    } catch (...) {
      errors[b] = std::current_exception();
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(opts.shards, static_cast<unsigned>(std::max<std::size_t>(n_blocks, 1))));
  if (workers == 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) work(b);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t b = w; b < n_blocks; b += workers) work(b);
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  SampleBatch batch;
  batch.seed = seed;
  batch.draws.reserve(n);
  for (auto& b : blocks) {
    batch.trials += b.trials;
    for (auto& d : b.draws) batch.draws.push_back(std::move(d));
  }
  return batch;
}

struct AcceptanceForecast {
  /// 2^{-p} sqrt(l^p / |P|)
  double asymptotic_rate = 0.0;
  /// Z / C with Z by quadrature; present for p <= 4 when requested.
  std::optional<double> exact_rate;

  bool operator==(const AcceptanceForecast&) const = default;
};

inline AcceptanceForecast forecast_acceptance(const MvmParams& params, const ProposalSpec& spec, bool with_exact,
                                              std::optional<std::size_t> n_per_dim = std::nullopt) {
  const Matrix pm = params.precision_matrix();
  const SymEigen eig = sym_eigen(pm);
  if (!(eig.min() > 0.0)) throw NotPositiveDefinite("forecast_acceptance: P is not positive definite");
  double log_det = 0.0;
  for (double v : eig.values) log_det += std::log(v);
  const double p = static_cast<double>(params.dimension());
  AcceptanceForecast out;
  out.asymptotic_rate = std::exp(0.5 * (p * std::log(spec.lambda_min_bound()) - log_det) - p * std::log(2.0));
  if (with_exact && params.dimension() <= max_quadrature_dimension) {
    const double log_z = log_partition(params, n_per_dim.value_or(default_quadrature_points(params.dimension())));
    out.exact_rate = std::exp(log_z - log_envelope_constant(params, spec));
  }
  return out;
}

}  // namespace mvm

#endif  // MVM_SAMPLER_HPP
