#ifndef MVM_MODES_HPP
#define MVM_MODES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>
#include <thread>
#include <vector>

#include "mvm/model.hpp"
#include "mvm/rng.hpp"
#include "mvm/spectral.hpp"

namespace mvm {

// ---------------------------------------------------------------------------
// Unimodality certificates
// ---------------------------------------------------------------------------

enum class Verdict { CertifiedUnimodal, CertifiedUnimodalWithMinimum, Inconclusive };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::CertifiedUnimodal: return "CertifiedUnimodal";
    case Verdict::CertifiedUnimodalWithMinimum: return "CertifiedUnimodalWithMinimum";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

/// Sufficient conditions for a single mode at mu.
///
/// `positive_definite`: P = diag(kappa) - Lambda is positive definite, so mu is
/// the only local maximum. `diagonally_dominant`: kappa_i > sum_j |lambda_ij|
/// for every i, which additionally pins the unique minimum at mu + pi*1 and
/// makes every other critical point a saddle. Neither failing says anything
/// about multimodality.
struct UnimodalityCertificate {
  Matrix p_matrix;
  bool positive_definite = false;
  bool diagonally_dominant = false;
  Vector p_eigenvalues;
  GershgorinReport gershgorin;
  Verdict verdict = Verdict::Inconclusive;

  bool operator==(const UnimodalityCertificate&) const = default;
};

inline UnimodalityCertificate certify_unimodal(const MvmParams& params,
                                               std::optional<double> pd_tol = std::nullopt) {
  UnimodalityCertificate cert;
  cert.p_matrix = params.precision_matrix();
  cert.p_eigenvalues = sym_eigen(cert.p_matrix).values;
  cert.gershgorin = gershgorin(cert.p_matrix);

  const Matrix& lam = params.lambda();
  bool dominant = true;
  for (std::size_t i = 0; i < params.dimension(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < params.dimension(); ++j) row += std::abs(lam(i, j));
    if (!(params.kappa()[i] > row)) dominant = false;
  }
  cert.diagonally_dominant = dominant;
  // Strict dominance with positive centres is itself a proof of definiteness,
  // which keeps dominant => positive_definite even inside the eigenvalue tolerance.
  const double tol = pd_tol.value_or(default_pd_tolerance(cert.p_matrix));
  cert.positive_definite = dominant || cert.p_eigenvalues.front() > tol;

  if (cert.diagonally_dominant) {
    cert.verdict = Verdict::CertifiedUnimodalWithMinimum;
  } else if (cert.positive_definite) {
    cert.verdict = Verdict::CertifiedUnimodal;
  } else {
    cert.verdict = Verdict::Inconclusive;
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Critical points
// ---------------------------------------------------------------------------

enum class CriticalKind { Maximum, Minimum, Saddle, Degenerate };

inline std::string_view to_string(CriticalKind k) {
  switch (k) {
    case CriticalKind::Maximum: return "Maximum";
    case CriticalKind::Minimum: return "Minimum";
    case CriticalKind::Saddle: return "Saddle";
    case CriticalKind::Degenerate: return "Degenerate";
  }
  return "Degenerate";
}

struct CriticalPoint {
  TorusPoint theta;
  double f_value = 0.0;
  /// ||grad f||_inf at theta.
  double grad_norm = 0.0;
  Vector hessian_eigenvalues;
  CriticalKind kind = CriticalKind::Degenerate;

  bool operator==(const CriticalPoint&) const = default;
};

struct SearchConfig {
  /// Lattice starts per coordinate, at pi/4 + 2 pi k / lattice_per_dim.
  std::size_t lattice_per_dim = 4;
  /// Larger lattices are subsampled (seeded) down to this many points.
  std::size_t max_lattice_starts = 256;
  /// Uniform random starts. Unset: 64 for p <= 4, 256 beyond.
  std::optional<std::size_t> random_starts;
  double grad_tol = 1e-10;
  int max_iterations = 200;
  double dedup_radius = 1e-4;
  /// Unset: 1e-6 * max(1, ||H||_inf) at each point.
  std::optional<double> degeneracy_tol;
  std::uint64_t seed = 0;
  /// Also run undamped Newton on ||grad f||, which converges to saddles.
  bool search_saddles = true;
  unsigned threads = 1;
};

struct SearchMeta {
  std::size_t starts = 0;
  std::size_t runs = 0;
  std::size_t converged = 0;
  std::uint64_t seed = 0;

  bool operator==(const SearchMeta&) const = default;
};

struct ModeReport {
  std::vector<CriticalPoint> criticals;
  std::size_t n_maxima = 0;
  bool extended_mode_suspected = false;
  SearchMeta search_meta;

  std::size_t count(CriticalKind k) const {
    return static_cast<std::size_t>(std::count_if(criticals.begin(), criticals.end(),
                                                  [k](const CriticalPoint& c) { return c.kind == k; }));
  }
  std::vector<CriticalPoint> of_kind(CriticalKind k) const {
    std::vector<CriticalPoint> out;
    for (const auto& c : criticals)
      if (c.kind == k) out.push_back(c);
    return out;
  }

  bool operator==(const ModeReport&) const = default;
};

inline double default_degeneracy_tolerance(const Matrix& hessian) {
  return 1e-6 * std::max(1.0, norm_inf(hessian));
}

inline CriticalKind classify_spectrum(std::span<const double> eigenvalues, double degeneracy_tol) {
  bool all_neg = true;
  bool all_pos = true;
  for (double v : eigenvalues) {
    if (std::abs(v) <= degeneracy_tol) return CriticalKind::Degenerate;
    if (v > 0.0) all_neg = false;
    if (v < 0.0) all_pos = false;
  }
  if (all_neg) return CriticalKind::Maximum;
  if (all_pos) return CriticalKind::Minimum;
  return CriticalKind::Saddle;
}

/// Tags a critical point by the spectrum of its Hessian. Throws InvalidArgument
/// if ||grad f||_inf at theta exceeds grad_tol.
inline CriticalPoint classify_critical(const MvmParams& params, const TorusPoint& theta,
                                       std::optional<double> degeneracy_tol = std::nullopt,
                                       double grad_tol = 1e-8) {
  const LocalExpansion ex = expand(params, theta);
  const double gn = norm_inf(ex.gradient);
  if (!(gn <= grad_tol)) {
    throw InvalidArgument("classify_critical: gradient norm " + std::to_string(gn) +
                          " exceeds tolerance");
  }
  CriticalPoint cp;
  cp.theta = theta;
  cp.f_value = ex.value;
  cp.grad_norm = gn;
  cp.hessian_eigenvalues = sym_eigen(ex.hessian).values;
  cp.kind = classify_spectrum(cp.hessian_eigenvalues,
                              degeneracy_tol.value_or(default_degeneracy_tolerance(ex.hessian)));
  return cp;
}

/// Keeps the first of every group of points closer than `radius` (sup-metric)
/// to an already kept point. Order-preserving.
inline std::vector<CriticalPoint> deduplicate(const std::vector<CriticalPoint>& points, double radius) {
  std::vector<CriticalPoint> kept;
  for (const auto& cp : points) {
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const CriticalPoint& k) {
      return angular_distance(k.theta, cp.theta) < radius;
    });
    if (!dup) kept.push_back(cp);
  }
  return kept;
}

enum class SearchDirection { Ascent, Descent, Root };

namespace detail {

inline bool is_power_overflow(std::size_t base, std::size_t exp, std::size_t limit) {
  std::size_t v = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (v > limit / std::max<std::size_t>(base, 1)) return true;
    v *= base;
  }
  return v > limit;
}

inline std::vector<TorusPoint> start_points(std::size_t p, const SearchConfig& cfg) {
  std::vector<TorusPoint> starts;
  const std::size_t m = cfg.lattice_per_dim;
  Rng rng(cfg.seed);
  if (m > 0) {
    const auto lattice_point = [&](std::uint64_t index) {
      std::vector<double> a(p);
      for (std::size_t i = 0; i < p; ++i) {
        a[i] = 0.25 * pi + two_pi * static_cast<double>(index % m) / static_cast<double>(m);
        index /= m;
      }
      return TorusPoint(std::move(a));
    };
    if (!is_power_overflow(m, p, cfg.max_lattice_starts)) {
      std::uint64_t total = 1;
      for (std::size_t i = 0; i < p; ++i) total *= m;
      for (std::uint64_t k = 0; k < total; ++k) starts.push_back(lattice_point(k));
    } else {
      // Seeded subsample: random lattice indices, digit by digit.
      for (std::size_t k = 0; k < cfg.max_lattice_starts; ++k) {
        std::vector<double> a(p);
        for (std::size_t i = 0; i < p; ++i) {
          a[i] = 0.25 * pi + two_pi * static_cast<double>(rng.below(m)) / static_cast<double>(m);
        }
        starts.emplace_back(std::move(a));
      }
    }
  }
  const std::size_t n_random = cfg.random_starts.value_or(p <= 4 ? 64 : 256);
  for (std::size_t k = 0; k < n_random; ++k) {
    std::vector<double> a(p);
    for (double& v : a) v = two_pi * rng.uniform();
    starts.emplace_back(std::move(a));
  }
  return starts;
}

inline TorusPoint step_from(const TorusPoint& theta, std::span<const double> d, double alpha) {
  std::vector<double> a(theta.angles().begin(), theta.angles().end());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += alpha * d[i];
  return TorusPoint(std::move(a));
}

/// Eigen-modified Newton direction. Ascent/Descent use |lambda| in place of
/// lambda so the step always moves uphill/downhill; directions with
/// |lambda| <= floor fall back to a gradient step of length 1/scale. Root is a
/// pseudo-inverse Newton step on grad f = 0.
inline Vector search_direction(const LocalExpansion& ex, SearchDirection dir) {
  const std::size_t p = ex.gradient.size();
  const double scale = std::max(1.0, norm_inf(ex.hessian));
  const double floor = 1e-6 * scale;
  const SymEigen eig = sym_eigen(ex.hessian);
  Vector d(p, 0.0);
  for (std::size_t k = 0; k < p; ++k) {
    const Vector v = eig.vector(k);
    const double gk = dot(v, ex.gradient);
    const double lam = eig.values[k];
    double coef = 0.0;
    switch (dir) {
      case SearchDirection::Ascent:
        coef = std::abs(lam) > floor ? gk / std::abs(lam) : gk / scale;
        break;
      case SearchDirection::Descent:
        coef = std::abs(lam) > floor ? -gk / std::abs(lam) : -gk / scale;
        break;
      case SearchDirection::Root:
        coef = std::abs(lam) > floor ? -gk / lam : 0.0;
        break;
    }
    for (std::size_t i = 0; i < p; ++i) d[i] += coef * v[i];
  }
  if (norm_inf(d) > 0.5 * pi) {
    // Newton step too long for the local model: plain gradient step instead.
    if (dir == SearchDirection::Root) {
      d = ex.hessian * std::span<const double>(ex.gradient);
      for (double& v : d) v = -v / (scale * scale);
    } else {
      const double sign = dir == SearchDirection::Ascent ? 1.0 : -1.0;
      d = ex.gradient;
      for (double& v : d) v *= sign / scale;
    }
    const double len = norm_inf(d);
    if (len > 0.5 * pi) {
      for (double& v : d) v *= 0.5 * pi / len;
    }
  }
  return d;
}

struct SearchOutcome {
  TorusPoint theta;
  bool converged = false;
};

inline SearchOutcome run_search(const MvmParams& params, const TorusPoint& start, SearchDirection dir,
                                const SearchConfig& cfg) {
  constexpr int max_halvings = 30;
  TorusPoint theta = start;
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    const LocalExpansion ex = expand(params, theta);
    const double gn = norm_inf(ex.gradient);
    if (gn < cfg.grad_tol) {
      // a few undamped steps to settle at roundoff level
      for (int k = 0; k < 3; ++k) {
        const LocalExpansion cur = expand(params, theta);
        const Vector d = search_direction(cur, SearchDirection::Root);
        const TorusPoint cand = step_from(theta, d, 1.0);
        if (norm_inf(gradient(params, cand)) < norm_inf(cur.gradient)) {
          theta = cand;
        } else {
          break;
        }
      }
      return {theta, true};
    }
    const Vector d = search_direction(ex, dir);
    const double slack = 1e-15 * (1.0 + std::abs(ex.value));
    double alpha = 1.0;
    bool accepted = false;
    for (int h = 0; h <= max_halvings; ++h, alpha *= 0.5) {
      const TorusPoint cand = step_from(theta, d, alpha);
      const TrigCache trig = trig_cache(params, cand);
      const double gnew = norm_inf(gradient(params, trig));
      bool ok = false;
      if (dir == SearchDirection::Root) {
        ok = gnew < gn;
      } else {
        const double fnew = exponent(params, trig);
        const double gain = dir == SearchDirection::Ascent ? fnew - ex.value : ex.value - fnew;
        ok = gain > 0.0 || (gain >= -slack && gnew < gn);
      }
      if (ok) {
        theta = cand;
        accepted = true;
        break;
      }
    }
    if (!accepted) return {theta, false};
  }
  return {theta, false};
}

}  // namespace detail

/// Locates critical points of the exponent by multi-start modified Newton.
///
/// Every start (lattice, then seeded random) is run uphill, downhill and, if
/// `search_saddles`, as a root search on the gradient. Converged points are
/// classified and deduplicated in (start, direction) order, so the report does
/// not depend on `threads`.
inline ModeReport critical_points(const MvmParams& params, const SearchConfig& cfg = {}) {
  const std::vector<TorusPoint> starts = detail::start_points(params.dimension(), cfg);
  std::vector<SearchDirection> dirs{SearchDirection::Ascent, SearchDirection::Descent};
  if (cfg.search_saddles) dirs.push_back(SearchDirection::Root);

  const std::size_t runs = starts.size() * dirs.size();
  std::vector<std::optional<CriticalPoint>> results(runs);
  const auto work = [&](std::size_t r) {
    const detail::SearchOutcome out = detail::run_search(params, starts[r / dirs.size()], dirs[r % dirs.size()], cfg);
    if (!out.converged) return;
    results[r] = classify_critical(params, out.theta, cfg.degeneracy_tol, cfg.grad_tol);
  };

  const unsigned n_threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(runs)));
  if (n_threads == 1) {
    for (std::size_t r = 0; r < runs; ++r) work(r);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t r = t; r < runs; r += n_threads) work(r);
      });
    }
  }

  ModeReport report;
  report.search_meta.starts = starts.size();
  report.search_meta.runs = runs;
  report.search_meta.seed = cfg.seed;
  std::vector<CriticalPoint> found;
  for (auto& r : results) {
    if (r) {
      ++report.search_meta.converged;
      found.push_back(std::move(*r));
    }
  }
  report.criticals = deduplicate(found, cfg.dedup_radius);
  report.n_maxima = report.count(CriticalKind::Maximum);
  report.extended_mode_suspected = report.count(CriticalKind::Degenerate) > 0;
  return report;
}

}  // namespace mvm

#endif  // MVM_MODES_HPP
