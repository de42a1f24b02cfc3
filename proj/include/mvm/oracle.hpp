#ifndef MVM_ORACLE_HPP
#define MVM_ORACLE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvm/model.hpp"
#include "mvm/spectral.hpp"

// Ground truth by brute force: trapezoid quadrature of the normalising
// constant and marginals, raw exponent grids, and the kappa = 0 cube analysis.

namespace mvm {

inline constexpr std::size_t max_quadrature_dimension = 4;
inline constexpr std::size_t min_quadrature_points = 16;

/// 128 nodes per coordinate for p <= 3, 48 for p = 4.
inline std::size_t default_quadrature_points(std::size_t p) { return p <= 3 ? 128 : 48; }

/// Equal-weight rule on the periodic grid {2 pi k / n}.
struct QuadratureGrid {
  std::size_t n_per_dim = 0;
  std::vector<double> nodes;
  double weight = 0.0;

  explicit QuadratureGrid(std::size_t n) : n_per_dim(n), nodes(n), weight(two_pi / static_cast<double>(n)) {
    for (std::size_t k = 0; k < n; ++k) nodes[k] = two_pi * static_cast<double>(k) / static_cast<double>(n);
  }

  double total_weight(std::size_t p) const { return std::pow(weight * static_cast<double>(n_per_dim), static_cast<double>(p)); }
};

namespace detail {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Exponent on the tensor grid with coordinate `fixed_dim` (if any) held at
/// `fixed_angle`. Calls visit(f) in lexicographic node order, last index fastest.
template <class Visit>
void for_each_grid_exponent(const MvmParams& params, const QuadratureGrid& grid, std::optional<std::size_t> fixed_dim,
                            double fixed_angle, Visit&& visit) {
  const std::size_t p = params.dimension();
  const std::size_t n = grid.n_per_dim;
  std::vector<std::vector<double>> cs(p), sn(p);
  for (std::size_t i = 0; i < p; ++i) {
    const bool fixed = fixed_dim && *fixed_dim == i;
    const std::size_t m = fixed ? 1 : n;
    cs[i].resize(m);
    sn[i].resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double d = (fixed ? fixed_angle : grid.nodes[k]) - params.mu()[i];
      cs[i][k] = std::cos(d);
      sn[i][k] = std::sin(d);
    }
  }
  std::vector<std::size_t> idx(p, 0);
  std::vector<double> c(p), s(p);
  const Matrix& lam = params.lambda();
  const Vector& kappa = params.kappa();
  for (;;) {
    for (std::size_t i = 0; i < p; ++i) {
      c[i] = cs[i][idx[i]];
      s[i] = sn[i][idx[i]];
    }
    double f = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      f += kappa[i] * c[i];
      for (std::size_t j = i + 1; j < p; ++j) f += lam(i, j) * s[i] * s[j];
    }
    visit(f);
    std::size_t d = p;
    while (d > 0) {
      --d;
      if (++idx[d] < cs[d].size()) break;
      idx[d] = 0;
      if (d == 0) return;
    }
  }
}

/// log of (weight^m * sum exp(f)) over the grid, m = number of free coordinates.
inline double log_grid_integral(const MvmParams& params, const QuadratureGrid& grid, std::optional<std::size_t> fixed_dim,
                                double fixed_angle) {
  double fmax = -INFINITY;
  for_each_grid_exponent(params, grid, fixed_dim, fixed_angle, [&](double f) { fmax = std::max(fmax, f); });
  CompensatedSum sum;
  for_each_grid_exponent(params, grid, fixed_dim, fixed_angle, [&](double f) { sum.add(std::exp(f - fmax)); });
  const double free_dims = static_cast<double>(params.dimension() - (fixed_dim ? 1 : 0));
  return fmax + std::log(sum.value()) + free_dims * std::log(grid.weight);
}

inline void check_quadrature(const MvmParams& params, std::size_t n_per_dim) {
  if (params.dimension() > max_quadrature_dimension) {
    throw InvalidArgument("quadrature: dimension " + std::to_string(params.dimension()) + " too large (max " +
                          std::to_string(max_quadrature_dimension) + ")");
  }
  if (n_per_dim < min_quadrature_points) {
    throw InvalidArgument("quadrature: need at least " + std::to_string(min_quadrature_points) + " nodes per dimension");
  }
}

}  // namespace detail

/// log Z by the trapezoid rule on [0, 2pi)^p (spectrally accurate for this
/// smooth periodic integrand).
inline double log_partition(const MvmParams& params, std::size_t n_per_dim) {
  detail::check_quadrature(params, n_per_dim);
  return detail::log_grid_integral(params, QuadratureGrid(n_per_dim), std::nullopt, 0.0);
}

inline double log_partition(const MvmParams& params) {
  return log_partition(params, default_quadrature_points(params.dimension()));
}

/// (p/2) log 2pi - 1/2 log|P| + sum kappa_i.
inline double high_concentration_log_partition(const MvmParams& params) {
  const SymEigen eig = sym_eigen(params.precision_matrix());
  if (!(eig.min() > 0.0)) throw NotPositiveDefinite("high_concentration_log_partition: P is not positive definite");
  double log_det = 0.0;
  for (double v : eig.values) log_det += std::log(v);
  double sum_kappa = 0.0;
  for (double k : params.kappa()) sum_kappa += k;
  return 0.5 * static_cast<double>(params.dimension()) * std::log(two_pi) - 0.5 * log_det + sum_kappa;
}

/// Marginal density of coordinate `dim` at each of `angles`, normalised by log_z.
inline std::vector<double> marginal_densities(const MvmParams& params, std::size_t dim, std::span<const double> angles,
                                              std::size_t n_per_dim, double log_z) {
  detail::check_quadrature(params, n_per_dim);
  if (dim >= params.dimension()) throw InvalidArgument("marginal_density: dimension index out of range");
  const QuadratureGrid grid(n_per_dim);
  std::vector<double> out;
  out.reserve(angles.size());
  for (double a : angles) out.push_back(std::exp(detail::log_grid_integral(params, grid, dim, a) - log_z));
  return out;
}

inline double marginal_density(const MvmParams& params, std::size_t dim, double angle, std::size_t n_per_dim) {
  const double log_z = log_partition(params, n_per_dim);
  return marginal_densities(params, dim, std::span<const double>(&angle, 1), n_per_dim, log_z).front();
}

// ---------------------------------------------------------------------------
// kappa = 0: maxima of g(s) = 1/2 s' Lambda s over the cube [-1, 1]^p
// ---------------------------------------------------------------------------

struct VertexValue {
  std::vector<int> signs;
  double value = 0.0;

  bool operator==(const VertexValue&) const = default;
};

/// One lattice sample of g on a face of [-1, 1]^3.
struct SurfaceSample {
  std::string face;
  std::size_t i = 0;
  std::size_t j = 0;
  Vector s;
  double value = 0.0;

  bool operator==(const SurfaceSample&) const = default;
};

struct CubeAnalysis {
  /// Vertex k has s_i = +1 iff bit i of k is set.
  std::vector<VertexValue> vertex_values;
  std::vector<std::vector<int>> best_vertices;
  double top_eigenvalue = 0.0;
  Vector top_eigenvector;
  std::vector<SurfaceSample> surface_grid;

  bool operator==(const CubeAnalysis&) const = default;
};

inline constexpr std::size_t max_cube_dimension = 20;

/// Face order of the unwrapped-cross layout: top (+z), then the ring
/// -y (centre), +x, +y, -x, then -z.
inline constexpr std::array<std::pair<int, int>, 6> cube_faces{{{2, +1}, {1, -1}, {0, +1}, {1, +1}, {0, -1}, {2, -1}}};

inline std::string cube_face_name(std::size_t axis, int sign) {
  static constexpr const char* axes[] = {"x", "y", "z"};
  return std::string(sign > 0 ? "+" : "-") + axes[axis];
}

/// Vertex table, argmax set and top eigenpair of Lambda. `grid_n > 0` (p = 3
/// only) also samples g on a grid_n x grid_n lattice on every face.
inline CubeAnalysis kappa_zero_analysis(const Matrix& lambda, std::size_t grid_n = 0) {
  const std::size_t p = lambda.rows();
  if (p == 0 || p > max_cube_dimension) throw InvalidArgument("kappa_zero_analysis: dimension must be in 1..20");
  const MvmParams params = MvmParams::centered(Vector(p, 0.0), lambda);
  const Matrix& lam = params.lambda();
  const auto g = [&](std::span<const double> s) { return 0.5 * dot(s, lam * s); };

  CubeAnalysis out;
  const std::uint64_t n_vertices = std::uint64_t{1} << p;
  double best = -INFINITY;
  for (std::uint64_t k = 0; k < n_vertices; ++k) {
    VertexValue v;
    v.signs.resize(p);
    Vector s(p);
    for (std::size_t i = 0; i < p; ++i) {
      v.signs[i] = ((k >> i) & 1U) ? 1 : -1;
      s[i] = v.signs[i];
    }
    v.value = g(s);
    best = std::max(best, v.value);
    out.vertex_values.push_back(std::move(v));
  }
  const double tie = 1e-12 * std::max(1.0, std::abs(best));
  for (const auto& v : out.vertex_values)
    if (v.value >= best - tie) out.best_vertices.push_back(v.signs);

  const SymEigen eig = sym_eigen(lam);
  out.top_eigenvalue = eig.max();
  out.top_eigenvector = eig.vector(p - 1);

  if (grid_n > 0) {
    if (p != 3) throw InvalidArgument("kappa_zero_analysis: surface grid requires p = 3");
    if (grid_n < 2) throw InvalidArgument("kappa_zero_analysis: surface grid needs grid_n >= 2");
    const auto node = [&](std::size_t k) { return -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(grid_n - 1); };
    for (const auto& [axis, sign] : cube_faces) {
      const std::size_t ax = static_cast<std::size_t>(axis);
      std::size_t free_axes[2];
      std::size_t w = 0;
      for (std::size_t a = 0; a < 3; ++a)
        if (a != ax) free_axes[w++] = a;
      for (std::size_t i = 0; i < grid_n; ++i) {
        for (std::size_t j = 0; j < grid_n; ++j) {
          SurfaceSample smp;
          smp.face = cube_face_name(ax, sign);
          smp.i = i;
          smp.j = j;
          smp.s.assign(3, 0.0);
          smp.s[ax] = sign;
          smp.s[free_axes[0]] = node(i);
          smp.s[free_axes[1]] = node(j);
          smp.value = g(smp.s);
          out.surface_grid.push_back(std::move(smp));
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Raw exponent grids for plotting
// ---------------------------------------------------------------------------

/// f over an n x n grid of coordinates (dim_a, dim_b) at nodes 2 pi k / n,
/// other coordinates fixed at `slice`. Entry (a, b) has theta_{dim_a} = 2 pi a / n
/// and theta_{dim_b} = 2 pi b / n. For p = 1 pass dim_a = dim_b = 0; the result
/// is then a single row over the one coordinate.
inline Matrix density_grid(const MvmParams& params, std::size_t dim_a, std::size_t dim_b, std::size_t n,
                           const TorusPoint& slice) {
  const std::size_t p = params.dimension();
  detail::require_dimension(slice.size(), p, "density_grid slice");
  if (dim_a >= p || dim_b >= p) throw InvalidArgument("density_grid: dimension index out of range");
  if (dim_a == dim_b && p > 1) throw InvalidArgument("density_grid: the two dimensions must differ");
  if (n == 0) throw InvalidArgument("density_grid: n must be positive");
  const auto node = [n](std::size_t k) { return two_pi * static_cast<double>(k) / static_cast<double>(n); };
  std::vector<double> theta(slice.angles().begin(), slice.angles().end());
  if (p == 1) {
    Matrix out(1, n);
    for (std::size_t b = 0; b < n; ++b) {
      theta[0] = node(b);
      out(0, b) = exponent(params, TorusPoint(theta));
    }
    return out;
  }
  Matrix out(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      theta[dim_a] = node(a);
      theta[dim_b] = node(b);
      out(a, b) = exponent(params, TorusPoint(theta));
    }
  }
  return out;
}

}  // namespace mvm

#endif  // MVM_ORACLE_HPP
