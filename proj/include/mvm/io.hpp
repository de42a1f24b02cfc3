#ifndef MVM_IO_HPP
#define MVM_IO_HPP

#include <charconv>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>

#include <json.hpp>

#include "mvm/modes.hpp"
#include "mvm/oracle.hpp"
#include "mvm/presets.hpp"
#include "mvm/sampler.hpp"

// Text formats: shortest round-trip number formatting, CSV writers, JSON
// conversions of every report type, and the JSON parameter file.

namespace mvm {

using json = nlohmann::json;

/// Shortest decimal string that parses back to exactly `x`.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  if (res.ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

inline std::string join_numbers(std::span<const double> xs, std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += format_double(xs[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV (header row, comma separated, LF line endings)
// ---------------------------------------------------------------------------

namespace csv {

inline void write_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

inline std::vector<std::string> theta_header(std::size_t p, std::string_view prefix = "theta_") {
  std::vector<std::string> h;
  for (std::size_t i = 0; i < p; ++i) h.push_back(std::string(prefix) + std::to_string(i + 1));
  return h;
}

inline void write_samples(std::ostream& os, const SampleBatch& batch, std::size_t p) {
  write_row(os, theta_header(p));
  std::string line;
  for (const auto& d : batch.draws) {
    line.clear();
    for (std::size_t i = 0; i < p; ++i) {
      if (i) line += ',';
      line += format_double(d[i]);
    }
    line += '\n';
    os << line;
  }
}

inline void write_criticals(std::ostream& os, const ModeReport& report, std::size_t p) {
  std::vector<std::string> header{"index", "kind", "f_value", "grad_norm"};
  for (auto& h : theta_header(p)) header.push_back(h);
  for (auto& h : theta_header(p, "hessian_eig_")) header.push_back(h);
  write_row(os, header);
  for (std::size_t k = 0; k < report.criticals.size(); ++k) {
    const auto& c = report.criticals[k];
    std::vector<std::string> row{std::to_string(k), std::string(to_string(c.kind)), format_double(c.f_value),
                                 format_double(c.grad_norm)};
    for (double a : c.theta.angles()) row.push_back(format_double(a));
    for (double v : c.hessian_eigenvalues) row.push_back(format_double(v));
    write_row(os, row);
  }
}

inline void write_vertices(std::ostream& os, const CubeAnalysis& cube) {
  const std::size_t p = cube.vertex_values.empty() ? 0 : cube.vertex_values.front().signs.size();
  std::vector<std::string> header = theta_header(p, "s_");
  header.push_back("g");
  header.push_back("is_max");
  write_row(os, header);
  for (const auto& v : cube.vertex_values) {
    std::vector<std::string> row;
    for (int s : v.signs) row.push_back(std::to_string(s));
    row.push_back(format_double(v.value));
    const bool best = std::find(cube.best_vertices.begin(), cube.best_vertices.end(), v.signs) != cube.best_vertices.end();
    row.push_back(best ? "1" : "0");
    write_row(os, row);
  }
}

inline void write_surface(std::ostream& os, const CubeAnalysis& cube) {
  write_row(os, {"face", "i", "j", "s_1", "s_2", "s_3", "g"});
  for (const auto& smp : cube.surface_grid) {
    write_row(os, {smp.face, std::to_string(smp.i), std::to_string(smp.j), format_double(smp.s[0]),
                   format_double(smp.s[1]), format_double(smp.s[2]), format_double(smp.value)});
  }
}

/// Long format: one row per node, angles of the two gridded coordinates and f.
inline void write_grid(std::ostream& os, const Matrix& grid, std::size_t dim_a, std::size_t dim_b) {
  const std::size_t n = grid.cols();
  const auto node = [n](std::size_t k) { return two_pi * static_cast<double>(k) / static_cast<double>(n); };
  if (grid.rows() == 1 && dim_a == dim_b) {
    write_row(os, {"j", "theta_" + std::to_string(dim_a + 1), "f"});
    for (std::size_t b = 0; b < n; ++b) write_row(os, {std::to_string(b), format_double(node(b)), format_double(grid(0, b))});
    return;
  }
  write_row(os, {"i", "j", "theta_" + std::to_string(dim_a + 1), "theta_" + std::to_string(dim_b + 1), "f"});
  for (std::size_t a = 0; a < grid.rows(); ++a)
    for (std::size_t b = 0; b < n; ++b)
      write_row(os, {std::to_string(a), std::to_string(b), format_double(node(a)), format_double(node(b)),
                     format_double(grid(a, b))});
}

}  // namespace csv

// ---------------------------------------------------------------------------
// JSON conversions
// ---------------------------------------------------------------------------

namespace detail {

template <class Enum, std::size_t N>
Enum enum_from_string(const std::string& s, const std::array<Enum, N>& all, const char* what) {
  for (Enum e : all)
    if (to_string(e) == s) return e;
  throw InvalidArgument(std::string("unknown ") + what + " '" + s + "'");
}

}  // namespace detail

inline json matrix_to_json(const Matrix& m) { return m.to_rows(); }
inline Matrix matrix_from_json(const json& j) { return Matrix::from_rows(j.get<std::vector<std::vector<double>>>()); }

inline void to_json(json& j, const GershgorinReport& g) {
  j = json{{"centers", g.centers}, {"radii", g.radii}, {"excludes_zero", g.excludes_zero}};
}
inline void from_json(const json& j, GershgorinReport& g) {
  j.at("centers").get_to(g.centers);
  j.at("radii").get_to(g.radii);
  j.at("excludes_zero").get_to(g.excludes_zero);
}

inline void to_json(json& j, const UnimodalityCertificate& c) {
  j = json{{"verdict", std::string(to_string(c.verdict))},
           {"positive_definite", c.positive_definite},
           {"diagonally_dominant", c.diagonally_dominant},
           {"p_matrix", matrix_to_json(c.p_matrix)},
           {"p_eigenvalues", c.p_eigenvalues},
           {"gershgorin", c.gershgorin}};
}
inline void from_json(const json& j, UnimodalityCertificate& c) {
  c.verdict = detail::enum_from_string(
      j.at("verdict").get<std::string>(),
      std::array{Verdict::CertifiedUnimodal, Verdict::CertifiedUnimodalWithMinimum, Verdict::Inconclusive}, "verdict");
  j.at("positive_definite").get_to(c.positive_definite);
  j.at("diagonally_dominant").get_to(c.diagonally_dominant);
  c.p_matrix = matrix_from_json(j.at("p_matrix"));
  j.at("p_eigenvalues").get_to(c.p_eigenvalues);
  j.at("gershgorin").get_to(c.gershgorin);
}

inline void to_json(json& j, const CriticalPoint& c) {
  j = json{{"theta", std::vector<double>(c.theta.angles().begin(), c.theta.angles().end())},
           {"f_value", c.f_value},
           {"grad_norm", c.grad_norm},
           {"hessian_eigenvalues", c.hessian_eigenvalues},
           {"kind", std::string(to_string(c.kind))}};
}
inline void from_json(const json& j, CriticalPoint& c) {
  c.theta = TorusPoint(j.at("theta").get<std::vector<double>>());
  j.at("f_value").get_to(c.f_value);
  j.at("grad_norm").get_to(c.grad_norm);
  j.at("hessian_eigenvalues").get_to(c.hessian_eigenvalues);
  c.kind = detail::enum_from_string(
      j.at("kind").get<std::string>(),
      std::array{CriticalKind::Maximum, CriticalKind::Minimum, CriticalKind::Saddle, CriticalKind::Degenerate}, "kind");
}

inline void to_json(json& j, const SearchMeta& m) {
  j = json{{"starts", m.starts}, {"runs", m.runs}, {"converged", m.converged}, {"seed", m.seed}};
}
inline void from_json(const json& j, SearchMeta& m) {
  j.at("starts").get_to(m.starts);
  j.at("runs").get_to(m.runs);
  j.at("converged").get_to(m.converged);
  j.at("seed").get_to(m.seed);
}

inline void to_json(json& j, const ModeReport& r) {
  j = json{{"n_maxima", r.n_maxima},
           {"n_minima", r.count(CriticalKind::Minimum)},
           {"n_saddles", r.count(CriticalKind::Saddle)},
           {"n_degenerate", r.count(CriticalKind::Degenerate)},
           {"extended_mode_suspected", r.extended_mode_suspected},
           {"search_meta", r.search_meta},
           {"criticals", r.criticals}};
}
inline void from_json(const json& j, ModeReport& r) {
  j.at("n_maxima").get_to(r.n_maxima);
  j.at("extended_mode_suspected").get_to(r.extended_mode_suspected);
  j.at("search_meta").get_to(r.search_meta);
  j.at("criticals").get_to(r.criticals);
}

inline void to_json(json& j, const AcceptanceForecast& f) {
  j = json{{"asymptotic_rate", f.asymptotic_rate}};
  j["exact_rate"] = f.exact_rate ? json(*f.exact_rate) : json(nullptr);
}
inline void from_json(const json& j, AcceptanceForecast& f) {
  j.at("asymptotic_rate").get_to(f.asymptotic_rate);
  const json& e = j.at("exact_rate");
  f.exact_rate = e.is_null() ? std::nullopt : std::optional<double>(e.get<double>());
}

inline void to_json(json& j, const VertexValue& v) { j = json{{"signs", v.signs}, {"value", v.value}}; }
inline void from_json(const json& j, VertexValue& v) {
  j.at("signs").get_to(v.signs);
  j.at("value").get_to(v.value);
}

inline void to_json(json& j, const SurfaceSample& s) {
  j = json{{"face", s.face}, {"i", s.i}, {"j", s.j}, {"s", s.s}, {"value", s.value}};
}
inline void from_json(const json& j, SurfaceSample& s) {
  j.at("face").get_to(s.face);
  j.at("i").get_to(s.i);
  j.at("j").get_to(s.j);
  j.at("s").get_to(s.s);
  j.at("value").get_to(s.value);
}

inline void to_json(json& j, const CubeAnalysis& c) {
  j = json{{"vertex_values", c.vertex_values},
           {"best_vertices", c.best_vertices},
           {"top_eigenvalue", c.top_eigenvalue},
           {"top_eigenvector", c.top_eigenvector},
           {"surface_grid", c.surface_grid}};
}
inline void from_json(const json& j, CubeAnalysis& c) {
  j.at("vertex_values").get_to(c.vertex_values);
  j.at("best_vertices").get_to(c.best_vertices);
  j.at("top_eigenvalue").get_to(c.top_eigenvalue);
  j.at("top_eigenvector").get_to(c.top_eigenvector);
  j.at("surface_grid").get_to(c.surface_grid);
}

inline json params_to_json(const MvmParams& p) {
  return json{{"p", p.dimension()},
              {"mu", std::vector<double>(p.mu().angles().begin(), p.mu().angles().end())},
              {"kappa", p.kappa()},
              {"lambda", matrix_to_json(p.lambda())}};
}

// ---------------------------------------------------------------------------
// Parameter file
// ---------------------------------------------------------------------------

/// Malformed parameter file; the message names the line/column or field.
class ParamFileError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct ParamFile {
  MvmParams params;
  std::optional<std::uint64_t> seed;
  std::optional<double> eta;
};

namespace detail {

inline std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline std::vector<double> number_array(const json& j, const std::string& field, std::size_t expected) {
  if (!j.is_array()) throw ParamFileError("field '" + field + "': expected an array");
  if (j.size() != expected) {
    throw ParamFileError("field '" + field + "': expected " + std::to_string(expected) + " entries, got " +
                         std::to_string(j.size()));
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParamFileError("field '" + field + "[" + std::to_string(i) + "]': expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

}  // namespace detail

/// Parses the JSON parameter file. Keys: "p", "mu" (optional, default 0),
/// "kappa", "lambda", optional "seed". "eta" replaces p/kappa/lambda with the
/// six-mode construction kappa = sin(eta) * 1 and the ring Lambda.
/// `degrees` converts mu from degrees.
inline ParamFile parse_param_file(const std::string& text, bool degrees = false) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParamFileError("parameter file is not valid JSON at " + detail::line_column(text, e.byte == 0 ? 0 : e.byte - 1) +
                         ": " + e.what());
  }
  if (!doc.is_object()) throw ParamFileError("parameter file: top level must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "p" && key != "mu" && key != "kappa" && key != "lambda" && key != "seed" && key != "eta") {
      throw ParamFileError("unknown field '" + key + "'");
    }
  }

  std::optional<std::uint64_t> seed;
  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (!s.is_number_unsigned()) throw ParamFileError("field 'seed': expected an unsigned integer");
    seed = s.get<std::uint64_t>();
  }

  std::optional<double> eta;
  std::size_t p = 0;
  Vector kappa;
  Matrix lambda;
  if (doc.contains("eta")) {
    if (!doc["eta"].is_number()) throw ParamFileError("field 'eta': expected a number");
    eta = doc["eta"].get<double>();
    if (!(*eta > 0.0)) throw ParamFileError("field 'eta': must be > 0");
    if (doc.contains("kappa") || doc.contains("lambda")) {
      throw ParamFileError("field 'eta': cannot be combined with 'kappa' or 'lambda'");
    }
    if (doc.contains("p") && !(doc["p"].is_number_integer() && doc["p"].get<long long>() == 3)) {
      throw ParamFileError("field 'p': must be 3 when 'eta' is given");
    }
    const MvmParams six = presets::six_mode_params(*eta);
    p = 3;
    kappa = six.kappa();
    lambda = six.lambda();
  } else {
    if (!doc.contains("p")) throw ParamFileError("missing field 'p'");
    if (!doc["p"].is_number_integer() || doc["p"].get<long long>() < 1) {
      throw ParamFileError("field 'p': expected a positive integer");
    }
    p = doc["p"].get<std::size_t>();
    if (!doc.contains("kappa")) throw ParamFileError("missing field 'kappa'");
    if (!doc.contains("lambda")) throw ParamFileError("missing field 'lambda'");
    kappa = detail::number_array(doc["kappa"], "kappa", p);
    const json& lj = doc["lambda"];
    if (!lj.is_array() || lj.size() != p) {
      throw ParamFileError("field 'lambda': expected " + std::to_string(p) + " rows");
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < p; ++i) {
      rows.push_back(detail::number_array(lj[i], "lambda[" + std::to_string(i) + "]", p));
    }
    lambda = Matrix::from_rows(rows);
  }

  std::vector<double> mu(p, 0.0);
  if (doc.contains("mu")) mu = detail::number_array(doc["mu"], "mu", p);
  if (degrees)
    for (double& m : mu) m *= pi / 180.0;

  try {
    return ParamFile{MvmParams(TorusPoint(mu), std::move(kappa), std::move(lambda)), seed, eta};
  } catch (const Error& e) {
    throw ParamFileError(std::string("invalid parameters: ") + e.what());
  }
}

}  // namespace mvm

#endif  // MVM_IO_HPP
