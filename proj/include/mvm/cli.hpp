#ifndef MVM_CLI_HPP
#define MVM_CLI_HPP

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mvm/io.hpp"
#include "mvm/version.hpp"

// Command-line front end. `run_cli` is the whole program; tools/mvm.cpp only
// forwards argv to it, so the commands can be driven in-process by tests.
//
// Exit codes: 0 success / certified, 1 input error, 2 inconclusive
// certification, 3 sampler precondition failure.

namespace mvm::cli {

enum ExitCode : int { ok = 0, input_error = 1, inconclusive = 2, sampler_precondition = 3 };

struct GlobalOptions {
  std::string params_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  bool json_output = false;
  bool degrees = false;
};

/// command, resolved config, seed and version. Wall time is kept apart from the
/// data outputs so identical inputs give byte-identical results.
struct RunManifest {
  std::string command;
  json config;
  std::uint64_t seed = 0;
  std::string version = std::string(library_version);
  double wall_time_s = 0.0;

  json to_json(bool with_timing) const {
    json j{{"command", command}, {"config", config}, {"seed", seed}, {"version", version}};
    if (with_timing) j["wall_time_s"] = wall_time_s;
    return j;
  }
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParamFileError("cannot open parameter file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<double> parse_number_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument(std::string(what) + ": cannot parse '" + item + "' as a number");
    }
  }
  return out;
}

class Context {
 public:
  Context(const GlobalOptions& g, std::ostream& out, std::ostream& err)
      : g_(g), out_(out), err_(err), file_(parse_param_file(read_file(g.params_path), g.degrees)) {
    manifest_.seed = g.seed.value_or(file_.seed.value_or(0));
    manifest_.config["params_file"] = g.params_path;
    manifest_.config["params"] = params_to_json(file_.params);
    if (file_.eta) manifest_.config["eta"] = *file_.eta;
  }

  const MvmParams& params() const { return file_.params; }
  std::uint64_t seed() const { return manifest_.seed; }
  const GlobalOptions& global() const { return g_; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }
  RunManifest& manifest() { return manifest_; }

  /// Runs `write` against --out if given, otherwise stdout.
  template <class Write>
  void write_data(Write&& write) {
    if (g_.out_path.empty()) {
      write(out_);
      return;
    }
    std::ofstream f(g_.out_path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot open output file '" + g_.out_path + "'");
    write(f);
  }

  void emit_json(const json& result) {
    json doc{{"command", manifest_.command}, {"result", result}, {"manifest", manifest_.to_json(false)}};
    out_ << doc.dump(2) << '\n';
  }

  void finish(std::chrono::steady_clock::time_point t0) {
    manifest_.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    err_ << manifest_.to_json(true).dump() << '\n';
  }

 private:
  GlobalOptions g_;
  std::ostream& out_;
  std::ostream& err_;
  ParamFile file_;
  RunManifest manifest_;
};

inline int cmd_certify(Context& ctx) {
  const UnimodalityCertificate cert = certify_unimodal(ctx.params());
  if (ctx.global().json_output) {
    ctx.emit_json(cert);
  } else {
    auto& os = ctx.out();
    os << "verdict: " << to_string(cert.verdict) << '\n';
    os << "positive_definite: " << (cert.positive_definite ? "true" : "false") << '\n';
    os << "diagonally_dominant: " << (cert.diagonally_dominant ? "true" : "false") << '\n';
    os << "p_eigenvalues: " << join_numbers(cert.p_eigenvalues) << '\n';
    os << "gershgorin (center radius contains_zero):\n";
    for (std::size_t i = 0; i < cert.gershgorin.centers.size(); ++i) {
      const bool contains = std::abs(cert.gershgorin.centers[i]) <= cert.gershgorin.radii[i];
      os << "  row " << i + 1 << ": " << format_double(cert.gershgorin.centers[i]) << ' '
         << format_double(cert.gershgorin.radii[i]) << ' ' << (contains ? "yes" : "no") << '\n';
    }
  }
  return cert.verdict == Verdict::Inconclusive ? inconclusive : ok;
}

inline int cmd_modes(Context& ctx, SearchConfig cfg) {
  cfg.seed = ctx.seed();
  json c{{"lattice_per_dim", cfg.lattice_per_dim}, {"max_lattice_starts", cfg.max_lattice_starts},
         {"grad_tol", cfg.grad_tol},               {"max_iterations", cfg.max_iterations},
         {"dedup_radius", cfg.dedup_radius},       {"search_saddles", cfg.search_saddles}};
  c["random_starts"] = cfg.random_starts ? json(*cfg.random_starts) : json(nullptr);
  c["degeneracy_tol"] = cfg.degeneracy_tol ? json(*cfg.degeneracy_tol) : json(nullptr);
  ctx.manifest().config["search"] = c;

  const ModeReport report = critical_points(ctx.params(), cfg);
  const std::size_t p = ctx.params().dimension();
  if (!ctx.global().out_path.empty()) {
    ctx.write_data([&](std::ostream& os) { csv::write_criticals(os, report, p); });
  }
  if (ctx.global().json_output) {
    ctx.emit_json(report);
    return ok;
  }
  auto& os = ctx.out();
  os << "critical points: " << report.criticals.size() << '\n';
  os << "maxima: " << report.n_maxima << '\n';
  os << "minima: " << report.count(CriticalKind::Minimum) << '\n';
  os << "saddles: " << report.count(CriticalKind::Saddle) << '\n';
  os << "degenerate: " << report.count(CriticalKind::Degenerate) << '\n';
  os << "extended_mode_suspected: " << (report.extended_mode_suspected ? "true" : "false") << '\n';
  os << "starts: " << report.search_meta.starts << ", runs: " << report.search_meta.runs
     << ", converged: " << report.search_meta.converged << '\n';
  for (const auto& cp : report.of_kind(CriticalKind::Maximum)) {
    os << "  maximum at (" << join_numbers(cp.theta.angles(), ", ") << ") f=" << format_double(cp.f_value)
       << " eigenvalues " << join_numbers(cp.hessian_eigenvalues) << '\n';
  }
  return ok;
}

struct SampleOptions {
  std::size_t n = 1000;
  std::optional<double> lambda_min;
  unsigned shards = 1;
  std::size_t block_size = 1024;
};

inline int cmd_sample(Context& ctx, const SampleOptions& o) {
  const ProposalSpec spec = ProposalSpec::for_params(ctx.params(), o.lambda_min);
  SamplerOptions so;
  so.shards = o.shards;
  so.block_size = o.block_size;
  const SampleBatch batch = sample_mvm(ctx.params(), o.n, spec, ctx.seed(), so);
  const std::size_t p = ctx.params().dimension();
  ctx.write_data([&](std::ostream& os) { csv::write_samples(os, batch, p); });

  auto& m = ctx.manifest();
  m.config["n"] = o.n;
  m.config["block_size"] = so.block_size;
  m.config["lambda_min_bound"] = spec.lambda_min_bound();
  m.config["trials"] = batch.trials;
  m.config["empirical_acceptance"] = batch.empirical_acceptance();
  return ok;
}

inline int cmd_forecast(Context& ctx, std::optional<double> lambda_min, std::optional<std::size_t> quad_n) {
  const ProposalSpec spec = ProposalSpec::for_params(ctx.params(), lambda_min);
  const AcceptanceForecast fc = forecast_acceptance(ctx.params(), spec, true, quad_n);
  ctx.manifest().config["lambda_min_bound"] = spec.lambda_min_bound();
  if (ctx.global().json_output) {
    json r = fc;
    r["lambda_min_bound"] = spec.lambda_min_bound();
    ctx.emit_json(r);
    return ok;
  }
  auto& os = ctx.out();
  os << "lambda_min_bound: " << format_double(spec.lambda_min_bound()) << '\n';
  os << "asymptotic_rate: " << format_double(fc.asymptotic_rate) << '\n';
  os << "exact_rate: " << (fc.exact_rate ? format_double(*fc.exact_rate) : std::string("n/a (p > 4)")) << '\n';
  return ok;
}

inline int cmd_cube(Context& ctx, std::size_t grid_n, const std::string& vertices_out) {
  const MvmParams& params = ctx.params();
  if (std::any_of(params.kappa().begin(), params.kappa().end(), [](double k) { return k != 0.0; })) {
    ctx.err() << "warning: kappa is nonzero; the cube analysis ignores it\n";
  }
  const bool want_surface = params.dimension() == 3 && grid_n > 0;
  if (!want_surface && !ctx.global().out_path.empty()) {
    throw InvalidArgument("cube: the surface grid needs p = 3 and --grid-n > 0");
  }
  ctx.manifest().config["grid_n"] = grid_n;
  const CubeAnalysis cube = kappa_zero_analysis(params.lambda(), want_surface ? grid_n : 0);
  if (!ctx.global().out_path.empty()) ctx.write_data([&](std::ostream& os) { csv::write_surface(os, cube); });
  if (!vertices_out.empty()) {
    std::ofstream f(vertices_out, std::ios::binary);
    if (!f) throw InvalidArgument("cannot open output file '" + vertices_out + "'");
    csv::write_vertices(f, cube);
  }
  if (ctx.global().json_output) {
    ctx.emit_json(cube);
  } else {
    csv::write_vertices(ctx.out(), cube);
  }
  return ok;
}

inline int cmd_grid(Context& ctx, const std::vector<std::size_t>& dims, std::size_t n, const std::string& slice_arg) {
  const MvmParams& params = ctx.params();
  if (dims.size() != 2 || dims[0] < 1 || dims[1] < 1) {
    throw InvalidArgument("grid: --dims expects two 1-based coordinate indices");
  }
  TorusPoint slice = params.mu();
  if (!slice_arg.empty()) {
    std::vector<double> s = parse_number_list(slice_arg, "--slice");
    if (ctx.global().degrees)
      for (double& v : s) v *= pi / 180.0;
    if (s.size() != params.dimension()) throw InvalidArgument("grid: --slice needs one angle per coordinate");
    slice = TorusPoint(s);
  }
  const std::size_t a = dims[0] - 1;
  const std::size_t b = dims[1] - 1;
  const Matrix grid = density_grid(params, a, b, n, slice);
  ctx.manifest().config["dims"] = dims;
  ctx.manifest().config["n"] = n;
  ctx.manifest().config["slice"] = std::vector<double>(slice.angles().begin(), slice.angles().end());
  ctx.write_data([&](std::ostream& os) { csv::write_grid(os, grid, a, b); });
  return ok;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Multivariate von Mises (sine) distribution toolkit"};
  app.set_version_flag("--version", std::string(library_version));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed_value = 0;
  app.add_option("--params", g.params_path, "JSON parameter file")->required();
  auto* seed_opt = app.add_option("--seed", seed_value, "RNG seed (overrides the file's seed)");
  app.add_option("--out", g.out_path, "Write CSV data here instead of stdout");
  app.add_flag("--json", g.json_output, "Machine-readable JSON report on stdout");
  app.add_flag("--degrees", g.degrees, "Input angles (mu, --slice) are in degrees");

  auto* certify = app.add_subcommand("certify", "Check the sufficient conditions for unimodality");

  SearchConfig cfg;
  std::size_t random_starts = 0;
  double degeneracy_tol = 0.0;
  bool no_saddles = false;
  auto* modes = app.add_subcommand("modes", "Locate and classify all critical points");
  modes->add_option("--lattice-per-dim", cfg.lattice_per_dim, "Lattice starts per coordinate");
  modes->add_option("--max-lattice", cfg.max_lattice_starts, "Lattice subsample size for large p");
  auto* random_opt = modes->add_option("--random-starts", random_starts, "Number of random starts");
  modes->add_option("--grad-tol", cfg.grad_tol, "Convergence tolerance on ||grad f||_inf");
  modes->add_option("--max-iter", cfg.max_iterations, "Newton iterations per start");
  modes->add_option("--dedup-radius", cfg.dedup_radius, "Angular radius for merging points");
  auto* degen_opt = modes->add_option("--degeneracy-tol", degeneracy_tol, "Absolute eigenvalue tolerance");
  modes->add_flag("--no-saddles", no_saddles, "Skip the root search that targets saddles");
  modes->add_option("--threads", cfg.threads, "Worker threads");

  detail::SampleOptions so;
  double lambda_min = 0.0;
  auto* sample = app.add_subcommand("sample", "Exact rejection sampling (requires positive definite P)");
  sample->add_option("-n,--n", so.n, "Number of draws");
  auto* lmin_opt = sample->add_option("--lambda-min", lambda_min, "Lower bound on the smallest eigenvalue of P");
  sample->add_option("--shards", so.shards, "Worker threads (output does not depend on it)");
  sample->add_option("--block-size", so.block_size, "Draws per seeded block");

  double f_lambda_min = 0.0;
  std::size_t quad_n = 0;
  auto* forecast = app.add_subcommand("forecast", "Asymptotic and exact acceptance rate of the sampler");
  auto* f_lmin_opt = forecast->add_option("--lambda-min", f_lambda_min, "Lower bound on the smallest eigenvalue of P");
  auto* quad_opt = forecast->add_option("--quad-n", quad_n, "Quadrature nodes per coordinate");

  std::size_t grid_n = 16;
  std::string vertices_out;
  auto* cube = app.add_subcommand("cube", "kappa = 0 analysis of g(s) = s'Lambda s / 2 on the cube");
  cube->add_option("--grid-n", grid_n, "Lattice points per face side (p = 3)");
  cube->add_option("--vertices-out", vertices_out, "Also write the vertex table CSV here");

  std::vector<std::size_t> dims{1, 2};
  std::size_t n_grid = 64;
  std::string slice;
  auto* grid = app.add_subcommand("grid", "Exponent f on a 2-D grid of two coordinates");
  grid->add_option("--dims", dims, "Two 1-based coordinate indices")->delimiter(',')->expected(2);
  grid->add_option("--n", n_grid, "Grid nodes per coordinate");
  grid->add_option("--slice", slice, "Comma-separated angles for the other coordinates (default mu)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : input_error;
  }
  if (*seed_opt) g.seed = seed_value;
  if (*random_opt) cfg.random_starts = random_starts;
  if (*degen_opt) cfg.degeneracy_tol = degeneracy_tol;
  cfg.search_saddles = !no_saddles;

  const auto t0 = std::chrono::steady_clock::now();
  const bool sampling = sample->parsed() || forecast->parsed();
  try {
    detail::Context ctx(g, out, err);
    int code = ok;
    if (certify->parsed()) {
      ctx.manifest().command = "certify";
      code = detail::cmd_certify(ctx);
    } else if (modes->parsed()) {
      ctx.manifest().command = "modes";
      code = detail::cmd_modes(ctx, cfg);
    } else if (sample->parsed()) {
      ctx.manifest().command = "sample";
      if (*lmin_opt) so.lambda_min = lambda_min;
      ctx.manifest().config["shards"] = so.shards;
      code = detail::cmd_sample(ctx, so);
      if (!g.out_path.empty()) {
        ctx.manifest().wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ofstream side(g.out_path + ".manifest.json", std::ios::binary);
        side << ctx.manifest().to_json(true).dump(2) << '\n';
        return code;
      }
    } else if (forecast->parsed()) {
      ctx.manifest().command = "forecast";
      code = detail::cmd_forecast(ctx, *f_lmin_opt ? std::optional<double>(f_lambda_min) : std::nullopt,
                                  *quad_opt ? std::optional<std::size_t>(quad_n) : std::nullopt);
    } else if (cube->parsed()) {
      ctx.manifest().command = "cube";
      code = detail::cmd_cube(ctx, grid_n, vertices_out);
    } else if (grid->parsed()) {
      ctx.manifest().command = "grid";
      code = detail::cmd_grid(ctx, dims, n_grid, slice);
    }
    ctx.finish(t0);
    return code;
  } catch (const ParamFileError& e) {
    err << "error: " << e.what() << '\n';
    return input_error;
  } catch (const NotPositiveDefinite& e) {
    err << "error: " << e.what() << '\n';
    return sampling ? sampler_precondition : input_error;
  } catch (const SamplerStall& e) {
    err << "error: " << e.what() << '\n';
    return sampler_precondition;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    // an eigenvalue bound the sampler cannot use is a sampler precondition
    return sampling && *lmin_opt ? sampler_precondition : input_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return input_error;
  }
}

}  // namespace mvm::cli

#endif  // MVM_CLI_HPP
