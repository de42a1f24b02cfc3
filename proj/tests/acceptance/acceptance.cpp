// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "support.hpp"

using namespace mvm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

MvmParams cx(double k) { return MvmParams::centered({k, k, k}, presets::sign_counterexample_lambda()); }

double nearest(const std::vector<CriticalPoint>& pts, const TorusPoint& t, std::size_t* index = nullptr) {
  double best = 1e300;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double d = angular_distance(pts[k].theta, t);
    if (d < best) {
      best = d;
      if (index) *index = k;
    }
  }
  return best;
}

double max_abs_diff(const std::vector<double>& got, std::vector<double> want) {
  std::sort(want.begin(), want.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
  return worst;
}

Outcome spectra() {
  const Matrix lam = presets::sign_counterexample_lambda();
  const Matrix k3 = Matrix::diagonal(Vector{3, 3, 3});
  const double e1 = max_abs_diff(sym_eigen(lam).values, {-4, 2, 2});
  const double e2 = max_abs_diff(certify_unimodal(cx(3)).p_eigenvalues, {1, 1, 7});
  const double e3 = max_abs_diff(sym_eigen(k3 + lam).values, {-1, 5, 5});
  const double worst = std::max({e1, e2, e3});
  return {worst < 1e-10, "max eigenvalue error " + num(worst)};
}

Outcome two_modes() {
  const MvmParams params = MvmParams::centered({0, 0, 0}, presets::two_mode_lambda());
  const ModeReport r = critical_points(params);
  const auto maxima = r.of_kind(CriticalKind::Maximum);
  bool ok = maxima.size() == 2;
  double worst = 0.0;
  std::vector<std::vector<int>> found;
  for (const auto& m : maxima) {
    const auto s = TrigCache::at(m.theta, params.mu()).s;
    const double sign = s[0] > 0 ? 1.0 : -1.0;
    for (double v : s) worst = std::max(worst, std::abs(v - sign));
    found.push_back(std::vector<int>(3, sign > 0 ? 1 : -1));
  }
  ok = ok && worst < 1e-6;
  const CubeAnalysis cube = kappa_zero_analysis(params.lambda());
  std::sort(found.begin(), found.end());
  auto best = cube.best_vertices;
  std::sort(best.begin(), best.end());
  const bool agree = best == found;
  return {ok && agree, std::to_string(maxima.size()) + " maxima, |s - (+-1)| <= " + num(worst) +
                           ", cube vertices agree: " + (agree ? "yes" : "no")};
}

Outcome six_modes() {
  bool ok = true;
  std::string detail;
  for (double eta : {0.05, 0.1}) {
    const double e = std::sin(eta), e2 = e * e;
    const double a = pi / 2 - eta, b = 3 * pi / 2 + eta;
    const std::vector<TorusPoint> table{{0, b, b}, {a, b, 0}, {a, 0, a}, {0, a, a}, {b, a, 0}, {b, 0, b}};
    const Matrix h1 = Matrix::from_rows({{-e, -e, e}, {-e, -1, e2}, {e, e2, -1}});
    const Matrix h2 = Matrix::from_rows({{-1, -e2, e}, {-e2, -1, e}, {e, e, -e}});
    const Matrix h3 = Matrix::from_rows({{-1, -e, e2}, {-e, -e, e}, {e2, e, -1}});
    const std::vector<Matrix> hs{h1, h2, h3, h1, h2, h3};

    const MvmParams params = presets::six_mode_params(eta);
    const auto maxima = critical_points(params).of_kind(CriticalKind::Maximum);
    double dist = 0.0, herr = 0.0, eerr = 0.0;
    ok = ok && maxima.size() == 6;
    for (std::size_t k = 0; k < table.size(); ++k) {
      std::size_t idx = 0;
      dist = std::max(dist, nearest(maxima, table[k], &idx));
      if (maxima.empty()) break;
      const Matrix h = hessian(params, maxima[idx].theta);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) herr = std::max(herr, std::abs(h(i, j) - hs[k](i, j)));
      eerr = std::max(eerr, max_abs_diff(maxima[idx].hessian_eigenvalues, {-1, -1, -e}) / (5 * e2));
    }
    ok = ok && dist < 1e-6 && herr < 1e-10 && eerr < 1.0;
    detail += "eta=" + num(eta) + ": " + std::to_string(maxima.size()) + " maxima, dist " + num(dist) + ", H err " +
              num(herr) + ", eig err/(5 eps^2) " + num(eerr) + "; ";
  }
  return {ok, detail};
}

Outcome extended_ring() {
  const MvmParams params = MvmParams::centered({0, 0, 0}, presets::ring_lambda());
  const ModeReport r = critical_points(params);
  const auto deg = r.of_kind(CriticalKind::Degenerate);
  // largest group sharing one f-value
  std::size_t best_count = 0;
  double best_f = 0.0;
  for (const auto& d : deg) {
    std::size_t c = 0;
    for (const auto& o : deg) c += std::abs(o.f_value - d.f_value) <= 1e-9;
    if (c > best_count) {
      best_count = c;
      best_f = d.f_value;
    }
  }
  double min_sup = 1e300;
  for (const auto& d : deg)
    if (std::abs(d.f_value - best_f) <= 1e-9) min_sup = std::min(min_sup, norm_inf(TrigCache::at(d.theta, params.mu()).s));
  const bool ok = r.extended_mode_suspected && best_count >= 20 && min_sup > 0.999;
  return {ok, std::string("flag ") + (r.extended_mode_suspected ? "set" : "unset") + ", " +
                  std::to_string(best_count) + " degenerate points at f=" + num(best_f) + ", min ||s||inf " + num(min_sup)};
}

Outcome certificate_sweep() {
  std::mt19937_64 gen(2024);
  int certified = 0, dominant = 0, failures = 0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t p = 2 + k % 2;
    const MvmParams params = testing::random_params(p, 7.0, 2.5, gen);
    const UnimodalityCertificate cert = certify_unimodal(params);
    if (!cert.positive_definite) continue;
    ++certified;
    SearchConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(k);
    const ModeReport r = critical_points(params, cfg);
    const auto maxima = r.of_kind(CriticalKind::Maximum);
    bool ok = maxima.size() == 1 && angular_distance(maxima[0].theta, params.mu()) < 1e-8;
    if (cert.diagonally_dominant) {
      ++dominant;
      const auto minima = r.of_kind(CriticalKind::Minimum);
      ok = ok && minima.size() == 1 && angular_distance(minima[0].theta, params.mu().shifted_all(pi)) < 1e-8;
    }
    failures += !ok;
  }
  return {failures == 0 && certified > 0, std::to_string(certified) + " of 100 certified (" + std::to_string(dominant) +
                                              " dominant), " + std::to_string(failures) + " inconsistent"};
}

Outcome sampler_exactness() {
  Matrix lam(2, 2);
  lam(0, 1) = lam(1, 0) = 2.0;
  const MvmParams params = MvmParams::centered({5.0, 5.0}, lam);
  const auto spec = ProposalSpec::for_params(params);
  const SampleBatch batch = sample_mvm(params, 100000, spec, 606);
  const double log_z = log_partition(params, 128);
  double worst = 0.0;
  for (std::size_t d = 0; d < 2; ++d) {
    const auto xs = testing::coordinate(batch.draws, d);
    worst = std::max(worst, testing::histogram_worst_z(xs, 64, [&](double t) {
      return marginal_densities(params, d, std::vector<double>{t}, 128, log_z)[0];
    }, 16));
  }
  const double exact = std::exp(log_z - log_envelope_constant(params, spec));
  const double trials = static_cast<double>(batch.trials);
  const double se = std::sqrt(exact * (1 - exact) / trials);
  const double acc_z = std::abs(batch.empirical_acceptance() - exact) / se;
  return {worst < 4.0 && acc_z < 3.0, "worst bin " + num(worst) + " SE, acceptance " +
                                          num(batch.empirical_acceptance()) + " vs Z/C " + num(exact) + " (" +
                                          num(acc_z) + " SE)"};
}

Outcome acceptance_asymptotics() {
  std::vector<double> dev, noise;
  std::string detail;
  for (double t : {10.0, 20.0, 40.0, 80.0}) {
    const MvmParams params = cx(t);
    const auto spec = ProposalSpec::for_params(params);
    const double asym = forecast_acceptance(params, spec, false).asymptotic_rate;
    const SampleBatch batch = sample_mvm(params, 200000, spec, 700 + static_cast<std::uint64_t>(t));
    const double emp = batch.empirical_acceptance();
    dev.push_back(std::abs(emp / asym - 1.0));
    noise.push_back(std::sqrt(emp * (1 - emp) / static_cast<double>(batch.trials)) / asym);
    detail += "t=" + num(t) + ": " + num(dev.back()) + "; ";
  }
  bool monotone = true;
  for (std::size_t k = 1; k < dev.size(); ++k) monotone = monotone && dev[k] < dev[k - 1] + 3 * (noise[k] + noise[k - 1]);
  const MvmParams p3 = cx(3);
  const auto sp3 = ProposalSpec::for_params(p3);
  const double r3 = forecast_acceptance(p3, sp3, false).asymptotic_rate;
  const double err3 = std::abs(r3 - 0.125 / std::sqrt(7.0));
  detail += "t=3 rate error " + num(err3);
  return {monotone && dev.back() < 0.05 && err3 < 1e-12, detail};
}

Outcome derivatives() {
  std::mt19937_64 gen(808);
  double worst_g = 0.0, worst_h = 0.0;
  for (int k = 0; k < 500; ++k) {
    const std::size_t p = 1 + k % 5;
    const MvmParams params = testing::random_params(p, 8.0, 4.0, gen);
    const TorusPoint theta = testing::random_point(p, gen);
    const Vector g = gradient(params, theta);
    const Vector fg = testing::fd_gradient(params, theta, 1e-5);
    const Matrix h = hessian(params, theta);
    const Matrix fh = testing::fd_hessian(params, theta, 1e-5);
    for (std::size_t i = 0; i < p; ++i) {
      worst_g = std::max(worst_g, testing::rel_error(g[i], fg[i]));
      for (std::size_t j = 0; j < p; ++j) worst_h = std::max(worst_h, testing::rel_error(h(i, j), fh(i, j)));
    }
  }
  return {worst_g < 1e-6 && worst_h < 1e-6, "gradient " + num(worst_g) + ", Hessian " + num(worst_h)};
}

Outcome bound_validity() {
  std::mt19937_64 gen(909);
  double worst = -1e300;
  int sets = 0;
  while (sets < 10) {
    const std::size_t p = 1 + sets % 4;
    const MvmParams params = testing::random_params(p, 12.0, 3.0, gen);
    if (!certify_unimodal(params).positive_definite) continue;
    ++sets;
    const auto spec = ProposalSpec::for_params(params);
    const double log_c = log_envelope_constant(params, spec);
    for (int k = 0; k < 100000; ++k) {
      const TorusPoint theta = testing::random_point(p, gen);
      std::vector<double> rel(p);
      for (std::size_t i = 0; i < p; ++i) rel[i] = theta[i] - params.mu()[i];
      const double slack = exponent(params, theta) - (log_c + log_proposal_density(spec, TorusPoint(rel)));
      worst = std::max(worst, slack);
    }
  }
  return {worst <= 1e-10, "max f - log(C g) over 1e6 points: " + num(worst)};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "mvm_acceptance";
  fs::create_directories(dir);
  const fs::path params = dir / "params.json";
  std::ofstream(params) << R"({"p": 3, "mu": [1, 2, 3], "kappa": [4, 4, 4],
    "lambda": [[0, -2, 2], [-2, 0, 2], [2, 2, 0]], "seed": 42})";
  const auto run = [&](const std::string& out, const std::string& extra) {
    const std::string cmd = std::string(MVM_CLI_BINARY) + " --params " + params.string() + " --out " +
                            (dir / out).string() + " sample --n 20000 " + extra + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const int c1 = run("a.csv", "");
  const int c2 = run("b.csv", "");
  const int c3 = run("c.csv", "--shards 4");
  const std::string a = slurp(dir / "a.csv");
  const bool repeat = !a.empty() && a == slurp(dir / "b.csv");
  const bool sharded = a == slurp(dir / "c.csv");
  const bool ok = c1 == 0 && c2 == 0 && c3 == 0 && repeat && sharded;
  return {ok, std::string("repeat identical: ") + (repeat ? "yes" : "no") + ", 4 shards identical: " +
                  (sharded ? "yes" : "no") + ", " + std::to_string(a.size()) + " bytes"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"counterexample spectra", spectra},
      {"two isolated modes", two_modes},
      {"six isolated modes", six_modes},
      {"extended ring mode", extended_ring},
      {"certificate consistency sweep", certificate_sweep},
      {"sampler exactness", sampler_exactness},
      {"acceptance-rate asymptotics", acceptance_asymptotics},
      {"derivative correctness", derivatives},
      {"envelope bound validity", bound_validity},
      {"sampling determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k + 1 << " (" << criteria[k].first << "): " << o.detail
              << " [" << num(secs) << " s]" << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
