// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ness/lindblad.hpp"
#include "ness/sweep.hpp"
#include "ness/transfer.hpp"

using namespace ness;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass;
  std::string detail;
};

ModelParams params(int N, double gamma, double h, double theta, double f = 1.0) {
  return ModelParams{.N = N, .h = h, .gamma = gamma, .theta = theta, .f = f};
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

// Criteria 1 and 2 share the ED solves.
struct GridResult {
  double worst_current = 0.0;
  double worst_profile = 0.0;
  double worst_uniformity = 0.0;  // spread / (1e-8 |mean| + 1e-12)
  int points = 0;
  int failures = 0;
  std::string first_failure;
  double seconds = 0.0;
};

GridResult run_grid() {
  GridResult g;
  const auto t0 = std::chrono::steady_clock::now();
  for (int N : {2, 3, 4, 5, 6})
    for (double gamma : {1e-3, 0.1, 1.0})
      for (double h : {-1.0, -0.1, 0.0, 0.1, 1.0})
        for (double theta : {0.0, 0.5, 2.0}) {
          ++g.points;
          const auto p = params(N, gamma, h, theta);
          try {
            const auto sol = steady_state(build_liouvillian(p));
            const auto currents = bond_currents(sol);
            const auto profile = magnetization_profile(sol);
            const double j_ed = mean(currents);
            const double j_mps = spin_current(p).J;
            g.worst_current =
                std::max(g.worst_current, std::abs(j_mps - j_ed) / std::max(std::abs(j_ed), 1e-12));
            const auto mps_profile = magnon_density(p).sigma_z;
            for (int i = 0; i < N; ++i)
              g.worst_profile = std::max(g.worst_profile, std::abs(mps_profile[i] - profile[i]));
            const auto [lo, hi] = std::minmax_element(currents.begin(), currents.end());
            g.worst_uniformity =
                std::max(g.worst_uniformity, (*hi - *lo) / (1e-8 * std::abs(j_ed) + 1e-12));
          } catch (const std::exception& e) {
            if (g.failures++ == 0)
              g.first_failure = fmt("N=%d gamma=%g h=%g theta=%g: %s", N, gamma, h, theta, e.what());
          }
        }
  g.seconds = seconds_since(t0);
  return g;
}

Outcome criterion1(const GridResult& g) {
  const bool ok = g.failures == 0 && g.worst_current <= 1e-6 && g.worst_profile <= 1e-6 &&
                  g.seconds <= 120.0;
  std::string d = fmt("%d points, max rel current diff %.3g, max profile diff %.3g, %.1f s",
                      g.points, g.worst_current, g.worst_profile, g.seconds);
  if (g.failures) d += fmt(", %d solver failures (first: %s)", g.failures, g.first_failure.c_str());
  return {ok, d};
}

Outcome criterion2(const GridResult& g) {
  return {g.failures == 0 && g.worst_uniformity <= 1.0,
          fmt("max spread / (1e-8 |mean| + 1e-12) = %.3g over %d points", g.worst_uniformity,
              g.points - g.failures)};
}

Outcome criterion3() {
  std::vector<double> n, j;
  for (int N = 100; N <= 500; N += 50) {
    n.push_back(N);
    j.push_back(spin_current(params(N, 1.0, 0.0, 0.0)).J);
  }
  const double slope = fit_loglog(n, j, 100.0, 500.0).slope;
  const double coeff = j.back() * 500.0 * 500.0 / (kPi * kPi);
  const bool ok = std::abs(slope + 2.0) <= 0.05 && coeff >= 0.95 && coeff <= 1.05;
  return {ok, fmt("slope %.4f (need -2 +/- 0.05), J gamma N^2 / pi^2 at N=500 = %.4f (need [0.95, 1.05])",
                  slope, coeff)};
}

Outcome criterion4() {
  const double j100 = spin_current(params(100, 1e-5, 0.0, 0.0)).J;
  const double j500 = spin_current(params(500, 1e-5, 0.0, 0.0)).J;
  const double dev = std::abs(j500 / j100 - 1.0);
  return {dev <= 0.02, fmt("|J(500)/J(100) - 1| = %.3g", dev)};
}

Outcome criterion5() {
  bool ok = true;
  std::string d;
  for (int N : {500, 200}) {
    std::vector<double> h, j;
    for (double v : expand_range({-20.0 / N, 0.0, 201, Spacing::linear})) {
      h.push_back(v);
      j.push_back(spin_current(params(N, 1e-5, v, 0.0)).J);
    }
    const auto edge = detect_plateau_edge(h, j);
    const bool in = edge && *edge >= -10.0 / N && *edge <= -2.5 / N;
    ok = ok && in;
    if (!d.empty()) d += "; ";
    d += edge ? fmt("N=%d edge %.5g in [%.4g, %.4g]: %s", N, *edge, -10.0 / N, -2.5 / N,
                    in ? "yes" : "no")
              : fmt("N=%d no edge detected", N);
  }
  return {ok, d};
}

Outcome criterion6() {
  auto J = [](int N) { return spin_current(params(N, 1e-2, 0.0, 0.0)).J; };
  const double small = J(50) / J(25);
  const double large = J(400) / J(200);
  return {small >= 0.9 && large <= 0.35,
          fmt("J(50)/J(25) = %.4f (need >= 0.9), J(400)/J(200) = %.4f (need <= 0.35)", small, large)};
}

Outcome criterion7() {
  const auto plus = params(100, 1.0, 0.5, 0.0);
  const auto minus = params(100, 1.0, -0.5, 0.0);
  const double jp = spin_current(plus).J, jm = spin_current(minus).J;
  const double rp = jp / approx_current(plus), rm = jm / approx_current(minus);
  const bool ok = jp != jm && std::abs(rp - 1.0) <= 0.1 && std::abs(rm - 1.0) <= 0.1;
  return {ok, fmt("J(+0.5) = %.6g, J(-0.5) = %.6g, J / approx = %.4f and %.4f (need within 10%%)",
                  jp, jm, rp, rm)};
}

Outcome criterion8() {
  const auto flat = magnon_density(params(500, 1e-5, 0.0, 0.0)).n;
  double worst_flat = 0.0;
  for (int i = 50; i <= 450; ++i) worst_flat = std::max(worst_flat, std::abs(flat[i - 1] - 0.5));
  const auto s = magnon_density(params(500, 1.0, 0.0, 0.0)).sigma_z;
  double worst_anti = 0.0;
  for (int i = 0; i < 500; ++i) worst_anti = std::max(worst_anti, std::abs(s[i] + s[499 - i]));
  return {worst_flat <= 0.05 && worst_anti <= 1e-9,
          fmt("max |n_i - 1/2| on [50, 450] = %.3g, max antisymmetry defect = %.3g", worst_flat,
              worst_anti)};
}

Outcome criterion9() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> log_gamma(-4.0, 1.0), field(-2.0, 2.0), angle(0.0, 3.0);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = params(10, std::pow(10.0, log_gamma(rng)), field(rng), angle(rng));
    const auto c = verify_commutator_identity(p, 8);
    worst = std::max({worst, c.commutator_deviation, c.commuting_deviation});
  }
  return {worst <= 1e-10, fmt("max relative deviation over 5 points = %.3g", worst)};
}

Outcome criterion10() {
  std::vector<double> js;
  for (double f : {0.0, 0.25, 0.5, 0.75, 1.0})
    js.push_back(mean(bond_currents(steady_state(build_liouvillian(params(4, 1e-2, 0.0, 0.0, f))))));
  bool monotone = true;
  for (std::size_t k = 1; k < js.size(); ++k) monotone = monotone && js[k] >= js[k - 1];
  return {std::abs(js[0]) <= 1e-10 && monotone,
          fmt("J(f) = %.3g, %.6g, %.6g, %.6g, %.6g", js[0], js[1], js[2], js[3], js[4])};
}

Outcome criterion11() {
  double worst_single = 0.0;
  for (auto [g, h] : {std::pair{1.0, 0.0}, std::pair{1e-5, -0.01}, std::pair{1e-2, 2.0}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const double j = spin_current(params(2000, g, h, 0.0)).J;
    worst_single = std::max(worst_single, seconds_since(t0));
    if (!(j > 0.0)) return {false, fmt("non-positive current at gamma=%g h=%g", g, h)};
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto table = run_sweep(preset("fig3d"));
  const double sweep = seconds_since(t0);
  const bool ok = worst_single <= 2.0 && sweep <= 60.0 && table.points == 600 &&
                  table.failed_points == 0;
  return {ok, fmt("N=2000 current %.3f s (need <= 2), fig3d %d points %.2f s (need <= 60), %d failed",
                  worst_single, table.points, sweep, table.failed_points)};
}

}  // namespace

int main() {
  const GridResult grid = run_grid();
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"cross-oracle equivalence", [&] { return criterion1(grid); }},
      {"bond-current uniformity", [&] { return criterion2(grid); }},
      {"sub-diffusive scaling", criterion3},
      {"ballistic plateau", criterion4},
      {"plateau edge", criterion5},
      {"gamma* crossover", criterion6},
      {"rectification", criterion7},
      {"density profiles", criterion8},
      {"commutator identity", criterion9},
      {"f < 1 properties", criterion10},
      {"performance", criterion11},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
