// Parameter sweeps of the boundary-driven Heisenberg chain steady state.
//
//   ness_sweep --axis h --range -0.1:0.1:200 --N 500 --gamma 1e-5
//   ness_sweep --preset fig3d --out fig3d.csv
//
// Exit codes: 0 success, 1 usage error, 2 every sweep point failed.

#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "ness/sweep.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitAllFailed = 2;

void append_slopes(ness::SweepTable& table, double lo, double hi) {
  const auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < table.columns.size(); ++i)
      if (table.columns[i] == name) return i;
    throw ness::UsageError("--fit-window needs a current sweep");
  };
  const std::size_t series = col("series"), value = col("value");
  const std::size_t mps = col("J_mps"), ed = col("J_ed");
  std::vector<std::string> order;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> data;
  for (const auto& row : table.rows) {
    const std::string& j = !row[mps].empty() ? row[mps] : row[ed];
    if (j.empty()) continue;
    if (!data.count(row[series])) order.push_back(row[series]);
    data[row[series]].first.push_back(std::stod(row[value]));
    data[row[series]].second.push_back(std::stod(j));
  }
  for (const auto& s : order) {
    const auto& [x, y] = data[s];
    try {
      const auto fit = ness::fit_loglog(x, y, lo, hi);
      table.comments.push_back("series=" + s + " loglog_slope=" + ness::format_number(fit.slope) +
                               " window=" + ness::format_number(lo) + ":" +
                               ness::format_number(hi));
    } catch (const ness::Error& e) {
      table.comments.push_back("series=" + s + " loglog_slope unavailable: " + e.what());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady-state spin current and magnon density of the boundary-driven "
               "Heisenberg chain"};
  // Free -h for the boundary field.
  app.set_help_flag("--help", "Print this help message and exit");

  std::string axis, values, range, preset, out_path, fit_window;
  std::string engine = "mps", observable = "current";
  ness::ModelParams fixed{};
  double tol = 1e-10;
  bool units = false, timing = false, list_presets = false;
  double exchange = ness::UnitConversion{}.exchange_joules;

  app.add_option("--axis", axis, "Swept parameter: h, gamma, N, theta or f");
  auto* values_opt = app.add_option("--values", values, "Comma-separated sweep values");
  auto* range_opt = app.add_option("--range", range, "start:stop:count[:log]");
  values_opt->excludes(range_opt);
  app.add_option("--N", fixed.N, "Chain length")->capture_default_str();
  app.add_option("--h", fixed.h, "Boundary field")->capture_default_str();
  app.add_option("--gamma", fixed.gamma, "Bath coupling")->capture_default_str();
  app.add_option("--theta", fixed.theta, "Twist angle (radians)")->capture_default_str();
  app.add_option("--f", fixed.f, "Bath polarization")->capture_default_str();
  app.add_option("--engine", engine, "mps, ed or both")->capture_default_str();
  app.add_option("--observable", observable, "current, density or approx")->capture_default_str();
  app.add_option("--preset", preset, "Named figure preset (see --list-presets)");
  app.add_option("--out", out_path, "Output CSV path (default stdout)");
  app.add_option("--tol", tol, "Residual tolerance of the exact-diagonalization solver")
      ->capture_default_str();
  app.add_flag("--units", units, "Add physical-unit conversions to the header");
  app.add_option("--exchange-joules", exchange, "Exchange constant for --units")
      ->capture_default_str();
  app.add_option("--fit-window", fit_window,
                 "lo:hi window for a log-log slope fit of J against the swept value");
  app.add_flag("--timing", timing, "Add a wall-time column");
  app.add_flag("--list-presets", list_presets, "Print preset names and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (list_presets) {
    for (const auto& name : ness::preset_names()) std::cout << name << '\n';
    return 0;
  }

  ness::SweepTable table;
  try {
    std::vector<ness::SweepSpec> series;
    if (!preset.empty()) {
      series = ness::preset(preset);
      for (auto& s : series) s.tol = tol;
    } else {
      if (axis.empty()) throw ness::UsageError("--axis or --preset is required");
      ness::SweepSpec s;
      s.axis = ness::parse_axis(axis);
      s.engine = ness::parse_engine(engine);
      s.observable = ness::parse_observable(observable);
      s.fixed = fixed;
      s.tol = tol;
      if (!values.empty()) s.values = ness::parse_values(values);
      else if (!range.empty()) s.values = ness::expand_range(ness::parse_range(range));
      else throw ness::UsageError("--values or --range is required");
      series.push_back(std::move(s));
    }

    table = ness::run_sweep(series, ness::SweepOptions{.timing = timing});

    if (!fit_window.empty()) {
      const auto colon = fit_window.find(':');
      if (colon == std::string::npos) throw ness::UsageError("--fit-window must be lo:hi");
      const auto lo = ness::parse_values(fit_window.substr(0, colon));
      const auto hi = ness::parse_values(fit_window.substr(colon + 1));
      if (lo.size() != 1 || hi.size() != 1) throw ness::UsageError("--fit-window must be lo:hi");
      append_slopes(table, lo[0], hi[0]);
    }
    if (units) {
      const ness::UnitConversion uc{exchange};
      for (const auto& s : series) {
        // gamma* and B* depend on N, so an N sweep gets one line per size.
        std::vector<ness::ModelParams> points = {s.fixed};
        if (s.axis == ness::SweepAxis::N) {
          points.clear();
          for (double v : s.values) points.push_back(ness::point_params(s, v));
        }
        for (const auto& p : points) {
          const auto r = ness::convert_units(p, uc);
          table.comments.push_back(
              "series=" + s.label + " N=" + std::to_string(p.N) +
              " units exchange_J=" + ness::format_number(exchange) +
              " gamma_Hz=" + ness::format_number(r.gamma_hz) +
              " h_T=" + ness::format_number(r.h_tesla) +
              " gamma_star_Hz=" + ness::format_number(r.gamma_star_hz) +
              " B_star_T=" + ness::format_number(r.b_star_tesla) +
              " plateau_field_T=" + ness::format_number(r.plateau_field_tesla));
        }
      }
    }
  } catch (const ness::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ness::InvalidParameter& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (out_path.empty()) {
    ness::write_csv(std::cout, table);
  } else {
    std::ofstream os(out_path);
    if (!os) {
      std::cerr << "cannot open " << out_path << '\n';
      return kExitUsage;
    }
    ness::write_csv(os, table);
  }
  if (table.failed_points == table.points) {
    std::cerr << "all " << table.points << " sweep points failed\n";
    return kExitAllFailed;
  }
  return 0;
}
