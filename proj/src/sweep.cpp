#include "ness/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "ness/lindblad.hpp"
#include "ness/transfer.hpp"

#ifndef NESS_VERSION
#define NESS_VERSION "unknown"
#endif

namespace ness {
namespace {

double parse_double(std::string_view s) {
  const std::string str(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + str + "'");
  }
  if (used != str.size()) throw UsageError("not a number: '" + str + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string describe(const ModelParams& p) {
  std::ostringstream os;
  os << "N=" << p.N << " h=" << format_number(p.h) << " gamma=" << format_number(p.gamma)
     << " theta=" << format_number(p.theta) << " f=" << format_number(p.f);
  return os.str();
}

bool uses_mps(const SweepSpec& s) {
  return s.observable != Observable::approx && s.engine != Engine::ed;
}
bool uses_ed(const SweepSpec& s) {
  return s.observable != Observable::approx && s.engine != Engine::mps;
}

double ed_current(const ModelParams& p, double tol) {
  const auto sol = steady_state(build_liouvillian(p), SteadyStateOptions{.tol = tol});
  const auto currents = bond_currents(sol);
  double sum = 0.0;
  for (double j : currents) sum += j;
  return sum / static_cast<double>(currents.size());
}

std::vector<double> ed_profile(const ModelParams& p, double tol) {
  return magnetization_profile(steady_state(build_liouvillian(p), SteadyStateOptions{.tol = tol}));
}

const std::vector<std::string> kParamColumns = {"N", "h", "gamma", "theta", "f"};

std::vector<std::string> param_cells(const ModelParams& p) {
  return {std::to_string(p.N), format_number(p.h), format_number(p.gamma),
          format_number(p.theta), format_number(p.f)};
}

SweepSpec base_spec(std::string label, SweepAxis axis, std::vector<double> values,
                    ModelParams fixed) {
  SweepSpec s;
  s.label = std::move(label);
  s.axis = axis;
  s.values = std::move(values);
  s.fixed = fixed;
  return s;
}

std::string short_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::h: return "h";
    case SweepAxis::gamma: return "gamma";
    case SweepAxis::N: return "N";
    case SweepAxis::theta: return "theta";
    case SweepAxis::f: return "f";
  }
  return "?";
}

std::string_view to_string(Engine engine) {
  switch (engine) {
    case Engine::mps: return "mps";
    case Engine::ed: return "ed";
    case Engine::both: return "both";
  }
  return "?";
}

std::string_view to_string(Observable observable) {
  switch (observable) {
    case Observable::current: return "current";
    case Observable::density: return "density";
    case Observable::approx: return "approx";
  }
  return "?";
}

SweepAxis parse_axis(std::string_view s) {
  for (auto a : {SweepAxis::h, SweepAxis::gamma, SweepAxis::N, SweepAxis::theta, SweepAxis::f})
    if (to_string(a) == s) return a;
  throw UsageError("unknown axis '" + std::string(s) + "'");
}

Engine parse_engine(std::string_view s) {
  for (auto e : {Engine::mps, Engine::ed, Engine::both})
    if (to_string(e) == s) return e;
  throw UsageError("unknown engine '" + std::string(s) + "'");
}

Observable parse_observable(std::string_view s) {
  for (auto o : {Observable::current, Observable::density, Observable::approx})
    if (to_string(o) == s) return o;
  throw UsageError("unknown observable '" + std::string(s) + "'");
}

std::vector<double> expand_range(const ValueRange& r) {
  if (r.count < 1) throw UsageError("range count must be >= 1");
  if (!std::isfinite(r.start) || !std::isfinite(r.stop))
    throw UsageError("range endpoints must be finite");
  if (r.spacing == Spacing::log && !(r.start > 0.0 && r.stop > 0.0))
    throw UsageError("log spacing requires positive endpoints");
  std::vector<double> out(r.count);
  if (r.count == 1) {
    out[0] = r.start;
    return out;
  }
  for (int k = 0; k < r.count; ++k) {
    const double t = static_cast<double>(k) / (r.count - 1);
    out[k] = r.spacing == Spacing::linear
                 ? r.start + t * (r.stop - r.start)
                 : std::exp(std::log(r.start) + t * (std::log(r.stop) - std::log(r.start)));
  }
  out.front() = r.start;
  out.back() = r.stop;
  return out;
}

ValueRange parse_range(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3 && parts.size() != 4)
    throw UsageError("range must be start:stop:count[:log]");
  ValueRange r;
  r.start = parse_double(parts[0]);
  r.stop = parse_double(parts[1]);
  const double count = parse_double(parts[2]);
  if (count != std::floor(count) || count < 1) throw UsageError("range count must be a positive integer");
  r.count = static_cast<int>(count);
  if (parts.size() == 4) {
    if (parts[3] == "log") r.spacing = Spacing::log;
    else if (parts[3] == "lin" || parts[3] == "linear") r.spacing = Spacing::linear;
    else throw UsageError("range spacing must be 'log' or 'linear'");
  }
  return r;
}

std::vector<double> parse_values(std::string_view text) {
  std::vector<double> out;
  for (auto part : split(text, ',')) {
    if (part.empty()) throw UsageError("empty entry in value list");
    out.push_back(parse_double(part));
  }
  return out;
}

void validate(const SweepSpec& spec) {
  if (spec.values.empty()) throw UsageError("sweep has no values");
  if (!(spec.tol > 0.0)) throw UsageError("tol must be positive");
  std::vector<ModelParams> points;
  for (double v : spec.values) points.push_back(point_params(spec, v));
  for (const auto& p : points) {
    if (uses_mps(spec) && p.f != 1.0)
      throw UsageError("engine " + std::string(to_string(spec.engine)) +
                       " uses the transfer-matrix solution, which requires f = 1");
    if (uses_ed(spec) && p.N > kDenseSiteBudget)
      throw UsageError("engine " + std::string(to_string(spec.engine)) +
                       " needs N <= " + std::to_string(kDenseSiteBudget));
  }
}

ModelParams point_params(const SweepSpec& spec, double value) {
  ModelParams p = spec.fixed;
  switch (spec.axis) {
    case SweepAxis::h: p.h = value; break;
    case SweepAxis::gamma: p.gamma = value; break;
    case SweepAxis::theta: p.theta = value; break;
    case SweepAxis::f: p.f = value; break;
    case SweepAxis::N:
      if (value != std::floor(value) || value < 1 || value > 1e7)
        throw UsageError("N values must be positive integers");
      p.N = static_cast<int>(value);
      break;
  }
  return p;
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

SweepTable run_sweep(const SweepSpec& spec, const SweepOptions& opts) {
  return run_sweep(std::span<const SweepSpec>(&spec, 1), opts);
}

SweepTable run_sweep(std::span<const SweepSpec> series, const SweepOptions& opts) {
  if (series.empty()) throw UsageError("no sweep series");
  for (const auto& s : series) validate(s);
  const Observable observable = series.front().observable;
  const SweepAxis axis = series.front().axis;
  for (const auto& s : series)
    if (s.observable != observable || s.axis != axis)
      throw UsageError("all series in one table must share axis and observable");

  SweepTable table;
  table.comments.push_back(std::string("ness_sweep ") + NESS_VERSION);
  table.comments.push_back("units: exchange coupling = 1, hbar = 1");
  for (const auto& s : series) {
    table.comments.push_back("series=" + s.label + " axis=" + std::string(to_string(s.axis)) +
                             " engine=" + std::string(to_string(s.engine)) +
                             " observable=" + std::string(to_string(s.observable)) +
                             " points=" + std::to_string(s.values.size()) +
                             " tol=" + format_number(s.tol));
    table.comments.push_back("series=" + s.label + " fixed " + describe(s.fixed));
  }

  table.columns = {"series", "value"};
  table.columns.insert(table.columns.end(), kParamColumns.begin(), kParamColumns.end());
  table.columns.push_back("engine");
  if (observable == Observable::density) {
    for (const char* c : {"site", "sigma_z_mps", "sigma_z_ed", "abs_diff", "n_mps", "n_ed"})
      table.columns.push_back(c);
  } else {
    for (const char* c : {"J_mps", "J_ed", "rel_diff", "J_approx"}) table.columns.push_back(c);
  }
  table.columns.push_back("error");
  if (opts.timing) table.columns.push_back("wall_time_s");

  for (const auto& s : series) {
    for (double value : s.values) {
      ++table.points;
      const auto t0 = std::chrono::steady_clock::now();
      const ModelParams p = point_params(s, value);
      std::vector<std::string> head = {s.label, format_number(value)};
      const auto pc = param_cells(p);
      head.insert(head.end(), pc.begin(), pc.end());
      head.push_back(observable == Observable::approx ? "approx" : std::string(to_string(s.engine)));

      std::string error;
      auto record = [&error](const char* engine, const std::exception& e) {
        if (!error.empty()) error += "; ";
        error += std::string(engine) + ": " + e.what();
      };

      std::vector<std::vector<std::string>> body;
      if (observable == Observable::density) {
        std::vector<double> mps, ed;
        if (uses_mps(s)) {
          try { mps = magnon_density(p).sigma_z; } catch (const std::exception& e) { record("mps", e); }
        }
        if (uses_ed(s)) {
          try { ed = ed_profile(p, s.tol); } catch (const std::exception& e) { record("ed", e); }
        }
        const std::size_t sites = std::max(mps.size(), ed.size());
        for (std::size_t i = 0; i < sites; ++i) {
          std::vector<std::string> cells = {std::to_string(i + 1)};
          cells.push_back(i < mps.size() ? format_number(mps[i]) : "");
          cells.push_back(i < ed.size() ? format_number(ed[i]) : "");
          cells.push_back(i < mps.size() && i < ed.size() ? format_number(std::abs(mps[i] - ed[i])) : "");
          cells.push_back(i < mps.size() ? format_number(0.5 * (1.0 + mps[i])) : "");
          cells.push_back(i < ed.size() ? format_number(0.5 * (1.0 + ed[i])) : "");
          body.push_back(std::move(cells));
        }
        if (body.empty()) body.push_back({"", "", "", "", "", ""});
      } else {
        std::optional<double> mps, ed, approx;
        if (uses_mps(s)) {
          try { mps = spin_current(p).J; } catch (const std::exception& e) { record("mps", e); }
        }
        if (uses_ed(s)) {
          try { ed = ed_current(p, s.tol); } catch (const std::exception& e) { record("ed", e); }
        }
        try { approx = approx_current(p); } catch (const std::exception& e) {
          if (observable == Observable::approx) record("approx", e);
        }
        std::vector<std::string> cells;
        cells.push_back(mps ? format_number(*mps) : "");
        cells.push_back(ed ? format_number(*ed) : "");
        cells.push_back(mps && ed ? format_number(std::abs(*mps - *ed) / std::max(std::abs(*ed), 1e-12))
                                  : "");
        cells.push_back(approx ? format_number(*approx) : "");
        body.push_back(std::move(cells));
      }
      if (!error.empty()) ++table.failed_points;
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      for (auto& cells : body) {
        std::vector<std::string> row = head;
        row.insert(row.end(), cells.begin(), cells.end());
        row.push_back(error);
        if (opts.timing) row.push_back(format_number(wall));
        table.rows.push_back(std::move(row));
      }
    }
  }
  return table;
}

void write_csv(std::ostream& os, const SweepTable& table) {
  for (const auto& c : table.comments) os << "# " << c << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << csv_field(table.columns[i]);
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
    os << '\n';
  }
}

std::vector<std::string> preset_names() {
  return {"fig2a", "fig2b", "fig3a", "fig3b", "fig3c", "fig3d", "fig4a",
          "fig4b", "fig5a", "fig5b", "fig6a", "fig6b", "fig7a", "fig7b"};
}

std::vector<SweepSpec> preset(std::string_view name) {
  constexpr double pi = std::numbers::pi;
  const ModelParams base{.N = 100, .h = 0.0, .gamma = 1.0, .theta = 0.0, .f = 1.0};
  std::vector<SweepSpec> out;

  if (name == "fig2a") {
    // J vs gamma at h = 0, theta = 0 for several N.
    const auto gammas = expand_range({1e-5, 10.0, 61, Spacing::log});
    for (int n : {10, 50, 100, 500}) {
      ModelParams p = base;
      p.N = n;
      out.push_back(base_spec("N=" + std::to_string(n), SweepAxis::gamma, gammas, p));
    }
  } else if (name == "fig2b") {
    // J vs N at h = 0, theta = 0 for several gamma.
    std::vector<double> sizes;
    for (double v : expand_range({10.0, 1000.0, 31, Spacing::log})) {
      const double n = std::round(v);
      if (sizes.empty() || sizes.back() != n) sizes.push_back(n);
    }
    for (double g : {1.0, 1e-1, 1e-2, 1e-3}) {
      ModelParams p = base;
      p.gamma = g;
      out.push_back(base_spec("gamma=" + short_number(g), SweepAxis::N, sizes, p));
    }
  } else if (name == "fig3a") {
    // N^2 J vs h at gamma = 1.
    const auto hs = expand_range({-4.0, 4.0, 161, Spacing::linear});
    for (int n : {10, 20, 50, 100}) {
      ModelParams p = base;
      p.N = n;
      out.push_back(base_spec("N=" + std::to_string(n), SweepAxis::h, hs, p));
    }
  } else if (name == "fig3b") {
    // J / gamma vs h at N = 100 for gamma around 1/N.
    const auto hs = expand_range({-0.5, 0.5, 201, Spacing::linear});
    for (double g : {1e-3, 5e-3, 1e-2, 2e-2, 1e-1}) {
      ModelParams p = base;
      p.gamma = g;
      out.push_back(base_spec("gamma=" + short_number(g), SweepAxis::h, hs, p));
    }
  } else if (name == "fig3c" || name == "fig3d") {
    // J / gamma vs h at gamma = 1e-5.
    const bool d = name == "fig3d";
    const auto hs = d ? expand_range({-0.1, 0.1, 200, Spacing::linear})
                      : expand_range({-0.5, 0.5, 201, Spacing::linear});
    const std::vector<int> sizes = d ? std::vector<int>{100, 200, 500}
                                     : std::vector<int>{10, 20, 50, 100};
    for (int n : sizes) {
      ModelParams p = base;
      p.N = n;
      p.gamma = 1e-5;
      out.push_back(base_spec("N=" + std::to_string(n), SweepAxis::h, hs, p));
    }
  } else if (name == "fig4a" || name == "fig4b") {
    // Exact diagonalization at N = 6 for f < 1; f = 1 carries both engines.
    const auto hs = expand_range({-2.0, 2.0, 41, Spacing::linear});
    for (double f : {0.25, 0.5, 0.75, 1.0}) {
      ModelParams p = base;
      p.N = 6;
      p.gamma = name == "fig4a" ? 1e-5 : 1.0;
      p.f = f;
      SweepSpec s = base_spec("f=" + short_number(f), SweepAxis::h, hs, p);
      s.engine = f == 1.0 ? Engine::both : Engine::ed;
      out.push_back(std::move(s));
    }
  } else if (name == "fig5a") {
    // J / gamma vs N h at gamma = 1e-5, small N.
    for (int n : {5, 10, 15, 20}) {
      ModelParams p = base;
      p.N = n;
      p.gamma = 1e-5;
      out.push_back(base_spec("N=" + std::to_string(n), SweepAxis::h,
                              expand_range({-10.0 / n, 10.0 / n, 201, Spacing::linear}), p));
    }
  } else if (name == "fig5b") {
    // J / gamma vs N h at N = 15.
    const auto hs = expand_range({-10.0 / 15, 10.0 / 15, 201, Spacing::linear});
    for (double g : {1e-5, 1e-4, 1e-3, 1e-2}) {
      ModelParams p = base;
      p.N = 15;
      p.gamma = g;
      out.push_back(base_spec("gamma=" + short_number(g), SweepAxis::h, hs, p));
    }
  } else if (name == "fig6a" || name == "fig6b") {
    // J vs h at N = 500 for a representative set of twist angles.
    const bool a = name == "fig6a";
    const auto hs = a ? expand_range({-0.1, 0.1, 201, Spacing::linear})
                      : expand_range({-4.0, 4.0, 161, Spacing::linear});
    for (double frac : {0.0, 0.25, 0.5, 0.75, 0.95}) {
      ModelParams p = base;
      p.N = 500;
      p.gamma = a ? 1e-4 : 1.0;
      p.theta = frac * pi;
      out.push_back(base_spec("theta=" + short_number(frac) + "pi", SweepAxis::h, hs, p));
    }
  } else if (name == "fig7a" || name == "fig7b") {
    // Magnon density profiles at N = 500, gamma = 1e-5, theta = 0.
    ModelParams p = base;
    p.N = 500;
    p.gamma = 1e-5;
    const std::vector<double> hs = name == "fig7a"
                                       ? std::vector<double>{-0.002, -0.005, -0.008, -0.012, -0.02}
                                       : std::vector<double>{0.002, 0.005, 0.01, 0.02, 0.05};
    SweepSpec s = base_spec("profiles", SweepAxis::h, hs, p);
    s.observable = Observable::density;
    out.push_back(std::move(s));
  } else {
    throw UsageError("unknown preset '" + std::string(name) + "'");
  }
  return out;
}

std::optional<double> detect_plateau_edge(std::span<const double> h, std::span<const double> J,
                                          double min_log_change) {
  if (h.size() != J.size()) throw InvalidParameter("h and J must have equal length");
  std::optional<double> edge;
  double best = 0.0;
  double h_lo = 0.0, h_hi = 0.0;
  bool any = false;
  for (std::size_t k = 0; k + 1 < h.size(); ++k) {
    if (!(h[k + 1] > h[k])) throw InvalidParameter("h must be strictly increasing");
    if (h[k + 1] > 0.0) break;
    if (!(J[k] > 0.0) || !(J[k + 1] > 0.0)) throw InvalidParameter("J must be positive");
    if (!any) h_lo = h[k];
    h_hi = h[k + 1];
    any = true;
    const double slope = std::abs(std::log(J[k + 1]) - std::log(J[k])) / (h[k + 1] - h[k]);
    if (slope > best) {
      best = slope;
      edge = 0.5 * (h[k] + h[k + 1]);
    }
  }
  if (!any || best * (h_hi - h_lo) < min_log_change) return std::nullopt;
  return edge;
}

LineFit fit_loglog(std::span<const double> x, std::span<const double> y, double x_min,
                   double x_max) {
  if (x.size() != y.size()) throw InvalidParameter("x and y must have equal length");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < x_min || x[i] > x_max) continue;
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidParameter("log-log fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  const double denom = n * sxx - sx * sx;
  if (n < 2 || denom == 0.0) throw InvalidParameter("log-log fit needs two distinct points in the window");
  const double slope = (n * sxy - sx * sy) / denom;
  return LineFit{slope, (sy - slope * sx) / n};
}

PhysicalReport convert_units(const ModelParams& params, const UnitConversion& uc) {
  params.validate();
  if (!(uc.exchange_joules > 0.0)) throw InvalidParameter("exchange constant must be positive");
  const double to_hz = uc.gamma_to_hz();
  const double to_tesla = uc.h_to_tesla();
  return PhysicalReport{params.gamma * to_hz, params.h * to_tesla,
                        critical_gamma(params.N) * to_hz, to_tesla / params.N,
                        std::abs(critical_field(params.N)) * to_tesla};
}

}  // namespace ness
