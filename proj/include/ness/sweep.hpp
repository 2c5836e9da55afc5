#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ness/errors.hpp"
#include "ness/model.hpp"

namespace ness {

// Bad sweep request (engine/parameter mismatch, malformed range, unknown preset).
class UsageError : public Error {
 public:
  using Error::Error;
};

enum class SweepAxis { h, gamma, N, theta, f };
enum class Engine { mps, ed, both };
enum class Observable { current, density, approx };
enum class Spacing { linear, log };

std::string_view to_string(SweepAxis axis);
std::string_view to_string(Engine engine);
std::string_view to_string(Observable observable);
SweepAxis parse_axis(std::string_view s);
Engine parse_engine(std::string_view s);
Observable parse_observable(std::string_view s);

struct ValueRange {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;
  Spacing spacing = Spacing::linear;
};

// Inclusive endpoints. Log spacing requires positive endpoints.
std::vector<double> expand_range(const ValueRange& range);
// "start:stop:count" or "start:stop:count:log".
ValueRange parse_range(std::string_view text);
// Comma-separated list of numbers.
std::vector<double> parse_values(std::string_view text);

// Largest chain the dense Lindblad solver accepts.
inline constexpr int kDenseSiteBudget = 6;

struct SweepSpec {
  std::string label = "default";
  SweepAxis axis = SweepAxis::h;
  std::vector<double> values;
  ModelParams fixed{};
  Engine engine = Engine::mps;
  Observable observable = Observable::current;
  double tol = 1e-10;
};

// Throws UsageError.
void validate(const SweepSpec& spec);

// Parameters of one sweep point; N values must be positive integers.
ModelParams point_params(const SweepSpec& spec, double value);

struct SweepOptions {
  bool timing = false;  // adds a wall_time_s column (breaks bit-stability)
};

struct SweepTable {
  std::vector<std::string> comments;  // written with a leading "# "
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  int points = 0;
  int failed_points = 0;
};

// Runs every series in order. Per-point failures land in the error column.
SweepTable run_sweep(std::span<const SweepSpec> series, const SweepOptions& opts = {});
SweepTable run_sweep(const SweepSpec& spec, const SweepOptions& opts = {});

void write_csv(std::ostream& os, const SweepTable& table);

// Fixed-width round-trip formatting used for every number in the CSV.
std::string format_number(double x);

std::vector<std::string> preset_names();
// Throws UsageError for an unknown name.
std::vector<SweepSpec> preset(std::string_view name);

// h of the steepest |d log J / dh| among segments with h <= 0, as the segment
// midpoint. Input must be sorted by increasing h with J > 0. Returns nullopt
// when the steepest slope times the width of the negative-h window is below
// min_log_change.
std::optional<double> detect_plateau_edge(std::span<const double> h, std::span<const double> J,
                                          double min_log_change = 2.0);

struct LineFit {
  double slope;
  double intercept;
};

// Least squares of log y against log x over points with x in [x_min, x_max].
LineFit fit_loglog(std::span<const double> x, std::span<const double> y, double x_min,
                   double x_max);

namespace constants {
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double bohr_magneton = 9.2740100783e-24;  // J / T
}  // namespace constants

struct UnitConversion {
  double exchange_joules = 1e-22;
  double gamma_to_hz() const { return exchange_joules / constants::hbar; }
  double h_to_tesla() const { return exchange_joules / constants::bohr_magneton; }
};

struct PhysicalReport {
  double gamma_hz;
  double h_tesla;
  double gamma_star_hz;        // J / (hbar N)
  double b_star_tesla;         // J / (mu_B N)
  double plateau_field_tesla;  // |h*| J / mu_B with h* = -5/N
};

PhysicalReport convert_units(const ModelParams& params, const UnitConversion& uc = {});

}  // namespace ness
