#include "ness/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ness {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Streaming log-sum-exp.
class LogSum {
 public:
  void add(double x) {
    if (x == kNegInf) return;
    if (x <= max_) {
      sum_ += std::exp(x - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - x) + 1.0;
      max_ = x;
    }
  }
  double value() const { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

double log_sum3(double a, double b, double c) {
  const double m = std::max({a, b, c});
  if (m == kNegInf) return kNegInf;
  return m + std::log(std::exp(a - m) + std::exp(b - m) + std::exp(c - m));
}

struct LogTables {
  std::vector<double> diag, upper, lower;
};

LogTables log_tables(const TransferOperators& ops) {
  LogTables t;
  auto to_log = [](const std::vector<double>& v) {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::log(x); });
    return out;
  };
  t.diag = to_log(ops.b0_diag);
  t.upper = to_log(ops.b0_upper);
  t.lower = to_log(ops.b0_lower);
  return t;
}

ScaledVector row_step_impl(const ScaledVector& v, const LogTables& t) {
  const int dim = v.dim();
  const int support = std::min(dim, v.support + 1);
  ScaledVector out;
  out.log_v.assign(dim, kNegInf);
  out.log_scale = v.log_scale;
  out.support = support;
  for (int j = 0; j < support; ++j) {
    const double from_below = j >= 1 ? v.log_v[j - 1] + t.upper[j - 1] : kNegInf;
    const double from_same = j < v.support ? v.log_v[j] + t.diag[j] : kNegInf;
    const double from_above = j + 1 < v.support ? v.log_v[j + 1] + t.lower[j] : kNegInf;
    out.log_v[j] = log_sum3(from_below, from_same, from_above);
  }
  return out;
}

ScaledVector column_step_impl(const ScaledVector& v, const LogTables& t) {
  const int dim = v.dim();
  const int support = std::min(dim, v.support + 1);
  ScaledVector out;
  out.log_v.assign(dim, kNegInf);
  out.log_scale = v.log_scale;
  out.support = support;
  for (int k = 0; k < support; ++k) {
    const double from_same = k < v.support ? t.diag[k] + v.log_v[k] : kNegInf;
    const double from_above = k + 1 < v.support ? t.upper[k] + v.log_v[k + 1] : kNegInf;
    const double from_below = k >= 1 ? t.lower[k - 1] + v.log_v[k - 1] : kNegInf;
    out.log_v[k] = log_sum3(from_below, from_same, from_above);
  }
  return out;
}

void require_mps_params(const ModelParams& params) {
  params.validate();
  if (params.f != 1.0)
    throw InvalidParameter("transfer-matrix solution requires f = 1");
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

struct AuxOps {
  Eigen::MatrixXcd z, plus, minus;
};

AuxOps aux_representation(cplx p, int dim) {
  AuxOps s{Eigen::MatrixXcd::Zero(dim, dim), Eigen::MatrixXcd::Zero(dim, dim),
           Eigen::MatrixXcd::Zero(dim, dim)};
  for (int n = 0; n < dim; ++n) {
    s.z(n, n) = p - double(n);
    if (n + 1 < dim) {
      s.plus(n, n + 1) = double(n + 1);
      s.minus(n + 1, n) = 2.0 * p - double(n);
    }
  }
  return s;
}

double interior_max(const Eigen::MatrixXcd& m, int dim) {
  double worst = 0.0;
  auto interior = [dim](Eigen::Index idx) {
    return idx / dim < dim - 1 && idx % dim < dim - 1;
  };
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (!interior(r)) continue;
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (interior(c)) worst = std::max(worst, std::abs(m(r, c)));
  }
  return worst;
}

}  // namespace

Eigen::MatrixXd TransferOperators::b0_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    m(k, k) = b0_diag[k];
    if (k + 1 < dim) {
      m(k, k + 1) = b0_upper[k];
      m(k + 1, k) = b0_lower[k];
    }
  }
  return m;
}

Eigen::MatrixXd TransferOperators::bz_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k + 1 < dim; ++k) {
    m(k, k + 1) = bz_upper[k];
    m(k + 1, k) = bz_lower[k];
  }
  return m;
}

TransferOperators build_transfer_operators(const ModelParams& params, int dim) {
  params.validate();
  if (dim < 1) throw InvalidParameter("transfer dimension must be >= 1");

  TransferOperators ops;
  ops.dim = dim;
  ops.rep = representation_parameter(params.gamma, params.h);
  const cplx p = ops.rep.p;
  const cplx two_p = ops.rep.two_p;

  ops.b0_diag.resize(dim);
  ops.b0_upper.resize(dim - 1);
  ops.b0_lower.resize(dim - 1);
  ops.bz_upper.resize(dim - 1);
  ops.bz_lower.resize(dim - 1);
  for (int k = 0; k < dim; ++k) {
    ops.b0_diag[k] = 2.0 * std::norm(p - double(k));
    if (k + 1 < dim) {
      const double up = double(k + 1) * double(k + 1);
      const double down = std::norm(two_p - double(k));
      ops.b0_upper[k] = up;
      ops.b0_lower[k] = down;
      ops.bz_upper[k] = up;
      ops.bz_lower[k] = -down;
    }
  }

  // binom(2p, k) = binom(2p, k-1) (2p - k + 1) / k; the sign of
  // psi = -tan(theta/2) drops out since only psi^(2k) enters.
  ops.boundary_log_weights.assign(dim, kNegInf);
  ops.boundary_log_weights[0] = 0.0;
  if (params.theta > 0.0) {
    const double log_tan2 = 2.0 * std::log(std::abs(std::tan(0.5 * params.theta)));
    for (int k = 1; k < dim; ++k) {
      const double lw = ops.boundary_log_weights[k - 1] + log_tan2 +
                        std::log(std::norm(two_p - double(k - 1))) -
                        2.0 * std::log(double(k));
      if (!std::isfinite(lw))
        throw NumericRange("boundary weight " + std::to_string(k) + " is not finite");
      ops.boundary_log_weights[k] = lw;
    }
  }
  return ops;
}

ScaledVector ScaledVector::unit(int dim, int index) {
  if (index < 0 || index >= dim) throw InvalidParameter("unit vector index out of range");
  ScaledVector v;
  v.log_v.assign(dim, kNegInf);
  v.log_v[index] = 0.0;
  v.support = index + 1;
  return v;
}

ScaledVector ScaledVector::from_log_entries(std::span<const double> log_entries) {
  ScaledVector v;
  v.log_v.assign(log_entries.begin(), log_entries.end());
  v.support = 0;
  for (int k = 0; k < v.dim(); ++k)
    if (v.log_v[k] != kNegInf) v.support = k + 1;
  v.renormalize();
  return v;
}

void ScaledVector::renormalize() {
  double m = kNegInf;
  for (int k = 0; k < support; ++k) m = std::max(m, log_v[k]);
  if (m == kNegInf || !std::isfinite(m))
    throw InternalError("scaled vector is zero or non-finite");
  for (int k = 0; k < support; ++k) log_v[k] -= m;
  log_scale += m;
}

ScaledVector row_step(const ScaledVector& v, const TransferOperators& ops) {
  if (v.dim() != ops.dim) throw InvalidParameter("vector/operator dimension mismatch");
  return row_step_impl(v, log_tables(ops));
}

ScaledVector column_step(const TransferOperators& ops, const ScaledVector& v) {
  if (v.dim() != ops.dim) throw InvalidParameter("vector/operator dimension mismatch");
  return column_step_impl(v, log_tables(ops));
}

double log_contract(const ScaledVector& v, std::span<const double> log_weights) {
  LogSum acc;
  const int n = std::min<int>(v.support, static_cast<int>(log_weights.size()));
  for (int k = 0; k < n; ++k) acc.add(v.log_v[k] + log_weights[k]);
  const double s = acc.value();
  return s == kNegInf ? kNegInf : v.log_scale + s;
}

double log_z(const ModelParams& params, int n_steps, const IterationOptions& opts) {
  if (n_steps < 0) throw InvalidParameter("n_steps must be >= 0");
  return log_z(build_transfer_operators(params, n_steps + 1), n_steps, opts);
}

double log_z(const TransferOperators& ops, int n_steps, const IterationOptions& opts) {
  if (n_steps < 0) throw InvalidParameter("n_steps must be >= 0");
  if (ops.dim < n_steps + 1)
    throw InvalidParameter("transfer dimension must be >= n_steps + 1");
  if (opts.renormalize_every < 1) throw InvalidParameter("renormalize_every must be >= 1");
  const LogTables t = log_tables(ops);
  ScaledVector u = ScaledVector::unit(ops.dim, 0);
  for (int s = 1; s <= n_steps; ++s) {
    u = row_step_impl(u, t);
    if (s % opts.renormalize_every == 0) u.renormalize();
  }
  const double lz = log_contract(u, ops.boundary_log_weights);
  if (!std::isfinite(lz)) throw InternalError("Z(n) is not positive and finite");
  return lz;
}

CurrentResult spin_current(const ModelParams& params, const IterationOptions& opts) {
  require_mps_params(params);
  if (opts.renormalize_every < 1) throw InvalidParameter("renormalize_every must be >= 1");
  const int N = params.N;
  const TransferOperators ops = build_transfer_operators(params, N + 1);
  const LogTables t = log_tables(ops);

  ScaledVector u = ScaledVector::unit(ops.dim, 0);
  for (int s = 1; s < N; ++s) {
    u = row_step_impl(u, t);
    if (s % opts.renormalize_every == 0) u.renormalize();
  }
  const double log_z_prev = log_contract(u, ops.boundary_log_weights);
  u = row_step_impl(u, t);
  const double log_z_last = log_contract(u, ops.boundary_log_weights);
  if (!std::isfinite(log_z_prev) || !std::isfinite(log_z_last))
    throw InternalError("Z(N) is not positive and finite");

  const double ratio = log_z_prev - log_z_last;
  const double g2h2 = params.gamma * params.gamma + params.h * params.h;
  return CurrentResult{2.0 * params.gamma / g2h2 * std::exp(ratio), ratio, params};
}

DensityProfile magnon_density(const ModelParams& params, const DensityOptions& opts) {
  require_mps_params(params);
  const int every = opts.iteration.renormalize_every;
  if (every < 1) throw InvalidParameter("renormalize_every must be >= 1");
  const int N = params.N;
  const bool stored = N <= opts.max_stored_sites;
  if (!stored && !opts.recompute_when_over_budget)
    throw ResourceError("density profile for N = " + std::to_string(N) +
                        " exceeds the stored-prefix budget of " +
                        std::to_string(opts.max_stored_sites) + " sites");

  const TransferOperators ops = build_transfer_operators(params, N + 1);
  const LogTables t = log_tables(ops);
  const int dim = ops.dim;

  auto advance_prefix = [&](ScaledVector& u, int step) {
    u = row_step_impl(u, t);
    if (step % every == 0) u.renormalize();
  };

  std::vector<ScaledVector> prefixes;
  if (stored) {
    prefixes.reserve(N);
    prefixes.push_back(ScaledVector::unit(dim, 0));
    for (int a = 1; a < N; ++a) {
      ScaledVector u = prefixes.back();
      advance_prefix(u, a);
      prefixes.push_back(std::move(u));
    }
  }

  DensityProfile out;
  out.sigma_z.assign(N, 0.0);
  out.n.assign(N, 0.0);

  // Suffix B0^(N-i) |w>, advanced as i runs from N down to 1.
  ScaledVector suffix = ScaledVector::from_log_entries(ops.boundary_log_weights);
  for (int i = N; i >= 1; --i) {
    ScaledVector recomputed;
    const ScaledVector* prefix = nullptr;
    if (stored) {
      prefix = &prefixes[i - 1];
    } else {
      recomputed = ScaledVector::unit(dim, 0);
      for (int a = 1; a < i; ++a) advance_prefix(recomputed, a);
      prefix = &recomputed;
    }

    // <u|Bz|s> = A - B and <u|B0|s> = A + B + D with A, B, D >= 0.
    LogSum up, down, total;
    for (int k = 0; k < prefix->support; ++k) {
      const double lu = prefix->log_v[k];
      if (lu == kNegInf) continue;
      const double d = lu + t.diag[k] + suffix.log_v[k];
      total.add(d);
      if (k + 1 < dim) {
        const double a = lu + t.upper[k] + suffix.log_v[k + 1];
        up.add(a);
        total.add(a);
      }
      if (k >= 1) {
        const double b = lu + t.lower[k - 1] + suffix.log_v[k - 1];
        down.add(b);
        total.add(b);
      }
    }
    const double lz = total.value();
    if (!std::isfinite(lz)) throw InternalError("Z(N) is not positive and finite");
    const double sz = std::exp(up.value() - lz) - std::exp(down.value() - lz);
    out.sigma_z[i - 1] = sz;
    out.n[i - 1] = 0.5 * (1.0 + sz);

    if (i > 1) {
      suffix = column_step_impl(suffix, t);
      if ((N - i + 1) % every == 0) suffix.renormalize();
    }
  }
  return out;
}

double approx_current(const ModelParams& params) {
  params.validate();
  const double g = params.gamma;
  const double n = params.N;
  const double h = params.h;
  const double denom = 1.0 + 2.0 * h / (g * g * n) + h * h / (g * g);
  return std::numbers::pi * std::numbers::pi / (g * n * n) / denom;
}

double critical_gamma(int N) {
  if (N < 1) throw InvalidParameter("N must be >= 1");
  return 1.0 / N;
}

double critical_field(int N) {
  if (N < 1) throw InvalidParameter("N must be >= 1");
  return -5.0 / N;
}

CommutatorCheck verify_commutator_identity(const ModelParams& params, int dim) {
  params.validate();
  if (dim < 3) throw InvalidParameter("commutator check needs dim >= 3");
  const RepParam rep = representation_parameter(params.gamma, params.h);
  const AuxOps s = aux_representation(rep.p, dim);
  const AuxOps t = aux_representation(std::conj(rep.p), dim);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
  const cplx i1(0.0, 1.0);

  const Eigen::MatrixXcd sz = kron(s.z, id), sp = kron(s.plus, id), sm = kron(s.minus, id);
  const Eigen::MatrixXcd tz = kron(id, t.z), tp = kron(id, t.plus), tm = kron(id, t.minus);

  const Eigen::MatrixXcd b0 = 2.0 * sz * tz + sp * tp + sm * tm;
  const Eigen::MatrixXcd bx = (sm - sp) * tz + sz * (tm - tp);
  const Eigen::MatrixXcd by = i1 * (sz * (tm + tp) - (sm + sp) * tz);
  const Eigen::MatrixXcd diff = tz - sz;

  const Eigen::MatrixXcd lhs = bx * by - by * bx;
  const Eigen::MatrixXcd rhs = 2.0 * i1 * diff * b0;
  const Eigen::MatrixXcd comm = diff * b0 - b0 * diff;

  const double scale_xy = bx.cwiseAbs().maxCoeff() * by.cwiseAbs().maxCoeff();
  const double scale_db = diff.cwiseAbs().maxCoeff() * b0.cwiseAbs().maxCoeff();
  return CommutatorCheck{interior_max(lhs - rhs, dim) / scale_xy,
                         interior_max(comm, dim) / scale_db};
}

}  // namespace ness
