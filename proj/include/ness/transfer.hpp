#pragma once

// Steady-state observables of the boundary-driven chain at f = 1 from the
// collapsed matrix-product representation.
//
// The steady state is rho = S S^dagger / tr(S S^dagger) with S a contracted
// product of SU(2) auxiliary operators. Tracing over the physical space leaves
// products of tridiagonal matrices on the equal-index auxiliary states |k,k>:
//
//   Z(n)        = <0| B0^n |w>
//   J           = 2 gamma / (gamma^2 + h^2) * Z(N-1) / Z(N)
//   <sigma^z_i> = <0| B0^(i-1) Bz B0^(N-i) |w> / Z(N)
//
// with w_k = tan^(2k)(theta/2) |binom(2p, k)|^2. Entries of B0^n span far more
// than the double exponent range, so every vector is kept entrywise in the log
// domain (ScaledVector).

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ness/model.hpp"

namespace ness {

// Tridiagonal transfer matrices truncated to indices 0..dim-1.
//   B0(k,k) = 2|p-k|^2, B0(k,k+1) = (k+1)^2, B0(k+1,k) = |2p-k|^2
//   Bz(k,k) = 0,        Bz(k,k+1) = (k+1)^2, Bz(k+1,k) = -|2p-k|^2
// Off-diagonal arrays have length dim-1; index k holds the (k,k+1) / (k+1,k)
// entry.
struct TransferOperators {
  int dim = 0;
  RepParam rep{};
  std::vector<double> b0_diag;
  std::vector<double> b0_upper;
  std::vector<double> b0_lower;
  std::vector<double> bz_upper;
  std::vector<double> bz_lower;
  // log w_k; -inf for vanishing weights (all k >= 1 at theta = 0).
  std::vector<double> boundary_log_weights;

  Eigen::MatrixXd b0_dense() const;
  Eigen::MatrixXd bz_dense() const;
};

TransferOperators build_transfer_operators(const ModelParams& params, int dim);

// Non-negative vector with entries stored as logarithms relative to a shared
// scale: entry k is exp(log_scale + log_v[k]). After renormalize() the largest
// log_v is 0 (max-norm 1). Only the first `support` entries may be nonzero.
struct ScaledVector {
  std::vector<double> log_v;
  double log_scale = 0.0;
  int support = 0;

  static ScaledVector unit(int dim, int index);
  static ScaledVector from_log_entries(std::span<const double> log_entries);

  int dim() const { return static_cast<int>(log_v.size()); }
  double log_entry(int k) const { return log_scale + log_v[k]; }
  // Throws InternalError for the zero vector.
  void renormalize();
};

struct IterationOptions {
  // Renormalize after every `renormalize_every` multiplications.
  int renormalize_every = 1;
};

// v -> v B0 (row vector times matrix).
ScaledVector row_step(const ScaledVector& v, const TransferOperators& ops);
// v -> B0 v (matrix times column vector).
ScaledVector column_step(const TransferOperators& ops, const ScaledVector& v);
// log sum_k v_k exp(log_weights[k]); -inf when every term vanishes.
double log_contract(const ScaledVector& v, std::span<const double> log_weights);

// log Z(n_steps). Builds operators with dim = n_steps + 1, which is exact.
double log_z(const ModelParams& params, int n_steps,
             const IterationOptions& opts = {});
// Same with caller-supplied operators; requires ops.dim >= n_steps + 1.
double log_z(const TransferOperators& ops, int n_steps,
             const IterationOptions& opts = {});

struct CurrentResult {
  double J;
  double log_Z_ratio;  // log(Z(N-1) / Z(N))
  ModelParams params;
};

// Requires f == 1.
CurrentResult spin_current(const ModelParams& params,
                           const IterationOptions& opts = {});

struct DensityProfile {
  std::vector<double> sigma_z;
  std::vector<double> n;  // (1 + sigma_z) / 2
};

struct DensityOptions {
  // Prefix vectors are stored for chains up to this length (O(N^2) memory).
  int max_stored_sites = 5000;
  // Beyond the cutoff, recompute prefixes per site (O(N^3) time) instead of
  // failing with ResourceError.
  bool recompute_when_over_budget = false;
  IterationOptions iteration{};
};

// Requires f == 1.
DensityProfile magnon_density(const ModelParams& params,
                              const DensityOptions& opts = {});

// Empirical large-N form of the current,
// pi^2 / (gamma N^2) / (1 + 2h/(gamma^2 N) + h^2/gamma^2).
double approx_current(const ModelParams& params);

// Ballistic/sub-diffusive crossover estimate, 1/N.
double critical_gamma(int N);
// Plateau edge estimate on the h < 0 side, -5/N.
double critical_field(int N);

// Check of [Bx, By] = 2i (Tz - Sz) B0 and [Tz - Sz, B0] = 0 in the doubled
// auxiliary space truncated to dim states per factor. Only the block where both
// factor indices are below dim-1 is compared (truncation does not reach it).
// Each deviation is a max-norm difference divided by the product of the
// max-norms of the two operators being commuted.
struct CommutatorCheck {
  double commutator_deviation;
  double commuting_deviation;
};

CommutatorCheck verify_commutator_identity(const ModelParams& params, int dim);

}  // namespace ness
