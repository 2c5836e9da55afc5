#pragma once

// Brute-force Lindblad steady states for short chains.
//
// Vectorization is row-major throughout: vec(rho)[i * d + j] = rho(i, j), so
// vec(A rho B) = (A kron B^T) vec(rho).

#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ness/model.hpp"

namespace ness {

using SparseMatrixC = Eigen::SparseMatrix<cplx>;

struct ManyBodyOperator {
  Eigen::MatrixXcd matrix;
  int N = 0;
};

// Single-site operator `op` acting on `site` (0-based) of an N-site chain.
SparseMatrixC site_operator(const Eigen::Matrix2cd& op, int site, int N);

// H = 1/2 sum_i sigma_i . sigma_{i+1} + h (sigma^z_1 - n_v . sigma_N).
// Throws ResourceError for N > max_sites.
SparseMatrixC hamiltonian_sparse(const ModelParams& params, int max_sites = 10);
ManyBodyOperator build_hamiltonian(const ModelParams& params, int max_sites = 10);

// Jump operators, rates included:
//   sqrt(gamma (1 + f)) sigma^+_1, sqrt(gamma (1 - f)) sigma^-_1,
//   sqrt(gamma (1 - f)) sigma^{v+}_N, sqrt(gamma (1 + f)) sigma^{v-}_N.
std::vector<SparseMatrixC> jump_operators(const ModelParams& params);

struct Liouvillian {
  SparseMatrixC superop;  // 4^N x 4^N, column-major storage
  int N = 0;
  ModelParams params{};
};

// L(rho) = -i[H, rho] + sum_K (2 K rho K^dag - {K^dag K, rho}).
// Verifies trace preservation; throws InternalError if it fails.
Liouvillian liouvillian_from_operators(int N, const SparseMatrixC& hamiltonian,
                                       std::span<const SparseMatrixC> jumps);

// Also asserts that the f-even part of L has the identity as a fixed point.
Liouvillian build_liouvillian(const ModelParams& params, int max_sites = 8);

// vec(rho) -> vec(L(rho)).
Eigen::MatrixXcd apply_liouvillian(const Liouvillian& L, const Eigen::MatrixXcd& rho);

struct SteadyStateOptions {
  double tol = 1e-10;
  // Dense solve needs (4^N)^2 doubles; N = 6 is ~134 MB.
  int max_dense_sites = 6;
  // Singular values below this fraction of the largest count as null.
  double degeneracy_threshold = 1e-8;
  double positivity_tolerance = 1e-9;
};

struct SteadyStateSolution {
  Eigen::MatrixXcd rho;
  double residual = 0.0;  // max-norm of L(rho)
  double min_eigenvalue = 0.0;
  int N = 0;
};

// Throws DegenerateSteadyState when the null space is not one-dimensional,
// SolverError when the residual exceeds tol or rho has an eigenvalue below
// -positivity_tolerance, ResourceError beyond max_dense_sites.
SteadyStateSolution steady_state(const Liouvillian& L, const SteadyStateOptions& opts = {});

// <sigma^x_i sigma^y_{i+1} - sigma^y_i sigma^x_{i+1}>, i = 1..N-1.
std::vector<double> bond_currents(const SteadyStateSolution& sol);

// <sigma^z_i>, i = 1..N.
std::vector<double> magnetization_profile(const SteadyStateSolution& sol);

// tr(rho O) for an operator on the chain's Hilbert space.
cplx expectation(const SteadyStateSolution& sol, const SparseMatrixC& op);

}  // namespace ness
