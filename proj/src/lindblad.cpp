#include "ness/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "ness/errors.hpp"

namespace ness {
namespace {

SparseMatrixC sparse_identity(Eigen::Index n) {
  SparseMatrixC id(n, n);
  id.setIdentity();
  return id;
}

SparseMatrixC to_sparse(const Eigen::Matrix2cd& m) {
  return m.sparseView(0.0, 0.0);
}

SparseMatrixC kron(const SparseMatrixC& a, const SparseMatrixC& b) {
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (SparseMatrixC::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (SparseMatrixC::InnerIterator ib(b, kb); ib; ++ib)
          trips.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                             ia.value() * ib.value());
  SparseMatrixC out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

SparseMatrixC dissipator(const SparseMatrixC& k) {
  const Eigen::Index d = k.rows();
  const SparseMatrixC id = sparse_identity(d);
  const SparseMatrixC kk = SparseMatrixC(k.adjoint()) * k;
  const SparseMatrixC kk_t = kk.transpose();
  const SparseMatrixC k_conj = k.conjugate();
  return 2.0 * kron(k, k_conj) - kron(kk, id) - kron(id, kk_t);
}

SparseMatrixC commutator_part(const SparseMatrixC& h) {
  const SparseMatrixC id = sparse_identity(h.rows());
  const SparseMatrixC h_t = h.transpose();
  return cplx(0.0, -1.0) * (kron(h, id) - kron(id, h_t));
}

double max_abs(const SparseMatrixC& m) {
  double worst = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(m, k); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  return worst;
}

// Largest |sum_i L((i,i), c)| over columns c: zero iff tr(L(rho)) = 0 for all rho.
double trace_defect(const SparseMatrixC& superop, Eigen::Index d) {
  Eigen::VectorXcd col_sums = Eigen::VectorXcd::Zero(superop.cols());
  for (int k = 0; k < superop.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(superop, k); it; ++it)
      if (it.row() / d == it.row() % d) col_sums[it.col()] += it.value();
  return col_sums.cwiseAbs().maxCoeff();
}

Eigen::VectorXcd vec(const Eigen::MatrixXcd& rho) {
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major = rho;
  return Eigen::Map<const Eigen::VectorXcd>(row_major.data(), row_major.size());
}

Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, Eigen::Index d) {
  return Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      v.data(), d, d);
}

// Real coordinates of a Hermitian d x d matrix, indexed like vec():
//   (i, i) -> Re rho_ii,  (i, j), i < j -> Re rho_ij,  (i, j), i > j -> Im rho_ji.
Eigen::VectorXd hermitian_coords(const Eigen::MatrixXcd& m) {
  const Eigen::Index d = m.rows();
  Eigen::VectorXd x(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      x[i * d + j] = i <= j ? m(i, j).real() : m(j, i).imag();
  return x;
}

Eigen::MatrixXcd from_hermitian_coords(const Eigen::VectorXd& x, Eigen::Index d) {
  Eigen::MatrixXcd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    m(i, i) = x[i * d + i];
    for (Eigen::Index j = i + 1; j < d; ++j) {
      m(i, j) = cplx(x[i * d + j], x[j * d + i]);
      m(j, i) = std::conj(m(i, j));
    }
  }
  return m;
}

// Real matrix of L restricted to Hermitian matrices, in hermitian_coords.
Eigen::MatrixXd real_superoperator(const SparseMatrixC& superop, Eigen::Index d) {
  const Eigen::Index n = d * d;
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  auto scatter = [&](Eigen::Index vec_col, cplx coef, Eigen::Index out_col) {
    for (SparseMatrixC::InnerIterator it(superop, vec_col); it; ++it) {
      const Eigen::Index a = it.row() / d;
      const Eigen::Index b = it.row() % d;
      if (a > b) continue;  // determined by Hermiticity of the output
      const cplx v = coef * it.value();
      r(a * d + b, out_col) += v.real();
      if (a < b) r(b * d + a, out_col) += v.imag();
    }
  };
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const Eigen::Index c = i * d + j;
      if (i == j) {
        scatter(c, 1.0, c);
      } else if (i < j) {
        scatter(i * d + j, 1.0, c);
        scatter(j * d + i, 1.0, c);
      } else {
        // Basis element with rho_ji = i, rho_ij = -i.
        scatter(j * d + i, cplx(0.0, 1.0), c);
        scatter(i * d + j, cplx(0.0, -1.0), c);
      }
    }
  }
  return r;
}

// Bordered operator: row (0,0) of the real superoperator is replaced by the
// trace functional.
Eigen::VectorXd apply_bordered(const Liouvillian& L, const Eigen::VectorXd& x, Eigen::Index d) {
  const Eigen::MatrixXcd rho = from_hermitian_coords(x, d);
  Eigen::VectorXd y = hermitian_coords(apply_liouvillian(L, rho));
  y[0] = rho.trace().real();
  return y;
}

}  // namespace

SparseMatrixC site_operator(const Eigen::Matrix2cd& op, int site, int N) {
  if (site < 0 || site >= N) throw InvalidParameter("site index out of range");
  const SparseMatrixC left = sparse_identity(Eigen::Index(1) << site);
  const SparseMatrixC right = sparse_identity(Eigen::Index(1) << (N - site - 1));
  return kron(kron(left, to_sparse(op)), right);
}

SparseMatrixC hamiltonian_sparse(const ModelParams& params, int max_sites) {
  params.validate();
  const int N = params.N;
  if (N > max_sites)
    throw ResourceError("dense Hamiltonian limited to N <= " + std::to_string(max_sites));
  const Eigen::Index d = Eigen::Index(1) << N;
  SparseMatrixC h(d, d);
  for (int i = 0; i + 1 < N; ++i) {
    for (const auto& s : {pauli::x(), pauli::y(), pauli::z()}) {
      const SparseMatrixC bond = site_operator(s, i, N) * site_operator(s, i + 1, N);
      h += 0.5 * bond;
    }
  }
  const AxisConvention axis = ladder_operator_v(params.theta);
  h += params.h * (site_operator(pauli::z(), 0, N) - site_operator(axis.sigma_v, N - 1, N));
  h.prune(cplx(0.0, 0.0));
  return h;
}

ManyBodyOperator build_hamiltonian(const ModelParams& params, int max_sites) {
  return ManyBodyOperator{Eigen::MatrixXcd(hamiltonian_sparse(params, max_sites)), params.N};
}

std::vector<SparseMatrixC> jump_operators(const ModelParams& params) {
  params.validate();
  const int N = params.N;
  const double g = params.gamma;
  const double f = params.f;
  const AxisConvention axis = ladder_operator_v(params.theta);
  return {std::sqrt(g * (1.0 + f)) * site_operator(pauli::plus(), 0, N),
          std::sqrt(g * (1.0 - f)) * site_operator(pauli::minus(), 0, N),
          std::sqrt(g * (1.0 - f)) * site_operator(axis.sigma_v_plus(), N - 1, N),
          std::sqrt(g * (1.0 + f)) * site_operator(axis.sigma_v_minus, N - 1, N)};
}

Liouvillian liouvillian_from_operators(int N, const SparseMatrixC& hamiltonian,
                                       std::span<const SparseMatrixC> jumps) {
  const Eigen::Index d = Eigen::Index(1) << N;
  if (hamiltonian.rows() != d || hamiltonian.cols() != d)
    throw InvalidParameter("Hamiltonian dimension does not match N");
  SparseMatrixC superop = commutator_part(hamiltonian);
  for (const auto& k : jumps) {
    if (k.rows() != d || k.cols() != d)
      throw InvalidParameter("jump operator dimension does not match N");
    superop += dissipator(k);
  }
  superop.prune(cplx(0.0, 0.0));
  const double scale = std::max(1.0, max_abs(superop));
  if (trace_defect(superop, d) > 1e-12 * scale)
    throw InternalError("Liouvillian is not trace preserving");
  Liouvillian L;
  L.superop = std::move(superop);
  L.N = N;
  return L;
}

Liouvillian build_liouvillian(const ModelParams& params, int max_sites) {
  params.validate();
  const int N = params.N;
  if (N > max_sites)
    throw ResourceError("Liouvillian limited to N <= " + std::to_string(max_sites));
  const Eigen::Index d = Eigen::Index(1) << N;
  const SparseMatrixC h = hamiltonian_sparse(params, max_sites);
  const AxisConvention axis = ladder_operator_v(params.theta);
  const double g = params.gamma;

  // L = L_even + f L_odd; L_even is the infinite-temperature generator.
  const SparseMatrixC l_plus = site_operator(pauli::plus(), 0, N);
  const SparseMatrixC l_minus = site_operator(pauli::minus(), 0, N);
  const SparseMatrixC r_plus = site_operator(axis.sigma_v_plus(), N - 1, N);
  const SparseMatrixC r_minus = site_operator(axis.sigma_v_minus, N - 1, N);
  const SparseMatrixC d_lp = dissipator(l_plus), d_lm = dissipator(l_minus);
  const SparseMatrixC d_rp = dissipator(r_plus), d_rm = dissipator(r_minus);

  const SparseMatrixC even = commutator_part(h) + g * (d_lp + d_lm + d_rp + d_rm);
  const SparseMatrixC odd = g * (d_lp - d_lm - d_rp + d_rm);

  const double scale = std::max(1.0, max_abs(even));
  const Eigen::VectorXcd id_vec = vec(Eigen::MatrixXcd::Identity(d, d));
  if ((even * id_vec).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InternalError("identity is not a fixed point of the f = 0 Liouvillian");

  Liouvillian L;
  L.superop = even + params.f * odd;
  L.superop.prune(cplx(0.0, 0.0));
  if (trace_defect(L.superop, d) > 1e-12 * scale)
    throw InternalError("Liouvillian is not trace preserving");
  L.N = N;
  L.params = params;
  return L;
}

Eigen::MatrixXcd apply_liouvillian(const Liouvillian& L, const Eigen::MatrixXcd& rho) {
  const Eigen::Index d = Eigen::Index(1) << L.N;
  if (rho.rows() != d || rho.cols() != d)
    throw InvalidParameter("density matrix dimension does not match N");
  return unvec(L.superop * vec(rho), d);
}

SteadyStateSolution steady_state(const Liouvillian& L, const SteadyStateOptions& opts) {
  if (!(opts.tol > 0.0)) throw InvalidParameter("tol must be positive");
  if (L.N > opts.max_dense_sites)
    throw ResourceError("dense steady-state solve limited to N <= " +
                        std::to_string(opts.max_dense_sites));
  const Eigen::Index d = Eigen::Index(1) << L.N;
  const Eigen::Index n = d * d;

  // Rows of diagonal outputs sum to zero (trace preservation), so replacing
  // row (0,0) by the trace functional keeps the system nonsingular exactly
  // when the null space is one-dimensional.
  Eigen::MatrixXd bordered = real_superoperator(L.superop, d);
  bordered.row(0).setZero();
  for (Eigen::Index i = 0; i < d; ++i) bordered(0, i * d + i) = 1.0;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[0] = 1.0;

  Eigen::VectorXd x;
  {
    Eigen::PartialPivLU<Eigen::Ref<Eigen::MatrixXd>> lu(bordered);
    const double rcond = lu.rcond();
    // The rcond estimate can miss exactly zero pivots, so screen those too.
    const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double pivot_ratio = pivots.minCoeff() / pivots.maxCoeff();
    if (!(rcond > opts.degeneracy_threshold) || !(pivot_ratio > opts.degeneracy_threshold)) {
      // Screening hit: count the near-null singular values of L itself.
      const Eigen::MatrixXd r = real_superoperator(L.superop, d);
      Eigen::BDCSVD<Eigen::MatrixXd> svd(r);
      const Eigen::VectorXd sv = svd.singularValues();
      const double cut = opts.degeneracy_threshold * sv[0];
      std::ostringstream near_zero;
      int count = 0;
      for (Eigen::Index k = sv.size() - 1; k >= 0 && sv[k] < cut; --k) {
        near_zero << (count ? ", " : "") << sv[k];
        ++count;
      }
      if (count > 1) {
        std::ostringstream msg;
        msg << "steady state is not unique: " << count << " singular values below " << cut
            << " [" << near_zero.str() << "]";
        throw DegenerateSteadyState(msg.str());
      }
    }
    x = lu.solve(rhs);
    // One step of iterative refinement with the exact sparse operator.
    const Eigen::VectorXd defect = rhs - apply_bordered(L, x, d);
    x += lu.solve(defect);
  }

  SteadyStateSolution sol;
  sol.N = L.N;
  Eigen::MatrixXcd rho = from_hermitian_coords(x, d);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace();
  sol.rho = rho;
  sol.residual = apply_liouvillian(L, rho).cwiseAbs().maxCoeff();
  sol.min_eigenvalue =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(rho, Eigen::EigenvaluesOnly)
          .eigenvalues()
          .minCoeff();

  if (!std::isfinite(sol.residual) || sol.residual > opts.tol) {
    std::ostringstream msg;
    msg << "steady-state residual " << sol.residual << " exceeds tolerance " << opts.tol;
    throw SolverError(msg.str(), sol.residual);
  }
  if (sol.min_eigenvalue < -opts.positivity_tolerance) {
    std::ostringstream msg;
    msg << "steady state has negative eigenvalue " << sol.min_eigenvalue;
    throw SolverError(msg.str(), sol.residual);
  }
  return sol;
}

cplx expectation(const SteadyStateSolution& sol, const SparseMatrixC& op) {
  if (op.rows() != sol.rho.rows() || op.cols() != sol.rho.cols())
    throw InvalidParameter("operator dimension does not match the state");
  cplx acc = 0.0;
  for (int k = 0; k < op.outerSize(); ++k)
    for (SparseMatrixC::InnerIterator it(op, k); it; ++it)
      acc += it.value() * sol.rho(it.col(), it.row());
  return acc;
}

std::vector<double> bond_currents(const SteadyStateSolution& sol) {
  const int N = sol.N;
  if (N < 2) throw Unsupported("bond currents need N >= 2");
  std::vector<double> out;
  out.reserve(N - 1);
  for (int i = 0; i + 1 < N; ++i) {
    const SparseMatrixC op =
        site_operator(pauli::x(), i, N) * site_operator(pauli::y(), i + 1, N) -
        site_operator(pauli::y(), i, N) * site_operator(pauli::x(), i + 1, N);
    const cplx j = expectation(sol, op);
    if (std::abs(j.imag()) > 1e-10) {
      std::ostringstream msg;
      msg << "bond current has imaginary part " << j.imag();
      throw InternalError(msg.str());
    }
    out.push_back(j.real());
  }
  return out;
}

std::vector<double> magnetization_profile(const SteadyStateSolution& sol) {
  std::vector<double> out;
  out.reserve(sol.N);
  for (int i = 0; i < sol.N; ++i)
    out.push_back(expectation(sol, site_operator(pauli::z(), i, sol.N)).real());
  return out;
}

}  // namespace ness
