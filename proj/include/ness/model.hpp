#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "ness/errors.hpp"

namespace ness {

using cplx = std::complex<double>;

// Physical configuration of the boundary-driven chain. Energies are in units
// of the exchange coupling (J = 1).
//
//   N      chain length
//   h      boundary field strength; h > 0 aligns the fields with the baths
//   gamma  bath coupling rate
//   theta  twist of the right bath/field axis, in [0, pi)
//   f      bath polarization in [0, 1]; the transfer-matrix solver needs f = 1
struct ModelParams {
  int N = 2;
  double h = 0.0;
  double gamma = 1.0;
  double theta = 0.0;
  double f = 1.0;

  // Throws InvalidParameter when an invariant is violated.
  void validate() const;
};

// Lowest-weight label of the auxiliary SU(2) representation,
// p = i / (2 (gamma - i h)).
struct RepParam {
  cplx p;
  double p_abs2;
  cplx two_p;
};

RepParam representation_parameter(double gamma, double h);

// Quantization axis of the last site. n_v = (-sin theta, 0, cos theta); the
// field on site N points along -n_v.
struct AxisConvention {
  std::array<double, 3> n_v;
  Eigen::Matrix2cd sigma_v;        // n_v . sigma
  Eigen::Matrix2cd sigma_v_minus;  // lowering operator along n_v
  Eigen::Matrix2cd sigma_v_plus() const { return sigma_v_minus.adjoint(); }
};

AxisConvention ladder_operator_v(double theta);

namespace pauli {
// Basis ordering is {|up>, |down>}.
Eigen::Matrix2cd x();
Eigen::Matrix2cd y();
Eigen::Matrix2cd z();
Eigen::Matrix2cd plus();
Eigen::Matrix2cd minus();
}  // namespace pauli

}  // namespace ness
