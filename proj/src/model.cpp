#include "ness/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ness {

void ModelParams::validate() const {
  if (N < 1) throw InvalidParameter("N must be >= 1, got " + std::to_string(N));
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw InvalidParameter("gamma must be positive and finite");
  if (!std::isfinite(h)) throw InvalidParameter("h must be finite");
  if (!(theta >= 0.0 && theta < std::numbers::pi))
    throw InvalidParameter("theta must lie in [0, pi)");
  if (!(f >= 0.0 && f <= 1.0)) throw InvalidParameter("f must lie in [0, 1]");
}

RepParam representation_parameter(double gamma, double h) {
  if (!(gamma > 0.0)) throw InvalidParameter("gamma must be positive");
  const cplx p = cplx(0.0, 1.0) / (2.0 * cplx(gamma, -h));
  return RepParam{p, std::norm(p), 2.0 * p};
}

AxisConvention ladder_operator_v(double theta) {
  if (!(theta >= 0.0 && theta < std::numbers::pi))
    throw InvalidParameter("theta must lie in [0, pi)");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  AxisConvention ax;
  ax.n_v = {-s, 0.0, c};
  ax.sigma_v = -s * pauli::x() + c * pauli::z();
  ax.sigma_v_minus =
      0.5 * (c * pauli::x() - cplx(0.0, 1.0) * pauli::y() + s * pauli::z());
  return ax;
}

namespace pauli {

Eigen::Matrix2cd x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd y() {
  Eigen::Matrix2cd m;
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

Eigen::Matrix2cd z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

Eigen::Matrix2cd plus() {
  Eigen::Matrix2cd m;
  m << 0, 1, 0, 0;
  return m;
}

Eigen::Matrix2cd minus() {
  Eigen::Matrix2cd m;
  m << 0, 0, 1, 0;
  return m;
}

}  // namespace pauli
}  // namespace ness
