#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <complex>
#include <stdexcept>
#include <string>

namespace ucb {

using Real = double;
using Complex = std::complex<double>;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using RMat2 = Eigen::Matrix2d;
using SpMatR = Eigen::SparseMatrix<Real>;
using SpMatC = Eigen::SparseMatrix<Complex>;

inline constexpr Real kPi = 3.14159265358979323846;

// Error taxonomy. Each maps to one failure mode named by the module contracts.
struct InvalidGeometry : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularMetric : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NegativeTangentialEnergy : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidParams : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidEta : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ucb
