#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace semibound {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Bad argument values (empty grids, exponents out of range, ...).
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A hypothesis of the underlying estimate is violated (time window,
/// exponent regime, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A field evaluator returned a non-finite value; the message names the point.
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A structural assumption gate failed (no dissipativity certificate,
/// non-integrable decay, missing weights).
struct AssumptionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Too many diverged paths, or the step/path budget cap was exceeded.
struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A reference computation (quadrature, grid solve) failed to converge.
struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Missing or inconsistent configuration (weights, certificates).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string point_to_string(const Vec& x) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i > 0) s += ", ";
    s += std::to_string(x[i]);
  }
  s += ")";
  return s;
}

}  // namespace semibound
