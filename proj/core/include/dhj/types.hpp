#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace dhj {

// Problems live on 1-D or 2-D tori, so all vectors and matrices have a
// runtime size of at most 2. Fixed-capacity Eigen types keep them on the
// stack, which matters in the solver inner loops.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 2, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 2, 2>;
using IVec = Eigen::Matrix<int, Eigen::Dynamic, 1, Eigen::ColMajor, 2, 1>;

// Invalid user input (config files, CLI options, parameter preconditions).
// The CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computation that started from valid input failed to produce a usable
// result (divergence, blow-up, degenerate fit). CLI exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool all_finite(const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) return false;
  }
  return true;
}

inline bool all_finite(const Mat& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j))) return false;
    }
  }
  return true;
}

}  // namespace dhj
