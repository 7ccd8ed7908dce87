#pragma once

// Reference solver for box-constrained convex QPs: projected gradient with a
// conservative step from the Frobenius norm. Slow but independent of the
// interior-point machinery.

#include <Eigen/Dense>
#include <algorithm>

namespace moto2d::oracle {

inline Eigen::VectorXd projected_gradient(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c,
                                          const Eigen::VectorXd& lb, const Eigen::VectorXd& ub,
                                          int iters = 200000) {
  const double step = 1.0 / (Q.norm() + 1.0);
  Eigen::VectorXd x = 0.5 * (lb + ub);
  for (int k = 0; k < iters; ++k) {
    x -= step * (Q * x + c);
    x = x.cwiseMax(lb).cwiseMin(ub);
  }
  return x;
}

}  // namespace moto2d::oracle
