#ifndef MORPHTAG_LBFGS_HPP
#define MORPHTAG_LBFGS_HPP

#include <Eigen/Core>
#include <functional>

namespace mt {

struct LbfgsOptions {
  int memory = 10;
  int max_iterations = 100;
  double tol = 1e-5;  // relative objective change
  int max_line_search = 40;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
};

// Evaluates the objective at x and writes the gradient; minimization.
using LbfgsObjective =
    std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

// Limited-memory BFGS with a strong-Wolfe line search. Stops on the
// relative objective change, the iteration budget, or a vanishing gradient.
// On line-search failure the best iterate so far is returned with the flag
// set.
LbfgsResult lbfgs_minimize(const LbfgsObjective& f, Eigen::VectorXd x0,
                           const LbfgsOptions& options = {});

}  // namespace mt

#endif
