#include "lbfgs.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace mt {

namespace {

struct LinePoint {
  double t;
  double value;
  double deriv;  // directional derivative
};

// Strong-Wolfe line search (Nocedal & Wright alg. 3.5/3.6 with bisection
// fallback). Returns the accepted step, or a negative value on failure.
double wolfe_search(const LbfgsObjective& f, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& dir, double f0, double g0,
                    Eigen::VectorXd& x_out, double& f_out,
                    Eigen::VectorXd& grad_out, const LbfgsOptions& opt) {
  auto eval = [&](double t) {
    x_out = x + t * dir;
    f_out = f(x_out, grad_out);
    return LinePoint{t, f_out, grad_out.dot(dir)};
  };

  auto zoom = [&](LinePoint lo, LinePoint hi) -> double {
    for (int iter = 0; iter < opt.max_line_search; ++iter) {
      double t = 0.5 * (lo.t + hi.t);
      LinePoint p = eval(t);
      if (p.value > f0 + opt.wolfe_c1 * t * g0 || p.value >= lo.value) {
        hi = p;
      } else {
        if (std::fabs(p.deriv) <= -opt.wolfe_c2 * g0) return p.t;
        if (p.deriv * (hi.t - lo.t) >= 0.0) hi = lo;
        lo = p;
      }
      if (std::fabs(hi.t - lo.t) < 1e-16) break;
    }
    // Best point seen inside the bracket still satisfies Armijo.
    if (lo.value < f0 + opt.wolfe_c1 * lo.t * g0) {
      eval(lo.t);
      return lo.t;
    }
    return -1.0;
  };

  LinePoint prev{0.0, f0, g0};
  double t = 1.0;
  for (int iter = 0; iter < opt.max_line_search; ++iter) {
    LinePoint p = eval(t);
    if (p.value > f0 + opt.wolfe_c1 * t * g0 ||
        (iter > 0 && p.value >= prev.value))
      return zoom(prev, p);
    if (std::fabs(p.deriv) <= -opt.wolfe_c2 * g0) return p.t;
    if (p.deriv >= 0.0) return zoom(p, prev);
    prev = p;
    t *= 2.0;
  }
  return -1.0;
}

}  // namespace

LbfgsResult lbfgs_minimize(const LbfgsObjective& f, Eigen::VectorXd x0,
                           const LbfgsOptions& options) {
  const int n = static_cast<int>(x0.size());
  LbfgsResult res;
  res.x = std::move(x0);

  Eigen::VectorXd grad(n);
  res.value = f(res.x, grad);
  if (!std::isfinite(res.value))
    throw std::runtime_error("L-BFGS: non-finite objective at the start");

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (grad.norm() < 1e-12) {
      res.converged = true;
      break;
    }

    // Two-loop recursion.
    Eigen::VectorXd dir = -grad;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(dir);
      dir -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const Eigen::VectorXd& s = s_hist.back();
      const Eigen::VectorXd& y = y_hist.back();
      dir *= s.dot(y) / y.dot(y);
    }
    for (size_t i = 0; i < s_hist.size(); ++i) {
      double beta = rho_hist[i] * y_hist[i].dot(dir);
      dir += (alpha[i] - beta) * s_hist[i];
    }

    double g0 = grad.dot(dir);
    if (g0 >= 0.0) {  // not a descent direction: restart from steepest
      dir = -grad;
      g0 = grad.dot(dir);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    Eigen::VectorXd x_new(n), grad_new(n);
    double f_new = 0.0;
    double step = wolfe_search(f, res.x, dir, res.value, g0, x_new, f_new,
                               grad_new, options);
    if (step <= 0.0) {
      res.line_search_failed = true;
      break;
    }

    Eigen::VectorXd s = x_new - res.x;
    Eigen::VectorXd y = grad_new - grad;
    double sy = s.dot(y);
    if (sy > 1e-12) {
      if (static_cast<int>(s_hist.size()) >= options.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }

    double prev_value = res.value;
    res.x = std::move(x_new);
    res.value = f_new;
    grad = std::move(grad_new);
    res.iterations = iter + 1;

    double rel = std::fabs(prev_value - res.value) /
                 std::max(1.0, std::fabs(prev_value));
    if (rel < options.tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace mt
