#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "netcage/core/types.hpp"

namespace netcage::gp {

struct LbfgsOptions {
  int max_iterations = 200;
  int history = 10;
  double gradient_tolerance = 1e-6;  // on the projected gradient, infinity norm
  double function_tolerance = 1e-12;
  int max_backtracks = 40;
};

struct LbfgsResult {
  Vector x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Box-projected limited-memory BFGS with a backtracking Armijo line search.
///
/// `f(x, grad)` returns the objective and writes the gradient; a non-finite
/// return is treated as an infeasible point and the step is shortened.
template <typename Objective>
LbfgsResult minimize_lbfgs(Objective&& f, Vector x, const Vector& lower, const Vector& upper,
                           const LbfgsOptions& opt = {}) {
  const Index n = x.size();
  auto project = [&](Vector& v) { v = v.cwiseMax(lower).cwiseMin(upper); };
  auto projected_grad_norm = [&](const Vector& p, const Vector& g) {
    Vector q = p - g;
    project(q);
    return (q - p).cwiseAbs().maxCoeff();
  };

  LbfgsResult res;
  project(x);
  Vector g(n);
  double fx = f(x, g);
  ++res.evaluations;
  if (!std::isfinite(fx)) {
    res.x = x;
    return res;
  }

  std::deque<Vector> S, Y;
  std::deque<double> rho;
  int flat_steps = 0;

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    res.iterations = iter + 1;
    if (n == 0 || projected_grad_norm(x, g) < opt.gradient_tolerance) {
      res.converged = true;
      break;
    }

    // Two-loop recursion.
    Vector d = -g;
    std::vector<double> a(S.size());
    for (Index k = static_cast<Index>(S.size()) - 1; k >= 0; --k) {
      a[k] = rho[k] * S[k].dot(d);
      d -= a[k] * Y[k];
    }
    if (!S.empty()) d *= S.back().dot(Y.back()) / Y.back().squaredNorm();
    for (std::size_t k = 0; k < S.size(); ++k) {
      const double b = rho[k] * Y[k].dot(d);
      d += (a[k] - b) * S[k];
    }
    // Drop components that push against an active bound.
    for (Index i = 0; i < n; ++i) {
      if ((x(i) <= lower(i) && d(i) < 0) || (x(i) >= upper(i) && d(i) > 0)) d(i) = 0;
    }
    if (!(g.dot(d) < 0)) {
      S.clear(), Y.clear(), rho.clear();
      d = -g;
      for (Index i = 0; i < n; ++i)
        if ((x(i) <= lower(i) && d(i) < 0) || (x(i) >= upper(i) && d(i) > 0)) d(i) = 0;
      if (!(g.dot(d) < 0)) {
        res.converged = true;
        break;
      }
    }

    double t = S.empty() ? std::min(1.0, 1.0 / std::max(d.norm(), 1e-12)) : 1.0;
    Vector xt(n), gt(n);
    double ft = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < opt.max_backtracks; ++ls) {
      xt = x + t * d;
      project(xt);
      ft = f(xt, gt);
      ++res.evaluations;
      if (std::isfinite(ft) && ft <= fx + 1e-4 * g.dot(xt - x)) {
        accepted = true;
        break;
      }
      t *= std::isfinite(ft) ? 0.5 : 0.1;
    }
    if (!accepted) {
      if (!S.empty()) {
        S.clear(), Y.clear(), rho.clear();
        continue;
      }
      break;
    }

    Vector s = xt - x;
    Vector yv = gt - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      S.push_back(s);
      Y.push_back(yv);
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > opt.history) S.pop_front(), Y.pop_front(), rho.pop_front();
    }

    const double change = fx - ft;
    x = xt;
    g = gt;
    fx = ft;
    if (change <= opt.function_tolerance * std::max(1.0, std::abs(fx))) {
      if (++flat_steps >= 3) {
        res.converged = true;
        break;
      }
    } else {
      flat_steps = 0;
    }
  }
  res.x = x;
  res.value = fx;
  return res;
}

}  // namespace netcage::gp
