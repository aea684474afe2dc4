#pragma once

#include <Eigen/Core>

#include <deque>
#include <functional>

#include "heis/core.hpp"

namespace heis {

struct LbfgsOptions {
  int max_iters = 200;
  double grad_tol = 1e-9;     // on ||g||_inf
  double step_tol = 1e-14;    // on ||dx||_inf relative progress
  int memory = 8;
  int max_line_search = 40;
};

struct LbfgsResult {
  Vec x;
  double f = 0;
  int iters = 0;
  bool converged = false;
};

/// Minimize a smooth function with L-BFGS and Armijo backtracking.
/// `fg` evaluates f(x) and writes the gradient.
inline LbfgsResult lbfgs_minimize(const std::function<double(const Vec&, Vec&)>& fg, Vec x0,
                                  const LbfgsOptions& opt = {}) {
  const Eigen::Index d = x0.size();
  LbfgsResult res;
  Vec g(d), gnew(d);
  double f = fg(x0, g);
  Vec x = std::move(x0);

  std::deque<Vec> S, Y;
  std::deque<double> rho;
  Vec q(d), z(d), xnew(d), s(d), yv(d);
  std::vector<double> alpha;

  int it = 0;
  for (; it < opt.max_iters; ++it) {
    if (g.cwiseAbs().maxCoeff() <= opt.grad_tol) {
      res.converged = true;
      break;
    }
    // Two-loop recursion for z = H g.
    q = g;
    const int m = static_cast<int>(S.size());
    alpha.assign(m, 0.0);
    for (int i = m - 1; i >= 0; --i) {
      alpha[i] = rho[i] * S[i].dot(q);
      q -= alpha[i] * Y[i];
    }
    double gamma = 1.0;
    if (m > 0) {
      const double yy = Y.back().squaredNorm();
      if (yy > 0) gamma = S.back().dot(Y.back()) / yy;
    }
    z = gamma * q;
    for (int i = 0; i < m; ++i) {
      const double beta = rho[i] * Y[i].dot(z);
      z += (alpha[i] - beta) * S[i];
    }
    // Descent direction -z; fall back to steepest descent if needed.
    double dg = -z.dot(g);
    if (!(dg < 0)) {
      z = g;
      dg = -g.squaredNorm();
    }

    double step = 1.0;
    double fnew = f;
    bool accepted = false;
    for (int ls = 0; ls < opt.max_line_search; ++ls) {
      xnew = x - step * z;
      fnew = fg(xnew, gnew);
      if (std::isfinite(fnew) && fnew <= f + 1e-4 * step * dg) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    s = xnew - x;
    yv = gnew - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      S.push_back(s);
      Y.push_back(yv);
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > opt.memory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    const double prog = s.cwiseAbs().maxCoeff();
    x.swap(xnew);
    g.swap(gnew);
    f = fnew;
    if (prog <= opt.step_tol * std::max(1.0, x.cwiseAbs().maxCoeff())) {
      res.converged = true;
      break;
    }
  }
  res.x = std::move(x);
  res.f = f;
  res.iters = it;
  return res;
}

}  // namespace heis
