#pragma once

#include <Eigen/Core>

#include <functional>
#include <stdexcept>

#include "heis/core.hpp"

namespace heis {

/// Horizontal path on [0,1]: piecewise-constant controls u_j = (a_j, b_j) in
/// R^{2n} on M equal segments, gamma' = sum_i a_i X_i + b_i Y_i.
struct HorizontalPath {
  Vec start;                 // (2n+1)-point
  Eigen::MatrixXd controls;  // 2n x M

  int n() const { return heis_n(start); }
  int segments() const { return static_cast<int>(controls.cols()); }

  void validate() const {
    const int nn = n();
    if (controls.rows() != 2 * nn) throw std::invalid_argument("HorizontalPath: control dimension mismatch");
    if (controls.cols() < 1) throw std::invalid_argument("HorizontalPath: needs at least one segment");
    if (!start.allFinite() || !controls.allFinite()) throw std::invalid_argument("HorizontalPath: non-finite data");
  }
};

/// Exact states at segment boundaries, (2n+1) x (M+1).  Per segment with
/// constant control (a, b) and step h: x += h a, y += h b, and
/// t += 2 h (<a, y_j> - <b, x_j>) since dt/dtau is constant on the segment.
inline Eigen::MatrixXd integrate_path(const HorizontalPath& path) {
  path.validate();
  const int n = path.n();
  const int M = path.segments();
  const double h = 1.0 / M;
  Eigen::MatrixXd states(2 * n + 1, M + 1);
  states.col(0) = path.start;
  for (int j = 0; j < M; ++j) {
    const auto a = path.controls.col(j).head(n);
    const auto b = path.controls.col(j).tail(n);
    const auto xj = states.col(j).head(n);
    const auto yj = states.col(j).segment(n, n);
    states.col(j + 1).head(n) = xj + h * a;
    states.col(j + 1).segment(n, n) = yj + h * b;
    states(2 * n, j + 1) = states(2 * n, j) + 2 * h * (a.dot(yj) - b.dot(xj));
  }
  return states;
}

inline Vec path_endpoint(const HorizontalPath& path) {
  const Eigen::MatrixXd states = integrate_path(path);
  return states.col(states.cols() - 1);
}

/// l(gamma) = (1/M) sum_j |u_j|.
inline double path_length(const HorizontalPath& path) {
  path.validate();
  return path.controls.colwise().norm().sum() / path.segments();
}

/// Reversed path: controls negated in reverse order.  Integrating it from the
/// endpoint of `path` retraces the states exactly.
inline HorizontalPath reverse_path(const HorizontalPath& path) {
  HorizontalPath r;
  r.start = path_endpoint(path);
  r.controls = (-path.controls).rowwise().reverse();
  return r;
}

/// Discretize a smooth control tau -> u(tau) on [0,1] by sampling at the left
/// endpoint of each of M segments.
inline HorizontalPath make_path_from_control(const Vec& start, const std::function<Vec(double)>& control, int M) {
  if (M < 1) throw std::invalid_argument("make_path_from_control: M >= 1 required");
  const int n = heis_n(start);
  HorizontalPath p;
  p.start = start;
  p.controls.resize(2 * n, M);
  for (int j = 0; j < M; ++j) {
    Vec u = control(static_cast<double>(j) / M);
    if (u.size() != 2 * n) throw std::invalid_argument("make_path_from_control: control dimension mismatch");
    p.controls.col(j) = u;
  }
  return p;
}

}  // namespace heis
