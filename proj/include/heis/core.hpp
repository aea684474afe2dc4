#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace heis {

template <class Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Vec = VecX<double>;

/// A point of the Heisenberg group H^n is stored as the flat ambient vector
/// (x_1..x_n, y_1..y_n, t) of length 2n+1.  Free functions below implement the
/// group structure; they accept any Eigen dense expression of that shape.
template <class D>
int heis_n(const Eigen::MatrixBase<D>& p) {
  const Eigen::Index d = p.size();
  if (d < 3 || d % 2 == 0) throw std::invalid_argument("heis: ambient dimension must be odd and >= 3");
  return static_cast<int>((d - 1) / 2);
}

template <class D>
auto x_part(const Eigen::MatrixBase<D>& p) {
  return p.head((p.size() - 1) / 2);
}

template <class D>
auto y_part(const Eigen::MatrixBase<D>& p) {
  const Eigen::Index n = (p.size() - 1) / 2;
  return p.segment(n, n);
}

template <class D>
auto t_coord(const Eigen::MatrixBase<D>& p) {
  return p(p.size() - 1);
}

template <class D>
bool all_finite(const Eigen::MatrixBase<D>& v) {
  return v.allFinite();
}

/// Group law: (a o b) has planar part a' + b' and
/// t = a_t + b_t + 2 sum_i (b_x_i a_y_i - a_x_i b_y_i).
template <class DA, class DB>
VecX<typename DA::Scalar> group_compose(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  const int n = heis_n(a);
  if (b.size() != a.size()) throw std::invalid_argument("group_compose: dimension mismatch");
  VecX<typename DA::Scalar> r(a.size());
  r.head(2 * n) = a.head(2 * n) + b.head(2 * n);
  r(2 * n) = a(2 * n) + b(2 * n) + 2 * (x_part(b).dot(y_part(a)) - x_part(a).dot(y_part(b)));
  return r;
}

/// Group inverse is coordinatewise negation.
template <class D>
VecX<typename D::Scalar> group_inverse(const Eigen::MatrixBase<D>& p) {
  heis_n(p);
  return -p;
}

/// Anisotropic dilation: (x, y, t) -> (l x, l y, l^2 t), l > 0.
template <class D>
VecX<typename D::Scalar> dilate(typename D::Scalar lambda, const Eigen::MatrixBase<D>& p) {
  const int n = heis_n(p);
  if (!(lambda > 0)) throw std::invalid_argument("dilate: factor must be positive");
  VecX<typename D::Scalar> r(p.size());
  r.head(2 * n) = lambda * p.head(2 * n);
  r(2 * n) = lambda * lambda * p(2 * n);
  return r;
}

/// Left-invariant horizontal frame at p, as the (2n+1) x 2n matrix whose
/// columns are X_1..X_n, Y_1..Y_n with
///   X_i = e_{x_i} + 2 y_i e_t,   Y_i = e_{y_i} - 2 x_i e_t.
template <class D>
Eigen::Matrix<typename D::Scalar, Eigen::Dynamic, Eigen::Dynamic> frame_matrix(const Eigen::MatrixBase<D>& p) {
  using S = typename D::Scalar;
  const int n = heis_n(p);
  Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> F(2 * n + 1, 2 * n);
  F.setZero();
  for (int i = 0; i < n; ++i) {
    F(i, i) = S(1);
    F(2 * n, i) = 2 * p(n + i);
    F(n + i, n + i) = S(1);
    F(2 * n, n + i) = -2 * p(i);
  }
  return F;
}

/// Euclidean pairings of the frame with an ambient covector nu:
/// returns the 2n-vector ( <X_1,nu>..<X_n,nu>, <Y_1,nu>..<Y_n,nu> )
///   <X_i,nu> = nu_x_i + 2 y_i nu_t,   <Y_i,nu> = nu_y_i - 2 x_i nu_t.
template <class DP, class DN>
VecX<typename DP::Scalar> frame_pairings(const Eigen::MatrixBase<DP>& p, const Eigen::MatrixBase<DN>& nu) {
  const int n = heis_n(p);
  if (nu.size() != p.size()) throw std::invalid_argument("frame_pairings: dimension mismatch");
  VecX<typename DP::Scalar> r(2 * n);
  r.head(n) = x_part(nu) + 2 * t_coord(nu) * y_part(p);
  r.tail(n) = y_part(nu) - 2 * t_coord(nu) * x_part(p);
  return r;
}

/// Euclidean normal of the horizontal plane p + span{X_i(p), Y_i(p)}:
/// m(p) = (-2y, 2x, 1); it annihilates every frame vector.
template <class D>
VecX<typename D::Scalar> horizontal_plane_normal(const Eigen::MatrixBase<D>& p) {
  const int n = heis_n(p);
  VecX<typename D::Scalar> m(p.size());
  m.head(n) = -2 * y_part(p);
  m.segment(n, n) = 2 * x_part(p);
  m(2 * n) = 1;
  return m;
}

/// Symplectic-type map on planar vectors v = (v_x, v_y) in R^{2n}:
/// Lambda v = (v_y, -v_x).  Skew, norm preserving.
template <class D>
VecX<typename D::Scalar> lambda_apply(const Eigen::MatrixBase<D>& v) {
  const Eigen::Index m = v.size();
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("lambda_apply: planar dimension must be even");
  const Eigen::Index n = m / 2;
  VecX<typename D::Scalar> r(m);
  r.head(n) = v.tail(n);
  r.tail(n) = -v.head(n);
  return r;
}

/// Kaplan gauge rho(p) = ((|x|^2 + |y|^2)^2 + 4 t^2)^{1/4}.
template <class D>
typename D::Scalar kaplan_gauge(const Eigen::MatrixBase<D>& p) {
  const int n = heis_n(p);
  using std::pow;
  const typename D::Scalar planar = p.head(2 * n).squaredNorm();
  const typename D::Scalar t = p(2 * n);
  return pow(planar * planar + 4 * t * t, 0.25);
}

/// Gauge quasi-distance d_K(a, b) = rho(b^{-1} o a).
template <class DA, class DB>
typename DA::Scalar kaplan_distance(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  return kaplan_gauge(group_compose(group_inverse(b), a));
}

}  // namespace heis
