#pragma once

#include <Eigen/Core>

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

#include "heis/core.hpp"

namespace heis {

/// Closed axis-aligned box [lo_1,hi_1] x ... x [lo_d,hi_d].
struct Box {
  Vec lo;
  Vec hi;

  Eigen::Index dim() const { return lo.size(); }

  bool contains(const Vec& p, double pad = 0.0) const {
    if (p.size() != lo.size()) throw std::invalid_argument("Box::contains: dimension mismatch");
    return ((p.array() >= lo.array() - pad) && (p.array() <= hi.array() + pad)).all();
  }

  Vec center() const { return 0.5 * (lo + hi); }
  Vec widths() const { return hi - lo; }
  double volume() const { return (hi - lo).prod(); }

  void validate() const {
    if (lo.size() != hi.size() || lo.size() == 0) throw std::invalid_argument("Box: inconsistent bounds");
    if (!((hi - lo).array() >= 0).all()) throw std::invalid_argument("Box: hi < lo");
    if (!all_finite(lo) || !all_finite(hi)) throw std::invalid_argument("Box: non-finite bounds");
  }
};

inline Box make_box(const Vec& lo, const Vec& hi) {
  Box b{lo, hi};
  b.validate();
  return b;
}

inline Box centered_box(const Vec& center, const Vec& radii) {
  return make_box(center - radii, center + radii);
}

/// Immutable scalar field on H^n.  `value` is the raw evaluator; evaluation
/// through operator() clamps to 0 outside `support`.  `gradient` (optional)
/// writes the 2n+1 Euclidean partials (d/dx_i, d/dy_i, d/dt) of the raw
/// evaluator.  `eval_domain`, when present, bounds the region where the raw
/// evaluator may be called at all.
struct ScalarField {
  int n = 1;
  std::function<double(const Vec&)> value;
  std::function<void(const Vec&, Vec&)> gradient;
  Box support;
  std::optional<Box> eval_domain;

  bool has_gradient() const { return static_cast<bool>(gradient); }

  double operator()(const Vec& p) const {
    if (!support.contains(p)) return 0.0;
    return value(p);
  }
};

inline ScalarField make_field(int n, std::function<double(const Vec&)> value,
                              std::function<void(const Vec&, Vec&)> gradient, Box support) {
  support.validate();
  if (support.dim() != 2 * n + 1) throw std::invalid_argument("make_field: support dimension mismatch");
  if (!value) throw std::invalid_argument("make_field: missing evaluator");
  return ScalarField{n, std::move(value), std::move(gradient), std::move(support), std::nullopt};
}

/// Step for first-order central differences at coordinate value c.
inline double fd_step(double c) {
  static const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
  return h0 * std::max(1.0, std::abs(c));
}

namespace detail {

inline void check_stencil(const ScalarField& u, const Vec& p, double h, Eigen::Index axis) {
  if (!u.eval_domain) return;
  Vec q = p;
  q(axis) = p(axis) + h;
  bool ok = u.eval_domain->contains(q);
  q(axis) = p(axis) - h;
  ok = ok && u.eval_domain->contains(q);
  if (!ok) throw std::domain_error("finite difference stencil leaves the admissible evaluation region");
}

}  // namespace detail

/// Euclidean gradient of u at p: analytic partials when available, otherwise
/// second-order central differences with per-coordinate steps.
inline Vec euclidean_gradient(const ScalarField& u, const Vec& p) {
  const Eigen::Index d = 2 * u.n + 1;
  if (p.size() != d) throw std::invalid_argument("euclidean_gradient: dimension mismatch");
  Vec g(d);
  if (u.has_gradient()) {
    u.gradient(p, g);
    return g;
  }
  Vec q = p;
  for (Eigen::Index k = 0; k < d; ++k) {
    const double h = fd_step(p(k));
    detail::check_stencil(u, p, h, k);
    q(k) = p(k) + h;
    const double fp = u(q);
    q(k) = p(k) - h;
    const double fm = u(q);
    q(k) = p(k);
    g(k) = (fp - fm) / (2 * h);
  }
  return g;
}

/// Horizontal gradient (X_1 u, .., X_n u, Y_1 u, .., Y_n u) at p:
///   X_i u = du/dx_i + 2 y_i du/dt,   Y_i u = du/dy_i - 2 x_i du/dt.
inline Vec horizontal_gradient(const ScalarField& u, const Vec& p) {
  const Vec g = euclidean_gradient(u, p);
  const int n = u.n;
  Vec h(2 * n);
  h.head(n) = x_part(g) + 2 * g(2 * n) * y_part(p);
  h.tail(n) = y_part(g) - 2 * g(2 * n) * x_part(p);
  return h;
}

enum class FrameKind { X, Y };

/// Directional derivative (V u)(p) along frame field V in {X_i, Y_i}.
inline double frame_derivative(const ScalarField& u, const Vec& p, FrameKind kind, int i) {
  if (i < 0 || i >= u.n) throw std::invalid_argument("frame_derivative: index out of range");
  const Vec g = euclidean_gradient(u, p);
  const int n = u.n;
  if (kind == FrameKind::X) return g(i) + 2 * p(n + i) * g(2 * n);
  return g(n + i) - 2 * p(i) * g(2 * n);
}

namespace detail {

// Central difference of a scalar callable along a fixed ambient direction.
template <class F>
double directional_fd(F&& f, const Vec& p, const Vec& dir, double h) {
  return (f(p + h * dir) - f(p - h * dir)) / (2 * h);
}

inline Vec frame_vector(const Vec& p, FrameKind kind, int i) {
  const int n = heis_n(p);
  Vec v = Vec::Zero(p.size());
  if (kind == FrameKind::X) {
    v(i) = 1;
    v(2 * n) = 2 * p(n + i);
  } else {
    v(n + i) = 1;
    v(2 * n) = -2 * p(i);
  }
  return v;
}

}  // namespace detail

/// ([A, B] u)(p) = (A(Bu))(p) - (B(Au))(p) for frame fields A, B.  The outer
/// derivative is a central difference of the inner frame derivative; the step
/// is enlarged when the inner derivative is itself a finite difference.
inline double frame_commutator(const ScalarField& u, const Vec& p, FrameKind ka, int ia, FrameKind kb, int ib) {
  if (p.size() != 2 * u.n + 1) throw std::invalid_argument("frame_commutator: dimension mismatch");
  const double outer_scale =
      u.has_gradient() ? std::cbrt(std::numeric_limits<double>::epsilon())
                       : std::pow(std::numeric_limits<double>::epsilon(), 2.0 / 9.0);
  auto apply_outer = [&](FrameKind ko, int io, FrameKind ki, int ii) {
    // Frame fields have constant planar part, so moving along the frame vector
    // at p matches the flow direction to first order.
    const Vec dir = detail::frame_vector(p, ko, io);
    const double h = outer_scale * std::max(1.0, p.cwiseAbs().maxCoeff());
    auto inner = [&](const Vec& q) { return frame_derivative(u, q, ki, ii); };
    return detail::directional_fd(inner, p, dir, h);
  };
  return apply_outer(ka, ia, kb, ib) - apply_outer(kb, ib, ka, ia);
}

/// Residual of the structure relation [X_i, Y_i] = -4 d/dt:
/// returns ([X_i, Y_i] u)(p) + 4 (du/dt)(p); ~0 for twice differentiable u.
inline double commutator_check(const ScalarField& u, const Vec& p, int i) {
  const double comm = frame_commutator(u, p, FrameKind::X, i, FrameKind::Y, i);
  const Vec g = euclidean_gradient(u, p);
  return comm + 4 * g(2 * u.n);
}

namespace detail {

// Range of the affine t-shear  t + 2<x,gy> - 2<gx,y>  over a planar box.
inline std::pair<double, double> shear_range(const Vec& g, const Box& planar_xy_box) {
  const int n = heis_n(g);
  double lo = 0, hi = 0;
  for (int i = 0; i < n; ++i) {
    const double cy = 2 * g(n + i);   // coefficient of x_i
    const double cx = -2 * g(i);      // coefficient of y_i
    const double xlo = planar_xy_box.lo(i), xhi = planar_xy_box.hi(i);
    const double ylo = planar_xy_box.lo(n + i), yhi = planar_xy_box.hi(n + i);
    lo += std::min(cy * xlo, cy * xhi) + std::min(cx * ylo, cx * yhi);
    hi += std::max(cy * xlo, cy * xhi) + std::max(cx * ylo, cx * yhi);
  }
  return {lo, hi};
}

// Axis-aligned bounding box of { p : g o p in box }.
inline Box pullback_box(const Vec& g, const Box& box) {
  const int n = heis_n(g);
  Box r;
  r.lo = Vec(box.lo.size());
  r.hi = Vec(box.hi.size());
  r.lo.head(2 * n) = box.lo.head(2 * n) - g.head(2 * n);
  r.hi.head(2 * n) = box.hi.head(2 * n) - g.head(2 * n);
  Box planar{r.lo.head(2 * n), r.hi.head(2 * n)};
  const auto [slo, shi] = shear_range(g, planar);
  // t_new = t_box - g_t - shear, with shear ranging over [slo, shi].
  r.lo(2 * n) = box.lo(2 * n) - g(2 * n) - shi;
  r.hi(2 * n) = box.hi(2 * n) - g(2 * n) - slo;
  return r;
}

}  // namespace detail

/// Left translate: returns the field p -> u(g o p).  Analytic partials are
/// propagated through the affine change of variables; the support box is the
/// bounding box of the sheared preimage.
inline ScalarField left_translate_field(const ScalarField& u, const Vec& g) {
  if (g.size() != 2 * u.n + 1) throw std::invalid_argument("left_translate_field: dimension mismatch");
  if (!all_finite(g)) throw std::invalid_argument("left_translate_field: non-finite translation");
  const int n = u.n;
  ScalarField v;
  v.n = n;
  v.support = detail::pullback_box(g, u.support);
  if (u.eval_domain) v.eval_domain = detail::pullback_box(g, *u.eval_domain);
  ScalarField base = u;
  Vec gc = g;
  v.value = [base, gc](const Vec& p) { return base(group_compose(gc, p)); };
  if (u.has_gradient()) {
    v.gradient = [base, gc, n](const Vec& p, Vec& out) {
      const Vec q = group_compose(gc, p);
      Vec gu(2 * n + 1);
      if (base.support.contains(q)) {
        base.gradient(q, gu);
      } else {
        gu.setZero();
      }
      // d/dp [u(g o p)]: planar rows pick up the shear of the t column.
      out.resize(2 * n + 1);
      const double gt = gu(2 * n);
      out.head(n) = x_part(gu) + 2 * gt * y_part(gc);
      out.segment(n, n) = y_part(gu) - 2 * gt * x_part(gc);
      out(2 * n) = gt;
    };
  }
  return v;
}

}  // namespace heis
