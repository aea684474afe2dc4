#pragma once

#include <functional>

#include "heis/field.hpp"

namespace heis {

/// Quintic smoothstep: 0 at z<=0, 1 at z>=1, C^2 across the junctions.
double smoothstep(double z);
double smoothstep_derivative(double z);

/// Compactly supported profile of one real variable with derivative.
/// Evaluation outside [lo, hi] is exactly 0.
struct Profile1D {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  double lo = 0;
  double hi = 0;

  double operator()(double t) const { return (t <= lo || t >= hi) ? 0.0 : value(t); }
  double d(double t) const { return (t <= lo || t >= hi) ? 0.0 : derivative(t); }
  void validate() const;
};

/// Compactly supported profile on the planar slice R^{2n}.
struct PlanarProfile {
  int n = 1;
  std::function<double(const Vec&)> value;
  std::function<void(const Vec&, Vec&)> gradient;
  Box support;  // 2n-dimensional

  double operator()(const Vec& xi) const { return support.contains(xi) ? value(xi) : 0.0; }
  Vec grad(const Vec& xi) const;
  void validate() const;
};

/// Mollifier bump exp(-smoothness / (1 - s^2)) with s^2 = sum ((p_i-c_i)/r_i)^2,
/// zero outside s < 1; analytic partials.  Value at the center: e^{-smoothness}.
ScalarField make_bump(const Vec& center, const Vec& radii, double smoothness = 1.0);

/// Same mollifier as a planar profile on R^{2n}.
PlanarProfile make_planar_bump(const Vec& center, const Vec& radii, double smoothness = 1.0);

/// Mollifier profile of one variable on (center - radius, center + radius).
Profile1D make_bump_1d(double center, double radius, double smoothness = 1.0);

/// Separable field u(xi) = w(t) phi(xi'); partials by the product rule.
ScalarField make_separable(const Profile1D& w, const PlanarProfile& phi);

/// Rescale a 1D profile: t -> w(lambda t), supported on [lo/lambda, hi/lambda].
Profile1D scale_profile(const Profile1D& w, double lambda);

}  // namespace heis
