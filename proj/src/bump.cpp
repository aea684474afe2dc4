#include "heis/bump.hpp"

#include <cmath>
#include <stdexcept>

namespace heis {

double smoothstep(double z) {
  if (z <= 0) return 0;
  if (z >= 1) return 1;
  return z * z * z * (10 + z * (-15 + 6 * z));
}

double smoothstep_derivative(double z) {
  if (z <= 0 || z >= 1) return 0;
  const double w = z * (1 - z);
  return 30 * w * w;
}

void Profile1D::validate() const {
  if (!(lo < hi)) throw std::invalid_argument("Profile1D: empty support interval");
  if (!value || !derivative) throw std::invalid_argument("Profile1D: missing evaluators");
}

Vec PlanarProfile::grad(const Vec& xi) const {
  Vec g = Vec::Zero(2 * n);
  if (support.contains(xi)) gradient(xi, g);
  return g;
}

void PlanarProfile::validate() const {
  if (n < 1) throw std::invalid_argument("PlanarProfile: n >= 1 required");
  if (!value || !gradient) throw std::invalid_argument("PlanarProfile: missing evaluators");
  support.validate();
  if (support.dim() != 2 * n) throw std::invalid_argument("PlanarProfile: support dimension mismatch");
}

namespace {

// Shared mollifier core in scaled coordinates; d/dp_i handled by the caller
// through the chain factor 2 (p_i - c_i) / r_i^2.
struct Mollifier {
  Vec center, radii;
  double smoothness;

  double s2(const Vec& p) const { return ((p - center).array() / radii.array()).square().sum(); }

  double value(const Vec& p) const {
    const double s = s2(p);
    if (s >= 1 - 1e-9) return 0;
    return std::exp(-smoothness / (1 - s));
  }

  void gradient(const Vec& p, Vec& g) const {
    const double s = s2(p);
    g.resize(p.size());
    if (s >= 1 - 1e-9) {
      g.setZero();
      return;
    }
    const double denom = 1 - s;
    const double factor = std::exp(-smoothness / denom) * (-smoothness / (denom * denom));
    g = factor * 2 * ((p - center).array() / radii.array().square()).matrix();
  }
};

Mollifier make_mollifier(const Vec& center, const Vec& radii, double smoothness) {
  if (center.size() != radii.size() || center.size() == 0)
    throw std::invalid_argument("bump: center and radii must have equal nonzero size");
  if (!(radii.array() > 0).all()) throw std::invalid_argument("bump: radii must be positive");
  if (!(smoothness > 0)) throw std::invalid_argument("bump: smoothness must be positive");
  if (!all_finite(center) || !all_finite(radii)) throw std::invalid_argument("bump: non-finite parameters");
  return Mollifier{center, radii, smoothness};
}

}  // namespace

ScalarField make_bump(const Vec& center, const Vec& radii, double smoothness) {
  const Mollifier m = make_mollifier(center, radii, smoothness);
  const int n = heis_n(center);
  ScalarField f;
  f.n = n;
  f.support = centered_box(center, radii);
  f.value = [m](const Vec& p) { return m.value(p); };
  f.gradient = [m](const Vec& p, Vec& g) { m.gradient(p, g); };
  return f;
}

PlanarProfile make_planar_bump(const Vec& center, const Vec& radii, double smoothness) {
  const Mollifier m = make_mollifier(center, radii, smoothness);
  if (center.size() % 2 != 0) throw std::invalid_argument("make_planar_bump: planar dimension must be even");
  PlanarProfile phi;
  phi.n = static_cast<int>(center.size() / 2);
  phi.support = centered_box(center, radii);
  phi.value = [m](const Vec& p) { return m.value(p); };
  phi.gradient = [m](const Vec& p, Vec& g) { m.gradient(p, g); };
  return phi;
}

Profile1D make_bump_1d(double center, double radius, double smoothness) {
  const Mollifier m = make_mollifier(Vec::Constant(1, center), Vec::Constant(1, radius), smoothness);
  Profile1D w;
  w.lo = center - radius;
  w.hi = center + radius;
  w.value = [m](double t) { return m.value(Vec::Constant(1, t)); };
  w.derivative = [m](double t) {
    Vec g(1);
    m.gradient(Vec::Constant(1, t), g);
    return g(0);
  };
  return w;
}

ScalarField make_separable(const Profile1D& w, const PlanarProfile& phi) {
  w.validate();
  phi.validate();
  const int n = phi.n;
  ScalarField u;
  u.n = n;
  u.support.lo = Vec(2 * n + 1);
  u.support.hi = Vec(2 * n + 1);
  u.support.lo.head(2 * n) = phi.support.lo;
  u.support.hi.head(2 * n) = phi.support.hi;
  u.support.lo(2 * n) = w.lo;
  u.support.hi(2 * n) = w.hi;
  u.value = [w, phi, n](const Vec& p) { return w(p(2 * n)) * phi(p.head(2 * n).eval()); };
  u.gradient = [w, phi, n](const Vec& p, Vec& g) {
    const Vec xi = p.head(2 * n).eval();
    const double t = p(2 * n);
    g.resize(2 * n + 1);
    g.head(2 * n) = w(t) * phi.grad(xi);
    g(2 * n) = w.d(t) * phi(xi);
  };
  return u;
}

Profile1D scale_profile(const Profile1D& w, double lambda) {
  w.validate();
  if (!(lambda > 0)) throw std::invalid_argument("scale_profile: lambda must be positive");
  Profile1D s;
  s.lo = w.lo / lambda;
  s.hi = w.hi / lambda;
  s.value = [w, lambda](double t) { return w(lambda * t); };
  s.derivative = [w, lambda](double t) { return lambda * w.d(lambda * t); };
  return s;
}

}  // namespace heis
