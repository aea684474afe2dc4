#pragma once

#include <optional>
#include <string>
#include <vector>

#include "heis/cc.hpp"
#include "heis/core.hpp"
#include "heis/field.hpp"

namespace heis {

/// Half-space {xi : <xi, nu> > d} with inward unit normal nu.
struct HalfSpace {
  Vec nu;
  double d = 0;

  int n() const { return heis_n(nu); }
  bool contains(const Vec& xi) const { return xi.dot(nu) > d; }
  void validate() const;
};

/// Normalizes nu; warns on stderr when |nu| deviates from 1 by more than 1e-9.
HalfSpace make_halfspace(Vec nu, double d);

/// Convex polytope as an intersection of facet half-spaces, with a certified
/// interior point.
struct Polytope {
  std::vector<HalfSpace> facets;
  Vec interior;
  bool bounded = true;

  int n() const { return heis_n(interior); }
  bool contains(const Vec& xi) const;
  void validate() const;
};

/// Reads a JSON file {"facets": [{"normal": [...], "offset": r}, ...],
/// "interior": [...], "bounded": true}; normals normalized with a warning as
/// in make_halfspace.
Polytope load_polytope(const std::string& path);

double euclidean_boundary_distance(const HalfSpace& hs, const Vec& xi);
double euclidean_boundary_distance(const Polytope& omega, const Vec& xi);

/// Index of the facet realizing the boundary distance; ties break to the
/// lowest index.
int nearest_facet(const Polytope& omega, const Vec& xi);

/// Partition element Omega_k = {xi in Omega : nearest facet is k}, cut out by
/// the polytope's facets plus the dominance inequalities  <xi, a> >= b.
struct PartitionCell {
  int facet = 0;
  std::vector<std::pair<Vec, double>> inequalities;

  bool contains(const Vec& xi, double tol = 0.0) const;
};

std::vector<PartitionCell> partition_cells(const Polytope& omega);

/// Interface hyperplane between partition cells k and l: unit normal pointing
/// from cell k into cell l, its offset, and the pairing strength
/// (nu_k - nu_l) . n_kl = sqrt(2 - 2 cos(angle between the facet normals)).
struct Interface {
  Vec normal;
  double offset = 0;
  double strength = 0;
};

/// Empty when the facet normals coincide (parallel facets share no interface).
std::optional<Interface> facet_interface(const Polytope& omega, int k, int l);

/// Point where the horizontal plane is tangent to the boundary plane:
/// xi0 = (nu_y/(2 nu_t), -nu_x/(2 nu_t), d/nu_t); none when nu_t = 0.
std::optional<Vec> characteristic_point(const HalfSpace& hs);

struct WeightSpec {
  double p = 2;
  enum class Aggregation { PerComponent, L2Aggregated } aggregation = Aggregation::PerComponent;

  void validate() const;
};

/// Numerator of the Hardy weight at xi for normal nu:
/// per-component sum_i |<X_i, nu>|^p + |<Y_i, nu>|^p, or the l2-aggregated
/// conjecture variant (sum_i <X_i, nu>^2 + <Y_i, nu>^2)^{p/2}.
double weight_numerator(const Vec& xi, const Vec& nu, const WeightSpec& spec);

/// Full weight numerator / dist(xi, boundary)^p; for polytopes nu is the
/// nearest-facet normal at xi.
double hardy_weight(const HalfSpace& hs, const WeightSpec& spec, const Vec& xi);
double hardy_weight(const Polytope& omega, const WeightSpec& spec, const Vec& xi);

/// Relative residual of the identity
///   (sum_i <X_i, nu>^2 + <Y_i, nu>^2)/4 = nu_t^2 cc_distance(xi, Xi_nu)^2
/// where Xi_nu is the vertical line through the characteristic point's planar
/// part; H^1 with nu_t != 0 only.
double weight_identity_check(const HalfSpace& hs, const Vec& xi, const SolverConfig& cfg = {});

/// Reduced boundary distance: cc distance from p to the intersection of the
/// boundary plane with the horizontal plane at p.
CCResult reduced_distance(const HalfSpace& hs, const Vec& p, const SolverConfig& cfg = {});

/// Builtin domains used by tests and the CLI (H^1).
Polytope make_cube();                             // (0,1)^3
Polytope make_simplex();                          // x,y,t > 0, x+y+t < 1
Polytope make_slab();                             // 0 < t < 1, unbounded
Polytope make_random_polytope(std::uint64_t seed);  // bounded, 6 perturbed facets
Polytope make_box_polytope(const Box& box);

}  // namespace heis
