#include "heis/domains.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "heis/rng.hpp"

namespace heis {

void HalfSpace::validate() const {
  heis_n(nu);
  if (!all_finite(nu) || !std::isfinite(d)) throw std::invalid_argument("HalfSpace: non-finite data");
  if (std::abs(nu.norm() - 1.0) > 1e-12) throw std::invalid_argument("HalfSpace: normal must be unit");
}

HalfSpace make_halfspace(Vec nu, double d) {
  heis_n(nu);
  if (!all_finite(nu) || !std::isfinite(d)) throw std::invalid_argument("make_halfspace: non-finite data");
  const double norm = nu.norm();
  if (!(norm > 0)) throw std::invalid_argument("make_halfspace: zero normal");
  if (std::abs(norm - 1.0) > 1e-9) {
    std::cerr << "make_halfspace: normalizing normal with |nu| = " << norm << "\n";
  }
  // Divide the offset too so the geometric set is unchanged.
  return HalfSpace{nu / norm, d / norm};
}

bool Polytope::contains(const Vec& xi) const {
  for (const auto& f : facets)
    if (!f.contains(xi)) return false;
  return true;
}

void Polytope::validate() const {
  if (facets.empty()) throw std::invalid_argument("Polytope: needs at least one facet");
  const int nn = n();
  for (const auto& f : facets) {
    f.validate();
    if (f.n() != nn) throw std::invalid_argument("Polytope: mixed dimensions");
  }
  for (std::size_t k = 0; k < facets.size(); ++k)
    for (std::size_t l = k + 1; l < facets.size(); ++l)
      if ((facets[k].nu - facets[l].nu).norm() < 1e-12 && std::abs(facets[k].d - facets[l].d) < 1e-12)
        throw std::invalid_argument("Polytope: duplicate facets");
  if (!contains(interior)) throw std::invalid_argument("Polytope: interior point is not interior");
}

Polytope load_polytope(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_polytope: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("load_polytope: " + path + ": " + e.what());
  }
  if (!j.contains("facets") || !j["facets"].is_array() || j["facets"].empty())
    throw std::invalid_argument("load_polytope: missing facets array");
  Polytope omega;
  for (const auto& rec : j["facets"]) {
    if (!rec.contains("normal") || !rec.contains("offset"))
      throw std::invalid_argument("load_polytope: facet record needs normal and offset");
    const auto coords = rec["normal"].get<std::vector<double>>();
    Vec nu(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) nu(static_cast<Eigen::Index>(i)) = coords[i];
    omega.facets.push_back(make_halfspace(nu, rec["offset"].get<double>()));
  }
  if (j.contains("interior")) {
    const auto coords = j["interior"].get<std::vector<double>>();
    omega.interior.resize(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) omega.interior(static_cast<Eigen::Index>(i)) = coords[i];
  } else {
    // Chebyshev-style fallback: average of facet feet often works for the
    // simple shapes this loader is meant for.
    throw std::invalid_argument("load_polytope: missing interior point");
  }
  omega.bounded = j.value("bounded", true);
  omega.validate();
  return omega;
}

double euclidean_boundary_distance(const HalfSpace& hs, const Vec& xi) {
  hs.validate();
  const double dist = xi.dot(hs.nu) - hs.d;
  if (dist < 0) throw std::invalid_argument("euclidean_boundary_distance: point outside the half-space");
  return dist;
}

double euclidean_boundary_distance(const Polytope& omega, const Vec& xi) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : omega.facets) best = std::min(best, xi.dot(f.nu) - f.d);
  if (best < 0) throw std::invalid_argument("euclidean_boundary_distance: point outside the polytope");
  return best;
}

int nearest_facet(const Polytope& omega, const Vec& xi) {
  int arg = -1;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < omega.facets.size(); ++k) {
    const double dist = xi.dot(omega.facets[k].nu) - omega.facets[k].d;
    if (dist < 0) throw std::invalid_argument("nearest_facet: point outside the polytope");
    if (dist < best) {
      best = dist;
      arg = static_cast<int>(k);
    }
  }
  return arg;
}

bool PartitionCell::contains(const Vec& xi, double tol) const {
  for (const auto& [a, b] : inequalities)
    if (xi.dot(a) < b - tol) return false;
  return true;
}

std::vector<PartitionCell> partition_cells(const Polytope& omega) {
  omega.validate();
  std::vector<PartitionCell> cells;
  const std::size_t m = omega.facets.size();
  for (std::size_t k = 0; k < m; ++k) {
    PartitionCell cell;
    cell.facet = static_cast<int>(k);
    for (const auto& f : omega.facets) cell.inequalities.emplace_back(f.nu, f.d);
    // Dominance: dist to facet k <= dist to facet l, i.e. <xi, nu_l - nu_k> >= d_l - d_k.
    for (std::size_t l = 0; l < m; ++l) {
      if (l == k) continue;
      cell.inequalities.emplace_back(omega.facets[l].nu - omega.facets[k].nu,
                                     omega.facets[l].d - omega.facets[k].d);
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

std::optional<Interface> facet_interface(const Polytope& omega, int k, int l) {
  const int m = static_cast<int>(omega.facets.size());
  if (k < 0 || l < 0 || k >= m || l >= m || k == l)
    throw std::invalid_argument("facet_interface: invalid facet pair");
  const Vec diff = omega.facets[k].nu - omega.facets[l].nu;
  const double norm = diff.norm();
  if (norm < 1e-12) return std::nullopt;
  Interface g;
  g.normal = diff / norm;
  g.offset = (omega.facets[k].d - omega.facets[l].d) / norm;
  g.strength = norm;  // (nu_k - nu_l) . n_kl = |nu_k - nu_l| = sqrt(2 - 2 cos a_kl)
  return g;
}

std::optional<Vec> characteristic_point(const HalfSpace& hs) {
  hs.validate();
  const int n = hs.n();
  const double nt = t_coord(hs.nu);
  if (nt == 0.0) return std::nullopt;
  Vec xi0(2 * n + 1);
  xi0.head(n) = y_part(hs.nu) / (2 * nt);
  xi0.segment(n, n) = -x_part(hs.nu) / (2 * nt);
  xi0(2 * n) = hs.d / nt;
  return xi0;
}

void WeightSpec::validate() const {
  if (!(p >= 2)) throw std::invalid_argument("WeightSpec: p >= 2 required");
}

double weight_numerator(const Vec& xi, const Vec& nu, const WeightSpec& spec) {
  spec.validate();
  const Vec pairings = frame_pairings(xi, nu);
  if (spec.aggregation == WeightSpec::Aggregation::L2Aggregated)
    return std::pow(pairings.squaredNorm(), spec.p / 2);
  if (spec.p == 2) return pairings.squaredNorm();
  return pairings.array().abs().pow(spec.p).sum();
}

double hardy_weight(const HalfSpace& hs, const WeightSpec& spec, const Vec& xi) {
  const double dist = euclidean_boundary_distance(hs, xi);
  if (dist == 0) throw std::invalid_argument("hardy_weight: point on the boundary");
  return weight_numerator(xi, hs.nu, spec) / std::pow(dist, spec.p);
}

double hardy_weight(const Polytope& omega, const WeightSpec& spec, const Vec& xi) {
  const int k = nearest_facet(omega, xi);
  const double dist = xi.dot(omega.facets[k].nu) - omega.facets[k].d;
  if (dist == 0) throw std::invalid_argument("hardy_weight: point on the boundary");
  return weight_numerator(xi, omega.facets[k].nu, spec) / std::pow(dist, spec.p);
}

double weight_identity_check(const HalfSpace& hs, const Vec& xi, const SolverConfig& cfg) {
  if (hs.n() != 1 || xi.size() != 3) throw std::invalid_argument("weight_identity_check: H^1 only");
  const double nt = t_coord(hs.nu);
  if (nt == 0.0) throw std::invalid_argument("weight_identity_check: nu_t must be nonzero");
  const Vec pairings = frame_pairings(xi, hs.nu);
  const double lhs = pairings.squaredNorm() / 4;

  const Vec xi0 = *characteristic_point(hs);
  std::vector<std::pair<Vec, double>> planes;
  Vec ex = Vec::Zero(3), ey = Vec::Zero(3);
  ex(0) = 1;
  ey(1) = 1;
  planes.emplace_back(ex, xi0(0));
  planes.emplace_back(ey, xi0(1));
  const AffineSet line = intersect_hyperplanes(planes, 3);
  const CCResult r = cc_distance_to_set(xi, line, cfg);
  const double rhs = nt * nt * r.distance * r.distance;
  if (std::abs(lhs) < 1e-12 && std::abs(rhs) < 1e-12) return 0.0;
  return std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
}

CCResult reduced_distance(const HalfSpace& hs, const Vec& p, const SolverConfig& cfg) {
  hs.validate();
  if (p.size() != hs.nu.size()) throw std::invalid_argument("reduced_distance: dimension mismatch");
  const Vec m = horizontal_plane_normal(p);
  std::vector<std::pair<Vec, double>> planes;
  planes.emplace_back(hs.nu, hs.d);
  planes.emplace_back(m, p.dot(m));
  const AffineSet target = intersect_hyperplanes(planes, static_cast<int>(p.size()));
  return cc_distance_to_set(p, target, cfg);
}

namespace {

Vec unit3(int axis, double sign) {
  Vec v = Vec::Zero(3);
  v(axis) = sign;
  return v;
}

}  // namespace

Polytope make_box_polytope(const Box& box) {
  box.validate();
  const Eigen::Index dim = box.dim();
  if (dim < 3 || dim % 2 == 0) throw std::invalid_argument("make_box_polytope: odd dimension >= 3 required");
  Polytope omega;
  for (Eigen::Index k = 0; k < dim; ++k) {
    Vec lo = Vec::Zero(dim), hi = Vec::Zero(dim);
    lo(k) = 1;
    hi(k) = -1;
    omega.facets.push_back(HalfSpace{lo, box.lo(k)});
    omega.facets.push_back(HalfSpace{hi, -box.hi(k)});
  }
  omega.interior = box.center();
  omega.bounded = true;
  omega.validate();
  return omega;
}

Polytope make_cube() {
  Vec lo = Vec::Zero(3), hi = Vec::Ones(3);
  return make_box_polytope(make_box(lo, hi));
}

Polytope make_simplex() {
  Polytope omega;
  omega.facets.push_back(HalfSpace{unit3(0, 1), 0});
  omega.facets.push_back(HalfSpace{unit3(1, 1), 0});
  omega.facets.push_back(HalfSpace{unit3(2, 1), 0});
  Vec diag = -Vec::Ones(3) / std::sqrt(3.0);
  omega.facets.push_back(HalfSpace{diag, -1 / std::sqrt(3.0)});
  omega.interior = Vec::Constant(3, 0.125);
  omega.bounded = true;
  omega.validate();
  return omega;
}

Polytope make_slab() {
  Polytope omega;
  omega.facets.push_back(HalfSpace{unit3(2, 1), 0});
  omega.facets.push_back(HalfSpace{unit3(2, -1), -1});
  omega.interior = Vec::Zero(3);
  omega.interior(2) = 0.5;
  omega.bounded = false;
  omega.validate();
  return omega;
}

Polytope make_random_polytope(std::uint64_t seed) {
  auto rng = make_rng(seed, 313);
  std::normal_distribution<double> N(0.0, 0.18);
  std::uniform_real_distribution<double> U(0.8, 1.2);
  Polytope omega;
  for (int axis = 0; axis < 3; ++axis) {
    for (double sign : {1.0, -1.0}) {
      Vec nu = unit3(axis, sign);
      for (int i = 0; i < 3; ++i) nu(i) += N(rng);
      nu.normalize();
      omega.facets.push_back(HalfSpace{nu, -U(rng)});
    }
  }
  omega.interior = Vec::Zero(3);
  omega.bounded = true;
  omega.validate();
  return omega;
}

}  // namespace heis
