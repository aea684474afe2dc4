#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "heis/cc.hpp"
#include "heis/rng.hpp"

using namespace heis;

namespace {

Vec pt3(double x, double y, double t) {
  Vec p(3);
  p << x, y, t;
  return p;
}

SolverConfig light_config() {
  SolverConfig cfg;
  cfg.segments = 12;
  cfg.multistarts = 4;
  cfg.max_refinements = 1;
  return cfg;
}

}  // namespace

TEST_SUITE("cc") {
  TEST_CASE("planar straight line is a geodesic") {
    const CCResult r = cc_distance(pt3(0, 0, 0), pt3(3, 4, 0));
    CHECK(r.converged);
    CHECK(r.endpoint_error < 1e-6);
    CHECK(r.distance == doctest::Approx(5.0).epsilon(2e-4));
  }

  TEST_CASE("purely vertical displacement costs sqrt(pi |t|)") {
    const CCResult r = cc_distance(pt3(0, 0, 0), pt3(0, 0, 1));
    CHECK(r.converged);
    CHECK(std::abs(r.distance - std::sqrt(M_PI)) < 2e-3);
    // Scaling law: doubling t scales the distance by sqrt(2).
    const CCResult r2 = cc_distance(pt3(0, 0, 0), pt3(0, 0, 2));
    CHECK(std::abs(r2.distance - std::sqrt(2 * M_PI)) < 3e-3);
  }

  TEST_CASE("coincident endpoints give zero distance") {
    const Vec p = pt3(0.3, -0.7, 0.2);
    const CCResult r = cc_distance(p, p);
    CHECK(r.converged);
    CHECK(r.distance == doctest::Approx(0.0));
  }

  TEST_CASE("distance is symmetric and left invariant") {
    auto rng = make_rng(301, 0);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    auto rp = [&]() { return pt3(U(rng), U(rng), U(rng)); };
    const SolverConfig cfg = light_config();
    for (int k = 0; k < 4; ++k) {
      const Vec p = rp(), q = rp(), g = rp();
      const double d = cc_distance(p, q, cfg).distance;
      const double ds = cc_distance(q, p, cfg).distance;
      const double dg = cc_distance(group_compose(g, p), group_compose(g, q), cfg).distance;
      CHECK(std::abs(ds - d) < 2e-3);
      CHECK(std::abs(dg - d) < 2e-3);
    }
  }

  TEST_CASE("distance respects dilation homogeneity") {
    const SolverConfig cfg = light_config();
    const Vec p = pt3(0.4, -0.3, 0.5);
    const double d1 = cc_distance(pt3(0, 0, 0), p, cfg).distance;
    const double d2 = cc_distance(pt3(0, 0, 0), dilate(2.0, p), cfg).distance;
    CHECK(std::abs(d2 - 2 * d1) < 4e-3);
  }

  TEST_CASE("mesh refinement never increases the reported distance") {
    SolverConfig coarse;
    coarse.segments = 8;
    coarse.max_refinements = 0;
    SolverConfig fine = coarse;
    fine.max_refinements = 3;
    const Vec a = pt3(0, 0, 0), b = pt3(0.2, -0.1, 0.6);
    const double dc = cc_distance(a, b, coarse).distance;
    const double df = cc_distance(a, b, fine).distance;
    CHECK(df <= dc + 1e-12);
  }

  TEST_CASE("kaplan gauge is bilipschitz equivalent to the cc distance") {
    // Along the geodesic family the ratio cc/gauge ranges over about
    // [0.860, sqrt(pi/2) = 1.2533]; random pairs must stay inside with a
    // little discretization slack.
    SolverConfig cfg;
    cfg.segments = 16;
    cfg.multistarts = 4;
    cfg.max_refinements = 3;
    Vec lo(3), hi(3);
    lo << -1.5, -1.5, -1.5;
    hi << 1.5, 1.5, 1.5;
    const BilipschitzScan scan = bilipschitz_scan(10, make_box(lo, hi), cfg, 9);
    CHECK(scan.pair_count >= 8);
    CHECK(scan.min_ratio > 0.855);
    CHECK(scan.max_ratio < 1.262);
  }

  TEST_CASE("distance to a vertical line is the planar offset") {
    // The line {x = 2, y = 0}: t is unconstrained along it.
    std::vector<std::pair<Vec, double>> planes;
    planes.emplace_back(pt3(1, 0, 0), 2.0);
    planes.emplace_back(pt3(0, 1, 0), 0.0);
    const AffineSet line = intersect_hyperplanes(planes, 3);
    REQUIRE(!line.empty);
    REQUIRE(line.basis.cols() == 1);
    CHECK(std::abs(std::abs(line.basis(2, 0)) - 1.0) < 1e-12);
    const CCResult r = cc_distance_to_set(pt3(0, 0, 0), line);
    CHECK(r.converged);
    CHECK(std::abs(r.distance - 2.0) < 2e-3);
  }

  TEST_CASE("inconsistent plane systems yield the empty set") {
    std::vector<std::pair<Vec, double>> planes;
    planes.emplace_back(pt3(1, 0, 0), 0.0);
    planes.emplace_back(pt3(1, 0, 0), 1.0);
    const AffineSet s = intersect_hyperplanes(planes, 3);
    CHECK(s.empty);
    const CCResult r = cc_distance_to_set(pt3(0, 0, 0), s);
    CHECK(r.converged);
    CHECK(std::isinf(r.distance));
  }

  TEST_CASE("membership in the target set short-circuits to zero") {
    std::vector<std::pair<Vec, double>> planes;
    planes.emplace_back(pt3(0, 0, 1), 0.0);
    const AffineSet plane = intersect_hyperplanes(planes, 3);
    const CCResult r = cc_distance_to_set(pt3(0.5, -0.25, 0.0), plane);
    CHECK(r.converged);
    CHECK(r.distance == doctest::Approx(0.0));
  }

  TEST_CASE("solver config parsing and validation") {
    SolverConfig bad;
    bad.segments = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = SolverConfig{};
    bad.endpoint_tol = -1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    const std::string path = "solver_config_test.tmp";
    {
      std::ofstream out(path);
      out << "# solver settings\n";
      out << "segments = 24\n";
      out << "endpoint_tol = 1e-7\n";
      out << "seed = 5\n";
    }
    const SolverConfig cfg = load_solver_config(path);
    CHECK(cfg.segments == 24);
    CHECK(cfg.endpoint_tol == doctest::Approx(1e-7));
    CHECK(cfg.seed == 5);
    CHECK(cfg.multistarts == SolverConfig{}.multistarts);
    {
      std::ofstream out(path);
      out << "segmnts = 24\n";
    }
    CHECK_THROWS_AS(load_solver_config(path), std::invalid_argument);
    std::remove(path.c_str());
  }
}
