#include <doctest.h>

#include <cmath>
#include <random>

#include "heis/bump.hpp"
#include "heis/hardy.hpp"
#include "heis/rng.hpp"

using namespace heis;

namespace {

Vec vec3(double x, double y, double t) {
  Vec v(3);
  v << x, y, t;
  return v;
}

// Bump strictly inside the half-space: centered at distance `depth` along the
// normal from a point on the boundary plane, sized to keep half the depth.
ScalarField bump_inside(const HalfSpace& hs, double depth, const Vec& tangent_shift,
                        double smoothness = 1.0) {
  const Vec center = hs.d * hs.nu + depth * hs.nu + tangent_shift;
  const double radius = 0.5 * depth / hs.nu.template lpNorm<1>();
  return make_bump(center, Vec::Constant(hs.nu.size(), radius), smoothness);
}

QuadratureSpec fast_tensor() {
  QuadratureSpec q;
  q.order = 16;
  q.panels_per_axis = 2;
  return q;
}

}  // namespace

TEST_SUITE("hardy") {

TEST_CASE("Sharp constant values and monotone limit") {
  CHECK(sharp_constant(2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(sharp_constant(3) == doctest::Approx(8.0 / 27.0).epsilon(1e-15));
  CHECK_THROWS_AS(sharp_constant(1.5), std::invalid_argument);
  // Increasing in p, approaching 1/e from below.
  double prev = sharp_constant(2);
  for (double p : {2.5, 3.0, 4.0, 8.0, 16.0, 64.0, 256.0, 1024.0}) {
    const double c = sharp_constant(p);
    CHECK(c > prev);
    CHECK(c < 1 / M_E);
    prev = c;
  }
  CHECK(sharp_constant(1024) == doctest::Approx(1 / M_E).epsilon(1e-3));
}

TEST_CASE("C(alpha, p) closed form and exact p = 2 value") {
  CHECK(hardy_constant_alpha(-0.5, 2) == 0.25);  // exact, no rounding
  CHECK(hardy_constant_alpha(0, 2) == 0.0);
  CHECK(hardy_constant_alpha(0, 3.7) == 0.0);
  CHECK_THROWS_AS(hardy_constant_alpha(-0.5, 1.2), std::invalid_argument);
}

TEST_CASE("optimal_alpha maximizes C(alpha, p): grid-search oracle") {
  for (double p : {2.0, 2.5, 3.0, 4.0, 7.5}) {
    const OptimalAlpha best = optimal_alpha(p);
    CHECK(best.constant == doctest::Approx(sharp_constant(p)).epsilon(1e-14));
    double grid_best = -std::numeric_limits<double>::infinity();
    double grid_arg = 0;
    for (int i = 0; i <= 200000; ++i) {
      const double alpha = -1.0 + i * (1.0 / 200000);
      const double c = hardy_constant_alpha(alpha, p);
      if (c > grid_best) {
        grid_best = c;
        grid_arg = alpha;
      }
    }
    CHECK(best.constant >= grid_best - 1e-14);
    CHECK(std::abs(best.constant - grid_best) < 1e-8);
    CHECK(std::abs(best.alpha - grid_arg) < 1e-4);  // grid pitch limits the argmax
  }
  CHECK(optimal_alpha(2).alpha == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("Superadditivity gap is nonnegative and vanishes at p = 2") {
  Vec v12(2);
  v12 << 1, 1;
  CHECK(superadditivity_gap(v12, 4) == doctest::Approx(2.0).epsilon(1e-14));

  auto rng = make_rng(41, 0);
  std::normal_distribution<double> N(0, 2);
  for (int s = 0; s < 1000; ++s) {
    const int dim = 2 * (1 + static_cast<int>(s % 3));
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = N(rng);
    for (double p : {2.0, 2.5, 3.0, 4.0}) {
      const double gap = superadditivity_gap(v, p);
      CHECK(gap >= -1e-12);
      if (p == 2) CHECK(gap == 0.0);
    }
  }
  CHECK_THROWS_AS(superadditivity_gap(v12, 1.5), std::invalid_argument);
}

TEST_CASE("Aggregated weight dominates the per-component weight through the gap") {
  auto rng = make_rng(43, 0);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int s = 0; s < 200; ++s) {
    const Vec xi = vec3(U(rng), U(rng), U(rng));
    const Vec nu = vec3(U(rng), U(rng), U(rng)).normalized();
    for (double p : {2.0, 3.0, 4.0}) {
      WeightSpec per, agg;
      per.p = agg.p = p;
      agg.aggregation = WeightSpec::Aggregation::L2Aggregated;
      const double gap = superadditivity_gap(frame_pairings(xi, nu), p);
      const double diff = weight_numerator(xi, nu, agg) - weight_numerator(xi, nu, per);
      CHECK(diff == doctest::Approx(gap).epsilon(1e-12));
      CHECK(diff >= -1e-12);
    }
  }
}

TEST_CASE("Jensen split bounds the power of the sum") {
  Vec x3 = Vec::Ones(3), a3 = Vec::Ones(3);
  const JensenSplit equal = jensen_split(x3, a3, 2.0);
  CHECK(equal.bound == doctest::Approx(9.0).epsilon(1e-14));  // equality case
  const JensenSplit linear = jensen_split(x3, a3, 1.0);
  CHECK(linear.bound == 3.0);
  CHECK(linear.weights.isApproxToConstant(1.0, 1e-15));

  auto rng = make_rng(47, 0);
  std::uniform_real_distribution<double> Ux(0, 3), Ua(0.1, 5), Up(2, 4);
  for (int s = 0; s < 1000; ++s) {
    Vec x(3), a(3);
    for (int i = 0; i < 3; ++i) {
      x(i) = Ux(rng);
      a(i) = Ua(rng);
    }
    const double alpha = Up(rng) / 2;
    const JensenSplit split = jensen_split(x, a, alpha);
    CHECK(split.bound >= std::pow(x.sum(), alpha) * (1 - 1e-12) - 1e-12);
  }
  Vec bad_a(3);
  bad_a << 1, 0, 1;
  CHECK_THROWS_AS(jensen_split(x3, bad_a, 2.0), std::invalid_argument);
}

TEST_CASE("Boundary sign terms: factored bracket") {
  CHECK(boundary_sign_terms(3.3, 3.3, 2.7) == 0.0);
  CHECK(boundary_sign_terms(2, 1, 2) == doctest::Approx(1.0).epsilon(1e-15));
  auto rng = make_rng(53, 0);
  std::uniform_real_distribution<double> U(0, 4), Up(2, 4);
  for (int s = 0; s < 1000; ++s) {
    CHECK(boundary_sign_terms(U(rng), U(rng), Up(rng)) >= -1e-12);
  }
  CHECK_THROWS_AS(boundary_sign_terms(-1, 0, 2), std::invalid_argument);
}

TEST_CASE("Interface bracket: sign cases and p = 2 reduction") {
  auto rng = make_rng(59, 0);
  std::normal_distribution<double> N(0, 2);
  std::uniform_real_distribution<double> Up(2, 4);
  for (int s = 0; s < 1000; ++s) {
    const double sk = N(rng), sl = N(rng), p = Up(rng);
    const double b = interface_bracket_lp(sk, sl, p);
    CHECK(b >= -1e-12);
    // p = 2 collapses to the squared difference for any sign pattern.
    CHECK(interface_bracket_lp(sk, sl, 2) == doctest::Approx((sk - sl) * (sk - sl)).epsilon(1e-12));
  }
  // Same signs factor; opposite signs add four nonnegative terms.
  CHECK(interface_bracket_lp(2, 1, 3) == doctest::Approx((4 - 1) * (2 - 1)).epsilon(1e-13));
  CHECK(interface_bracket_lp(2, -1, 3) == doctest::Approx(8 + 4 + 1 + 2).epsilon(1e-13));
}

TEST_CASE("Half-space quotient: horizontal boundary bump clears the constant") {
  const HalfSpace hs = make_halfspace(vec3(0, 0, 1), 0);
  const ScalarField u = make_bump(vec3(0.4, -0.3, 1.2), vec3(1.0, 1.0, 0.9));
  const WeightSpec spec;
  const QuotientReport rep = evaluate_quotient(u, hs, spec, fast_tensor());
  CHECK(rep.constant == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(rep.quotient > 0);
  CHECK(rep.margin > 3 * rep.quotient_error);
  CHECK(rep.lhs.value > 0);
  CHECK(rep.rhs_raw.value > 0);
  CHECK(rep.domain.find("halfspace") == 0);
}

TEST_CASE("Quotient is invariant under scaling of u") {
  const HalfSpace hs = make_halfspace(vec3(0.3, -0.2, 1.0), 0.1);
  const ScalarField u = bump_inside(hs, 1.0, vec3(0.2, 0.4, 0.0));
  for (double p : {2.0, 3.0}) {
    WeightSpec spec;
    spec.p = p;
    const QuotientReport base = evaluate_quotient(u, hs, spec, fast_tensor());
    ScalarField cu = u;
    const ScalarField& uref = u;
    const double c = p == 2 ? 1.7 : 0.3;
    cu.value = [c, &uref](const Vec& q) { return c * uref.value(q); };
    cu.gradient = [c, &uref](const Vec& q, Vec& g) {
      uref.gradient(q, g);
      g *= c;
    };
    const QuotientReport scaled = evaluate_quotient(cu, hs, spec, fast_tensor());
    CHECK(scaled.quotient == doctest::Approx(base.quotient).epsilon(1e-12));
  }
}

TEST_CASE("Quotient is invariant under left translations stabilizing a vertical wall") {
  const HalfSpace hs = make_halfspace(vec3(1, 0, 0), 0);
  const ScalarField u = make_bump(vec3(1.0, 0.5, -0.3), vec3(0.6, 0.8, 1.0));
  const WeightSpec spec;
  const QuotientReport base = evaluate_quotient(u, hs, spec, fast_tensor());

  // g with zero x-part: left translation maps {x > 0} onto itself.
  const Vec g = vec3(0, 1.3, -0.7);
  const ScalarField v = left_translate_field(u, g);
  const QuotientReport moved = evaluate_quotient(v, hs, spec, fast_tensor());
  CHECK(moved.quotient == doctest::Approx(base.quotient).epsilon(1e-9));
}

TEST_CASE("Generic power path matches the dedicated p = 2 path") {
  const HalfSpace hs = make_halfspace(vec3(0, 1, 1), 0);
  const ScalarField u = bump_inside(hs, 1.2, vec3(0.3, 0.0, 0.2));
  const WeightSpec spec;
  const QuotientReport dedicated = evaluate_quotient(u, hs, spec, fast_tensor());
  const QuotientReport generic = evaluate_quotient_generic(u, hs, spec, fast_tensor());
  CHECK(generic.quotient == doctest::Approx(dedicated.quotient).epsilon(1e-10));

  const Polytope cube = make_cube();
  const ScalarField uc = make_bump(vec3(0.5, 0.5, 0.5), vec3(0.35, 0.35, 0.35));
  QuadratureSpec quad = fast_tensor();
  quad.samples = 40000;
  const QuotientReport dc = evaluate_quotient(uc, cube, spec, quad);
  const QuotientReport gc = evaluate_quotient_generic(uc, cube, spec, quad);
  CHECK(gc.quotient == doctest::Approx(dc.quotient).epsilon(1e-10));
}

TEST_CASE("Support margin enforcement") {
  const HalfSpace hs = make_halfspace(vec3(0, 0, 1), 0);
  const ScalarField tight = make_bump(vec3(0, 0, 0.5), vec3(1.0, 1.0, 0.4999));
  const WeightSpec spec;
  CHECK_NOTHROW(evaluate_quotient(tight, hs, spec, fast_tensor()));
  const ScalarField touching = make_bump(vec3(0, 0, 0.5), vec3(1.0, 1.0, 0.49999));
  CHECK_THROWS_AS(evaluate_quotient(touching, hs, spec, fast_tensor()), std::invalid_argument);

  CHECK(support_margin(hs, tight.support) == doctest::Approx(1e-4 + 1e-3).epsilon(1e-6));
  const Polytope cube = make_cube();
  Vec c = vec3(0.5, 0.5, 0.5);
  CHECK(support_margin(cube, make_bump(c, vec3(0.25, 0.3, 0.45)).support) ==
        doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("Cube quotient clears the constant for p in {2, 3}") {
  const Polytope cube = make_cube();
  const ScalarField u = make_bump(vec3(0.5, 0.5, 0.5), vec3(0.4, 0.35, 0.3));
  for (double p : {2.0, 3.0}) {
    WeightSpec spec;
    spec.p = p;
    QuadratureSpec quad = fast_tensor();
    quad.samples = 60000;
    const QuotientReport rep = evaluate_quotient(u, cube, spec, quad);
    CHECK(rep.margin > -3 * rep.quotient_error);
    CHECK(rep.quotient > 0);
    CHECK(rep.domain.find("polytope") == 0);
  }
}

TEST_CASE("Monte Carlo path handles the second Heisenberg group") {
  Vec nu = Vec::Zero(5);
  nu(4) = 1;
  const HalfSpace hs = make_halfspace(nu, 0);
  Vec center(5), radii(5);
  center << 0.2, -0.4, 0.3, 0.1, 1.0;
  radii << 0.8, 0.8, 0.8, 0.8, 0.7;
  const ScalarField u = make_bump(center, radii);
  WeightSpec spec;
  QuadratureSpec quad;
  quad.method = QuadratureSpec::Method::MonteCarlo;
  quad.samples = 200000;
  quad.seed = 19;
  const QuotientReport rep = evaluate_quotient(u, hs, spec, quad);
  CHECK(rep.margin > -3 * rep.quotient_error);
  CHECK(rep.lhs.error > 0);
  CHECK(rep.rhs_raw.error > 0);
  // Same seed reproduces the exact numbers.
  const QuotientReport again = evaluate_quotient(u, hs, spec, quad);
  CHECK(rep.quotient == again.quotient);
}

TEST_CASE("Translation reduction: identity case is exact, tilted case is tiny") {
  QuadratureSpec quad;
  quad.order = 12;
  quad.panels_per_axis = 2;

  const HalfSpace flat = make_halfspace(vec3(0, 0, 1), 0);
  const ScalarField u0 = make_bump(vec3(0.2, -0.1, 1.0), vec3(0.8, 0.8, 0.7));
  CHECK(verify_translation_reduction(flat, u0, quad) == 0.0);

  const HalfSpace tilted = make_halfspace(vec3(0, 1, 1), 0);
  const ScalarField u1 = bump_inside(tilted, 1.5, vec3(0.4, -0.2, 0.1));
  CHECK(verify_translation_reduction(tilted, u1, quad) < 1e-6);

  auto rng = make_rng(61, 0);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 10; ++trial) {
    Vec nu = vec3(U(rng), U(rng), U(rng) + (U(rng) > 0 ? 1.5 : -1.5)).normalized();
    const HalfSpace hs = make_halfspace(nu, 0.3 * U(rng));
    const ScalarField u = bump_inside(hs, 1.0 + 0.5 * U(rng), vec3(0.3 * U(rng), 0.3 * U(rng), 0.3 * U(rng)));
    CHECK(verify_translation_reduction(hs, u, quad) < 1e-5);
  }

  CHECK_THROWS_AS(verify_translation_reduction(make_halfspace(vec3(1, 0, 0), 0), u0, quad),
                  std::invalid_argument);
}

TEST_CASE("Interface audit of the cube reports no negative samples") {
  const Polytope cube = make_cube();
  for (double p : {2.0, 3.0}) {
    const InterfaceSignReport report = polytope_interface_audit(cube, p, 200, 23);
    CHECK(report.total_samples > 0);
    CHECK(report.total_negatives == 0);
    CHECK(report.min_integrand >= -1e-12);
    CHECK(!report.entries.empty());
    for (const auto& e : report.entries) {
      CHECK(e.negatives == 0);
      CHECK(e.samples > 0);
    }
  }
  CHECK_THROWS_AS(polytope_interface_audit(make_slab(), 2, 10, 0), std::invalid_argument);
}

TEST_CASE("Right-angle interfaces drop the prefactor") {
  const Polytope cube = make_cube();
  const auto g02 = facet_interface(cube, 0, 2);
  REQUIRE(g02.has_value());
  // angle pi/2: sqrt(1 - cos) = 1, so the density is the bare pairing energy.
  auto rng = make_rng(67, 0);
  std::uniform_real_distribution<double> U(0.1, 0.9);
  for (int s = 0; s < 50; ++s) {
    Vec xi(3);
    const double a = U(rng);
    xi << a, a, U(rng);
    const double direct = frame_pairings(xi, g02->normal).squaredNorm();
    CHECK(interface_integrand_p2(xi, *g02) == doctest::Approx(direct).epsilon(1e-12));
    // Cross-module assembly of the same formula.
    const double prefactor = std::sqrt(1 - cube.facets[0].nu.dot(cube.facets[2].nu));
    CHECK(interface_integrand_p2(xi, *g02) ==
          doctest::Approx(prefactor * frame_pairings(xi, g02->normal).squaredNorm()).epsilon(1e-12));
  }
}

}  // TEST_SUITE
