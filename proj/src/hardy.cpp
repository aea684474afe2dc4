#include "heis/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "heis/rng.hpp"

namespace heis {

double sharp_constant(double p) {
  if (!(p >= 2)) throw std::invalid_argument("sharp_constant: p >= 2 required");
  return std::pow((p - 1) / p, p);
}

double hardy_constant_alpha(double alpha, double p) {
  if (!(p >= 2)) throw std::invalid_argument("hardy_constant_alpha: p >= 2 required");
  if (!std::isfinite(alpha)) throw std::invalid_argument("hardy_constant_alpha: non-finite alpha");
  return -(p - 1) * (alpha + std::pow(std::abs(alpha), p / (p - 1)));
}

OptimalAlpha optimal_alpha(double p) {
  OptimalAlpha r;
  r.alpha = -std::pow((p - 1) / p, p - 1);
  r.constant = hardy_constant_alpha(r.alpha, p);
  return r;
}

double superadditivity_gap(const Vec& v, double p) {
  if (!(p >= 2)) throw std::invalid_argument("superadditivity_gap: p >= 2 required");
  if (v.size() == 0) throw std::invalid_argument("superadditivity_gap: empty vector");
  // Shared accumulation order keeps the p = 2 gap exactly zero.
  double s2 = 0, sp = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    s2 += a * a;
    sp += std::pow(a, p);
  }
  return std::pow(s2, p / 2) - sp;
}

JensenSplit jensen_split(const Vec& x, const Vec& a, double alpha) {
  if (x.size() != a.size() || x.size() == 0) throw std::invalid_argument("jensen_split: size mismatch");
  if (!(alpha >= 1)) throw std::invalid_argument("jensen_split: alpha >= 1 required");
  if (!(x.array() >= 0).all()) throw std::invalid_argument("jensen_split: x must be nonnegative");
  if (!(a.array() > 0).all()) throw std::invalid_argument("jensen_split: a must be positive");
  const double total = a.sum();
  JensenSplit r;
  r.weights = (a.array().pow(1 - alpha) * std::pow(total, alpha - 1)).matrix();
  r.bound = (r.weights.array() * x.array().pow(alpha)).sum();
  return r;
}

double boundary_sign_terms(double A, double B, double p) {
  if (A < 0 || B < 0) throw std::invalid_argument("boundary_sign_terms: A, B >= 0 required");
  if (!(p >= 2)) throw std::invalid_argument("boundary_sign_terms: p >= 2 required");
  return (std::pow(A, p - 1) - std::pow(B, p - 1)) * (A - B);
}

double interface_integrand_p2(const Vec& xi, const Interface& gamma) {
  const double prefactor = gamma.strength / std::sqrt(2.0);  // sqrt(1 - cos)
  return prefactor * frame_pairings(xi, gamma.normal).squaredNorm();
}

double interface_bracket_lp(double s_k, double s_l, double p) {
  const double A = std::abs(s_k), B = std::abs(s_l);
  if (s_k * s_l >= 0) return boundary_sign_terms(A, B, p);
  if (!(p >= 2)) throw std::invalid_argument("interface_bracket_lp: p >= 2 required");
  // Opposite signs turn both mixed terms positive.
  return std::pow(A, p) + std::pow(A, p - 1) * B + std::pow(B, p) + std::pow(B, p - 1) * A;
}

void QuadratureSpec::validate() const {
  if (order < 2 || order > 256) throw std::invalid_argument("QuadratureSpec: order must be in [2, 256]");
  if (panels_per_axis < 1 || panels_per_axis > 64)
    throw std::invalid_argument("QuadratureSpec: panels_per_axis must be in [1, 64]");
  if (samples < 1000) throw std::invalid_argument("QuadratureSpec: samples >= 1000 required");
}

QuadratureSpec default_quadrature(int n) {
  if (n < 1) throw std::invalid_argument("default_quadrature: n >= 1 required");
  QuadratureSpec q;
  q.method = n == 1 ? QuadratureSpec::Method::TensorGauss : QuadratureSpec::Method::MonteCarlo;
  return q;
}

double support_margin(const HalfSpace& hs, const Box& support) {
  support.validate();
  if (support.dim() != hs.nu.size()) throw std::invalid_argument("support_margin: dimension mismatch");
  // The minimum of a linear functional over a box splits per axis.
  double m = -hs.d;
  for (Eigen::Index k = 0; k < support.dim(); ++k)
    m += std::min(hs.nu(k) * support.lo(k), hs.nu(k) * support.hi(k));
  return m;
}

double support_margin(const Polytope& omega, const Box& support) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& f : omega.facets) m = std::min(m, support_margin(f, support));
  return m;
}

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string describe(const HalfSpace& hs) {
  std::ostringstream os;
  os << "halfspace(nu=[";
  for (Eigen::Index k = 0; k < hs.nu.size(); ++k) {
    if (k) os << ",";
    os << format_double(hs.nu(k));
  }
  os << "],d=" << format_double(hs.d) << ")";
  return os.str();
}

std::string describe(const Polytope& omega) {
  std::ostringstream os;
  os << "polytope(facets=" << omega.facets.size() << (omega.bounded ? "" : ",unbounded") << ")";
  return os.str();
}

double pow_abs(double v, double p) { return std::pow(std::abs(v), p); }

// Per-component numerator through the power-based path for every p.
double generic_numerator(const Vec& xi, const Vec& nu, const WeightSpec& spec) {
  const Vec s = frame_pairings(xi, nu);
  if (spec.aggregation == WeightSpec::Aggregation::L2Aggregated)
    return std::pow(s.squaredNorm(), spec.p / 2);
  double acc = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(std::abs(s(i)), spec.p);
  return acc;
}

IntegralResult integrate_spec(const std::function<double(const Vec&)>& f, const Box& box,
                              const QuadratureSpec& quad, std::uint64_t stream) {
  if (quad.method == QuadratureSpec::Method::TensorGauss)
    return tensor_integrate(f, PanelGrid::from_box(box, quad.panels_per_axis), quad.order);
  return mc_integrate(f, box, quad.samples, substream_seed(quad.seed, stream));
}

void check_margin(double margin) {
  if (!(margin >= 1e-3))
    throw std::invalid_argument("evaluate_quotient: support must keep a margin >= 1e-3 from the boundary");
}

void finalize(QuotientReport& rep, double p, const WeightSpec& spec, const QuadratureSpec& quad,
              std::string domain) {
  rep.p = p;
  rep.weight = spec;
  rep.quad = quad;
  rep.domain = std::move(domain);
  rep.constant = sharp_constant(p);
  if (!(rep.rhs_raw.value > 0))
    throw std::runtime_error("evaluate_quotient: right-hand side is not positive; is u nonzero?");
  rep.quotient = rep.lhs.value / rep.rhs_raw.value;
  rep.margin = rep.quotient - rep.constant;
  const double lhs_rel = rep.lhs.error / std::max(std::abs(rep.lhs.value), 1e-300);
  const double rhs_rel = rep.rhs_raw.error / rep.rhs_raw.value;
  rep.quotient_error = rep.quotient * (lhs_rel + rhs_rel);
}

QuotientReport eval_halfspace(const ScalarField& u, const HalfSpace& hs, const WeightSpec& spec,
                              const QuadratureSpec& quad, bool generic) {
  hs.validate();
  spec.validate();
  quad.validate();
  if (u.support.dim() != hs.nu.size())
    throw std::invalid_argument("evaluate_quotient: field and domain dimensions differ");
  check_margin(support_margin(hs, u.support));
  const double p = spec.p;

  std::function<double(const Vec&)> lhs_f, rhs_f;
  if (!generic && p == 2) {
    lhs_f = [&u](const Vec& xi) { return horizontal_gradient(u, xi).squaredNorm(); };
    rhs_f = [&u, &hs, &spec](const Vec& xi) {
      const double v = u(xi);
      return hardy_weight(hs, spec, xi) * v * v;
    };
  } else {
    lhs_f = [&u, p](const Vec& xi) { return std::pow(horizontal_gradient(u, xi).squaredNorm(), p / 2); };
    rhs_f = [&u, &hs, &spec, p](const Vec& xi) {
      const double dist = euclidean_boundary_distance(hs, xi);
      return generic_numerator(xi, hs.nu, spec) / std::pow(dist, p) * pow_abs(u(xi), p);
    };
  }

  QuotientReport rep;
  rep.lhs = integrate_spec(lhs_f, u.support, quad, 1);
  rep.rhs_raw = integrate_spec(rhs_f, u.support, quad, 2);
  finalize(rep, p, spec, quad, describe(hs));
  return rep;
}

QuotientReport eval_polytope(const ScalarField& u, const Polytope& omega, const WeightSpec& spec,
                             const QuadratureSpec& quad, bool generic) {
  omega.validate();
  spec.validate();
  quad.validate();
  if (u.support.dim() != omega.interior.size())
    throw std::invalid_argument("evaluate_quotient: field and domain dimensions differ");
  check_margin(support_margin(omega, u.support));
  const double p = spec.p;

  std::function<double(const Vec&)> lhs_f;
  if (!generic && p == 2) {
    lhs_f = [&u](const Vec& xi) { return horizontal_gradient(u, xi).squaredNorm(); };
  } else {
    lhs_f = [&u, p](const Vec& xi) { return std::pow(horizontal_gradient(u, xi).squaredNorm(), p / 2); };
  }

  QuotientReport rep;
  rep.lhs = integrate_spec(lhs_f, u.support, quad, 1);

  // Right-hand side per partition cell: the facet normal is constant inside a
  // cell, so the weight has no argmin discontinuity under the integral.
  const auto cells = partition_cells(omega);
  const std::int64_t per_cell =
      std::max<std::int64_t>(1000, quad.samples / static_cast<std::int64_t>(cells.size()));
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const PartitionCell& cell = cells[c];
    const HalfSpace& facet = omega.facets[static_cast<std::size_t>(cell.facet)];
    std::function<double(const Vec&)> cell_f;
    if (!generic && p == 2) {
      cell_f = [&u, &facet, &spec](const Vec& xi) {
        const double dist = xi.dot(facet.nu) - facet.d;
        const double v = u(xi);
        return weight_numerator(xi, facet.nu, spec) / (dist * dist) * v * v;
      };
    } else {
      cell_f = [&u, &facet, &spec, p](const Vec& xi) {
        const double dist = xi.dot(facet.nu) - facet.d;
        return generic_numerator(xi, facet.nu, spec) / std::pow(dist, p) * pow_abs(u(xi), p);
      };
    }
    auto mask = [&cell](const Vec& xi) { return cell.contains(xi); };
    const IntegralResult r = mc_integrate_masked(cell_f, mask, u.support, per_cell,
                                                 substream_seed(quad.seed, 200 + c));
    rep.rhs_raw.value += r.value;
    rep.rhs_raw.error += r.error;  // worst-case additive propagation
    rep.rhs_raw.evaluations += r.evaluations;
  }

  finalize(rep, p, spec, quad, describe(omega));
  return rep;
}

}  // namespace

QuotientReport evaluate_quotient(const ScalarField& u, const HalfSpace& hs, const WeightSpec& spec,
                                 const QuadratureSpec& quad) {
  return eval_halfspace(u, hs, spec, quad, false);
}

QuotientReport evaluate_quotient(const ScalarField& u, const Polytope& omega, const WeightSpec& spec,
                                 const QuadratureSpec& quad) {
  return eval_polytope(u, omega, spec, quad, false);
}

QuotientReport evaluate_quotient_generic(const ScalarField& u, const HalfSpace& hs,
                                         const WeightSpec& spec, const QuadratureSpec& quad) {
  return eval_halfspace(u, hs, spec, quad, true);
}

QuotientReport evaluate_quotient_generic(const ScalarField& u, const Polytope& omega,
                                         const WeightSpec& spec, const QuadratureSpec& quad) {
  return eval_polytope(u, omega, spec, quad, true);
}

double verify_translation_reduction(const HalfSpace& hs, const ScalarField& u,
                                    const QuadratureSpec& quad) {
  hs.validate();
  const double nt = t_coord(hs.nu);
  if (nt == 0) throw std::invalid_argument("verify_translation_reduction: nu_t must be nonzero");

  const WeightSpec spec;  // p = 2, per component
  const QuotientReport direct = evaluate_quotient(u, hs, spec, quad);

  const Vec xi0 = *characteristic_point(hs);
  const ScalarField v = left_translate_field(u, xi0);
  Vec e = Vec::Zero(hs.nu.size());
  e(hs.nu.size() - 1) = nt > 0 ? 1.0 : -1.0;
  const QuotientReport reduced = evaluate_quotient(v, HalfSpace{e, 0.0}, spec, quad);

  return std::abs(direct.quotient - reduced.quotient) / std::max(std::abs(direct.quotient), 1e-300);
}

namespace {

// Orthonormal basis of the tangent space of {<xi, normal> = offset}.
Eigen::MatrixXd tangent_basis(const Vec& normal) {
  const Eigen::Index d = normal.size();
  Eigen::MatrixXd col = normal;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(col);
  const Eigen::MatrixXd Q = qr.householderQ();
  return Q.rightCols(d - 1);
}

// Conservative half-width of a sampling window around the interior point,
// from the inscribed distances along the coordinate axes.
double sampling_halfwidth(const Polytope& omega) {
  const Eigen::Index d = omega.interior.size();
  double best = 0;
  for (Eigen::Index k = 0; k < d; ++k) {
    for (double sign : {1.0, -1.0}) {
      double step = std::numeric_limits<double>::infinity();
      for (const auto& f : omega.facets) {
        const double rate = sign * f.nu(k);
        if (rate < -1e-12) step = std::min(step, (omega.interior.dot(f.nu) - f.d) / -rate);
      }
      if (std::isfinite(step)) best = std::max(best, step);
    }
  }
  if (!(best > 0)) throw std::runtime_error("polytope_interface_audit: degenerate interior");
  return 3 * best;
}

}  // namespace

InterfaceSignReport polytope_interface_audit(const Polytope& omega, double p,
                                             std::int64_t samples_per_interface, std::uint64_t seed) {
  omega.validate();
  if (!omega.bounded) throw std::invalid_argument("polytope_interface_audit: bounded polytope required");
  if (!(p >= 2)) throw std::invalid_argument("polytope_interface_audit: p >= 2 required");
  if (samples_per_interface < 1)
    throw std::invalid_argument("polytope_interface_audit: samples_per_interface >= 1 required");

  const auto cells = partition_cells(omega);
  const int m = static_cast<int>(omega.facets.size());
  const double half_width = sampling_halfwidth(omega);

  InterfaceSignReport report;
  report.p = p;
  report.note =
      "lp bracket uses the factored form (A^{p-1} - B^{p-1})(A - B) = "
      "A^p - A^{p-1}B - A B^{p-1} + B^p; trailing term B^p";
  double global_min = std::numeric_limits<double>::infinity();

  for (int k = 0; k < m; ++k) {
    for (int l = k + 1; l < m; ++l) {
      const auto gamma = facet_interface(omega, k, l);
      if (!gamma) continue;

      const Vec q0 =
          omega.interior + (gamma->offset - omega.interior.dot(gamma->normal)) * gamma->normal;
      const Eigen::MatrixXd basis = tangent_basis(gamma->normal);

      auto rng = make_rng(seed, 4000 + static_cast<std::uint64_t>(k) * 64 + static_cast<std::uint64_t>(l));
      std::uniform_real_distribution<double> U(-1.0, 1.0);

      InterfaceSignReport::Entry entry;
      entry.k = k;
      entry.l = l;
      entry.strength = gamma->strength;
      entry.min_integrand = std::numeric_limits<double>::infinity();

      std::int64_t attempts = 400 * samples_per_interface + 1000;
      Vec coeffs(basis.cols());
      while (entry.samples < samples_per_interface && attempts-- > 0) {
        for (Eigen::Index j = 0; j < coeffs.size(); ++j) coeffs(j) = half_width * U(rng);
        const Vec xi = q0 + basis * coeffs;
        if (!omega.contains(xi)) continue;
        if (!cells[static_cast<std::size_t>(k)].contains(xi, 1e-9) ||
            !cells[static_cast<std::size_t>(l)].contains(xi, 1e-9))
          continue;

        double value;
        if (p == 2) {
          value = interface_integrand_p2(xi, *gamma);
        } else {
          const Vec sk = frame_pairings(xi, omega.facets[static_cast<std::size_t>(k)].nu);
          const Vec sl = frame_pairings(xi, omega.facets[static_cast<std::size_t>(l)].nu);
          value = 0;
          for (Eigen::Index i = 0; i < sk.size(); ++i)
            value += interface_bracket_lp(sk(i), sl(i), p);
        }
        ++entry.samples;
        if (value < -1e-12) ++entry.negatives;
        entry.min_integrand = std::min(entry.min_integrand, value);
      }

      if (entry.samples == 0) continue;  // plane misses the domain interior
      report.total_samples += entry.samples;
      report.total_negatives += entry.negatives;
      global_min = std::min(global_min, entry.min_integrand);
      report.entries.push_back(entry);
    }
  }

  report.min_integrand = std::isfinite(global_min) ? global_min : 0.0;
  return report;
}

}  // namespace heis
