#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heis/domains.hpp"
#include "heis/field.hpp"
#include "heis/quadrature.hpp"

namespace heis {

/// Sharp Hardy constant ((p-1)/p)^p; 1/4 at p = 2.
double sharp_constant(double p);

/// One-parameter constant family C(alpha, p) = -(p-1)(alpha + |alpha|^{p/(p-1)}).
/// Maximized over alpha at optimal_alpha(p), where it equals sharp_constant(p).
double hardy_constant_alpha(double alpha, double p);

struct OptimalAlpha {
  double alpha = 0;     // argmax, -((p-1)/p)^{p-1}
  double constant = 0;  // C(alpha*, p) = sharp_constant(p)
};
OptimalAlpha optimal_alpha(double p);

/// Superadditivity gap of x -> x^{p/2}: |v|_2^p - sum_i |v_i|^p for the
/// 2n-vector v; nonnegative for p >= 2.
double superadditivity_gap(const Vec& v, double p);

struct JensenSplit {
  double bound = 0;  // sum_i c_i x_i^alpha >= (sum_i x_i)^alpha
  Vec weights;       // c_i = a_i^{1-alpha} (sum_j a_j)^{alpha-1}
};
JensenSplit jensen_split(const Vec& x, const Vec& a, double alpha);

/// Factored boundary bracket (A^{p-1} - B^{p-1})(A - B) for A, B >= 0;
/// expands to A^p - A^{p-1}B - A B^{p-1} + B^p (trailing term B^p).
double boundary_sign_terms(double A, double B, double p);

/// Interface integrand pieces for the nearest-facet partition.
/// p = 2 density: sqrt(1 - cos(angle)) * sum_i (<X_i,n>^2 + <Y_i,n>^2) where
/// n is the interface unit normal; the strength sqrt(2 - 2 cos) absorbs sqrt(2).
double interface_integrand_p2(const Vec& xi, const Interface& gamma);

/// General-p bracket for one frame pairing pair s_k = <V_i, nu_k>, s_l = <V_i, nu_l>:
///   |s_k|^p - sgn(s_k)|s_k|^{p-1} s_l + |s_l|^p - sgn(s_l)|s_l|^{p-1} s_k.
/// Equal signs reduce to boundary_sign_terms(|s_k|, |s_l|, p); opposite signs
/// make every term nonnegative.
double interface_bracket_lp(double s_k, double s_l, double p);

struct QuadratureSpec {
  enum class Method { TensorGauss, MonteCarlo };
  Method method = Method::TensorGauss;
  int order = 24;            // tensor Gauss order per axis
  int panels_per_axis = 2;   // tensor panels per axis
  std::int64_t samples = 1000000;  // Monte Carlo sample budget per integral
  std::uint64_t seed = 0;

  void validate() const;  // order >= 2, samples >= 1000
};

/// Defaults per group index: tensor Gauss for n = 1 (3D), Monte Carlo above.
QuadratureSpec default_quadrature(int n);

struct QuotientReport {
  IntegralResult lhs;      // integral of |grad_H u|^p
  IntegralResult rhs_raw;  // integral of hardy_weight * |u|^p, no constant
  double constant = 0;     // sharp_constant(p)
  double quotient = 0;     // lhs.value / rhs_raw.value
  double margin = 0;       // quotient - constant
  double quotient_error = 0;  // worst-case propagated quadrature error
  double p = 2;
  std::string domain;
  WeightSpec weight;
  QuadratureSpec quad;
};

/// Smallest slack between a support box and the domain boundary; the
/// verification entry points require this to be >= 1e-3.
double support_margin(const HalfSpace& hs, const Box& support);
double support_margin(const Polytope& omega, const Box& support);

/// Rayleigh-type quotient of the Hardy inequality for u on the given domain.
/// Dispatches to a dedicated squared-norm path at p = 2; polytope right-hand
/// sides integrate per partition cell so the facet normal is constant per cell.
QuotientReport evaluate_quotient(const ScalarField& u, const HalfSpace& hs, const WeightSpec& spec,
                                 const QuadratureSpec& quad);
QuotientReport evaluate_quotient(const ScalarField& u, const Polytope& omega, const WeightSpec& spec,
                                 const QuadratureSpec& quad);

/// Same quotients through the generic power-based code path for every p,
/// including p = 2; used to cross-check the dedicated path.
QuotientReport evaluate_quotient_generic(const ScalarField& u, const HalfSpace& hs,
                                         const WeightSpec& spec, const QuadratureSpec& quad);
QuotientReport evaluate_quotient_generic(const ScalarField& u, const Polytope& omega,
                                         const WeightSpec& spec, const QuadratureSpec& quad);

/// Relative difference between the p = 2 quotient evaluated directly on the
/// tilted half-space and after left-translating u by the characteristic point
/// to the half-space {sgn(nu_t) t > 0}; requires nu_t != 0.
double verify_translation_reduction(const HalfSpace& hs, const ScalarField& u,
                                    const QuadratureSpec& quad);

struct InterfaceSignReport {
  struct Entry {
    int k = 0;
    int l = 0;
    std::int64_t samples = 0;
    std::int64_t negatives = 0;  // integrand < -1e-12
    double min_integrand = 0;
    double strength = 0;
  };
  std::vector<Entry> entries;
  std::int64_t total_samples = 0;
  std::int64_t total_negatives = 0;
  double min_integrand = 0;
  double p = 2;
  std::string note;
};

/// Samples each interface plane of the nearest-facet partition inside a
/// bounded polytope and evaluates the sign of the boundary integrand: the
/// p = 2 density and, for general p, the summed interface brackets.
InterfaceSignReport polytope_interface_audit(const Polytope& omega, double p,
                                             std::int64_t samples_per_interface,
                                             std::uint64_t seed = 0);

}  // namespace heis
