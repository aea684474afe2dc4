#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "heis/field.hpp"
#include "heis/metrics.hpp"

namespace heis {

/// Carnot-Caratheodory solver configuration.  File-loadable keys:
/// segments, endpoint_tol, gap_tol, multistarts, seed.
struct SolverConfig {
  int segments = 16;        // initial mesh M
  double endpoint_tol = 1e-6;
  double gap_tol = 1e-3;
  int multistarts = 8;
  std::uint64_t seed = 0;
  int max_refinements = 3;  // mesh doublings after the initial solve

  void validate() const;
};

SolverConfig load_solver_config(const std::string& path);

struct CCResult {
  double distance = 0;      // upper bound; path_length(path) when converged
  HorizontalPath path;
  bool converged = false;
  double refinement_gap = 0;
  double endpoint_error = 0;  // constraint norm at the reported solution
};

/// Upper bound on the CC distance between two points, by direct transcription
/// over piecewise-constant controls with an augmented-Lagrangian endpoint
/// constraint, deterministic multi-start, and mesh refinement.
CCResult cc_distance(const Vec& from, const Vec& to, const SolverConfig& cfg = {});

/// Affine target set { base + basis * theta }.  `empty` marks an inconsistent
/// construction (e.g. intersection of parallel distinct hyperplanes).
struct AffineSet {
  Vec base;
  Eigen::MatrixXd basis;  // orthonormal columns; may have zero columns
  bool empty = false;
};

/// Intersection of hyperplanes {<xi, normal_k> = offset_k} as an AffineSet.
AffineSet intersect_hyperplanes(const std::vector<std::pair<Vec, double>>& planes, int ambient_dim);

/// CC distance from a point to an affine set (target optimized jointly).
/// An empty set yields distance = +infinity, converged = true.
CCResult cc_distance_to_set(const Vec& from, const AffineSet& target, const SolverConfig& cfg = {});

struct BilipschitzScan {
  double min_ratio = 0;
  double max_ratio = 0;
  int pair_count = 0;     // converged pairs entering the ratio range
  int excluded = 0;       // skipped: coincident points or non-converged solves
};

/// Ratio d_cc / d_K over random pairs in a box region.  Non-converged solver
/// runs are flagged, excluded from the range, and counted.
BilipschitzScan bilipschitz_scan(int sample_count, const Box& region, const SolverConfig& cfg,
                                 std::uint64_t seed);

}  // namespace heis
