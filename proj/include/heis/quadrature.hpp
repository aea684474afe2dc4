#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "heis/field.hpp"

namespace heis {

struct IntegralResult {
  double value = 0;
  double error = 0;  // quadrature: refinement delta; MC: standard error
  std::int64_t evaluations = 0;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<Vec, Vec> gauss_legendre(int order);

/// Ascending panel edges with one panel per decade between lo and hi, 0 < lo < hi.
std::vector<double> log_edges(double lo, double hi);

/// Ascending panel edges splitting [lo, hi] into `panels` equal pieces.
std::vector<double> uniform_edges(double lo, double hi, int panels);

/// Axis-aligned tensor panel grid; axis k is partitioned by edges[k].
struct PanelGrid {
  std::vector<std::vector<double>> edges;

  static PanelGrid from_box(const Box& box, int panels_per_axis = 1);
  Box bounding_box() const;
  void validate() const;
};

/// Tensor Gauss-Legendre integration of f over the panel grid.  The error
/// estimate is the difference against an order + 6 pass.  Throws if the
/// integrand returns a non-finite value.
IntegralResult tensor_integrate(const std::function<double(const Vec&)>& f, const PanelGrid& grid,
                                int order = 24);

/// Convenience wrapper for 1D integrands.
IntegralResult integrate_1d(const std::function<double(double)>& f, const std::vector<double>& edges,
                            int order = 24);

/// Plain Monte Carlo over a box with a fixed shard layout, so results do not
/// depend on the worker count.  `error` is the standard error of the mean.
IntegralResult mc_integrate(const std::function<double(const Vec&)>& f, const Box& box,
                            std::int64_t samples, std::uint64_t seed);

/// Monte Carlo restricted to {p in box : mask(p)} by rejection.
IntegralResult mc_integrate_masked(const std::function<double(const Vec&)>& f,
                                   const std::function<bool(const Vec&)>& mask, const Box& box,
                                   std::int64_t samples, std::uint64_t seed);

/// Number of parallel workers: HEISHARDY_THREADS when set, else the hardware
/// concurrency, at least 1.
int worker_count();

/// Execute work(0..shards-1), possibly concurrently; each shard runs once.
void run_sharded(int shards, const std::function<void(int)>& work);

/// Sum by halving adjacent pairs; deterministic and insensitive to shard order.
double pairwise_sum(std::vector<double> v);

}  // namespace heis
