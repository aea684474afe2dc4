#include "heis/quadrature.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "heis/rng.hpp"

namespace heis {

namespace {

constexpr int kShards = 64;

[[noreturn]] void throw_nonfinite(const Vec& p, double v) {
  std::ostringstream os;
  os << "integrand returned a non-finite value (" << v << ") at (";
  for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p(i);
  os << ")";
  throw std::runtime_error(os.str());
}

double checked_eval(const std::function<double(const Vec&)>& f, const Vec& p) {
  const double v = f(p);
  if (!std::isfinite(v)) throw_nonfinite(p, v);
  return v;
}

}  // namespace

std::pair<Vec, Vec> gauss_legendre(int order) {
  if (order < 1 || order > 256) throw std::invalid_argument("gauss_legendre: order out of range");
  Vec x(order), w(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      // Legendre recurrence for P_order(z) and its derivative.
      double p0 = 1, p1 = 0;
      for (int j = 0; j < order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
      }
      pp = order * (z * p0 - p1) / (z * z - 1);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x(i) = -z;
    x(order - 1 - i) = z;
    const double wi = 2.0 / ((1 - z * z) * pp * pp);
    w(i) = wi;
    w(order - 1 - i) = wi;
  }
  return {x, w};
}

std::vector<double> log_edges(double lo, double hi) {
  if (!(0 < lo && lo < hi)) throw std::invalid_argument("log_edges: need 0 < lo < hi");
  std::vector<double> e{lo};
  for (double v = lo * 10; v < hi * (1 - 1e-12); v *= 10) e.push_back(v);
  e.push_back(hi);
  return e;
}

std::vector<double> uniform_edges(double lo, double hi, int panels) {
  if (!(lo < hi) || panels < 1) throw std::invalid_argument("uniform_edges: bad range or panel count");
  std::vector<double> e(panels + 1);
  for (int i = 0; i <= panels; ++i) e[i] = lo + (hi - lo) * i / panels;
  e.back() = hi;
  return e;
}

PanelGrid PanelGrid::from_box(const Box& box, int panels_per_axis) {
  box.validate();
  PanelGrid g;
  for (Eigen::Index k = 0; k < box.dim(); ++k) g.edges.push_back(uniform_edges(box.lo(k), box.hi(k), panels_per_axis));
  return g;
}

Box PanelGrid::bounding_box() const {
  validate();
  const auto d = static_cast<Eigen::Index>(edges.size());
  Box b{Vec(d), Vec(d)};
  for (Eigen::Index k = 0; k < d; ++k) {
    b.lo(k) = edges[k].front();
    b.hi(k) = edges[k].back();
  }
  return b;
}

void PanelGrid::validate() const {
  if (edges.empty()) throw std::invalid_argument("PanelGrid: no axes");
  for (const auto& e : edges) {
    if (e.size() < 2) throw std::invalid_argument("PanelGrid: each axis needs at least two edges");
    for (std::size_t i = 0; i + 1 < e.size(); ++i)
      if (!(e[i] < e[i + 1])) throw std::invalid_argument("PanelGrid: edges must increase strictly");
  }
}

int worker_count() {
  if (const char* env = std::getenv("HEISHARDY_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

void run_sharded(int shards, const std::function<void(int)>& work) {
  if (shards < 1) throw std::invalid_argument("run_sharded: shards >= 1 required");
  const int workers = std::min(worker_count(), shards);
  if (workers <= 1) {
    for (int i = 0; i < shards; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  auto drain = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= shards) return;
      try {
        work(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int i = 0; i < workers; ++i) pool.emplace_back(drain);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double pairwise_sum(std::vector<double> v) {
  if (v.empty()) return 0;
  std::size_t n = v.size();
  while (n > 1) {
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < n / 2; ++i) v[i] = v[2 * i] + v[2 * i + 1];
    if (n % 2) v[n / 2] = v[n - 1];
    n = half;
  }
  return v[0];
}

namespace {

// One full tensor pass at the given order; shard partials are combined with
// pairwise summation in shard order, independent of the worker count.
double tensor_pass(const std::function<double(const Vec&)>& f, const PanelGrid& grid, int order,
                   std::int64_t* evaluations) {
  const int dim = static_cast<int>(grid.edges.size());
  const auto [xs, ws] = gauss_legendre(order);

  std::int64_t cells = 1;
  std::vector<int> panels(dim);
  for (int k = 0; k < dim; ++k) {
    panels[k] = static_cast<int>(grid.edges[k].size()) - 1;
    cells *= panels[k];
  }
  std::int64_t nodes_per_cell = 1;
  for (int k = 0; k < dim; ++k) nodes_per_cell *= order;
  *evaluations += cells * nodes_per_cell;

  const int shards = static_cast<int>(std::min<std::int64_t>(kShards, cells));
  std::vector<double> partial(shards, 0.0);

  run_sharded(shards, [&](int shard) {
    Vec p(dim);
    std::vector<int> node(dim);
    double acc = 0;
    for (std::int64_t cell = shard; cell < cells; cell += shards) {
      // Decode the cell into per-axis panel indices.
      std::int64_t rest = cell;
      double scale = 1;
      Vec c(dim), r(dim);
      for (int k = 0; k < dim; ++k) {
        const int pk = static_cast<int>(rest % panels[k]);
        rest /= panels[k];
        const double a = grid.edges[k][pk], b = grid.edges[k][pk + 1];
        c(k) = 0.5 * (a + b);
        r(k) = 0.5 * (b - a);
        scale *= r(k);
      }
      std::fill(node.begin(), node.end(), 0);
      for (;;) {
        double wt = scale;
        for (int k = 0; k < dim; ++k) {
          p(k) = c(k) + r(k) * xs(node[k]);
          wt *= ws(node[k]);
        }
        acc += wt * checked_eval(f, p);
        int k = 0;
        while (k < dim && ++node[k] == order) node[k++] = 0;
        if (k == dim) break;
      }
    }
    partial[shard] = acc;
  });
  return pairwise_sum(std::move(partial));
}

}  // namespace

IntegralResult tensor_integrate(const std::function<double(const Vec&)>& f, const PanelGrid& grid,
                                int order) {
  grid.validate();
  if (!f) throw std::invalid_argument("tensor_integrate: missing integrand");
  IntegralResult res;
  res.value = tensor_pass(f, grid, order, &res.evaluations);
  const double check = tensor_pass(f, grid, order + 6, &res.evaluations);
  res.error = std::abs(res.value - check);
  res.value = check;  // keep the higher-order pass
  return res;
}

IntegralResult integrate_1d(const std::function<double(double)>& f, const std::vector<double>& edges,
                            int order) {
  PanelGrid g;
  g.edges = {edges};
  return tensor_integrate([&f](const Vec& p) { return f(p(0)); }, g, order);
}

namespace {

IntegralResult mc_core(const std::function<double(const Vec&)>& f,
                       const std::function<bool(const Vec&)>* mask, const Box& box, std::int64_t samples,
                       std::uint64_t seed) {
  box.validate();
  if (samples < 1) throw std::invalid_argument("mc_integrate: samples >= 1 required");
  if (!f) throw std::invalid_argument("mc_integrate: missing integrand");
  const Eigen::Index d = box.dim();
  const double volume = box.volume();

  std::vector<double> sums(kShards, 0.0), sqs(kShards, 0.0);
  run_sharded(kShards, [&](int shard) {
    const std::int64_t n = samples / kShards + (shard < samples % kShards ? 1 : 0);
    auto rng = make_rng(seed, 9000 + static_cast<std::uint64_t>(shard));
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Vec p(d);
    double s = 0, q = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < d; ++k) p(k) = box.lo(k) + (box.hi(k) - box.lo(k)) * U(rng);
      double v = 0;
      if (!mask || (*mask)(p)) v = checked_eval(f, p);
      s += v;
      q += v * v;
    }
    sums[shard] = s;
    sqs[shard] = q;
  });

  const double total = pairwise_sum(std::move(sums));
  const double total_sq = pairwise_sum(std::move(sqs));
  const double N = static_cast<double>(samples);
  const double mean = total / N;
  const double var = std::max(0.0, (total_sq - N * mean * mean) / std::max(1.0, N - 1));
  IntegralResult res;
  res.value = volume * mean;
  res.error = volume * std::sqrt(var / N);
  res.evaluations = samples;
  return res;
}

}  // namespace

IntegralResult mc_integrate(const std::function<double(const Vec&)>& f, const Box& box,
                            std::int64_t samples, std::uint64_t seed) {
  return mc_core(f, nullptr, box, samples, seed);
}

IntegralResult mc_integrate_masked(const std::function<double(const Vec&)>& f,
                                   const std::function<bool(const Vec&)>& mask, const Box& box,
                                   std::int64_t samples, std::uint64_t seed) {
  if (!mask) throw std::invalid_argument("mc_integrate_masked: missing mask");
  return mc_core(f, &mask, box, samples, seed);
}

}  // namespace heis
