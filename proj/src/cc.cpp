#include "heis/cc.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "heis/kvconfig.hpp"
#include "heis/lbfgs.hpp"
#include "heis/rng.hpp"

namespace heis {

void SolverConfig::validate() const {
  if (segments < 1 || segments > 4096) throw std::invalid_argument("SolverConfig: segments out of range");
  if (!(endpoint_tol > 0)) throw std::invalid_argument("SolverConfig: endpoint_tol must be positive");
  if (!(gap_tol > 0)) throw std::invalid_argument("SolverConfig: gap_tol must be positive");
  if (multistarts < 1 || multistarts > 256) throw std::invalid_argument("SolverConfig: multistarts out of range");
  if (max_refinements < 0 || max_refinements > 8) throw std::invalid_argument("SolverConfig: max_refinements out of range");
}

SolverConfig load_solver_config(const std::string& path) {
  const auto kv = parse_kv_file(path);
  for (const auto& [k, v] : kv) {
    (void)v;
    if (k != "segments" && k != "endpoint_tol" && k != "gap_tol" && k != "multistarts" && k != "seed") {
      throw std::invalid_argument("solver config: unknown key '" + k + "'");
    }
  }
  SolverConfig cfg;
  cfg.segments = static_cast<int>(kv_int(kv, "segments", cfg.segments));
  cfg.endpoint_tol = kv_double(kv, "endpoint_tol", cfg.endpoint_tol);
  cfg.gap_tol = kv_double(kv, "gap_tol", cfg.gap_tol);
  cfg.multistarts = static_cast<int>(kv_int(kv, "multistarts", cfg.multistarts));
  cfg.seed = static_cast<std::uint64_t>(kv_int(kv, "seed", static_cast<long long>(cfg.seed)));
  cfg.validate();
  return cfg;
}

namespace {

struct ALState {
  double length = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd controls;  // 2n x M
  Vec theta;                 // target parameters
  double constraint_norm = std::numeric_limits<double>::infinity();
  bool feasible = false;
};

// Augmented-Lagrangian solve at fixed mesh; variables are the flattened
// controls followed by the affine target parameters.
ALState solve_al(const Vec& from, const AffineSet& target, int M, const Eigen::MatrixXd& controls0,
                 const Vec& theta0, double endpoint_tol) {
  const int n = heis_n(from);
  const int k = static_cast<int>(target.basis.cols());
  const int nu = 2 * n * M;
  const double h = 1.0 / M;

  Vec lambda = Vec::Zero(2 * n + 1);
  double mu = 10.0;

  Vec v(nu + k);
  Eigen::Map<Eigen::MatrixXd>(v.data(), 2 * n, M) = controls0;
  v.tail(k) = theta0;

  // Workspaces reused across evaluations.
  Eigen::MatrixXd xs(n, M + 1), ys(n, M + 1);
  Vec ts(M + 1), c(2 * n + 1), w(2 * n + 1), sa(n), sb(n);

  auto forward = [&](const Eigen::Map<const Eigen::MatrixXd>& U) {
    xs.col(0) = x_part(from);
    ys.col(0) = y_part(from);
    ts(0) = t_coord(from);
    for (int j = 0; j < M; ++j) {
      const auto a = U.col(j).head(n);
      const auto b = U.col(j).tail(n);
      xs.col(j + 1) = xs.col(j) + h * a;
      ys.col(j + 1) = ys.col(j) + h * b;
      ts(j + 1) = ts(j) + 2 * h * (a.dot(ys.col(j)) - b.dot(xs.col(j)));
    }
  };

  auto fg = [&](const Vec& vv, Vec& grad) -> double {
    Eigen::Map<const Eigen::MatrixXd> U(vv.data(), 2 * n, M);
    const auto theta = vv.tail(k);
    forward(U);
    c.head(n) = xs.col(M) - x_part(target.base);
    c.segment(n, n) = ys.col(M) - y_part(target.base);
    c(2 * n) = ts(M) - target.base(2 * n);
    if (k > 0) c -= target.basis * theta;
    w = lambda + mu * c;
    const double energy = 0.5 * h * U.squaredNorm();
    const double val = energy + lambda.dot(c) + 0.5 * mu * c.squaredNorm();

    grad.resize(vv.size());
    Eigen::Map<Eigen::MatrixXd> G(grad.data(), 2 * n, M);
    const double wt = w(2 * n);
    sa.setZero();
    sb.setZero();
    for (int j = M - 1; j >= 0; --j) {
      const auto a = U.col(j).head(n);
      const auto b = U.col(j).tail(n);
      G.col(j).head(n) = h * a + h * w.head(n) + wt * (2 * h * ys.col(j) - 2 * h * h * sb);
      G.col(j).tail(n) = h * b + h * w.segment(n, n) + wt * (-2 * h * xs.col(j) + 2 * h * h * sa);
      sa += a;
      sb += b;
    }
    if (k > 0) grad.tail(k) = -target.basis.transpose() * w;
    return val;
  };

  LbfgsOptions lopt;
  lopt.max_iters = 400;
  lopt.grad_tol = 1e-10 * std::max(1.0, mu);

  double prev_cnorm = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < 30; ++outer) {
    lopt.grad_tol = std::max(1e-11, 1e-9 * std::min(mu, 1e4));
    const LbfgsResult r = lbfgs_minimize(fg, v, lopt);
    v = r.x;
    Vec gdummy(v.size());
    fg(v, gdummy);  // refresh c at the solution
    const double cnorm = c.norm();
    if (cnorm <= 0.05 * endpoint_tol) break;
    lambda += mu * c;
    if (cnorm > 0.25 * prev_cnorm && mu < 1e12) mu *= 8.0;
    prev_cnorm = cnorm;
  }

  ALState out;
  Eigen::Map<const Eigen::MatrixXd> U(v.data(), 2 * n, M);
  out.controls = U;
  out.theta = v.tail(k);
  Vec gdummy(v.size());
  fg(v, gdummy);
  out.constraint_norm = c.norm();
  out.feasible = out.constraint_norm <= endpoint_tol;
  out.length = U.colwise().norm().sum() * h;
  return out;
}

Eigen::MatrixXd upsample_controls(const Eigen::MatrixXd& U) {
  Eigen::MatrixXd V(U.rows(), 2 * U.cols());
  for (int j = 0; j < U.cols(); ++j) {
    V.col(2 * j) = U.col(j);
    V.col(2 * j + 1) = U.col(j);
  }
  return V;
}

// Deterministic start family: straight-line controls, loop modes sized from
// the vertical defect, and seeded Gaussian perturbations.
std::vector<Eigen::MatrixXd> make_starts(const Vec& from, const AffineSet& target, int M, int count,
                                         std::uint64_t seed) {
  const int n = heis_n(from);
  Vec goal = target.base;
  if (target.basis.cols() > 0) {
    goal += target.basis * (target.basis.transpose() * (from - target.base));
  }

  Eigen::MatrixXd straight(2 * n, M);
  Vec d = goal.head(2 * n) - from.head(2 * n);
  straight.colwise() = d;

  HorizontalPath sp{from, straight};
  const double tdef = goal(2 * n) - t_coord(path_endpoint(sp));

  auto mode_start = [&](double tneed, double scale) {
    Eigen::MatrixXd U = straight;
    const double A = std::sqrt(M_PI * std::abs(tneed)) * scale;
    const double sgn = tneed < 0 ? 1.0 : -1.0;  // (cos, sin) loop lowers t
    for (int j = 0; j < M; ++j) {
      const double tau = (j + 0.5) / M;
      U(0, j) += A * std::cos(2 * M_PI * tau);
      U(n, j) += sgn * A * std::sin(2 * M_PI * tau);
    }
    return U;
  };

  std::vector<Eigen::MatrixXd> starts;
  starts.push_back(straight);
  if (count > 1) starts.push_back(mode_start(tdef, 1.0));
  if (count > 2) starts.push_back(mode_start(tdef, 0.5));
  const double sigma = 0.5 * std::max(1.0, d.norm());
  for (int s = static_cast<int>(starts.size()); s < count; ++s) {
    auto rng = make_rng(seed, 1000 + s);
    std::normal_distribution<double> N(0.0, sigma);
    Eigen::MatrixXd U = straight;
    for (int j = 0; j < M; ++j)
      for (int r = 0; r < 2 * n; ++r) U(r, j) += N(rng);
    starts.push_back(U);
  }
  return starts;
}

CCResult solve_cc(const Vec& from, const AffineSet& target, const SolverConfig& cfg) {
  cfg.validate();
  const int n = heis_n(from);
  if (target.base.size() != from.size()) throw std::invalid_argument("cc: dimension mismatch");
  if (!all_finite(from) || !all_finite(target.base)) throw std::invalid_argument("cc: non-finite input");

  CCResult res;
  if (target.empty) {
    res.distance = std::numeric_limits<double>::infinity();
    res.converged = true;
    res.path = HorizontalPath{from, Eigen::MatrixXd::Zero(2 * n, 1)};
    return res;
  }

  const int k = static_cast<int>(target.basis.cols());
  const Vec theta0 = k > 0 ? Vec(target.basis.transpose() * (from - target.base)) : Vec(0);

  // Trivial case: `from` already lies in the target set.
  {
    Vec resid = from - target.base;
    if (k > 0) resid -= target.basis * (target.basis.transpose() * resid);
    if (resid.norm() <= cfg.endpoint_tol) {
      res.distance = 0;
      res.converged = true;
      res.path = HorizontalPath{from, Eigen::MatrixXd::Zero(2 * n, 1)};
      return res;
    }
  }

  int M = cfg.segments;
  ALState best;
  for (const auto& U0 : make_starts(from, target, M, cfg.multistarts, cfg.seed)) {
    const ALState s = solve_al(from, target, M, U0, theta0, cfg.endpoint_tol);
    const bool better = (s.feasible && !best.feasible) ||
                        (s.feasible == best.feasible &&
                         (s.feasible ? s.length < best.length : s.constraint_norm < best.constraint_norm));
    if (better) best = s;
  }

  // The mesh error of the incumbent decays at second order, so the error
  // remaining after a doubling is about a third of the observed gap.
  double gap = std::numeric_limits<double>::infinity();
  for (int level = 0; level < cfg.max_refinements && best.feasible; ++level) {
    const Eigen::MatrixXd warm = upsample_controls(best.controls);
    const int M2 = 2 * M;
    const ALState s = solve_al(from, target, M2, warm, best.theta, cfg.endpoint_tol);
    if (s.feasible && s.length <= best.length) {
      gap = best.length - s.length;
      best = s;
      M = M2;
    } else {
      gap = 0;  // refinement did not improve the incumbent
    }
    if (gap / 3 < cfg.gap_tol) break;
  }
  if (cfg.max_refinements == 0) gap = 0;

  res.distance = best.feasible ? best.length : std::numeric_limits<double>::quiet_NaN();
  res.path = HorizontalPath{from, best.controls};
  res.converged = best.feasible && gap / 3 < cfg.gap_tol;
  res.refinement_gap = std::isfinite(gap) ? gap : 0;
  res.endpoint_error = best.constraint_norm;
  return res;
}

}  // namespace

CCResult cc_distance(const Vec& from, const Vec& to, const SolverConfig& cfg) {
  AffineSet point;
  point.base = to;
  point.basis = Eigen::MatrixXd::Zero(to.size(), 0);
  return solve_cc(from, point, cfg);
}

AffineSet intersect_hyperplanes(const std::vector<std::pair<Vec, double>>& planes, int ambient_dim) {
  if (planes.empty()) throw std::invalid_argument("intersect_hyperplanes: no planes");
  const int m = static_cast<int>(planes.size());
  Eigen::MatrixXd A(m, ambient_dim);
  Vec b(m);
  for (int i = 0; i < m; ++i) {
    if (planes[i].first.size() != ambient_dim) throw std::invalid_argument("intersect_hyperplanes: dimension mismatch");
    const double nn = planes[i].first.norm();
    if (!(nn > 0)) throw std::invalid_argument("intersect_hyperplanes: zero normal");
    A.row(i) = planes[i].first.transpose() / nn;
    b(i) = planes[i].second / nn;
  }
  AffineSet s;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  s.base = cod.solve(b);
  if ((A * s.base - b).norm() > 1e-9 * (1 + b.cwiseAbs().maxCoeff())) {
    s.empty = true;
    s.base = Vec::Zero(ambient_dim);
    s.basis = Eigen::MatrixXd::Zero(ambient_dim, 0);
    return s;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  lu.setThreshold(1e-12);
  const Eigen::MatrixXd ker = lu.kernel();
  if (ker.cols() == 1 && ker.col(0).norm() < 1e-14) {
    s.basis = Eigen::MatrixXd::Zero(ambient_dim, 0);  // unique intersection point
  } else {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(ker);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(ambient_dim, ker.cols());
    s.basis = Q;
  }
  return s;
}

CCResult cc_distance_to_set(const Vec& from, const AffineSet& target, const SolverConfig& cfg) {
  return solve_cc(from, target, cfg);
}

BilipschitzScan bilipschitz_scan(int sample_count, const Box& region, const SolverConfig& cfg,
                                 std::uint64_t seed) {
  if (sample_count < 1) throw std::invalid_argument("bilipschitz_scan: sample_count >= 1 required");
  region.validate();
  const Eigen::Index d = region.dim();
  if (d < 3 || d % 2 == 0) throw std::invalid_argument("bilipschitz_scan: region must have odd dimension >= 3");

  BilipschitzScan out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  out.max_ratio = 0;
  auto rng = make_rng(seed, 77);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto draw = [&]() {
    Vec p(d);
    for (Eigen::Index i = 0; i < d; ++i) p(i) = region.lo(i) + (region.hi(i) - region.lo(i)) * U(rng);
    return p;
  };
  for (int i = 0; i < sample_count; ++i) {
    const Vec p = draw(), q = draw();
    const double dk = kaplan_distance(p, q);
    if (dk <= 1e-9) {
      ++out.excluded;
      continue;
    }
    SolverConfig c = cfg;
    c.seed = substream_seed(seed, 5000 + static_cast<std::uint64_t>(i));
    const CCResult r = cc_distance(p, q, c);
    if (!r.converged || !std::isfinite(r.distance)) {
      ++out.excluded;
      continue;
    }
    const double ratio = r.distance / dk;
    out.min_ratio = std::min(out.min_ratio, ratio);
    out.max_ratio = std::max(out.max_ratio, ratio);
    ++out.pair_count;
  }
  return out;
}

}  // namespace heis
