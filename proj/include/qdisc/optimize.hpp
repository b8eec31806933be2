#pragma once

// Deterministic multi-start minimization over unconstrained real parameter vectors,
// an exhaustive grid oracle for small arities, and a generic alternating
// block-maximization ("seesaw") driver.
//
// Each start runs a Nelder-Mead simplex descent (adaptive coefficients, restarted
// until it stops improving) and, when `polish` is set, a BFGS pass on central
// finite-difference gradients. Start i draws its initial point from its own RNG
// stream split_seed(seed, i), so results do not depend on thread scheduling.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <thread>

#include "qdisc/random.hpp"

namespace qdisc {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Pure, deterministic function of a real vector. May return +inf (infeasible point).
struct Objective {
  Index arity = 0;
  std::function<double(const RealVector&)> evaluate;
};

struct Interval {
  double lower;
  double upper;
};

struct OptimizerConfig {
  int starts = 32;
  int max_iters = 2000;
  double tol_f = 1e-10;
  std::uint64_t seed = 1;
  /// Sampling box for random starts (and the grid for grid_oracle). Empty means [-1, 1]^n.
  std::vector<Interval> box;
  bool polish = true;
  /// Worker threads; 0 uses the hardware concurrency.
  int threads = 0;
  /// Deterministic starting points, used for the first starts before random ones.
  std::vector<RealVector> initial_points;

  void validate() const {
    if (starts < 1) throw InvariantError("OptimizerConfig: starts must be >= 1");
    if (!(tol_f > 0.0)) throw InvariantError("OptimizerConfig: tol_f must be > 0");
    if (max_iters < 1) throw InvariantError("OptimizerConfig: max_iters must be >= 1");
  }
};

struct OptimizationResult {
  double best_value = kInfinity;
  RealVector best_params;
  bool converged = false;
  int starts_within_tol = 0;
  long evaluations = 0;
  std::vector<double> start_values;
};

namespace detail {

struct CountingObjective {
  const Objective& obj;
  long count = 0;
  double operator()(const RealVector& x) {
    ++count;
    const double v = obj.evaluate(x);
    return std::isnan(v) ? kInfinity : v;
  }
};

struct LocalPoint {
  RealVector x;
  double f;
};

/// Nelder-Mead with the dimension-adaptive coefficients of Gao and Han.
inline LocalPoint nelder_mead(CountingObjective& f, RealVector x0, double f0, const RealVector& step,
                              int max_iters, double tol_f) {
  const Index n = x0.size();
  const double dn = static_cast<double>(std::max<Index>(n, 2));
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / dn;
  const double gamma = 0.75 - 1.0 / (2.0 * dn);
  const double delta = 1.0 - 1.0 / dn;

  std::vector<RealVector> simplex(static_cast<size_t>(n + 1), x0);
  std::vector<double> values(static_cast<size_t>(n + 1), f0);
  for (Index i = 0; i < n; ++i) {
    auto& v = simplex[static_cast<size_t>(i + 1)];
    v(i) += step(i);
    values[static_cast<size_t>(i + 1)] = f(v);
  }
  std::vector<size_t> order(static_cast<size_t>(n + 1));
  for (int it = 0; it < max_iters; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return values[a] < values[b]; });
    const size_t best = order.front();
    const size_t worst = order.back();
    const size_t second = order[order.size() - 2];
    if (std::isfinite(values[worst]) && values[worst] - values[best] <= tol_f) break;

    RealVector centroid = RealVector::Zero(n);
    for (size_t k = 0; k + 1 < order.size(); ++k) centroid += simplex[order[k]];
    centroid /= static_cast<double>(n);

    const RealVector xr = centroid + alpha * (centroid - simplex[worst]);
    const double fr = f(xr);
    if (fr < values[best]) {
      const RealVector xe = centroid + beta * (xr - centroid);
      const double fe = f(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        values[worst] = fe;
      } else {
        simplex[worst] = xr;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = xr;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const RealVector xc = outside ? RealVector(centroid + gamma * (xr - centroid))
                                  : RealVector(centroid - gamma * (centroid - simplex[worst]));
    const double fc = f(xc);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = xc;
      values[worst] = fc;
      continue;
    }
    for (size_t k = 0; k < simplex.size(); ++k) {
      if (k == best) continue;
      simplex[k] = simplex[best] + delta * (simplex[k] - simplex[best]);
      values[k] = f(simplex[k]);
    }
  }
  const auto it = std::min_element(values.begin(), values.end());
  return {simplex[static_cast<size_t>(it - values.begin())], *it};
}

inline bool fd_gradient(CountingObjective& f, const RealVector& x, RealVector& g) {
  g.resize(x.size());
  RealVector xp = x;
  for (Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
    xp(i) = x(i) + h;
    const double fp = f(xp);
    xp(i) = x(i) - h;
    const double fm = f(xp);
    xp(i) = x(i);
    if (!std::isfinite(fp) || !std::isfinite(fm)) return false;
    g(i) = (fp - fm) / (2.0 * h);
  }
  return true;
}

/// BFGS with Armijo backtracking on finite-difference gradients.
inline LocalPoint quasi_newton(CountingObjective& f, RealVector x, double fx, int max_iters, double tol_f) {
  if (!std::isfinite(fx)) return {x, fx};
  const Index n = x.size();
  RealVector g;
  if (!fd_gradient(f, x, g)) return {x, fx};
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;
  int stall = 0;
  for (int it = 0; it < max_iters; ++it) {
    if (g.norm() < 1e-12) break;
    RealVector d = -h * g;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      h.setIdentity();
      d = -g;
      slope = -g.squaredNorm();
    }
    double a = 1.0;
    RealVector xn;
    double fn = kInfinity;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      xn = x + a * d;
      fn = f(xn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * a * slope) {
        accepted = true;
        break;
      }
      a *= 0.5;
    }
    if (!accepted) break;
    RealVector gn;
    if (!fd_gradient(f, xn, gn)) {
      if (fn < fx) {
        x = xn;
        fx = fn;
      }
      break;
    }
    const RealVector s = xn - x;
    const RealVector y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      if (!scaled) {
        h *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const RealVector hy = h * y;
      h += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
    }
    const double gain = fx - fn;
    x = xn;
    fx = fn;
    g = gn;
    stall = gain < 1e-3 * tol_f ? stall + 1 : 0;
    if (stall >= 3) break;
  }
  return {x, fx};
}

inline RealVector box_width(const std::vector<Interval>& box, Index n) {
  RealVector w(n);
  for (Index i = 0; i < n; ++i) w(i) = box[static_cast<size_t>(i)].upper - box[static_cast<size_t>(i)].lower;
  return w;
}

inline std::vector<Interval> resolved_box(const OptimizerConfig& cfg, Index n) {
  if (cfg.box.empty()) return std::vector<Interval>(static_cast<size_t>(n), Interval{-1.0, 1.0});
  if (static_cast<Index>(cfg.box.size()) != n) throw InvariantError("OptimizerConfig: box size != objective arity");
  for (const auto& iv : cfg.box)
    if (!(iv.upper > iv.lower)) throw InvariantError("OptimizerConfig: empty box interval");
  return cfg.box;
}

struct StartOutcome {
  LocalPoint point;
  long evaluations;
};

inline StartOutcome run_start(const Objective& obj, const OptimizerConfig& cfg, const std::vector<Interval>& box,
                              int start) {
  CountingObjective f{obj};
  const Index n = obj.arity;
  RealVector x0(n);
  if (static_cast<size_t>(start) < cfg.initial_points.size()) {
    x0 = cfg.initial_points[static_cast<size_t>(start)];
    if (x0.size() != n) throw InvariantError("OptimizerConfig: initial point has wrong arity");
  } else {
    Rng rng(split_seed(cfg.seed, static_cast<std::uint64_t>(start)));
    for (Index i = 0; i < n; ++i) {
      const auto& iv = box[static_cast<size_t>(i)];
      x0(i) = iv.lower + (iv.upper - iv.lower) * uniform01(rng);
    }
  }
  LocalPoint p{x0, f(x0)};
  if (n == 0) return {p, f.count};
  RealVector step = 0.1 * box_width(box, n);
  // Simplex restarts with shrinking steps until a restart stops paying off.
  for (int restart = 0; restart < 4; ++restart) {
    const double before = p.f;
    p = nelder_mead(f, p.x, p.f, step, cfg.max_iters, cfg.tol_f);
    step *= 0.1;
    if (std::isfinite(before) && before - p.f <= cfg.tol_f) break;
  }
  if (cfg.polish) {
    p = quasi_newton(f, p.x, p.f, cfg.max_iters, cfg.tol_f);
    p = nelder_mead(f, p.x, p.f, RealVector::Constant(n, 1e-4), cfg.max_iters, cfg.tol_f);
  }
  return {p, f.count};
}

inline int worker_count(int requested, int jobs) {
  int t = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, std::min(t, jobs));
}

/// Runs job(i) for i in [0, jobs) on a small pool; job must write only its own slot.
template <typename Job>
void parallel_for(int jobs, int threads, Job&& job) {
  const int workers = worker_count(threads, jobs);
  if (workers == 1) {
    for (int i = 0; i < jobs; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < jobs; i = next++) {
        try {
          job(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// Multi-start minimization. The returned value is attained at the returned parameters,
/// so it is an upper bound on the infimum.
inline OptimizationResult minimize(const Objective& obj, const OptimizerConfig& cfg) {
  cfg.validate();
  if (!obj.evaluate) throw InvariantError("minimize: objective has no evaluate function");
  const auto box = detail::resolved_box(cfg, obj.arity);
  const int starts = std::max<int>(cfg.starts, static_cast<int>(cfg.initial_points.size()));
  std::vector<detail::StartOutcome> outcomes(static_cast<size_t>(starts));
  detail::parallel_for(starts, cfg.threads, [&](int s) {
    outcomes[static_cast<size_t>(s)] = detail::run_start(obj, cfg, box, s);
  });

  OptimizationResult res;
  size_t best = 0;
  for (size_t s = 0; s < outcomes.size(); ++s) {
    res.evaluations += outcomes[s].evaluations;
    res.start_values.push_back(outcomes[s].point.f);
    if (outcomes[s].point.f < outcomes[best].point.f) best = s;
  }
  if (!std::isfinite(outcomes[best].point.f)) {
    throw InfeasibleError("minimize: every start evaluated to +inf (infeasible objective)");
  }
  res.best_params = outcomes[best].point.x;
  res.best_value = obj.evaluate(res.best_params);
  ++res.evaluations;
  for (double v : res.start_values)
    if (v - res.best_value <= cfg.tol_f) ++res.starts_within_tol;
  res.converged = res.starts_within_tol >= 3;
  return res;
}

// ---------------------------------------------------------------------------
// grid oracle

struct GridSpec {
  std::vector<Interval> box;
  std::vector<Index> points;  // per axis, >= 2 (endpoints included)
  int refine_levels = 0;      // zoom passes around the best cells
  int refine_candidates = 4;
};

/// Number of grid points giving at most `spacing` between neighbours on an interval.
inline Index points_for_spacing(const Interval& iv, double spacing) {
  return static_cast<Index>(std::ceil((iv.upper - iv.lower) / spacing)) + 1;
}

namespace detail {

struct GridHit {
  double f;
  RealVector x;
};

inline void grid_scan(const Objective& obj, const std::vector<Interval>& box, const std::vector<Index>& pts,
                      size_t keep, std::vector<GridHit>& hits, long& evals) {
  const Index n = obj.arity;
  std::vector<Index> idx(static_cast<size_t>(n), 0);
  RealVector x(n);
  auto coord = [&](Index axis, Index k) {
    const auto& iv = box[static_cast<size_t>(axis)];
    return iv.lower + (iv.upper - iv.lower) * static_cast<double>(k) / static_cast<double>(pts[static_cast<size_t>(axis)] - 1);
  };
  auto worst_kept = [&]() { return hits.size() < keep ? kInfinity : hits.back().f; };
  while (true) {
    for (Index a = 0; a < n; ++a) x(a) = coord(a, idx[static_cast<size_t>(a)]);
    const double f = obj.evaluate(x);
    ++evals;
    if (f < worst_kept()) {
      GridHit h{f, x};
      auto pos = std::upper_bound(hits.begin(), hits.end(), f, [](double v, const GridHit& g) { return v < g.f; });
      hits.insert(pos, std::move(h));
      if (hits.size() > keep) hits.pop_back();
    }
    Index a = n - 1;
    while (a >= 0) {
      if (++idx[static_cast<size_t>(a)] < pts[static_cast<size_t>(a)]) break;
      idx[static_cast<size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
}

}  // namespace detail

/// Exhaustive evaluation over a rectangular grid, optionally zooming into the best
/// cells. Independent of the simplex machinery; used as a brute-force reference.
inline OptimizationResult grid_oracle(const Objective& obj, const GridSpec& spec) {
  if (obj.arity < 1 || obj.arity > 4) throw InvariantError("grid_oracle: arity must be between 1 and 4");
  if (static_cast<Index>(spec.box.size()) != obj.arity || static_cast<Index>(spec.points.size()) != obj.arity) {
    throw InvariantError("grid_oracle: box and points must have one entry per parameter");
  }
  for (size_t i = 0; i < spec.box.size(); ++i) {
    if (!(spec.box[i].upper > spec.box[i].lower)) throw InvariantError("grid_oracle: empty box");
    if (spec.points[i] < 2) throw InvariantError("grid_oracle: need at least 2 points per axis");
  }
  OptimizationResult res;
  const size_t keep = static_cast<size_t>(std::max(1, spec.refine_candidates));
  std::vector<detail::GridHit> hits;
  detail::grid_scan(obj, spec.box, spec.points, keep, hits, res.evaluations);
  std::vector<Interval> cell(spec.box.size());
  for (size_t i = 0; i < cell.size(); ++i) {
    cell[i] = {0.0, (spec.box[i].upper - spec.box[i].lower) / static_cast<double>(spec.points[i] - 1)};
  }
  for (int level = 0; level < spec.refine_levels; ++level) {
    std::vector<detail::GridHit> next;
    for (const auto& h : hits) {
      std::vector<Interval> sub(cell.size());
      for (size_t i = 0; i < cell.size(); ++i) {
        const double w = cell[i].upper;
        sub[i] = {h.x(static_cast<Index>(i)) - w, h.x(static_cast<Index>(i)) + w};
      }
      detail::grid_scan(obj, sub, spec.points, keep, next, res.evaluations);
    }
    hits = std::move(next);
    for (size_t i = 0; i < cell.size(); ++i) cell[i].upper = 2.0 * cell[i].upper / static_cast<double>(spec.points[i] - 1);
  }
  if (hits.empty() || !std::isfinite(hits.front().f)) throw InfeasibleError("grid_oracle: no finite grid value");
  res.best_params = hits.front().x;
  res.best_value = hits.front().f;
  res.starts_within_tol = 1;
  res.converged = true;
  return res;
}

// ---------------------------------------------------------------------------
// seesaw

struct SeesawResult {
  OptimizationResult summary;  // best_value is the maximum found
  Vector first;
  Vector second;
  std::vector<double> trace;  // objective after every sweep of the best start
};

/// Alternating exact block maximization of a two-block objective. `Problem` provides
///   double value(const Vector& x, const Vector& y) const;
///   Vector best_first(const Vector& y) const;   // argmax_x value(x, y)
///   Vector best_second(const Vector& x) const;  // argmax_y value(x, y)
///   Vector random_first(Rng& rng) const;
/// Each sweep cannot decrease the objective; a start stops when a sweep gains < tol_f.
template <typename Problem>
SeesawResult seesaw(const Problem& problem, const OptimizerConfig& cfg) {
  cfg.validate();
  struct Run {
    Vector x, y;
    std::vector<double> trace;
    long evals = 0;
  };
  std::vector<Run> runs(static_cast<size_t>(cfg.starts));
  detail::parallel_for(cfg.starts, cfg.threads, [&](int s) {
    Rng rng(split_seed(cfg.seed, static_cast<std::uint64_t>(s)));
    Run& r = runs[static_cast<size_t>(s)];
    r.x = problem.random_first(rng);
    r.y = problem.best_second(r.x);
    r.trace.push_back(problem.value(r.x, r.y));
    ++r.evals;
    for (int it = 0; it < cfg.max_iters; ++it) {
      Vector x = problem.best_first(r.y);
      Vector y = problem.best_second(x);
      const double v = problem.value(x, y);
      ++r.evals;
      const double gain = v - r.trace.back();
      if (gain >= 0.0) {
        r.x = std::move(x);
        r.y = std::move(y);
      }
      r.trace.push_back(std::max(v, r.trace.back()));
      if (gain < cfg.tol_f) break;
    }
  });
  SeesawResult out;
  size_t best = 0;
  for (size_t s = 0; s < runs.size(); ++s) {
    out.summary.evaluations += runs[s].evals;
    out.summary.start_values.push_back(runs[s].trace.back());
    if (runs[s].trace.back() > runs[best].trace.back()) best = s;
  }
  out.first = runs[best].x;
  out.second = runs[best].y;
  out.trace = runs[best].trace;
  out.summary.best_value = problem.value(out.first, out.second);
  RealVector params(2 * (out.first.size() + out.second.size()));
  Index c = 0;
  for (const Vector* v : {&out.first, &out.second})
    for (Index i = 0; i < v->size(); ++i) {
      params(c++) = (*v)(i).real();
      params(c++) = (*v)(i).imag();
    }
  out.summary.best_params = params;
  for (double v : out.summary.start_values)
    if (out.summary.best_value - v <= cfg.tol_f) ++out.summary.starts_within_tol;
  out.summary.converged = out.summary.starts_within_tol >= 3;
  return out;
}

}  // namespace qdisc
