#include "grk/extremal_optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include <Eigen/Geometry>
#include <boost/math/tools/roots.hpp>
#include <gsl/gsl_multimin.h>

#include "grk/grk_parameters.hpp"

namespace grk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPenalty = 1e9;
constexpr int kRootScanCells = 128;

void require_alternating(const Pattern& pattern) {
  for (std::size_t i = 1; i < pattern.size(); ++i) {
    if (pattern[i] == pattern[i - 1]) {
      throw std::invalid_argument("arc pattern must alternate: " + pattern_to_string(pattern));
    }
  }
}

void require_optimizable(const Pattern& pattern) {
  if (pattern.empty()) throw std::invalid_argument("arc pattern is empty");
  if (static_cast<int>(pattern.size()) > OptimizerOptions::kMaxArcs) {
    throw std::invalid_argument("arc patterns are limited to 7 arcs");
  }
  require_alternating(pattern);
  if (pattern.back() == Control::Y) {
    throw InfeasiblePattern("pattern " + pattern_to_string(pattern) +
                            " ends with a Y-arc; Y leaves the u-amplitude unchanged, so an "
                            "optimal schedule must end with an X-arc");
  }
}

// Evaluates schedules and solves for the final X-arc.
class ScheduleModel {
 public:
  explicit ScheduleModel(double gamma)
      : gens_(generators(gamma)),
        psi0_(continuum_initial_state(gamma).components()),
        x_period_(2.0 * kPi / gens_.s) {
    const Eigen::Matrix3d& x = gens_.X.matrix();
    axis_ = Eigen::Vector3d(x(2, 1), x(0, 2), x(1, 0)).normalized();
  }

  double x_period() const { return x_period_; }
  double period(Control c) const { return c == Control::X ? x_period_ : 2.0 * kPi; }

  Eigen::Vector3d apply(const Pattern& pattern, const std::vector<double>& durations,
                        std::size_t count) const {
    Eigen::Vector3d psi = psi0_;
    for (std::size_t i = 0; i < count; ++i) {
      psi = rotation(gens_[pattern[i]], durations[i]).matrix() * psi;
    }
    return psi;
  }

  // First t in [0, one X-period] with zero u-amplitude along an X-arc from psi,
  // or NaN when the arc never reaches the plane.
  double final_root(const Eigen::Vector3d& psi) const {
    // exp(tX) psi = (w.psi) w + cos(st)(psi - (w.psi) w) + sin(st)(w x psi)
    const double along = axis_.dot(psi);
    const double c0 = along * axis_[2];
    const double ca = psi[2] - c0;
    const double cb = axis_.cross(psi)[2];
    const double s = gens_.s;
    auto u = [&](double t) { return c0 + ca * std::cos(s * t) + cb * std::sin(s * t); };

    double lo = 0.0;
    double flo = u(lo);
    if (flo == 0.0) return 0.0;
    const double cell = x_period_ / kRootScanCells;
    for (int i = 1; i <= kRootScanCells; ++i) {
      const double hi = cell * i;
      const double fhi = u(hi);
      if (fhi == 0.0) return hi;
      if ((flo < 0.0) != (fhi < 0.0)) {
        std::uintmax_t iters = 200;
        const auto bracket = boost::math::tools::toms748_solve(
            u, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), iters);
        return 0.5 * (bracket.first + bracket.second);
      }
      lo = hi;
      flo = fhi;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

 private:
  GeneratorPair gens_;
  Eigen::Vector3d psi0_;
  Eigen::Vector3d axis_;
  double x_period_;
};

// Maps free parameters to the durations of every arc except the last.
using Layout = std::function<bool(const std::vector<double>& x, std::vector<double>& durations)>;

struct SearchSpace {
  std::size_t dims = 0;
  std::vector<double> range;  // coarse-grid extent per parameter
  std::vector<double> seed;
  Layout layout;
};

class PatternSolver {
 public:
  PatternSolver(const ScheduleModel& model, const Pattern& pattern, SearchSpace space,
                const OptimizerOptions& options)
      : model_(model), pattern_(pattern), space_(std::move(space)), options_(options) {
    durations_.assign(pattern_.size(), 0.0);
  }

  // Total time for the parameters, or a penalty when infeasible.
  double objective(const std::vector<double>& x) {
    if (!space_.layout(x, durations_)) return kPenalty;
    const std::size_t last = pattern_.size() - 1;
    const double root = model_.final_root(model_.apply(pattern_, durations_, last));
    if (std::isnan(root)) return kPenalty;
    durations_[last] = root;
    double total = 0.0;
    for (double d : durations_) total += d;
    return total;
  }

  std::vector<double> durations_for(const std::vector<double>& x) {
    objective(x);
    return durations_;
  }

  std::vector<double> solve() {
    const std::size_t dims = space_.dims;
    if (dims == 0) return {};

    std::vector<std::vector<double>> starts;
    starts.push_back(grid_best());
    starts.push_back(space_.seed);
    std::mt19937_64 rng(options_.seed + pattern_.size());
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double reference = 0.0;
    for (double v : space_.seed) reference = std::max(reference, std::abs(v));
    if (reference == 0.0) reference = 1.0;
    for (int k = 0; k < options_.perturbations; ++k) {
      std::vector<double> x = space_.seed;
      for (double& v : x) {
        const double scale = v != 0.0 ? std::abs(v) : reference;
        v += options_.perturbation_radius * scale * unit(rng);
      }
      starts.push_back(std::move(x));
    }

    std::vector<double> best = starts.front();
    double best_f = objective(best);
    for (const auto& start : starts) {
      std::vector<double> x = refine(start);
      const double f = objective(x);
      if (f < best_f) {
        best_f = f;
        best = std::move(x);
      }
    }
    return best;
  }

 private:
  std::vector<double> grid_best() {
    const std::size_t dims = space_.dims;
    int per = static_cast<int>(std::floor(
        std::pow(static_cast<double>(options_.grid_budget), 1.0 / static_cast<double>(dims))));
    per = std::max(per, 2);
    std::vector<int> idx(dims, 0);
    std::vector<double> x(dims);
    std::vector<double> best;
    double best_f = std::numeric_limits<double>::infinity();
    while (true) {
      for (std::size_t d = 0; d < dims; ++d) x[d] = space_.range[d] * idx[d] / per;
      const double f = objective(x);
      if (f < best_f) {
        best_f = f;
        best = x;
      }
      std::size_t d = 0;
      while (d < dims && ++idx[d] == per) idx[d++] = 0;
      if (d == dims) break;
    }
    return best;
  }

  static double gsl_objective(const gsl_vector* v, void* params) {
    auto* self = static_cast<PatternSolver*>(params);
    std::vector<double> x(v->size);
    for (std::size_t i = 0; i < v->size; ++i) x[i] = gsl_vector_get(v, i);
    return self->objective(x);
  }

  std::vector<double> refine(const std::vector<double>& start) {
    const std::size_t dims = start.size();
    gsl_multimin_function fn{&PatternSolver::gsl_objective, dims, this};
    gsl_vector* x = gsl_vector_alloc(dims);
    gsl_vector* step = gsl_vector_alloc(dims);
    for (std::size_t i = 0; i < dims; ++i) {
      gsl_vector_set(x, i, start[i]);
      gsl_vector_set(step, i, std::max(0.1 * std::abs(start[i]), 0.05 * space_.range[i]));
    }
    gsl_multimin_fminimizer* m =
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dims);
    gsl_multimin_fminimizer_set(m, &fn, x, step);
    for (int it = 0; it < options_.max_iterations; ++it) {
      if (gsl_multimin_fminimizer_iterate(m) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), options_.simplex_tolerance) ==
          GSL_SUCCESS) {
        break;
      }
    }
    std::vector<double> out(dims);
    for (std::size_t i = 0; i < dims; ++i) out[i] = gsl_vector_get(m->x, i);
    gsl_multimin_fminimizer_free(m);
    gsl_vector_free(step);
    gsl_vector_free(x);
    return out;
  }

  const ScheduleModel& model_;
  Pattern pattern_;
  SearchSpace space_;
  OptimizerOptions options_;
  std::vector<double> durations_;
};

// Seed durations: the GRK arcs on the first X and first Y, zero elsewhere.
std::vector<double> grk_seed(double gamma, const Pattern& pattern) {
  const double K = 1.0 / (std::sin(gamma) * std::sin(gamma));
  const ContinuumGrkSchedule grk = continuum_grk_schedule(std::max(K, 2.0));
  std::vector<double> seed(pattern.size(), 0.0);
  bool seen_x = false;
  bool seen_y = false;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == Control::X && !seen_x) {
      seed[i] = std::max(grk.t1, 0.0);
      seen_x = true;
    } else if (pattern[i] == Control::Y && !seen_y) {
      seed[i] = grk.t2;
      seen_y = true;
    }
  }
  return seed;
}

// Drops short arcs, merges equal neighbours and trailing Y-arcs, then
// re-solves the final X-arc.
ArcSchedule prune(const ScheduleModel& model, const Pattern& pattern,
                  const std::vector<double>& durations, double threshold) {
  Pattern p;
  std::vector<double> d;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (durations[i] < threshold) continue;
    if (!p.empty() && p.back() == pattern[i]) {
      d.back() += durations[i];
    } else {
      p.push_back(pattern[i]);
      d.push_back(durations[i]);
    }
  }
  while (!p.empty() && p.back() == Control::Y) {
    p.pop_back();
    d.pop_back();
  }
  if (p.empty()) {
    p.push_back(Control::X);
    d.push_back(0.0);
  }
  const double root = model.final_root(model.apply(p, d, p.size() - 1));
  if (!std::isnan(root)) d.back() = root;
  return ArcSchedule::make(std::move(p), std::move(d));
}

SearchSpace free_space(const ScheduleModel& model, double gamma, const Pattern& pattern) {
  SearchSpace space;
  space.dims = pattern.size() - 1;
  const std::vector<double> seed = grk_seed(gamma, pattern);
  for (std::size_t i = 0; i < space.dims; ++i) {
    space.range.push_back(model.period(pattern[i]));
    space.seed.push_back(seed[i]);
  }
  const std::size_t dims = space.dims;
  space.layout = [dims](const std::vector<double>& x, std::vector<double>& durations) {
    for (std::size_t i = 0; i < dims; ++i) durations[i] = std::abs(x[i]);
    return true;
  };
  return space;
}

SearchSpace extremal_space(const ScheduleModel& model, double gamma, const Pattern& pattern) {
  SearchSpace space;
  const std::size_t arcs = pattern.size();
  if (arcs < 2) return free_space(model, gamma, pattern);
  bool interior_y = false;
  for (std::size_t i = 1; i + 1 < arcs; ++i) interior_y |= pattern[i] == Control::Y;

  const std::vector<double> seed = grk_seed(gamma, pattern);
  space.dims = interior_y ? 2 : 1;
  space.range.push_back(model.period(pattern[0]));
  space.seed.push_back(seed[0]);
  if (interior_y) {
    space.range.push_back(2.0 * kPi);
    space.seed.push_back(grk_seed(gamma, {Control::Y})[0]);
  }
  const double tau_x = model.x_period() / 2.0;
  space.layout = [pattern, tau_x, arcs](const std::vector<double>& x,
                                        std::vector<double>& durations) {
    durations[0] = std::abs(x[0]);
    const double ell = x.size() > 1 ? x[1] : 0.0;
    if (x.size() > 1 && !(ell > 0.0 && ell < 2.0 * kPi)) return false;
    for (std::size_t i = 1; i + 1 < arcs; ++i) {
      durations[i] = pattern[i] == Control::X ? tau_x : ell;
    }
    return true;
  };
  return space;
}

ArcSchedule solve_in_space(const ScheduleModel& model, const Pattern& pattern, SearchSpace space,
                           const OptimizerOptions& options) {
  PatternSolver solver(model, pattern, std::move(space), options);
  const std::vector<double> x = solver.solve();
  if (solver.objective(x) >= kPenalty) {
    throw InfeasiblePattern("no start of pattern " + pattern_to_string(pattern) +
                            " reaches the terminal plane within one X-period of its final arc");
  }
  return ArcSchedule::make(pattern, solver.durations_for(x));
}

}  // namespace

std::string pattern_to_string(const Pattern& pattern) {
  std::string out;
  for (Control c : pattern) out += control_symbol(c);
  return out;
}

Pattern parse_pattern(const std::string& text) {
  Pattern p;
  for (char ch : text) {
    if (ch == 'X') {
      p.push_back(Control::X);
    } else if (ch == 'Y') {
      p.push_back(Control::Y);
    } else {
      throw std::invalid_argument("arc patterns use only X and Y: " + text);
    }
  }
  return p;
}

ArcSchedule ArcSchedule::make(Pattern pattern, std::vector<double> durations) {
  if (pattern.size() != durations.size()) {
    throw std::invalid_argument("pattern and durations differ in length");
  }
  require_alternating(pattern);
  ArcSchedule s;
  for (double d : durations) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw std::invalid_argument("arc durations must be finite and nonnegative");
    }
    s.total_time += d;
  }
  s.pattern = std::move(pattern);
  s.durations = std::move(durations);
  return s;
}

double terminal_residual(double gamma, const ArcSchedule& schedule) {
  const ScheduleModel model(gamma);
  return model.apply(schedule.pattern, schedule.durations, schedule.pattern.size())[2];
}

ArcSchedule optimize_pattern(double gamma, const Pattern& pattern,
                             const OptimizerOptions& options) {
  require_optimizable(pattern);
  const ScheduleModel model(gamma);
  const ArcSchedule raw =
      solve_in_space(model, pattern, free_space(model, gamma, pattern), options);

  // Arcs the refinement drove close to zero are tested at exactly zero.
  std::vector<double> d = raw.durations;
  double best = raw.total_time;
  for (std::size_t i = 0; i + 1 < d.size(); ++i) {
    if (d[i] == 0.0 || d[i] > 1e-4) continue;
    std::vector<double> trial = d;
    trial[i] = 0.0;
    const double root = model.final_root(model.apply(pattern, trial, trial.size() - 1));
    if (std::isnan(root)) continue;
    trial.back() = root;
    double total = 0.0;
    for (double v : trial) total += v;
    if (total <= best + 1e-12) {
      best = total;
      d = std::move(trial);
    }
  }
  return prune(model, pattern, d, options.prune_threshold);
}

ArcSchedule optimize_extremal_pattern(double gamma, const Pattern& pattern,
                                      const OptimizerOptions& options) {
  require_optimizable(pattern);
  const ScheduleModel model(gamma);
  return solve_in_space(model, pattern, extremal_space(model, gamma, pattern), options);
}

PatternComparison compare_patterns(double gamma, int max_switches,
                                   const OptimizerOptions& options) {
  if (max_switches < 0 || max_switches > OptimizerOptions::kMaxArcs - 1) {
    throw std::invalid_argument("max_switches must lie in [0, 6]");
  }
  (void)generators(gamma);

  PatternComparison cmp;
  cmp.gamma = gamma;
  cmp.max_switches = max_switches;
  const double K = 1.0 / (std::sin(gamma) * std::sin(gamma));
  const ContinuumGrkSchedule grk = continuum_grk_schedule(std::max(K, 2.0));
  cmp.grk_time = grk.total();

  cmp.results.resize(static_cast<std::size_t>(max_switches) + 1);
  for (int k = 0; k <= max_switches; ++k) {
    Pattern p(static_cast<std::size_t>(k) + 1);
    for (int i = k; i >= 0; --i) p[i] = (k - i) % 2 == 0 ? Control::X : Control::Y;
    cmp.results[k].requested = std::move(p);
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cmp.results.size(); i = next++) {
      PatternResult& r = cmp.results[i];
      try {
        r.schedule = optimize_pattern(gamma, r.requested, options);
        r.time = r.schedule.total_time;
        r.residual = terminal_residual(gamma, r.schedule);
        r.extremal_schedule = optimize_extremal_pattern(gamma, r.requested, options);
        r.extremal_time = r.extremal_schedule.total_time;
        r.feasible = std::abs(r.residual) <= options.feasibility_tolerance;
        if (!r.feasible) r.diagnostic = "returned schedule misses the terminal plane";
      } catch (const InfeasiblePattern& e) {
        r.feasible = false;
        r.diagnostic = e.what();
      }
    }
  };
  const unsigned threads =
      std::min<unsigned>(std::max(1U, options.threads), static_cast<unsigned>(cmp.results.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  auto precedes = [](const PatternResult& a, const PatternResult& b) {
    if (a.feasible != b.feasible) return a.feasible;
    if (std::abs(a.time - b.time) > 1e-9) return a.time < b.time;
    if (a.requested.size() != b.requested.size()) return a.requested.size() < b.requested.size();
    return pattern_to_string(a.requested) < pattern_to_string(b.requested);
  };
  for (std::size_t i = 1; i < cmp.results.size(); ++i) {
    if (precedes(cmp.results[i], cmp.results[cmp.best])) cmp.best = i;
  }
  return cmp;
}

ContinuumGrkSchedule continuum_grk_schedule(double K) {
  ContinuumGrkSchedule g;
  g.K = K;
  const double alpha = optimal_alpha(K);
  const double eta = optimal_eta(K);
  g.s = 1.0 / std::sqrt(K);
  g.t1 = kPi / (2.0 * g.s) - 2.0 * eta;
  g.t2 = 2.0 * alpha;
  return g;
}

double queries_from_time(double t, const DatabaseGeometry& geom) {
  return t / (2.0 * geom.theta2);
}

}  // namespace grk
