#include "grk/grk_parameters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace grk {
namespace {

void require_block_count(double K) {
  if (!(K >= 2.0)) {
    throw std::invalid_argument("GRK parameters require K >= 2 (got " + std::to_string(K) + ")");
  }
}

}  // namespace

double optimal_alpha(double K) {
  require_block_count(K);
  return 0.5 * std::acos((K - 2.0) / (2.0 * (K - 1.0)));
}

double optimal_eta(double K) {
  require_block_count(K);
  return 0.5 * std::sqrt(K) * std::atan2(std::sqrt(3.0 * K - 4.0), K - 2.0);
}

double constraint_residual(double K, double alpha, double eta) {
  const double sa = std::sin(alpha);
  const double angle = 2.0 * eta / std::sqrt(K);
  return std::sin(angle) * (K - 4.0 * sa * sa) -
         2.0 * std::sqrt(K) * std::sin(2.0 * alpha) * std::cos(angle);
}

RealIterationCounts real_iteration_counts(const DatabaseGeometry& geom) {
  const double K = static_cast<double>(geom.K);
  const double root_b = std::sqrt(static_cast<double>(geom.b));
  const double root_N = std::sqrt(static_cast<double>(geom.N));
  return {std::numbers::pi / 4.0 * root_N - optimal_eta(K) * root_b, optimal_alpha(K) * root_b};
}

std::vector<Run> grk_runs(std::int64_t k1, std::int64_t k2) {
  return {{Letter::Global, static_cast<std::uint64_t>(k1)},
          {Letter::Local, static_cast<std::uint64_t>(k2)},
          {Letter::Global, 1}};
}

double grk_word_residual(const DatabaseGeometry& geom, std::int64_t k1, std::int64_t k2) {
  const ReducedState out = apply_runs(geom, grk_runs(k1, k2), initial_state(geom));
  return residual_amplitude(out).residual_probability;
}

GrkParameters iteration_counts(const DatabaseGeometry& geom, int window) {
  const double K = static_cast<double>(geom.K);
  require_block_count(K);
  if (window < 0) throw std::invalid_argument("scan window must be nonnegative");

  GrkParameters p;
  p.K = K;
  p.alpha = optimal_alpha(K);
  p.eta = optimal_eta(K);
  p.predicted_queries = std::numbers::pi / 4.0 * std::sqrt(static_cast<double>(geom.N)) -
                        (p.eta - p.alpha) * std::sqrt(static_cast<double>(geom.b));

  const RealIterationCounts real = real_iteration_counts(geom);
  const auto k1_center = static_cast<std::int64_t>(std::llround(real.k1));
  const auto k2_center = static_cast<std::int64_t>(std::llround(real.k2));

  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t k1 = std::max<std::int64_t>(0, k1_center - window); k1 <= k1_center + window;
       ++k1) {
    for (std::int64_t k2 = std::max<std::int64_t>(0, k2_center - window);
         k2 <= k2_center + window; ++k2) {
      const double r = grk_word_residual(geom, k1, k2);
      if (r < best) {
        best = r;
        p.k1 = k1;
        p.k2 = k2;
      }
    }
  }
  return p;
}

GrkRun run_grk(const DatabaseGeometry& geom, int window) {
  GrkRun run;
  run.params = iteration_counts(geom, window);
  run.final_state = apply_runs(geom, grk_runs(run.params.k1, run.params.k2), initial_state(geom));
  run.residual = residual_amplitude(run.final_state);
  run.queries = run.params.k1 + run.params.k2 + 1;
  return run;
}

}  // namespace grk
