#pragma once

// Minimum-time arc schedules in the continuum model. A schedule is an
// alternating sequence of X- and Y-arcs applied to (0, sin gamma, cos gamma);
// it is feasible when the final state has no amplitude on |u>.

#include <cstdint>
#include <string>
#include <vector>

#include "grk/control.hpp"
#include "grk/reduced_model.hpp"

namespace grk {

using Pattern = std::vector<Control>;

std::string pattern_to_string(const Pattern& pattern);
/// Parses strings such as "XYX"; throws std::invalid_argument otherwise.
Pattern parse_pattern(const std::string& text);

struct ArcSchedule {
  Pattern pattern;
  std::vector<double> durations;
  double total_time = 0.0;

  /// Throws std::invalid_argument unless the pattern alternates, the sizes
  /// agree and every duration is finite and nonnegative.
  static ArcSchedule make(Pattern pattern, std::vector<double> durations);
};

/// u-component after applying the schedule to the continuum initial state.
double terminal_residual(double gamma, const ArcSchedule& schedule);

struct OptimizerOptions {
  static constexpr int kMaxArcs = 7;

  /// Starts drawn around the GRK seed, in addition to the seed itself.
  int perturbations = 8;
  double perturbation_radius = 0.2;
  std::uint64_t seed = 0x5eed5eedULL;
  /// Simplex size at which the local refinement stops.
  double simplex_tolerance = 1e-10;
  int max_iterations = 20000;
  /// Total number of coarse grid points across the free durations.
  int grid_budget = 4096;
  /// Arcs shorter than this are removed from the returned schedule.
  double prune_threshold = 1e-9;
  /// Residual accepted as feasible.
  double feasibility_tolerance = 1e-10;
  unsigned threads = 1;
};

/// Thrown for a pattern that cannot reach the terminal plane, such as one
/// ending with a Y-arc, which leaves the u-amplitude unchanged.
class InfeasiblePattern : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Minimum-time schedule for `pattern`. The final X-arc duration is the first
/// root of the residual within one X-period; the other durations are chosen by
/// a coarse grid plus Nelder-Mead refinement from several starts. Arcs shorter
/// than prune_threshold are dropped and neighbouring arcs of the same kind are
/// merged, so the returned pattern may be shorter than the request.
/// Throws InfeasiblePattern when the pattern ends with Y and
/// std::invalid_argument when it does not alternate or has more than 7 arcs.
ArcSchedule optimize_pattern(double gamma, const Pattern& pattern,
                             const OptimizerOptions& options = {});

/// Same search restricted to extremal schedules: interior X-arcs last pi/s,
/// every interior Y-arc has one common length ell in (0, 2 pi), and only the
/// first arc, ell and the final root remain free.
ArcSchedule optimize_extremal_pattern(double gamma, const Pattern& pattern,
                                      const OptimizerOptions& options = {});

struct PatternResult {
  Pattern requested;
  ArcSchedule schedule;           // free durations, after pruning
  double time = 0.0;
  double residual = 0.0;
  ArcSchedule extremal_schedule;  // switch-to-switch arcs fixed by the extremal structure
  double extremal_time = 0.0;
  bool feasible = false;
  std::string diagnostic;
};

struct PatternComparison {
  double gamma = 0.0;
  int max_switches = 0;
  std::vector<PatternResult> results;
  /// Index into results of the fastest feasible schedule; ties within 1e-9
  /// go to the shorter returned pattern, then lexicographic order.
  std::size_t best = 0;
  /// pi/(2s) - 2(eta_K - alpha_K)
  double grk_time = 0.0;
};

/// Optimizes the alternating pattern ending in X for every switching count
/// 0..max_switches. Throws std::invalid_argument for max_switches outside [0, 6].
PatternComparison compare_patterns(double gamma, int max_switches,
                                   const OptimizerOptions& options = {});

struct ContinuumGrkSchedule {
  double K = 0.0;
  double s = 0.0;
  double t1 = 0.0;  // pi/(2s) - 2 eta_K
  double t2 = 0.0;  // 2 alpha_K
  double total() const { return t1 + t2; }
};

/// Throws std::invalid_argument for K < 2.
ContinuumGrkSchedule continuum_grk_schedule(double K);

/// Continuum time divided by the per-query increment 2 asin(1/sqrt(b)).
double queries_from_time(double t, const DatabaseGeometry& geom);

}  // namespace grk
