#pragma once

// Closed-form GRK parameters and end-to-end runs of the
// global^k1 local^k2 global word.

#include <cstdint>
#include <vector>

#include "grk/reduced_model.hpp"

namespace grk {

struct GrkParameters {
  double K = 0.0;
  double alpha = 0.0;
  double eta = 0.0;
  std::int64_t k1 = 0;
  std::int64_t k2 = 0;
  double predicted_queries = 0.0;
};

/// (1/2) arccos((K-2) / (2(K-1))); throws std::invalid_argument for K < 2.
double optimal_alpha(double K);

/// (sqrt(K)/2) atan2(sqrt(3K-4), K-2); the two-argument form keeps K = 2
/// on the continuous branch. Throws std::invalid_argument for K < 2.
double optimal_eta(double K);

/// sin(2 eta / sqrt K) (K - 4 sin^2 alpha) - 2 sqrt(K) sin(2 alpha) cos(2 eta / sqrt K),
/// the success condition tan(2 eta / sqrt K) = 2 sqrt(K) sin(2 alpha) / (K - 4 sin^2 alpha)
/// cleared of both denominators. Zero exactly when the condition holds,
/// including K = 2 where the tangent argument is pi/2.
double constraint_residual(double K, double alpha, double eta);

/// Real-valued iteration counts before rounding.
struct RealIterationCounts {
  double k1 = 0.0;
  double k2 = 0.0;
};

RealIterationCounts real_iteration_counts(const DatabaseGeometry& geom);

/// Rounds the real counts and returns the pair in the +-window neighbourhood
/// with the smallest residual probability after running the GRK word. Ties
/// go to the smaller k1, then the smaller k2. Throws for K < 2.
GrkParameters iteration_counts(const DatabaseGeometry& geom, int window = 2);

/// Residual probability c_u^2 after global^k1 local^k2 global.
double grk_word_residual(const DatabaseGeometry& geom, std::int64_t k1, std::int64_t k2);

struct GrkRun {
  GrkParameters params;
  ReducedState final_state;
  TerminalResidual residual;
  std::int64_t queries = 0;
};

GrkRun run_grk(const DatabaseGeometry& geom, int window = 2);

/// The GRK word as runs: {G^k1, L^k2, G^1}.
std::vector<Run> grk_runs(std::int64_t k1, std::int64_t k2);

}  // namespace grk
