#pragma once

// Exhaustive enumeration of operator words. Words are ranked by length, then
// by number of runs, then lexicographically with Global < Local; the first
// word meeting the residual threshold under that order is query-optimal.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "grk/reduced_model.hpp"

namespace grk {

struct SearchOptions {
  /// Maximum number of words (all lengths 0..max_len) the caller accepts;
  /// the default covers max_len = 26.
  std::uint64_t word_budget = (std::uint64_t{1} << 27) - 1;
  unsigned threads = 1;
  /// Words are partitioned across workers by their first letters.
  int partition_depth = 8;
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::uint64_t required, std::uint64_t budget);
  std::uint64_t required() const { return required_; }
  std::uint64_t budget() const { return budget_; }

 private:
  std::uint64_t required_;
  std::uint64_t budget_;
};

/// Number of words of length 0..max_len, saturating at UINT64_MAX.
std::uint64_t required_word_count(int max_len);

struct StructureInfo {
  std::vector<Run> runs;
  std::size_t switchings = 0;
};

StructureInfo classify_structure(const OperatorWord& word);

/// Strict ranking used by every search: length, run count, then
/// lexicographic with Global < Local.
bool word_precedes(const OperatorWord& lhs, const OperatorWord& rhs);

/// Best member of the family global^k1 local^k2 global.
struct GlgResult {
  std::int64_t k1 = 0;
  std::int64_t k2 = 0;
  double residual = 0.0;
  bool success = false;
  std::int64_t queries() const { return k1 + k2 + 1; }
};

/// Scans 0 <= k1 <= k1_max, 0 <= k2 <= k2_max. Returns the highest-ranked
/// pair with residual probability <= epsilon, or the residual minimizer
/// (ties by rank) when none qualifies.
GlgResult glg_scan(const DatabaseGeometry& geom, std::int64_t k1_max, std::int64_t k2_max,
                   double epsilon);

struct LandscapePoint {
  std::int64_t k1 = 0;
  std::int64_t k2 = 0;
  double residual = 0.0;
};

std::vector<LandscapePoint> glg_landscape(const DatabaseGeometry& geom, std::int64_t k1_max,
                                          std::int64_t k2_max);

struct SearchReport {
  DatabaseGeometry geometry;
  double epsilon = 0.0;
  int max_len = 0;
  std::optional<OperatorWord> best_word;
  int best_length = -1;
  double best_residual = 0.0;
  StructureInfo structure;
  std::uint64_t words_examined = 0;
  GlgResult glg_best;
};

/// Depth-first enumeration of every word up to max_len, sharing prefix
/// states. Deterministic for any thread count. Throws BudgetExceeded when
/// required_word_count(max_len) exceeds options.word_budget.
SearchReport exhaustive_search(const DatabaseGeometry& geom, int max_len, double epsilon,
                               const SearchOptions& options = {});

}  // namespace grk
