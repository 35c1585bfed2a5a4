#include "grk/sequence_search.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

namespace grk {

BudgetExceeded::BudgetExceeded(std::uint64_t required, std::uint64_t budget)
    : std::runtime_error("exhaustive search needs " + std::to_string(required) +
                         " words but the budget is " + std::to_string(budget)),
      required_(required),
      budget_(budget) {}

std::uint64_t required_word_count(int max_len) {
  if (max_len < 0) return 0;
  if (max_len >= 63) return std::numeric_limits<std::uint64_t>::max();
  return (std::uint64_t{1} << (max_len + 1)) - 1;
}

StructureInfo classify_structure(const OperatorWord& word) {
  StructureInfo info;
  info.runs = word.runs();
  info.switchings = info.runs.empty() ? 0 : info.runs.size() - 1;
  return info;
}

bool word_precedes(const OperatorWord& lhs, const OperatorWord& rhs) {
  if (lhs.size() != rhs.size()) return lhs.size() < rhs.size();
  const std::size_t lr = lhs.runs().size();
  const std::size_t rr = rhs.runs().size();
  if (lr != rr) return lr < rr;
  return lhs.letters() < rhs.letters();
}

namespace {

// Rank of global^k1 local^k2 global, matching word_precedes.
bool glg_precedes(std::int64_t k1a, std::int64_t k2a, std::int64_t k1b, std::int64_t k2b) {
  const std::int64_t qa = k1a + k2a;
  const std::int64_t qb = k1b + k2b;
  if (qa != qb) return qa < qb;
  const int ra = k2a == 0 ? 1 : 3;
  const int rb = k2b == 0 ? 1 : 3;
  if (ra != rb) return ra < rb;
  return k1a > k1b;  // a longer leading G run is lexicographically smaller
}

template <typename Visit>
void for_each_glg(const DatabaseGeometry& geom, std::int64_t k1_max, std::int64_t k2_max,
                  Visit&& visit) {
  const Eigen::Matrix3d global = global_grover(geom).matrix();
  const Eigen::Matrix3d local = local_grover(geom).matrix();
  Eigen::Vector3d after_global = initial_state(geom).components();
  for (std::int64_t k1 = 0; k1 <= k1_max; ++k1) {
    Eigen::Vector3d v = after_global;
    for (std::int64_t k2 = 0; k2 <= k2_max; ++k2) {
      const double cu = global.row(2).dot(v);
      visit(k1, k2, cu * cu);
      v = local * v;
    }
    after_global = global * after_global;
  }
}

constexpr int kMaxDepth = 64;

struct Candidate {
  bool found = false;
  int length = 0;
  int runs = 0;
  std::array<Letter, kMaxDepth> letters{};
  double residual = 0.0;
};

bool candidate_precedes(const Candidate& a, const Candidate& b) {
  if (!a.found) return false;
  if (!b.found) return true;
  if (a.length != b.length) return a.length < b.length;
  if (a.runs != b.runs) return a.runs < b.runs;
  return std::lexicographical_compare(a.letters.begin(), a.letters.begin() + a.length,
                                      b.letters.begin(), b.letters.begin() + b.length);
}

// One depth-first walk. The state stack holds only the current path.
class Walker {
 public:
  Walker(const Eigen::Matrix3d& global, const Eigen::Matrix3d& local, double epsilon, int limit)
      : ops_{global, local}, epsilon_(epsilon), limit_(limit) {}

  void run(const std::vector<Letter>& prefix, const Eigen::Vector3d& start, bool visit_root) {
    depth_stack_[0] = start;
    runs_[0] = 0;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      path_[i] = prefix[i];
      depth_stack_[i + 1] = ops_[static_cast<int>(prefix[i])] * depth_stack_[i];
      runs_[i + 1] = runs_[i] + ((i == 0 || prefix[i] != prefix[i - 1]) ? 1 : 0);
    }
    const int depth = static_cast<int>(prefix.size());
    if (visit_root) {
      visit(depth);
    } else {
      expand(depth);
    }
  }

  const Candidate& best() const { return best_; }
  std::uint64_t examined() const { return examined_; }
  double min_residual() const { return min_residual_; }

 private:
  void visit(int depth) {
    ++examined_;
    const double cu = depth_stack_[depth][2];
    const double r = cu * cu;
    min_residual_ = std::min(min_residual_, r);
    if (r <= epsilon_) {
      Candidate c;
      c.found = true;
      c.length = depth;
      c.runs = runs_[depth];
      std::copy(path_.begin(), path_.begin() + depth, c.letters.begin());
      c.residual = r;
      if (candidate_precedes(c, best_)) {
        best_ = c;
        limit_ = std::min(limit_, depth);
      }
      return;
    }
    expand(depth);
  }

  void expand(int depth) {
    if (depth >= limit_) return;
    for (int l = 0; l < 2; ++l) {
      const auto letter = static_cast<Letter>(l);
      path_[depth] = letter;
      depth_stack_[depth + 1] = ops_[l] * depth_stack_[depth];
      runs_[depth + 1] = runs_[depth] + ((depth == 0 || path_[depth - 1] != letter) ? 1 : 0);
      visit(depth + 1);
    }
  }

  std::array<Eigen::Matrix3d, 2> ops_;
  double epsilon_;
  int limit_;
  std::array<Eigen::Vector3d, kMaxDepth + 1> depth_stack_;
  std::array<int, kMaxDepth + 1> runs_{};
  std::array<Letter, kMaxDepth> path_{};
  Candidate best_;
  std::uint64_t examined_ = 0;
  double min_residual_ = std::numeric_limits<double>::infinity();
};

std::vector<Letter> prefix_from_index(std::uint64_t index, int length) {
  std::vector<Letter> prefix(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) {
    const bool local = (index >> (length - 1 - i)) & 1U;
    prefix[static_cast<std::size_t>(i)] = local ? Letter::Local : Letter::Global;
  }
  return prefix;
}

}  // namespace

GlgResult glg_scan(const DatabaseGeometry& geom, std::int64_t k1_max, std::int64_t k2_max,
                   double epsilon) {
  k1_max = std::max<std::int64_t>(0, k1_max);
  k2_max = std::max<std::int64_t>(0, k2_max);
  GlgResult best_success;
  GlgResult best_residual;
  best_residual.residual = std::numeric_limits<double>::infinity();
  for_each_glg(geom, k1_max, k2_max, [&](std::int64_t k1, std::int64_t k2, double r) {
    if (r <= epsilon &&
        (!best_success.success || glg_precedes(k1, k2, best_success.k1, best_success.k2))) {
      best_success = {k1, k2, r, true};
    }
    if (r < best_residual.residual ||
        (r == best_residual.residual && glg_precedes(k1, k2, best_residual.k1, best_residual.k2))) {
      best_residual = {k1, k2, r, false};
    }
  });
  return best_success.success ? best_success : best_residual;
}

std::vector<LandscapePoint> glg_landscape(const DatabaseGeometry& geom, std::int64_t k1_max,
                                          std::int64_t k2_max) {
  std::vector<LandscapePoint> points;
  for_each_glg(geom, std::max<std::int64_t>(0, k1_max), std::max<std::int64_t>(0, k2_max),
               [&](std::int64_t k1, std::int64_t k2, double r) { points.push_back({k1, k2, r}); });
  return points;
}

SearchReport exhaustive_search(const DatabaseGeometry& geom, int max_len, double epsilon,
                               const SearchOptions& options) {
  if (max_len < 0) throw std::invalid_argument("max_len must be nonnegative");
  const std::uint64_t required = required_word_count(max_len);
  if (max_len > kMaxDepth || required > options.word_budget) {
    throw BudgetExceeded(required, options.word_budget);
  }

  SearchReport report;
  report.geometry = geom;
  report.epsilon = epsilon;
  report.max_len = max_len;
  const std::int64_t glg_range = std::max(0, max_len - 1);
  report.glg_best = glg_scan(geom, glg_range, glg_range, epsilon);

  // A successful GLG word in range bounds the optimal length from above.
  int limit = max_len;
  if (report.glg_best.success && report.glg_best.queries() <= max_len) {
    limit = static_cast<int>(report.glg_best.queries());
  }

  const Eigen::Matrix3d global = global_grover(geom).matrix();
  const Eigen::Matrix3d local = local_grover(geom).matrix();
  const Eigen::Vector3d start = initial_state(geom).components();

  // Short words, evaluated serially.
  const int split = std::min(std::max(0, options.partition_depth), limit);
  Walker head(global, local, epsilon, split);
  head.run({}, start, true);
  Candidate best = head.best();
  std::uint64_t examined = head.examined();
  double min_residual = head.min_residual();

  if (!best.found && limit > split) {
    const std::uint64_t partitions = std::uint64_t{1} << split;
    std::vector<Candidate> results(partitions);
    std::vector<std::uint64_t> counts(partitions, 0);
    std::vector<double> minima(partitions, std::numeric_limits<double>::infinity());
    std::atomic<std::uint64_t> next{0};

    auto worker = [&] {
      for (std::uint64_t i = next++; i < partitions; i = next++) {
        Walker w(global, local, epsilon, limit);
        w.run(prefix_from_index(i, split), start, false);
        results[i] = w.best();
        counts[i] = w.examined();
        minima[i] = w.min_residual();
      }
    };
    const unsigned threads = std::max(1U, options.threads);
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(threads);
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (std::uint64_t i = 0; i < partitions; ++i) {
      if (candidate_precedes(results[i], best)) best = results[i];
      examined += counts[i];
      min_residual = std::min(min_residual, minima[i]);
    }
  }

  report.words_examined = examined;
  if (best.found) {
    report.best_word = OperatorWord(
        std::vector<Letter>(best.letters.begin(), best.letters.begin() + best.length));
    report.best_length = best.length;
    report.best_residual = best.residual;
    report.structure = classify_structure(*report.best_word);
  } else {
    report.best_residual = min_residual;
  }
  return report;
}

}  // namespace grk
