#include <doctest.h>

#include <cmath>
#include <optional>
#include <string>

#include "grk/grk_parameters.hpp"
#include "grk/sequence_search.hpp"

using namespace grk;

namespace {

struct NaiveBest {
  std::optional<std::string> word;
  double residual = 0.0;
};

int run_count(const std::string& w) {
  int runs = 0;
  for (std::size_t i = 0; i < w.size(); ++i) runs += (i == 0 || w[i] != w[i - 1]) ? 1 : 0;
  return runs;
}

// Every word evaluated from scratch, one letter at a time.
NaiveBest naive_search(const DatabaseGeometry& g, int max_len, double eps) {
  const Eigen::Matrix3d G = global_grover(g).matrix();
  const Eigen::Matrix3d L = local_grover(g).matrix();
  for (int len = 0; len <= max_len; ++len) {
    NaiveBest best;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << len); ++bits) {
      std::string w;
      Eigen::Vector3d v = initial_state(g).components();
      for (int i = len - 1; i >= 0; --i) {
        const bool local = (bits >> i) & 1U;
        w.push_back(local ? 'L' : 'G');
        v = (local ? L : G) * v;
      }
      const double r = v[2] * v[2];
      if (r > eps) continue;
      if (!best.word || run_count(w) < run_count(*best.word) ||
          (run_count(w) == run_count(*best.word) && w < *best.word)) {
        best.word = w;
        best.residual = r;
      }
    }
    if (best.word) return best;
  }
  return {};
}

}  // namespace

TEST_SUITE("sequence_search") {

TEST_CASE("prefix-sharing search equals naive enumeration") {
  for (int n = 3; n <= 6; ++n) {
    for (int m = 1; m < n; ++m) {
      const DatabaseGeometry g = make_geometry(n, m);
      for (double eps : {0.01, 0.05, 0.2}) {
        const int max_len = 12;
        const NaiveBest naive = naive_search(g, max_len, eps);
        SearchOptions opts;
        opts.partition_depth = 3;
        const SearchReport r = exhaustive_search(g, max_len, eps, opts);
        CAPTURE(n);
        CAPTURE(m);
        CAPTURE(eps);
        REQUIRE(r.best_word.has_value() == naive.word.has_value());
        if (naive.word) {
          CHECK(r.best_word->to_string() == *naive.word);
          CHECK(r.best_length == static_cast<int>(naive.word->size()));
          CHECK(r.best_residual == doctest::Approx(naive.residual).epsilon(1e-12));
          CHECK(r.best_residual <= eps);
        }
      }
    }
  }
}

TEST_CASE("report does not depend on thread count or partition depth") {
  const DatabaseGeometry g = make_geometry(8, 3);
  SearchOptions one;
  one.threads = 1;
  const SearchReport a = exhaustive_search(g, 15, 0.004, one);
  for (unsigned threads : {2U, 3U, 5U}) {
    for (int depth : {0, 4, 8, 12}) {
      SearchOptions o;
      o.threads = threads;
      o.partition_depth = depth;
      const SearchReport b = exhaustive_search(g, 15, 0.004, o);
      CHECK(b.best_word == a.best_word);
      CHECK(b.best_residual == a.best_residual);
      CHECK(b.words_examined == a.words_examined);
    }
  }
}

TEST_CASE("(8,4) optimum has the global-local-global shape") {
  const DatabaseGeometry g = make_geometry(8, 4);
  const SearchReport r = exhaustive_search(g, 15, 0.01);
  REQUIRE(r.best_word);
  REQUIRE(r.structure.runs.size() == 3);
  CHECK(r.structure.runs[0].letter == Letter::Global);
  CHECK(r.structure.runs[1].letter == Letter::Local);
  CHECK(r.structure.runs[2].letter == Letter::Global);
  CHECK(r.structure.switchings == 2);
  const GlgResult glg = glg_scan(g, 15, 15, 0.01);
  CHECK(glg.success);
  CHECK(glg.queries() == r.best_length);
}

TEST_CASE("trivial thresholds") {
  const DatabaseGeometry g = make_geometry(6, 3);
  const double start = initial_state(g).u() * initial_state(g).u();
  const SearchReport done = exhaustive_search(g, 5, start);
  REQUIRE(done.best_word);
  CHECK(done.best_length == 0);
  CHECK(done.best_word->empty());

  const SearchReport none = exhaustive_search(g, 0, 0.01);
  CHECK_FALSE(none.best_word);
  CHECK(none.best_length == -1);
  CHECK(none.best_residual == doctest::Approx(start));
}

TEST_CASE("budget refusal carries the estimate") {
  const DatabaseGeometry g = make_geometry(10, 5);
  try {
    exhaustive_search(g, 27, 0.01);
    FAIL("expected a refusal");
  } catch (const BudgetExceeded& e) {
    CHECK(e.required() == (std::uint64_t{1} << 28) - 1);
    CHECK(e.budget() == (std::uint64_t{1} << 27) - 1);
  }
  CHECK(required_word_count(0) == 1);
  CHECK(required_word_count(26) == (std::uint64_t{1} << 27) - 1);
  CHECK(required_word_count(70) == UINT64_MAX);
  CHECK_THROWS_AS(exhaustive_search(g, -1, 0.01), std::invalid_argument);
}

TEST_CASE("structure classification") {
  StructureInfo s = classify_structure(OperatorWord::parse("GGLLG"));
  REQUIRE(s.runs.size() == 3);
  CHECK(s.runs[0] == Run{Letter::Global, 2});
  CHECK(s.runs[1] == Run{Letter::Local, 2});
  CHECK(s.runs[2] == Run{Letter::Global, 1});
  CHECK(s.switchings == 2);
  CHECK(classify_structure(OperatorWord{}).switchings == 0);
  CHECK(classify_structure(OperatorWord{}).runs.empty());
  s = classify_structure(OperatorWord::parse("LLLL"));
  REQUIRE(s.runs.size() == 1);
  CHECK(s.runs[0] == Run{Letter::Local, 4});
  CHECK(s.switchings == 0);
}

TEST_CASE("ranking") {
  CHECK(word_precedes(OperatorWord::parse("GL"), OperatorWord::parse("GGG")));
  CHECK(word_precedes(OperatorWord::parse("GGL"), OperatorWord::parse("GLG")));
  CHECK(word_precedes(OperatorWord::parse("GGLG"), OperatorWord::parse("GLLG")));
  CHECK_FALSE(word_precedes(OperatorWord::parse("GLG"), OperatorWord::parse("GLG")));
}

TEST_CASE("glg_scan") {
  const DatabaseGeometry g = make_geometry(8, 4);
  const GlgResult single = glg_scan(g, 0, 0, 0.0);
  CHECK(single.k1 == 0);
  CHECK(single.k2 == 0);
  CHECK(single.residual == doctest::Approx(grk_word_residual(g, 0, 0)));

  // Brute force over the family with the same ranking.
  const GlgResult r = glg_scan(g, 20, 20, 0.01);
  for (std::int64_t k1 = 0; k1 <= 20; ++k1) {
    for (std::int64_t k2 = 0; k2 <= 20; ++k2) {
      if (grk_word_residual(g, k1, k2) <= 0.01) CHECK(k1 + k2 + 1 >= r.queries());
    }
  }
  CHECK(grk_word_residual(g, r.k1, r.k2) == doctest::Approx(r.residual).epsilon(1e-12));
}

TEST_CASE("glg_scan without success returns the residual minimizer") {
  const DatabaseGeometry g = make_geometry(8, 4);
  const GlgResult r = glg_scan(g, 3, 3, 1e-12);
  CHECK_FALSE(r.success);
  for (std::int64_t k1 = 0; k1 <= 3; ++k1) {
    for (std::int64_t k2 = 0; k2 <= 3; ++k2) CHECK(r.residual <= grk_word_residual(g, k1, k2));
  }
}

TEST_CASE("glg_scan agrees with iteration_counts at (16,8) at the GRK residual level") {
  const DatabaseGeometry g = make_geometry(16, 8);
  const GrkRun run = run_grk(g);
  // Both paths evaluate the same word; the slack absorbs their roundoff difference.
  const double eps = run.residual.residual_probability * (1.0 + 1e-9);
  const GlgResult r = glg_scan(g, 200, 20, eps);
  CHECK(r.success);
  CHECK(std::abs(r.k1 - run.params.k1) <= 2);
  CHECK(std::abs(r.k2 - run.params.k2) <= 2);
}

TEST_CASE("landscape covers the grid") {
  const auto pts = glg_landscape(make_geometry(6, 3), 4, 2);
  CHECK(pts.size() == 15);
  CHECK(pts.front().k1 == 0);
  CHECK(pts.back().k1 == 4);
  CHECK(pts.back().k2 == 2);
}

}  // TEST_SUITE
