#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "grk/reduced_model.hpp"
#include "oracles.hpp"

using namespace grk;

TEST_SUITE("reduced_model") {

TEST_CASE("geometry fields") {
  const DatabaseGeometry g = make_geometry(6, 3);
  CHECK(g.N == 64);
  CHECK(g.b == 8);
  CHECK(g.K == 8);
  CHECK(std::sin(g.gamma) == doctest::Approx(1.0 / std::sqrt(8.0)).epsilon(1e-15));

  const DatabaseGeometry h = make_geometry(2, 1);
  CHECK(h.N == 4);
  CHECK(h.b == 2);
  CHECK(h.K == 2);
  CHECK(std::sin(h.theta2) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

  for (int n = 2; n <= 62; n += 5) {
    for (int m = 1; m < n; m += 3) {
      const DatabaseGeometry x = make_geometry(n, m);
      CHECK(x.N == x.b * x.K);
      CHECK(std::abs(std::sin(x.theta1) - 1.0 / std::sqrt(static_cast<double>(x.N))) < 1e-15);
    }
  }
}

TEST_CASE("geometry rejects degenerate partitions") {
  CHECK_THROWS_AS(make_geometry(3, 3), std::invalid_argument);
  CHECK_THROWS_AS(make_geometry(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_geometry(63, 2), std::invalid_argument);
}

TEST_CASE("operators are orthogonal with the expected determinants") {
  for (int n = 2; n <= 24; ++n) {
    for (int m = 1; m < n; ++m) {
      const DatabaseGeometry g = make_geometry(n, m);
      const ReducedOperator G = global_grover(g);
      const ReducedOperator L = local_grover(g);
      CHECK(G.orthogonality_defect() <= 1e-12);
      CHECK(L.orthogonality_defect() <= 1e-12);
      CHECK(std::abs(G.determinant() + 1.0) <= 1e-12);
      CHECK(std::abs(L.determinant() - 1.0) <= 1e-12);
      CHECK(L.matrix()(2, 2) == 1.0);
      CHECK(L.matrix()(2, 0) == 0.0);
      CHECK(L.matrix()(2, 1) == 0.0);
      CHECK(L.matrix()(0, 2) == 0.0);
      CHECK(L.matrix()(1, 2) == 0.0);
    }
  }
}

TEST_CASE("reduced operators equal the projected statevector operators") {
  for (int n = 2; n <= 7; ++n) {
    for (int m = 1; m < n; ++m) {
      const DatabaseGeometry g = make_geometry(n, m);
      const std::uint64_t target = (std::uint64_t{5} * 7 + 3) % g.N;
      const Eigen::Matrix3d G = oracle::projected_letter(n, m, target, false);
      const Eigen::Matrix3d L = oracle::projected_letter(n, m, target, true);
      CHECK((G - global_grover(g).matrix()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((L - local_grover(g).matrix()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("small-geometry entries") {
  const DatabaseGeometry g = make_geometry(2, 1);
  CHECK(std::abs(global_grover(g).matrix()(2, 2)) < 1e-15);
  Eigen::Matrix3d expected;
  expected << 0, 1, 0, -1, 0, 0, 0, 0, 1;
  CHECK((local_grover(g).matrix() - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("initial state") {
  const ReducedState s = initial_state(make_geometry(6, 3));
  CHECK(s.target() == doctest::Approx(1.0 / 8.0).epsilon(1e-14));
  CHECK(s.ntt() == doctest::Approx(std::sqrt(7.0) / 8.0).epsilon(1e-14));
  CHECK(s.u() == doctest::Approx(std::sqrt(7.0 / 8.0)).epsilon(1e-14));
  for (int n = 2; n <= 30; n += 4) {
    for (int m = 1; m < n; m += 2) {
      const DatabaseGeometry g = make_geometry(n, m);
      const ReducedState x = initial_state(g);
      CHECK(std::abs(x.norm() - 1.0) <= 1e-12);
      CHECK(x.target() == doctest::Approx(1.0 / std::sqrt(static_cast<double>(g.N))).epsilon(1e-13));
    }
  }
}

TEST_CASE("state and operator validation") {
  CHECK_THROWS_AS(ReducedState::from_components({1.0, 1.0, 0.0}), std::invalid_argument);
  CHECK_NOTHROW(ReducedState::from_components({0.6, 0.8, 0.0}));
  Eigen::Matrix3d shear = Eigen::Matrix3d::Identity();
  shear(0, 1) = 0.1;
  CHECK_THROWS_AS(ReducedOperator::from_matrix(shear), std::invalid_argument);
}

TEST_CASE("words and runs") {
  const OperatorWord w = OperatorWord::parse("GGLLG");
  CHECK(w.size() == 5);
  const std::vector<Run> runs = w.runs();
  REQUIRE(runs.size() == 3);
  CHECK(runs[0] == Run{Letter::Global, 2});
  CHECK(runs[1] == Run{Letter::Local, 2});
  CHECK(runs[2] == Run{Letter::Global, 1});
  CHECK(OperatorWord::from_runs(runs) == w);
  CHECK(w.to_string() == "GGLLG");
  CHECK(OperatorWord::parse("").empty());
  CHECK_THROWS_AS(OperatorWord::parse("GXL"), std::invalid_argument);
}

TEST_CASE("apply_word examples") {
  const DatabaseGeometry g = make_geometry(2, 1);
  const ReducedState s0 = ReducedState::from_components({0.5, 0.5, 1.0 / std::sqrt(2.0)});
  CHECK(apply_word(g, OperatorWord{}, s0).components() == s0.components());
  const ReducedState s1 = apply_word(g, OperatorWord::parse("L"), s0);
  CHECK(s1.target() == doctest::Approx(0.5));
  CHECK(s1.ntt() == doctest::Approx(-0.5));
  CHECK(s1.u() == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("long words keep their norm and match letter-by-letter application") {
  std::mt19937_64 rng(11);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> run_len(1, 60);
  for (auto [n, m] : {std::pair{6, 3}, std::pair{12, 5}, std::pair{20, 10}}) {
    const DatabaseGeometry g = make_geometry(n, m);
    std::vector<Letter> letters;
    while (letters.size() < 10000) {
      const Letter l = coin(rng) ? Letter::Local : Letter::Global;
      letters.insert(letters.end(), static_cast<std::size_t>(run_len(rng)), l);
    }
    letters.resize(10000);
    const OperatorWord word(letters);
    const ReducedState fast = apply_word(g, word, initial_state(g));
    const ReducedState slow = apply_word_stepwise(g, word, initial_state(g));
    CHECK(std::abs(fast.norm() - 1.0) <= 1e-10);
    CHECK((fast.components() - slow.components()).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("matrix power") {
  const ReducedOperator G = global_grover(make_geometry(9, 4));
  Eigen::Matrix3d naive = Eigen::Matrix3d::Identity();
  for (int i = 0; i < 37; ++i) naive = G.matrix() * naive;
  CHECK((G.pow(37).matrix() - naive).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(G.pow(0).matrix() == Eigen::Matrix3d::Identity());
}

TEST_CASE("residual amplitude") {
  const TerminalResidual r = residual_amplitude(initial_state(make_geometry(6, 3)));
  CHECK(r.amplitude == doctest::Approx(std::sqrt(7.0 / 8.0)).epsilon(1e-14));
  CHECK(r.target_block_probability == doctest::Approx(1.0 / 8.0).epsilon(1e-13));
  const TerminalResidual z = residual_amplitude(ReducedState::from_components({0.6, 0.8, 0.0}));
  CHECK(z.amplitude == 0.0);
  CHECK(z.target_block_probability == 1.0);
}

}  // TEST_SUITE
