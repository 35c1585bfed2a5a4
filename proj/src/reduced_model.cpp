#include "grk/reduced_model.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/LU>
#include <spdlog/spdlog.h>

namespace grk {

DatabaseGeometry make_geometry(int n, int m) {
  if (m < 1 || m >= n) {
    throw std::invalid_argument("geometry requires 1 <= m < n (got n=" + std::to_string(n) +
                                ", m=" + std::to_string(m) + ")");
  }
  if (n > 62) {
    throw std::invalid_argument("geometry requires n <= 62 (got n=" + std::to_string(n) + ")");
  }
  DatabaseGeometry g;
  g.n = n;
  g.m = m;
  g.N = std::uint64_t{1} << n;
  g.b = std::uint64_t{1} << m;
  g.K = std::uint64_t{1} << (n - m);
  g.theta1 = std::asin(1.0 / std::sqrt(static_cast<double>(g.N)));
  g.theta2 = std::asin(1.0 / std::sqrt(static_cast<double>(g.b)));
  g.gamma = std::asin(1.0 / std::sqrt(static_cast<double>(g.K)));
  return g;
}

ReducedState ReducedState::from_components(const Eigen::Vector3d& components) {
  const double norm = components.norm();
  if (!(std::abs(norm - 1.0) <= kNormTolerance)) {
    throw std::invalid_argument("reduced state must have unit norm (got " + std::to_string(norm) +
                                ")");
  }
  return ReducedState(components);
}

ReducedState ReducedState::unchecked(const Eigen::Vector3d& components) {
  return ReducedState(components);
}

ReducedOperator ReducedOperator::from_matrix(const Eigen::Matrix3d& matrix) {
  ReducedOperator op(matrix);
  if (!(op.orthogonality_defect() <= kOrthogonalityTolerance)) {
    throw std::invalid_argument("reduced operator must be orthogonal");
  }
  return op;
}

ReducedOperator ReducedOperator::unchecked(const Eigen::Matrix3d& matrix) {
  return ReducedOperator(matrix);
}

double ReducedOperator::orthogonality_defect() const {
  return (m_.transpose() * m_ - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

ReducedState ReducedOperator::apply(const ReducedState& state) const {
  return ReducedState::unchecked(m_ * state.components());
}

ReducedOperator ReducedOperator::pow(std::uint64_t exponent) const {
  Eigen::Matrix3d result = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d base = m_;
  while (exponent > 0) {
    if (exponent & 1U) result = base * result;
    exponent >>= 1U;
    if (exponent > 0) base = base * base;
  }
  return ReducedOperator(result);
}

char letter_symbol(Letter letter) { return letter == Letter::Global ? 'G' : 'L'; }

OperatorWord OperatorWord::parse(std::string_view text) {
  std::vector<Letter> letters;
  letters.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case 'G':
      case 'g':
        letters.push_back(Letter::Global);
        break;
      case 'L':
      case 'l':
        letters.push_back(Letter::Local);
        break;
      default:
        throw std::invalid_argument(std::string("operator word letters must be G or L, got '") +
                                    ch + "'");
    }
  }
  return OperatorWord(std::move(letters));
}

OperatorWord OperatorWord::from_runs(const std::vector<Run>& runs) {
  std::vector<Letter> letters;
  for (const Run& run : runs) letters.insert(letters.end(), run.count, run.letter);
  return OperatorWord(std::move(letters));
}

std::vector<Run> OperatorWord::runs() const {
  std::vector<Run> out;
  for (Letter letter : letters_) {
    if (!out.empty() && out.back().letter == letter) {
      ++out.back().count;
    } else {
      out.push_back({letter, 1});
    }
  }
  return out;
}

std::string OperatorWord::to_string() const {
  std::string s;
  s.reserve(letters_.size());
  for (Letter letter : letters_) s.push_back(letter_symbol(letter));
  return s;
}

ReducedOperator global_grover(const DatabaseGeometry& geom) {
  const double sg = std::sin(geom.gamma);
  const double cg = std::cos(geom.gamma);
  const double st = std::sin(geom.theta2);
  const double ct = std::cos(geom.theta2);
  Eigen::Matrix3d g;
  g << 1.0 - 2.0 * sg * sg * st * st, 2.0 * sg * sg * st * ct, 2.0 * sg * cg * st,
      -2.0 * sg * sg * st * ct, 2.0 * sg * sg * ct * ct - 1.0, 2.0 * sg * cg * ct,
      -2.0 * sg * cg * st, 2.0 * sg * cg * ct, 2.0 * cg * cg - 1.0;
  return ReducedOperator::unchecked(g);
}

ReducedOperator local_grover(const DatabaseGeometry& geom) {
  const double c2 = std::cos(2.0 * geom.theta2);
  const double s2 = std::sin(2.0 * geom.theta2);
  Eigen::Matrix3d l;
  l << c2, s2, 0.0,
      -s2, c2, 0.0,
      0.0, 0.0, 1.0;
  return ReducedOperator::unchecked(l);
}

ReducedState initial_state(const DatabaseGeometry& geom) {
  const double sg = std::sin(geom.gamma);
  return ReducedState::unchecked(
      {sg * std::sin(geom.theta2), sg * std::cos(geom.theta2), std::cos(geom.gamma)});
}

ReducedState apply_word(const DatabaseGeometry& geom, const OperatorWord& word,
                        const ReducedState& state) {
  return apply_runs(geom, word.runs(), state);
}

ReducedState apply_runs(const DatabaseGeometry& geom, const std::vector<Run>& runs,
                        const ReducedState& state) {
  const ReducedOperator global = global_grover(geom);
  const ReducedOperator local = local_grover(geom);
  Eigen::Vector3d v = state.components();
  std::uint64_t letters = 0;
  for (const Run& run : runs) {
    letters += run.count;
    const Eigen::Matrix3d& step = run.letter == Letter::Global ? global.matrix() : local.matrix();
    if (run.count > kRunPowerThreshold) {
      const ReducedOperator& op = run.letter == Letter::Global ? global : local;
      v = op.pow(run.count).matrix() * v;
    } else {
      for (std::uint64_t i = 0; i < run.count; ++i) v = step * v;
    }
  }
  const double drift = std::abs(v.norm() - state.norm());
  if (drift > kRenormalizeThreshold) {
    spdlog::warn("apply_word: norm drift {:.3e} over {} letters, renormalizing", drift,
                 letters);
    v *= state.norm() / v.norm();
  }
  return ReducedState::unchecked(v);
}

ReducedState apply_word_stepwise(const DatabaseGeometry& geom, const OperatorWord& word,
                                 const ReducedState& state) {
  const Eigen::Matrix3d global = global_grover(geom).matrix();
  const Eigen::Matrix3d local = local_grover(geom).matrix();
  Eigen::Vector3d v = state.components();
  for (Letter letter : word.letters()) v = (letter == Letter::Global ? global : local) * v;
  return ReducedState::unchecked(v);
}

TerminalResidual residual_amplitude(const ReducedState& state) {
  const double cu = state.u();
  return {cu, cu * cu, 1.0 - cu * cu};
}

}  // namespace grk
