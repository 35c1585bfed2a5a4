#pragma once

// Exact partial-search dynamics restricted to the invariant subspace
// span{|t>, |ntt>, |u>}: the target item, the uniform superposition of the
// other items of the target block, and the uniform superposition of every
// item outside the target block.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace grk {

/// Database of N = 2^n items split into K = 2^(n-m) blocks of b = 2^m items.
struct DatabaseGeometry {
  int n = 0;
  int m = 0;
  std::uint64_t N = 0;
  std::uint64_t b = 0;
  std::uint64_t K = 0;
  double theta1 = 0.0;  // asin(1/sqrt(N))
  double theta2 = 0.0;  // asin(1/sqrt(b))
  double gamma = 0.0;   // asin(1/sqrt(K))
};

/// Throws std::invalid_argument unless 1 <= m < n <= 62.
DatabaseGeometry make_geometry(int n, int m);

/// Unit 3-vector of real amplitudes in the ordered basis (|t>, |ntt>, |u>).
class ReducedState {
 public:
  static constexpr double kNormTolerance = 1e-12;

  ReducedState() = default;

  /// Validating constructor; throws std::invalid_argument when the norm is
  /// off by more than kNormTolerance.
  static ReducedState from_components(const Eigen::Vector3d& components);
  /// Internal constructor for results of norm-preserving maps.
  static ReducedState unchecked(const Eigen::Vector3d& components);

  const Eigen::Vector3d& components() const { return c_; }
  double target() const { return c_[0]; }
  double ntt() const { return c_[1]; }
  double u() const { return c_[2]; }
  double norm() const { return c_.norm(); }

 private:
  explicit ReducedState(const Eigen::Vector3d& c) : c_(c) {}
  Eigen::Vector3d c_ = Eigen::Vector3d::UnitZ();
};

/// 3x3 orthogonal matrix acting on reduced states.
class ReducedOperator {
 public:
  static constexpr double kOrthogonalityTolerance = 1e-12;

  ReducedOperator() = default;

  /// Throws std::invalid_argument unless M^T M = I within tolerance.
  static ReducedOperator from_matrix(const Eigen::Matrix3d& matrix);
  static ReducedOperator unchecked(const Eigen::Matrix3d& matrix);
  static ReducedOperator identity() { return {}; }

  const Eigen::Matrix3d& matrix() const { return m_; }
  double determinant() const { return m_.determinant(); }
  /// max |(M^T M - I)_ij|
  double orthogonality_defect() const;

  ReducedState apply(const ReducedState& state) const;
  /// Exponentiation by squaring.
  ReducedOperator pow(std::uint64_t exponent) const;

  friend ReducedOperator operator*(const ReducedOperator& lhs, const ReducedOperator& rhs) {
    return ReducedOperator(lhs.m_ * rhs.m_);
  }

 private:
  explicit ReducedOperator(const Eigen::Matrix3d& m) : m_(m) {}
  Eigen::Matrix3d m_ = Eigen::Matrix3d::Identity();
};

enum class Letter : std::uint8_t { Global, Local };

char letter_symbol(Letter letter);

struct Run {
  Letter letter = Letter::Global;
  std::uint64_t count = 0;

  friend bool operator==(const Run&, const Run&) = default;
};

/// Finite sequence of Grover iterations, read left to right in application
/// order: "GGLG" applies two global iterations, one local, then one global.
class OperatorWord {
 public:
  OperatorWord() = default;
  explicit OperatorWord(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  /// Parses a string over {G, L}; throws std::invalid_argument otherwise.
  static OperatorWord parse(std::string_view text);
  /// Zero-count runs are skipped.
  static OperatorWord from_runs(const std::vector<Run>& runs);

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  std::vector<Run> runs() const;
  std::string to_string() const;

  friend bool operator==(const OperatorWord&, const OperatorWord&) = default;

 private:
  std::vector<Letter> letters_;
};

ReducedOperator global_grover(const DatabaseGeometry& geom);
ReducedOperator local_grover(const DatabaseGeometry& geom);
ReducedState initial_state(const DatabaseGeometry& geom);

/// Runs longer than this are applied through a matrix power.
inline constexpr std::uint64_t kRunPowerThreshold = 16;
/// Drift of the output norm beyond this triggers renormalization (logged).
inline constexpr double kRenormalizeThreshold = 1e-8;

/// Applies the letters of `word` to `state` in order.
ReducedState apply_word(const DatabaseGeometry& geom, const OperatorWord& word,
                        const ReducedState& state);
/// Run-length form of apply_word; lets callers apply very long runs without
/// materializing the letters.
ReducedState apply_runs(const DatabaseGeometry& geom, const std::vector<Run>& runs,
                        const ReducedState& state);
/// Same as apply_word but one matrix product per letter, with no power
/// shortcut and no renormalization.
ReducedState apply_word_stepwise(const DatabaseGeometry& geom, const OperatorWord& word,
                                 const ReducedState& state);

struct TerminalResidual {
  double amplitude = 0.0;                // c_u
  double residual_probability = 0.0;     // c_u^2
  double target_block_probability = 0.0; // 1 - c_u^2
};

TerminalResidual residual_amplitude(const ReducedState& state);

}  // namespace grk
