#pragma once

// Brute-force 2^n statevector simulation of the oracle, the global diffusion
// and the block-local diffusion. It never touches the 3x3 reduction and serves
// as the independent check of it.

#include <cstdint>
#include <vector>

#include "grk/reduced_model.hpp"

namespace grk {

struct FullSpaceConfig {
  int max_bits = 20;
};

/// Item index x = block * b + offset; the target block is target >> m.
struct FullState {
  std::vector<double> amplitudes;
  int n = 0;
  std::uint64_t target = 0;
};

/// The three orthonormal 2^n-vectors spanning the invariant subspace.
struct ReducedEmbedding {
  std::vector<double> t;
  std::vector<double> ntt;
  std::vector<double> u;
};

ReducedEmbedding make_embedding(int n, int m, std::uint64_t target);

/// Uniform superposition followed by, per letter, the oracle and then the
/// global (Global) or block-local (Local) diffusion. Throws
/// std::invalid_argument when n exceeds config.max_bits or the target is out
/// of range.
FullState simulate_full(int n, int m, std::uint64_t target, const OperatorWord& word,
                        const FullSpaceConfig& config = {});

struct OracleComparison {
  /// max |<e_i|full> - reduced_i| over the three basis vectors
  double deviation = 0.0;
  /// norm of the component of the full state outside the embedding span
  double leakage = 0.0;
  Eigen::Vector3d projected = Eigen::Vector3d::Zero();
  Eigen::Vector3d reduced = Eigen::Vector3d::Zero();
};

OracleComparison compare_with_reduced(int n, int m, std::uint64_t target,
                                      const OperatorWord& word,
                                      const FullSpaceConfig& config = {});

}  // namespace grk
