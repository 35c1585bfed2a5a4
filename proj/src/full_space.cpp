#include "grk/full_space.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace grk {
namespace {

void check_inputs(int n, int m, std::uint64_t target, const FullSpaceConfig& config) {
  if (n > config.max_bits) {
    throw std::invalid_argument("full-space simulation limited to n <= " +
                                std::to_string(config.max_bits) + " (got " + std::to_string(n) +
                                ")");
  }
  make_geometry(n, m);  // validates 1 <= m < n
  if (target >= (std::uint64_t{1} << n)) {
    throw std::invalid_argument("target index out of range");
  }
}

// 2<s|psi> s - psi over the contiguous range [first, last).
void reflect_about_uniform(std::vector<double>& amps, std::size_t first, std::size_t last) {
  const double count = static_cast<double>(last - first);
  const double mean =
      std::accumulate(amps.begin() + static_cast<std::ptrdiff_t>(first),
                      amps.begin() + static_cast<std::ptrdiff_t>(last), 0.0) /
      count;
  for (std::size_t i = first; i < last; ++i) amps[i] = 2.0 * mean - amps[i];
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

ReducedEmbedding make_embedding(int n, int m, std::uint64_t target) {
  check_inputs(n, m, target, FullSpaceConfig{n});
  const std::size_t N = std::size_t{1} << n;
  const std::size_t b = std::size_t{1} << m;
  const std::size_t block_begin = (target >> m) * b;
  const double ntt_amp = 1.0 / std::sqrt(static_cast<double>(b - 1));
  const double u_amp = 1.0 / std::sqrt(static_cast<double>(N - b));

  ReducedEmbedding e{std::vector<double>(N, 0.0), std::vector<double>(N, 0.0),
                     std::vector<double>(N, 0.0)};
  for (std::size_t x = 0; x < N; ++x) {
    const bool in_block = x >= block_begin && x < block_begin + b;
    if (x == target) {
      e.t[x] = 1.0;
    } else if (in_block) {
      e.ntt[x] = ntt_amp;
    } else {
      e.u[x] = u_amp;
    }
  }
  return e;
}

FullState simulate_full(int n, int m, std::uint64_t target, const OperatorWord& word,
                        const FullSpaceConfig& config) {
  check_inputs(n, m, target, config);
  const std::size_t N = std::size_t{1} << n;
  const std::size_t b = std::size_t{1} << m;

  FullState state{std::vector<double>(N, 1.0 / std::sqrt(static_cast<double>(N))), n, target};
  auto& amps = state.amplitudes;
  for (Letter letter : word.letters()) {
    amps[target] = -amps[target];
    if (letter == Letter::Global) {
      reflect_about_uniform(amps, 0, N);
    } else {
      for (std::size_t first = 0; first < N; first += b) reflect_about_uniform(amps, first, first + b);
    }
  }
  return state;
}

OracleComparison compare_with_reduced(int n, int m, std::uint64_t target,
                                      const OperatorWord& word, const FullSpaceConfig& config) {
  const FullState full = simulate_full(n, m, target, word, config);
  const ReducedEmbedding basis = make_embedding(n, m, target);
  const DatabaseGeometry geom = make_geometry(n, m);

  OracleComparison cmp;
  cmp.projected = {dot(basis.t, full.amplitudes), dot(basis.ntt, full.amplitudes),
                   dot(basis.u, full.amplitudes)};
  cmp.reduced = apply_word(geom, word, initial_state(geom)).components();
  cmp.deviation = (cmp.projected - cmp.reduced).cwiseAbs().maxCoeff();

  double outside = 0.0;
  for (std::size_t x = 0; x < full.amplitudes.size(); ++x) {
    const double r = full.amplitudes[x] - cmp.projected[0] * basis.t[x] -
                     cmp.projected[1] * basis.ntt[x] - cmp.projected[2] * basis.u[x];
    outside += r * r;
  }
  cmp.leakage = std::sqrt(outside);
  return cmp;
}

}  // namespace grk
