#pragma once

#include <cstdint>
#include <random>

namespace svcgp {

// Named sub-streams carved out of one master seed.  Every stochastic
// component draws from its own stream so that, e.g., enabling the nugget
// does not perturb the field draws of an otherwise identical run.
enum class Stream : std::uint64_t {
  noise = 0,        // measurement error / nugget draws
  covariate = 1,    // coarse covariate field draws
  intercept = 2,    // intercept process draws
  slope = 3,        // slope process draws (base id; add the slope index)
  residual = 4,     // fine-scale residual process draws
  chain = 5,        // MCMC proposal / init stream
  replication = 6,  // per-replication master seeds in studies
  misc = 7,
};

// splitmix64 finalizer: decorrelates (master, stream) pairs so that
// neighbouring master seeds or stream ids yield unrelated sequences.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                 std::uint64_t offset = 0) {
  return derive_seed(master, static_cast<std::uint64_t>(stream) + 8 * offset);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t master, Stream stream,
                    std::uint64_t offset = 0) {
  return Rng(derive_seed(master, stream, offset));
}

}  // namespace svcgp
