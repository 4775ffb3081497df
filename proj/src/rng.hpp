#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace mamimo {

// Named sub-streams fanned out from one master seed. Keeping the draws for
// channel paths, CEEs, network init, exploration noise and replay sampling on
// separate streams lets an experiment vary one of them while holding the
// others fixed.
enum class RngStream : std::uint64_t {
  kChannelPaths = 1,
  kCee = 2,
  kNetworkInit = 3,
  kExploration = 4,
  kReplay = 5,
  kLayout = 6,
  kEvaluation = 7,
};

// Deterministic seeded generator. The engine is mt19937_64, whose integer
// output sequence is fixed by the standard, so the same seed reproduces the
// same stream on every platform. Distribution transforms (uniform doubles,
// Box-Muller gaussians) are implemented here instead of <random> because the
// standard does not pin those down.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0,1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  // Standard normal via Box-Muller (two engine draws per call, no cached
  // spare, so the consumed stream length is predictable).
  double gaussian();

  // Circularly-symmetric complex gaussian CN(0,1): real and imaginary parts
  // are N(0, 1/2).
  std::complex<double> cgaussian();

  // Independent sub-generator derived from the *original* seed and a stream
  // id; unaffected by how much this generator has already been consumed.
  Rng derive(RngStream stream) const;
  Rng derive(std::uint64_t stream_id) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace mamimo
