#pragma once

// Counter-based random numbers. Every (seed, stream_index) pair names an
// independent stream, so Monte Carlo work can be split by state index
// without any shared generator.

#include <array>
#include <complex>
#include <cstdint>
#include <limits>

namespace nlact {

struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

// UniformRandomBitGenerator over Philox4x32-10: key = seed, counter =
// (block, stream_index). Each block yields two 64-bit outputs.
class PhiloxEngine {
 public:
  using result_type = std::uint64_t;

  explicit PhiloxEngine(RngSeed seed) : seed_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform_open();

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();

  // Complex Gaussian with independent N(0,1) real and imaginary parts.
  std::complex<double> complex_normal();

  RngSeed seed() const noexcept { return seed_; }

 private:
  void refill();

  RngSeed seed_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace nlact
