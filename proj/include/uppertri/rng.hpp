#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace uppertri {

/// Seeded generator for test instances. The engine is std::mt19937_64, whose
/// output sequence is fixed by the standard; doubles are formed from the top
/// 53 bits, so identical seeds give bit-identical instances on every platform
/// (std::uniform_real_distribution does not guarantee that).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Real and imaginary parts independent, uniform on [-scale, scale).
  std::complex<double> complex_box(double scale = 1.0) {
    const double re = uniform(-scale, scale);
    const double im = uniform(-scale, scale);
    return {re, im};
  }
  /// Uniform integer on [lo, hi].
  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace uppertri
