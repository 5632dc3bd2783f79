#ifndef NNPOST_RANDOM_HPP
#define NNPOST_RANDOM_HPP

#include <cstdint>
#include <optional>
#include <random>

namespace nnpost {

// Seeded generator with a platform-independent output stream.
//
// The bit source is std::mt19937_64, whose output sequence is fixed by the
// C++ standard. Uniforms take the top 53 bits of each word; Gaussians use the
// Marsaglia polar method on those uniforms (the standard library's
// distributions are implementation-defined and therefore not used).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1).
  double uniform() {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  double normal();

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace nnpost

#endif  // NNPOST_RANDOM_HPP
