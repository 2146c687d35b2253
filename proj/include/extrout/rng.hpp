#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>

namespace extrout {

// Mixes a root seed with a stream name and an index. Used to split one root
// seed into independent named streams (placement, links, protocol, attacker,
// ...), so that the draws of one phase never shift the draws of another.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                          std::uint64_t index = 0);

// Seeded 64-bit generator with platform-independent sampling helpers. The
// standard distributions are implementation-defined, which would make the
// golden files depend on the standard library in use.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t root, std::string_view name,
                    std::uint64_t index = 0) {
    return Rng(derive_seed(root, name, index));
  }

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform01();
  // Uniform in [lo, hi].
  double uniform(double lo, double hi);
  // Uniform in [0, n). n must be positive.
  std::size_t below(std::size_t n);
  // Uniform in [lo, hi], inclusive.
  int uniform_int(int lo, int hi);

  template <class T>
  const T& pick(std::span<const T> items) {
    if (items.empty()) throw std::invalid_argument("Rng::pick on empty range");
    return items[below(items.size())];
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace extrout
