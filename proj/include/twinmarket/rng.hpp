#pragma once

#include <cstdint>
#include <string_view>

namespace twinmarket {

// splitmix64 stream. One instance per logical stream (per device, per scene,
// per feedback channel) so draws in one subsystem never shift another's.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Uniform integer in [0,n), n > 0. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform integer in [lo, hi], inclusive bounds.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::uint64_t state_;
};

/// Derives an independent stream seed from a master seed, a role tag and up
/// to two numeric qualifiers (device id, episode index, ...). Adding streams
/// never perturbs existing ones.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a over the tag
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  Rng mixer(master ^ h);
  std::uint64_t s = mixer.next_u64() ^ (a * 0x9e3779b97f4a7c15ull);
  Rng mixer2(s ^ (b * 0xd1342543de82ef95ull + 0x632be59bd9b4e019ull));
  return mixer2.next_u64();
}

inline Rng derive_stream(std::uint64_t master, std::string_view tag,
                         std::uint64_t a = 0, std::uint64_t b = 0) {
  return Rng(derive_seed(master, tag, a, b));
}

}  // namespace twinmarket
