#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace morlgen {

/// Reproducible random source identified by (base_seed, stream_id).
///
/// The engine is std::mt19937_64 seeded through std::seed_seq, both of which
/// are specified bit-exactly by the standard. Sampling helpers below do not
/// use the <random> distributions, whose output is implementation-defined.
class RandomStream {
 public:
  static constexpr std::string_view kGeneratorName = "mt19937_64/seed_seq";
  static constexpr int kGeneratorVersion = 1;

  RandomStream(std::uint64_t base_seed, std::uint64_t stream_id);

  std::uint64_t base_seed() const noexcept { return base_seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Independent stream sharing the base seed; the id is a hash of (stream_id, tag).
  RandomStream child(std::uint64_t tag) const;

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  std::uint64_t base_seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive stream ids from structured tags.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive combination of tags into one stream id.
constexpr std::uint64_t stream_tag(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(mix64(a) ^ (b + 0x632be59bd9b4e019ULL));
}

/// FNV-1a over a string, for turning names into stream tags.
constexpr std::uint64_t name_tag(std::string_view name) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace morlgen
