#include "morlgen/random.hpp"

#include <array>
#include <stdexcept>

namespace morlgen {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t base_seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t base_seed, std::uint64_t stream_id)
    : base_seed_(base_seed), stream_id_(stream_id), engine_(seeded_engine(base_seed, stream_id)) {}

RandomStream RandomStream::child(std::uint64_t tag) const {
  return RandomStream(base_seed_, stream_tag(stream_id_, tag));
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
  // Reject the low residue class so every value is equally likely.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x >= threshold) return x % n;
  }
}

}  // namespace morlgen
