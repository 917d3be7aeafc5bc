#pragma once

#include <cstdint>
#include <random>

namespace gm_bridge {

// Per-path random streams. The stream for (master seed, path index) is a
// fixed function of both, so any path can be regenerated in isolation and
// batch results do not depend on how paths are spread over workers.
class RngPolicy {
 public:
  using Engine = std::mt19937_64;

  explicit RngPolicy(std::uint64_t master_seed = 0) noexcept : master_(master_seed) {}

  std::uint64_t master_seed() const noexcept { return master_; }
  Engine stream_for(std::uint64_t path_index) const;
  // Independent family of streams, e.g. one per experiment within a run.
  RngPolicy substream(std::uint64_t tag) const noexcept;

 private:
  std::uint64_t master_;
};

// Stream tags used by the library's batch drivers.
namespace stream_tag {
inline constexpr std::uint64_t conditioned = 0x636f6e64;
inline constexpr std::uint64_t unconditioned = 0x756e636f;
inline constexpr std::uint64_t constructive = 0x636f6e73;
inline constexpr std::uint64_t kyle = 0x6b796c65;
}  // namespace stream_tag

}  // namespace gm_bridge
