#include "gm_bridge/rng.hpp"

#include <cstdlib>
#include <string>
#include <thread>

#include "gm_bridge/errors.hpp"
#include "gm_bridge/parallel.hpp"

namespace gm_bridge {

namespace {

std::uint32_t lo32(std::uint64_t x) { return static_cast<std::uint32_t>(x); }
std::uint32_t hi32(std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); }

// splitmix64 finaliser, used only to derive child master seeds.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RngPolicy::Engine RngPolicy::stream_for(std::uint64_t path_index) const {
  std::seed_seq seq{lo32(master_), hi32(master_), lo32(path_index), hi32(path_index),
                    0x67624272u};
  return Engine(seq);
}

RngPolicy RngPolicy::substream(std::uint64_t tag) const noexcept {
  return RngPolicy(mix64(master_ ^ mix64(tag)));
}

std::size_t resolve_workers(std::size_t requested) {
  if (const char* env = std::getenv("GM_BRIDGE_THREADS"); env && *env) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::config, "GM_BRIDGE_THREADS must be a positive integer");
  }
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace gm_bridge
