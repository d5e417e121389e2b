#include "ncbm/rng.hpp"

#include <cstdlib>
#include <string>

namespace ncbm {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(Key k) : key_(k.value), engine_(k.value), normal_(0.0, 1.0) {}

RngStream::RngStream(std::uint64_t master_seed) : RngStream(Key{mix64(master_seed)}) {}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t replicate)
    : RngStream(RngStream(master_seed).substream(replicate)) {}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t replicate, std::uint64_t driver)
    : RngStream(RngStream(master_seed, replicate).substream(driver)) {}

double RngStream::uniform() {
  // 53 random bits, shifted off zero
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("NCBM_SEED"); env != nullptr && *env != '\0') {
    return std::stoull(env);
  }
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace ncbm
