#pragma once

#include <cstdint>
#include <random>

namespace ncbm {

/// SplitMix64 finalizer; used to derive independent substream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Deterministic random stream identified by a key path
/// (master seed, replicate, driver, ...). Child streams depend only on the
/// parent key and the child index, never on how much the parent was consumed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed);
  RngStream(std::uint64_t master_seed, std::uint64_t replicate);
  RngStream(std::uint64_t master_seed, std::uint64_t replicate, std::uint64_t driver);

  RngStream substream(std::uint64_t index) const { return RngStream(Key{mix64(key_ ^ mix64(index + 0x5bd1e995ULL))}); }

  double normal() { return normal_(engine_); }
  double normal(double stddev) { return stddev * normal_(engine_); }
  /// Uniform on the open interval (0, 1).
  double uniform();

  std::uint64_t key() const noexcept { return key_; }
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  struct Key {
    std::uint64_t value;
  };
  explicit RngStream(Key k);

  std::uint64_t key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// Seed used when none is given: NCBM_SEED from the environment when set,
/// otherwise drawn from std::random_device.
std::uint64_t default_seed();

}  // namespace ncbm
