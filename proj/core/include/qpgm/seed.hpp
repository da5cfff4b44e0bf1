#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace qpgm {

/// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Stream identifiers keep holdout and fold seeds independent.
enum class SeedStream : std::uint64_t { Holdout = 1, Folds = 2 };

/// Seed for (stream, index) under a master seed. Depends on nothing else, so
/// plans are identical regardless of thread count.
std::uint64_t derive_seed(std::uint64_t master, SeedStream stream, std::uint64_t index) noexcept;

/// mt19937_64 with portable bounded draws; std distributions are
/// implementation-defined, which would make plans differ across stdlibs.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, bound), bound >= 1. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound);

  /// Fisher-Yates.
  void shuffle(std::span<std::size_t> values);

private:
  std::mt19937_64 engine_;
};

}  // namespace qpgm
