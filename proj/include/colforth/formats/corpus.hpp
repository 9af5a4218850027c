#pragma once

#include <cstdint>
#include <random>

#include "colforth/formats/oracle.hpp"
#include "colforth/typedesc.hpp"

namespace colforth::formats {

/// Deterministic random source: all distributions are implemented here so
/// corpora are byte-reproducible across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  std::int64_t below(std::int64_t n) {
    return static_cast<std::int64_t>(bits() % static_cast<std::uint64_t>(n));
  }

  /// Inverse-transform sampling; fine for the desk-scale means used here.
  int poisson(double mean) {
    double u = uniform();
    double p = std::exp(-mean);
    double cumulative = p;
    int k = 0;
    while (u > cumulative && k < 4096) {
      ++k;
      p *= mean / k;
      cumulative += p;
    }
    return k;
  }

  /// Poisson conditioned on >= 1 (repetition-level corpora cannot hold
  /// empty lists).
  int poisson_nonzero(double mean) {
    for (;;) {
      int k = poisson(mean);
      if (k > 0) return k;
    }
  }

 private:
  std::mt19937_64 engine_;
};

struct CorpusOptions {
  double mean_length = 8.0;
  bool nonempty_lists = false;
};

/// One random value conforming to `type` (records are positional arrays).
Json random_value(Rng& rng, const TypeDescriptor& type, const CorpusOptions& options = {});

/// A random structural schema: lists/records/strings over the Avro
/// primitive set, at most `max_depth` list levels.
TypeDescriptor random_schema(Rng& rng, int max_depth);

}  // namespace colforth::formats
