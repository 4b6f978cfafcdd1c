#pragma once

#include <cstdint>
#include <string>

#include "spw/matrix.hpp"

namespace spw {

/// Shape of a synthetic dataset: dimensions, density and the per-row
/// nonzero-count envelope (min, mean, max).
struct SynthProfile {
  Index rows = 0;
  Index cols = 0;
  double target_density = 0.0;
  Index nz_min = 0;
  double nz_mean = 0.0;
  Index nz_max = 0;
  std::uint64_t seed = 0;

  /// Row counts concentrated around cols * density (about +/- 2 sigma of a
  /// binomial), the profile used for density sweeps.
  static SynthProfile uniform(Index rows, Index cols, double density, std::uint64_t seed);

  // Row-count envelopes of the reference datasets, at a caller-chosen row count.
  static SynthProfile amazon(Index rows, std::uint64_t seed);     // 10k cols, 14%
  static SynthProfile belcastro(Index rows, std::uint64_t seed);  // 22k cols, 6%
  static SynthProfile docword(Index rows, std::uint64_t seed);    // 12k cols, 4%

  /// Throws MatrixError if the invariants do not hold.
  void validate() const;

  std::string describe() const;
};

/// Deterministic in the profile (seed included). Per-row counts fall in
/// [nz_min, nz_max] with the empirical mean at the profile mean; column
/// positions are uniform without replacement; values are nonzero integers
/// in [-8, 8].
CooMatrix generate_synthetic(const SynthProfile& p);

/// Random matrix for oracle tests: each position is nonzero with
/// probability `density`, values are integers in [-8, 8] excluding zero.
CsrMatrix random_integer_matrix(Index rows, Index cols, double density, std::uint64_t seed);

}  // namespace spw
