#include "spw/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>

namespace spw {

namespace {

double nonzero_value(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> magnitude(1, 8);
  std::bernoulli_distribution negative(0.5);
  const int v = magnitude(rng);
  return negative(rng) ? -v : v;
}

// Mean of the integers in [lo, hi].
double range_mean(Index lo, Index hi) { return 0.5 * static_cast<double>(lo + hi); }

std::vector<Index> draw_row_counts(const SynthProfile& p, std::mt19937_64& rng) {
  // Two uniform pieces split at the mean, mixed so the expected count
  // equals the profile mean even for skewed (min, mean, max) envelopes.
  const Index lo_hi = static_cast<Index>(std::floor(p.nz_mean));
  const Index hi_lo = static_cast<Index>(std::ceil(p.nz_mean));
  const double lo_mean = range_mean(p.nz_min, lo_hi);
  const double hi_mean = range_mean(hi_lo, p.nz_max);
  const double p_low = hi_mean > lo_mean ? (hi_mean - p.nz_mean) / (hi_mean - lo_mean) : 1.0;

  std::bernoulli_distribution pick_low(std::clamp(p_low, 0.0, 1.0));
  std::uniform_int_distribution<Index> low(p.nz_min, lo_hi);
  std::uniform_int_distribution<Index> high(hi_lo, p.nz_max);

  std::vector<Index> counts(p.rows);
  for (auto& c : counts) c = pick_low(rng) ? low(rng) : high(rng);

  // Nudge rows by one until the total hits the target exactly.
  const auto lo_total = static_cast<long long>(p.nz_min * p.rows);
  const auto hi_total = static_cast<long long>(p.nz_max * p.rows);
  const long long target = std::clamp(
      std::llround(p.nz_mean * static_cast<double>(p.rows)), lo_total, hi_total);
  long long diff = target - static_cast<long long>(std::accumulate(counts.begin(), counts.end(), Index{0}));

  std::vector<Index> order(p.rows);
  std::iota(order.begin(), order.end(), Index{0});
  while (diff != 0) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Index r : order) {
      if (diff > 0 && counts[r] < p.nz_max) {
        ++counts[r];
        --diff;
      } else if (diff < 0 && counts[r] > p.nz_min) {
        --counts[r];
        ++diff;
      }
      if (diff == 0) break;
    }
  }
  return counts;
}

}  // namespace

SynthProfile SynthProfile::uniform(Index rows, Index cols, double density, std::uint64_t seed) {
  SynthProfile p;
  p.rows = rows;
  p.cols = cols;
  p.target_density = density;
  p.nz_mean = static_cast<double>(cols) * density;
  const double sigma = std::sqrt(p.nz_mean * (1.0 - density));
  p.nz_min = static_cast<Index>(std::floor(std::max(0.0, p.nz_mean - 2.0 * sigma)));
  p.nz_max = std::min(cols, static_cast<Index>(std::ceil(p.nz_mean + 2.0 * sigma)));
  p.seed = seed;
  return p;
}

SynthProfile SynthProfile::amazon(Index rows, std::uint64_t seed) {
  return {rows, 10000, 0.14, 501, 1400.0, 2011, seed};
}

SynthProfile SynthProfile::belcastro(Index rows, std::uint64_t seed) {
  return {rows, 22000, 0.06, 1, 1300.0, 6787, seed};
}

SynthProfile SynthProfile::docword(Index rows, std::uint64_t seed) {
  return {rows, 12000, 0.04, 2, 480.0, 906, seed};
}

void SynthProfile::validate() const {
  if (!(target_density > 0.0 && target_density <= 1.0)) {
    throw MatrixError("profile: density must lie in (0, 1]");
  }
  if (nz_mean > static_cast<double>(cols)) {
    throw MatrixError("profile: mean nonzeros per row exceeds column count");
  }
  if (nz_max > cols) throw MatrixError("profile: max nonzeros per row exceeds column count");
  if (static_cast<double>(nz_min) > nz_mean || nz_mean > static_cast<double>(nz_max)) {
    throw MatrixError("profile: requires min <= mean <= max");
  }
  const double expected = static_cast<double>(cols) * target_density;
  if (std::abs(nz_mean - expected) > 0.1 * expected + 1e-9) {
    throw MatrixError("profile: mean nonzeros per row is not within 10% of cols * density");
  }
}

std::string SynthProfile::describe() const {
  std::ostringstream os;
  os << "synthetic(" << rows << "x" << cols << ", D=" << target_density << ", nz/row=("
     << nz_min << "," << nz_mean << "," << nz_max << "), seed=" << seed << ")";
  return os.str();
}

CooMatrix generate_synthetic(const SynthProfile& p) {
  p.validate();
  std::mt19937_64 rng(p.seed);
  const auto counts = draw_row_counts(p, rng);

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<Index>(p.nz_mean * static_cast<double>(p.rows)) + p.rows);
  std::vector<Index> cols, universe(p.cols);
  std::iota(universe.begin(), universe.end(), Index{0});
  for (Index r = 0; r < p.rows; ++r) {
    cols.clear();
    std::sample(universe.begin(), universe.end(), std::back_inserter(cols), counts[r], rng);
    std::sort(cols.begin(), cols.end());
    for (Index c : cols) triplets.push_back({r, c, nonzero_value(rng)});
  }
  return CooMatrix(p.rows, p.cols, std::move(triplets));
}

CsrMatrix random_integer_matrix(Index rows, Index cols, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution present(std::clamp(density, 0.0, 1.0));
  std::vector<Index> ptr(rows + 1, 0), idx;
  std::vector<double> val;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (present(rng)) {
        idx.push_back(j);
        val.push_back(nonzero_value(rng));
      }
    }
    ptr[i + 1] = idx.size();
  }
  return CsrMatrix(rows, cols, std::move(val), std::move(idx), std::move(ptr));
}

}  // namespace spw
