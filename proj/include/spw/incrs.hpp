#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spw/matrix.hpp"
#include "spw/sparse_vector.hpp"

// Indexed CRS: CRS plus one packed 64-bit counter-vector per (row, section).
//
// Each row is split into sections of `section_size` columns, and each
// section into blocks of `block_size` columns. The counter-vector of a
// section stores the number of row nonzeros before the section (low-order
// prefix field) followed by one count per block of that section, so the
// offset of any block within the row costs a single word read.
//
// Word layout (default config): bits [0,16) prefix, bits [16+6k, 22+6k)
// count of block k. A short trailing section leaves its unused block
// fields zero.

namespace spw {

struct InCrsConfig {
  Index section_size = 256;
  Index block_size = 32;
  unsigned section_prefix_bits = 16;
  unsigned block_count_bits = 6;

  Index blocks_per_section() const { return section_size / block_size; }
  /// Throws MatrixError when the counter-vector would not fit one word or a
  /// block count could overflow its field.
  void validate() const;

  friend bool operator==(const InCrsConfig&, const InCrsConfig&) = default;
};

/// Packed counter-vector. Field positions come from the owning config.
class CounterVector {
 public:
  constexpr CounterVector() = default;
  constexpr explicit CounterVector(std::uint64_t word) : word_(word) {}

  static CounterVector pack(const InCrsConfig& cfg, Index prefix_nnz,
                            const std::vector<Index>& block_counts);

  std::uint64_t word() const { return word_; }
  Index prefix_nnz(const InCrsConfig& cfg) const;
  Index block_count(const InCrsConfig& cfg, Index block) const;
  /// prefix_nnz plus the counts of blocks [0, block).
  Index nnz_before_block(const InCrsConfig& cfg, Index block) const;

  friend bool operator==(CounterVector, CounterVector) = default;

 private:
  std::uint64_t word_ = 0;
};

/// Word reads charged to a measured operation. One (index, value) pair
/// counts as two element reads.
struct AccessCounter {
  std::uint64_t element_reads = 0;
  std::uint64_t pointer_reads = 0;
  std::uint64_t counter_reads = 0;

  std::uint64_t total() const { return element_reads + pointer_reads + counter_reads; }

  AccessCounter& operator+=(const AccessCounter& o) {
    element_reads += o.element_reads;
    pointer_reads += o.pointer_reads;
    counter_reads += o.counter_reads;
    return *this;
  }
  friend bool operator==(const AccessCounter&, const AccessCounter&) = default;
};

class InCrsMatrix {
 public:
  /// Throws MatrixError naming the first row whose nonzero count does not
  /// fit the prefix field.
  static InCrsMatrix build(CsrMatrix base, const InCrsConfig& cfg);

  const CsrMatrix& base() const { return base_; }
  const InCrsConfig& config() const { return config_; }
  const std::vector<CounterVector>& counters() const { return counters_; }

  Index rows() const { return base_.rows(); }
  Index cols() const { return base_.cols(); }
  Index sections_per_row() const { return sections_; }
  CounterVector counter(Index row, Index section) const {
    return counters_[row * sections_ + section];
  }

  /// Full-scan consistency check against the base CSR. Returns a
  /// description of the first mismatch, or nullopt.
  std::optional<std::string> find_inconsistency() const;

 private:
  friend InCrsMatrix read_incrs(std::istream& in);

  InCrsMatrix(CsrMatrix base, const InCrsConfig& cfg, std::vector<CounterVector> counters);

  CsrMatrix base_;
  InCrsConfig config_;
  Index sections_ = 0;
  std::vector<CounterVector> counters_;
};

/// Counter-vectors recomputed from a scan of `m`, row-major.
std::vector<CounterVector> compute_counters(const CsrMatrix& m, const InCrsConfig& cfg);

InCrsMatrix build_incrs(const CsrMatrix& m, const InCrsConfig& cfg = {});

/// Element lookup. Absent entries read as exact zero. Throws
/// std::out_of_range for indices outside the matrix.
double incrs_get(const InCrsMatrix& m, Index i, Index j, AccessCounter& ctr);
double csr_get(const CsrMatrix& m, Index i, Index j, AccessCounter& ctr);

/// All nonzeros of column j in ascending row order, gathered with one
/// element lookup per row.
SparseVector gather_column(const InCrsMatrix& m, Index j, AccessCounter& ctr);
SparseVector gather_column(const CsrMatrix& m, Index j, AccessCounter& ctr);

/// Counter-vector words added on top of CRS: rows * ceil(cols / S).
Index counter_words(const InCrsMatrix& m);
/// Words in the CRS arrays: values, column indices and row pointers.
Index crs_words(const CsrMatrix& m);

struct MaMeasurement {
  Index probes = 0;
  AccessCounter crs;
  AccessCounter incrs;
  /// crs.total() / incrs.total(); zero when nothing was probed.
  double ratio = 0.0;
};

/// Gathers `probes` uniformly drawn columns under both formats with the
/// identical column sequence and compares total word reads.
MaMeasurement measured_ma_ratio(const CsrMatrix& m, const InCrsConfig& cfg, Index probes,
                                std::uint64_t seed);
MaMeasurement measured_ma_ratio(const InCrsMatrix& m, Index probes, std::uint64_t seed);

// Binary container: header words (magic, version, M, N, nnz, S, b), then
// row_ptr, col_indices, values (IEEE-754 bits) and counters, every word
// 64-bit little-endian. Only the default 16/6-bit field layout is
// serializable.
inline constexpr std::uint64_t kIncrsMagic = 0x0031765352436e49ULL;  // "InCRSv1\0"
inline constexpr std::uint64_t kIncrsVersion = 1;

void write_incrs(std::ostream& out, const InCrsMatrix& m);
/// Throws MatrixError on a bad header, truncated payload or counters that
/// disagree with the stored CSR arrays.
InCrsMatrix read_incrs(std::istream& in);
void save_incrs(const std::filesystem::path& path, const InCrsMatrix& m);
InCrsMatrix load_incrs(const std::filesystem::path& path);

}  // namespace spw
