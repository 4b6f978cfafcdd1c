#pragma once

#include <span>

#include "spw/incrs.hpp"
#include "spw/matrix.hpp"
#include "spw/sparse_vector.hpp"

// Software SpMM built on the per-node sparse dot product of a systolic
// SpMM mesh: A is read in row order, B in column order.

namespace spw {

struct SparseView {
  std::span<const Index> indices;
  std::span<const double> values;

  SparseView() = default;
  SparseView(std::span<const Index> i, std::span<const double> v) : indices(i), values(v) {}
  SparseView(const SparseVector& v) : indices(v.indices), values(v.values) {}  // NOLINT
  Index size() const { return indices.size(); }
};

inline SparseView row_view(const CsrMatrix& m, Index i) {
  return {m.row_indices(i), m.row_values(i)};
}

inline SparseView column_view(const CcsMatrix& m, Index j) {
  return {m.col_rows(j), m.col_values(j)};
}

struct DotResult {
  double value = 0.0;     // accumulated c
  Index cycles = 0;       // comparator iterations
  Index a_consumed = 0;
  Index b_consumed = 0;
  Index macs = 0;         // matched index pairs
};

/// Index-matching merge: each cycle compares the current heads; equal
/// indices MAC and consume both, otherwise only the smaller head is
/// consumed. Stops once either stream is exhausted.
DotResult sparse_dot_alg1(SparseView a, SparseView b);

/// A x B with B accessed column by column. Each column of B is gathered
/// once (charging `ctr`) and reused across every row of A. Cancelled
/// entries are not stored. Throws MatrixError on a shape mismatch.
CsrMatrix spmm(const CsrMatrix& a, const CsrMatrix& b, AccessCounter& ctr);
CsrMatrix spmm(const CsrMatrix& a, const InCrsMatrix& b, AccessCounter& ctr);

/// A x A^T; column j of A^T is row j of A.
CsrMatrix spmm_a_at(const CsrMatrix& a);

}  // namespace spw
