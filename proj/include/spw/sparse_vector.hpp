#pragma once

#include <vector>

#include "spw/matrix.hpp"

namespace spw {

/// Ordered (index, value) sequence: a row of A or a column of B.
/// Indices are strictly increasing.
struct SparseVector {
  std::vector<Index> indices;
  std::vector<double> values;

  Index size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  void push_back(Index i, double v) {
    indices.push_back(i);
    values.push_back(v);
  }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

inline SparseVector row_vector(const CsrMatrix& m, Index i) {
  auto idx = m.row_indices(i);
  auto val = m.row_values(i);
  return {{idx.begin(), idx.end()}, {val.begin(), val.end()}};
}

inline SparseVector column_vector(const CcsMatrix& m, Index j) {
  auto idx = m.col_rows(j);
  auto val = m.col_values(j);
  return {{idx.begin(), idx.end()}, {val.begin(), val.end()}};
}

}  // namespace spw
