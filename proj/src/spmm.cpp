#include "spw/spmm.hpp"

#include <string>

namespace spw {

namespace {

class RowAssembler {
 public:
  RowAssembler(Index rows, Index cols) : rows_(rows), cols_(cols), per_row_(rows) {}

  // Columns must arrive in ascending order.
  void add(Index i, Index j, double v) {
    if (v != 0.0) per_row_[i].push_back(j, v);
  }

  CsrMatrix finish() && {
    std::vector<Index> ptr(rows_ + 1, 0), idx;
    std::vector<double> val;
    for (Index i = 0; i < rows_; ++i) {
      idx.insert(idx.end(), per_row_[i].indices.begin(), per_row_[i].indices.end());
      val.insert(val.end(), per_row_[i].values.begin(), per_row_[i].values.end());
      ptr[i + 1] = idx.size();
    }
    return CsrMatrix(rows_, cols_, std::move(val), std::move(idx), std::move(ptr));
  }

 private:
  Index rows_;
  Index cols_;
  std::vector<SparseVector> per_row_;
};

template <typename ColumnSource>
CsrMatrix multiply_by_columns(const CsrMatrix& a, Index out_cols, ColumnSource&& column) {
  RowAssembler out(a.rows(), out_cols);
  for (Index j = 0; j < out_cols; ++j) {
    const auto col = column(j);
    const SparseView b(col);
    for (Index i = 0; i < a.rows(); ++i) {
      out.add(i, j, sparse_dot_alg1(row_view(a, i), b).value);
    }
  }
  return std::move(out).finish();
}

void check_shapes(const CsrMatrix& a, Index b_rows) {
  if (a.cols() != b_rows) {
    throw MatrixError("spmm: inner dimensions differ (" + std::to_string(a.cols()) + " vs " +
                      std::to_string(b_rows) + ")");
  }
}

}  // namespace

DotResult sparse_dot_alg1(SparseView a, SparseView b) {
  DotResult r;
  Index i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    ++r.cycles;
    if (a.indices[i] == b.indices[j]) {
      r.value += a.values[i] * b.values[j];
      ++r.macs;
      ++i;
      ++j;
    } else if (a.indices[i] > b.indices[j]) {
      ++j;
    } else {
      ++i;
    }
  }
  r.a_consumed = i;
  r.b_consumed = j;
  return r;
}

CsrMatrix spmm(const CsrMatrix& a, const CsrMatrix& b, AccessCounter& ctr) {
  check_shapes(a, b.rows());
  return multiply_by_columns(a, b.cols(), [&](Index j) { return gather_column(b, j, ctr); });
}

CsrMatrix spmm(const CsrMatrix& a, const InCrsMatrix& b, AccessCounter& ctr) {
  check_shapes(a, b.rows());
  return multiply_by_columns(a, b.cols(), [&](Index j) { return gather_column(b, j, ctr); });
}

CsrMatrix spmm_a_at(const CsrMatrix& a) {
  return multiply_by_columns(a, a.rows(), [&](Index j) { return row_view(a, j); });
}

}  // namespace spw
