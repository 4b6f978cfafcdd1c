#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Sparse and dense matrix containers shared by every part of the workbench.
//
// All containers are immutable once constructed: factories validate their
// invariants and the members are only reachable through const accessors.

namespace spw {

using Index = std::size_t;

/// Raised when a matrix or configuration violates a structural invariant.
class MatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Triplet {
  Index row = 0;
  Index col = 0;
  double value = 0.0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Coordinate list. Unique (row, col) positions, all in bounds.
class CooMatrix {
 public:
  CooMatrix() = default;
  /// Throws MatrixError on out-of-range or duplicate positions.
  CooMatrix(Index rows, Index cols, std::vector<Triplet> triplets);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return triplets_.size(); }
  const std::vector<Triplet>& triplets() const { return triplets_; }

  /// Copy with triplets in (row, col) order.
  CooMatrix sorted() const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Triplet> triplets_;
};

class CsrMatrix {
 public:
  CsrMatrix() : row_ptr_{0} {}
  /// Validates every CSR invariant; throws MatrixError on violation.
  CsrMatrix(Index rows, Index cols, std::vector<double> values,
            std::vector<Index> col_indices, std::vector<Index> row_ptr);

  static CsrMatrix identity(Index n);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return values_.size(); }
  double density() const;

  const std::vector<double>& values() const { return values_; }
  const std::vector<Index>& col_indices() const { return col_indices_; }
  const std::vector<Index>& row_ptr() const { return row_ptr_; }

  Index row_nnz(Index i) const { return row_ptr_[i + 1] - row_ptr_[i]; }
  std::span<const Index> row_indices(Index i) const {
    return {col_indices_.data() + row_ptr_[i], row_nnz(i)};
  }
  std::span<const double> row_values(Index i) const {
    return {values_.data() + row_ptr_[i], row_nnz(i)};
  }

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> values_;
  std::vector<Index> col_indices_;
  std::vector<Index> row_ptr_;
};

/// Compressed column storage: the column-major mirror of CsrMatrix.
class CcsMatrix {
 public:
  CcsMatrix() : col_ptr_{0} {}
  CcsMatrix(Index rows, Index cols, std::vector<double> values,
            std::vector<Index> row_indices, std::vector<Index> col_ptr);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return values_.size(); }

  const std::vector<double>& values() const { return values_; }
  const std::vector<Index>& row_indices() const { return row_indices_; }
  const std::vector<Index>& col_ptr() const { return col_ptr_; }

  Index col_nnz(Index j) const { return col_ptr_[j + 1] - col_ptr_[j]; }
  std::span<const Index> col_rows(Index j) const {
    return {row_indices_.data() + col_ptr_[j], col_nnz(j)};
  }
  std::span<const double> col_values(Index j) const {
    return {values_.data() + col_ptr_[j], col_nnz(j)};
  }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> values_;
  std::vector<Index> row_indices_;
  std::vector<Index> col_ptr_;
};

/// Row-major dense matrix; the correctness oracle substrate.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(Index rows, Index cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(Index rows, Index cols, std::vector<double> data);

  static DenseMatrix identity(Index n);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  double operator()(Index i, Index j) const { return data_[i * cols_ + j]; }
  double& operator()(Index i, Index j) { return data_[i * cols_ + j]; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> data_;
};

CsrMatrix coo_to_csr(const CooMatrix& m);
CooMatrix csr_to_coo(const CsrMatrix& m);
CcsMatrix csr_to_ccs(const CsrMatrix& m);
CsrMatrix transpose(const CsrMatrix& m);

DenseMatrix to_dense(const CsrMatrix& m);
DenseMatrix to_dense(const CcsMatrix& m);
/// Keeps every nonzero entry of `m`.
CsrMatrix dense_to_csr(const DenseMatrix& m);

/// Triple-loop product, inner index ascending. Throws MatrixError when
/// a.cols() != b.rows().
DenseMatrix dense_matmul(const DenseMatrix& a, const DenseMatrix& b);

struct MatrixStats {
  Index rows = 0;
  Index cols = 0;
  Index nnz = 0;
  double density = 0.0;
  Index nz_per_row_min = 0;
  double nz_per_row_mean = 0.0;
  Index nz_per_row_max = 0;
};

MatrixStats matrix_stats(const CsrMatrix& m);

/// Order-sensitive 64-bit FNV-1a digest of shape, structure and value bits.
std::uint64_t checksum(const CsrMatrix& m);
std::string checksum_hex(const CsrMatrix& m);

}  // namespace spw
