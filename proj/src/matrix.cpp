#include "spw/matrix.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <string>

namespace spw {

namespace {

std::string coord(Index r, Index c) {
  return "(" + std::to_string(r) + ", " + std::to_string(c) + ")";
}

void check_compressed(const char* what, Index outer, Index inner,
                      const std::vector<double>& values,
                      const std::vector<Index>& indices,
                      const std::vector<Index>& ptr) {
  const std::string kind(what);
  if (ptr.size() != outer + 1) {
    throw MatrixError(kind + ": pointer array has " + std::to_string(ptr.size()) +
                      " entries, expected " + std::to_string(outer + 1));
  }
  if (values.size() != indices.size()) {
    throw MatrixError(kind + ": values and indices differ in length");
  }
  if (ptr.front() != 0 || ptr.back() != values.size()) {
    throw MatrixError(kind + ": pointer array must start at 0 and end at nnz");
  }
  for (Index k = 0; k < outer; ++k) {
    if (ptr[k] > ptr[k + 1]) {
      throw MatrixError(kind + ": pointer array decreases at " + std::to_string(k));
    }
    for (Index p = ptr[k]; p < ptr[k + 1]; ++p) {
      if (indices[p] >= inner) {
        throw MatrixError(kind + ": index " + std::to_string(indices[p]) +
                          " out of range in slice " + std::to_string(k));
      }
      if (p > ptr[k] && indices[p - 1] >= indices[p]) {
        throw MatrixError(kind + ": indices not strictly increasing in slice " +
                          std::to_string(k));
      }
    }
  }
}

}  // namespace

CooMatrix::CooMatrix(Index rows, Index cols, std::vector<Triplet> triplets)
    : rows_(rows), cols_(cols), triplets_(std::move(triplets)) {
  for (const auto& t : triplets_) {
    if (t.row >= rows_ || t.col >= cols_) {
      throw MatrixError("triplet " + coord(t.row, t.col) + " outside " +
                        std::to_string(rows_) + "x" + std::to_string(cols_));
    }
  }
  std::vector<std::pair<Index, Index>> keys;
  keys.reserve(triplets_.size());
  for (const auto& t : triplets_) keys.emplace_back(t.row, t.col);
  std::sort(keys.begin(), keys.end());
  auto dup = std::adjacent_find(keys.begin(), keys.end());
  if (dup != keys.end()) {
    throw MatrixError("duplicate entry at " + coord(dup->first, dup->second));
  }
}

CooMatrix CooMatrix::sorted() const {
  auto t = triplets_;
  std::sort(t.begin(), t.end(), [](const Triplet& x, const Triplet& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });
  CooMatrix out;
  out.rows_ = rows_;
  out.cols_ = cols_;
  out.triplets_ = std::move(t);
  return out;
}

CsrMatrix::CsrMatrix(Index rows, Index cols, std::vector<double> values,
                     std::vector<Index> col_indices, std::vector<Index> row_ptr)
    : rows_(rows),
      cols_(cols),
      values_(std::move(values)),
      col_indices_(std::move(col_indices)),
      row_ptr_(std::move(row_ptr)) {
  check_compressed("CSR", rows_, cols_, values_, col_indices_, row_ptr_);
}

CsrMatrix CsrMatrix::identity(Index n) {
  std::vector<Index> idx(n), ptr(n + 1);
  for (Index i = 0; i < n; ++i) {
    idx[i] = i;
    ptr[i + 1] = i + 1;
  }
  return CsrMatrix(n, n, std::vector<double>(n, 1.0), std::move(idx), std::move(ptr));
}

double CsrMatrix::density() const {
  if (rows_ == 0 || cols_ == 0) return 0.0;
  return static_cast<double>(nnz()) /
         (static_cast<double>(rows_) * static_cast<double>(cols_));
}

CcsMatrix::CcsMatrix(Index rows, Index cols, std::vector<double> values,
                     std::vector<Index> row_indices, std::vector<Index> col_ptr)
    : rows_(rows),
      cols_(cols),
      values_(std::move(values)),
      row_indices_(std::move(row_indices)),
      col_ptr_(std::move(col_ptr)) {
  check_compressed("CCS", cols_, rows_, values_, row_indices_, col_ptr_);
}

DenseMatrix::DenseMatrix(Index rows, Index cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw MatrixError("dense data length " + std::to_string(data_.size()) +
                      " does not match " + std::to_string(rows_) + "x" +
                      std::to_string(cols_));
  }
}

DenseMatrix DenseMatrix::identity(Index n) {
  DenseMatrix m(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CsrMatrix coo_to_csr(const CooMatrix& m) {
  const auto s = m.sorted();
  std::vector<Index> ptr(m.rows() + 1, 0);
  std::vector<Index> idx;
  std::vector<double> val;
  idx.reserve(s.nnz());
  val.reserve(s.nnz());
  for (const auto& t : s.triplets()) {
    ++ptr[t.row + 1];
    idx.push_back(t.col);
    val.push_back(t.value);
  }
  for (Index i = 0; i < m.rows(); ++i) ptr[i + 1] += ptr[i];
  return CsrMatrix(m.rows(), m.cols(), std::move(val), std::move(idx), std::move(ptr));
}

CooMatrix csr_to_coo(const CsrMatrix& m) {
  std::vector<Triplet> t;
  t.reserve(m.nnz());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index p = m.row_ptr()[i]; p < m.row_ptr()[i + 1]; ++p) {
      t.push_back({i, m.col_indices()[p], m.values()[p]});
    }
  }
  return CooMatrix(m.rows(), m.cols(), std::move(t));
}

CcsMatrix csr_to_ccs(const CsrMatrix& m) {
  std::vector<Index> ptr(m.cols() + 1, 0);
  for (Index c : m.col_indices()) ++ptr[c + 1];
  for (Index j = 0; j < m.cols(); ++j) ptr[j + 1] += ptr[j];

  std::vector<Index> rows(m.nnz());
  std::vector<double> vals(m.nnz());
  std::vector<Index> next(ptr.begin(), ptr.end() - 1);
  // Rows are visited in ascending order, so each column fills sorted.
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index p = m.row_ptr()[i]; p < m.row_ptr()[i + 1]; ++p) {
      const Index dst = next[m.col_indices()[p]]++;
      rows[dst] = i;
      vals[dst] = m.values()[p];
    }
  }
  return CcsMatrix(m.rows(), m.cols(), std::move(vals), std::move(rows), std::move(ptr));
}

CsrMatrix transpose(const CsrMatrix& m) {
  auto ccs = csr_to_ccs(m);
  return CsrMatrix(m.cols(), m.rows(), ccs.values(), ccs.row_indices(), ccs.col_ptr());
}

DenseMatrix to_dense(const CsrMatrix& m) {
  DenseMatrix d(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index p = m.row_ptr()[i]; p < m.row_ptr()[i + 1]; ++p) {
      d(i, m.col_indices()[p]) = m.values()[p];
    }
  }
  return d;
}

DenseMatrix to_dense(const CcsMatrix& m) {
  DenseMatrix d(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index p = m.col_ptr()[j]; p < m.col_ptr()[j + 1]; ++p) {
      d(m.row_indices()[p], j) = m.values()[p];
    }
  }
  return d;
}

CsrMatrix dense_to_csr(const DenseMatrix& m) {
  std::vector<Index> ptr(m.rows() + 1, 0);
  std::vector<Index> idx;
  std::vector<double> val;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) {
        idx.push_back(j);
        val.push_back(m(i, j));
      }
    }
    ptr[i + 1] = idx.size();
  }
  return CsrMatrix(m.rows(), m.cols(), std::move(val), std::move(idx), std::move(ptr));
}

DenseMatrix dense_matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw MatrixError("dense_matmul: inner dimensions differ (" +
                      std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + ")");
  }
  DenseMatrix c(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (Index k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  }
  return c;
}

MatrixStats matrix_stats(const CsrMatrix& m) {
  MatrixStats s;
  s.rows = m.rows();
  s.cols = m.cols();
  s.nnz = m.nnz();
  s.density = m.density();
  if (m.rows() == 0) return s;
  s.nz_per_row_min = m.row_nnz(0);
  for (Index i = 0; i < m.rows(); ++i) {
    s.nz_per_row_min = std::min(s.nz_per_row_min, m.row_nnz(i));
    s.nz_per_row_max = std::max(s.nz_per_row_max, m.row_nnz(i));
  }
  s.nz_per_row_mean = static_cast<double>(m.nnz()) / static_cast<double>(m.rows());
  return s;
}

std::uint64_t checksum(const CsrMatrix& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t word) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (word >> (8 * byte)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(m.rows());
  mix(m.cols());
  for (Index p : m.row_ptr()) mix(p);
  for (Index c : m.col_indices()) mix(c);
  for (double v : m.values()) mix(std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v));
  return h;
}

std::string checksum_hex(const CsrMatrix& m) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(checksum(m)));
  return buf;
}

}  // namespace spw
