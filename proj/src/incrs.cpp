#include "spw/incrs.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

namespace spw {

namespace {

std::uint64_t field_mask(unsigned bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

void check_position(Index rows, Index cols, Index i, Index j) {
  if (i >= rows || j >= cols) {
    throw std::out_of_range("element (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

// Linear scan of [begin, end) for column j with early exit; charges one
// element read per index inspected and one more for the value on a hit.
std::optional<double> scan(const CsrMatrix& m, Index begin, Index end, Index j,
                           AccessCounter& ctr) {
  const auto& idx = m.col_indices();
  for (Index p = begin; p < end; ++p) {
    ++ctr.element_reads;
    if (idx[p] == j) {
      ++ctr.element_reads;
      return m.values()[p];
    }
    if (idx[p] > j) break;
  }
  return std::nullopt;
}

std::optional<double> incrs_find(const InCrsMatrix& m, Index i, Index j, AccessCounter& ctr) {
  const auto& cfg = m.config();
  ++ctr.pointer_reads;
  const Index row_start = m.base().row_ptr()[i];
  const Index section = j / cfg.section_size;
  const Index block = (j % cfg.section_size) / cfg.block_size;
  ++ctr.counter_reads;
  const CounterVector cv = m.counter(i, section);
  const Index begin = row_start + cv.nnz_before_block(cfg, block);
  return scan(m.base(), begin, begin + cv.block_count(cfg, block), j, ctr);
}

std::optional<double> csr_find(const CsrMatrix& m, Index i, Index j, AccessCounter& ctr) {
  ctr.pointer_reads += 2;
  return scan(m, m.row_ptr()[i], m.row_ptr()[i + 1], j, ctr);
}

void put_word(std::ostream& out, std::uint64_t w) {
  std::array<char, 8> bytes{};
  for (int k = 0; k < 8; ++k) bytes[k] = static_cast<char>((w >> (8 * k)) & 0xffU);
  out.write(bytes.data(), bytes.size());
}

std::uint64_t get_word(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw MatrixError("InCRS file truncated");
  }
  std::uint64_t w = 0;
  for (int k = 0; k < 8; ++k) w |= std::uint64_t{bytes[k]} << (8 * k);
  return w;
}

std::vector<Index> get_indices(std::istream& in, Index n) {
  std::vector<Index> v(n);
  for (auto& x : v) x = get_word(in);
  return v;
}

constexpr Index ceil_div(Index a, Index b) { return (a + b - 1) / b; }

}  // namespace

void InCrsConfig::validate() const {
  if (section_size == 0 || block_size == 0 || section_size % block_size != 0) {
    throw MatrixError("InCRS config: section size must be a positive multiple of block size");
  }
  if (section_prefix_bits == 0 || block_count_bits == 0) {
    throw MatrixError("InCRS config: field widths must be positive");
  }
  if ((std::uint64_t{1} << std::min(block_count_bits, 63U)) <= block_size) {
    throw MatrixError("InCRS config: block count field cannot hold " +
                      std::to_string(block_size));
  }
  if (section_prefix_bits + blocks_per_section() * block_count_bits > 64) {
    throw MatrixError("InCRS config: counter-vector exceeds 64 bits");
  }
}

CounterVector CounterVector::pack(const InCrsConfig& cfg, Index prefix_nnz,
                                  const std::vector<Index>& block_counts) {
  std::uint64_t w = prefix_nnz & field_mask(cfg.section_prefix_bits);
  for (Index k = 0; k < block_counts.size(); ++k) {
    w |= (block_counts[k] & field_mask(cfg.block_count_bits))
         << (cfg.section_prefix_bits + k * cfg.block_count_bits);
  }
  return CounterVector(w);
}

Index CounterVector::prefix_nnz(const InCrsConfig& cfg) const {
  return word_ & field_mask(cfg.section_prefix_bits);
}

Index CounterVector::block_count(const InCrsConfig& cfg, Index block) const {
  return (word_ >> (cfg.section_prefix_bits + block * cfg.block_count_bits)) &
         field_mask(cfg.block_count_bits);
}

Index CounterVector::nnz_before_block(const InCrsConfig& cfg, Index block) const {
  Index n = prefix_nnz(cfg);
  for (Index k = 0; k < block; ++k) n += block_count(cfg, k);
  return n;
}

std::vector<CounterVector> compute_counters(const CsrMatrix& m, const InCrsConfig& cfg) {
  const Index sections = ceil_div(m.cols(), cfg.section_size);
  std::vector<CounterVector> out;
  out.reserve(m.rows() * sections);
  std::vector<Index> blocks(cfg.blocks_per_section());
  for (Index i = 0; i < m.rows(); ++i) {
    auto cols = m.row_indices(i);
    Index p = 0;
    for (Index s = 0; s < sections; ++s) {
      const Index prefix = p;
      std::fill(blocks.begin(), blocks.end(), 0);
      const Index section_end = (s + 1) * cfg.section_size;
      for (; p < cols.size() && cols[p] < section_end; ++p) {
        ++blocks[(cols[p] % cfg.section_size) / cfg.block_size];
      }
      out.push_back(CounterVector::pack(cfg, prefix, blocks));
    }
  }
  return out;
}

InCrsMatrix::InCrsMatrix(CsrMatrix base, const InCrsConfig& cfg,
                         std::vector<CounterVector> counters)
    : base_(std::move(base)),
      config_(cfg),
      sections_(ceil_div(base_.cols(), cfg.section_size)),
      counters_(std::move(counters)) {}

InCrsMatrix InCrsMatrix::build(CsrMatrix base, const InCrsConfig& cfg) {
  cfg.validate();
  const Index limit = Index{1} << cfg.section_prefix_bits;
  for (Index i = 0; i < base.rows(); ++i) {
    if (base.row_nnz(i) >= limit) {
      throw MatrixError("InCRS build: row " + std::to_string(i) + " has " +
                        std::to_string(base.row_nnz(i)) +
                        " nonzeros, which overflows the " +
                        std::to_string(cfg.section_prefix_bits) + "-bit prefix field");
    }
  }
  auto counters = compute_counters(base, cfg);
  return InCrsMatrix(std::move(base), cfg, std::move(counters));
}

std::optional<std::string> InCrsMatrix::find_inconsistency() const {
  const auto expected = compute_counters(base_, config_);
  if (expected.size() != counters_.size()) {
    return "counter count " + std::to_string(counters_.size()) + ", expected " +
           std::to_string(expected.size());
  }
  for (Index k = 0; k < expected.size(); ++k) {
    if (expected[k] != counters_[k]) {
      return "counter-vector mismatch at row " + std::to_string(k / sections_) +
             ", section " + std::to_string(k % sections_);
    }
  }
  return std::nullopt;
}

InCrsMatrix build_incrs(const CsrMatrix& m, const InCrsConfig& cfg) {
  return InCrsMatrix::build(m, cfg);
}

double incrs_get(const InCrsMatrix& m, Index i, Index j, AccessCounter& ctr) {
  check_position(m.rows(), m.cols(), i, j);
  return incrs_find(m, i, j, ctr).value_or(0.0);
}

double csr_get(const CsrMatrix& m, Index i, Index j, AccessCounter& ctr) {
  check_position(m.rows(), m.cols(), i, j);
  return csr_find(m, i, j, ctr).value_or(0.0);
}

SparseVector gather_column(const InCrsMatrix& m, Index j, AccessCounter& ctr) {
  if (j >= m.cols()) throw std::out_of_range("column " + std::to_string(j) + " out of range");
  SparseVector col;
  for (Index i = 0; i < m.rows(); ++i) {
    if (auto v = incrs_find(m, i, j, ctr)) col.push_back(i, *v);
  }
  return col;
}

SparseVector gather_column(const CsrMatrix& m, Index j, AccessCounter& ctr) {
  if (j >= m.cols()) throw std::out_of_range("column " + std::to_string(j) + " out of range");
  SparseVector col;
  for (Index i = 0; i < m.rows(); ++i) {
    if (auto v = csr_find(m, i, j, ctr)) col.push_back(i, *v);
  }
  return col;
}

Index counter_words(const InCrsMatrix& m) { return m.counters().size(); }

Index crs_words(const CsrMatrix& m) { return 2 * m.nnz() + m.rows() + 1; }

MaMeasurement measured_ma_ratio(const InCrsMatrix& m, Index probes, std::uint64_t seed) {
  MaMeasurement out;
  out.probes = probes;
  if (probes == 0 || m.cols() == 0) return out;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick(0, m.cols() - 1);
  for (Index k = 0; k < probes; ++k) {
    const Index j = pick(rng);
    gather_column(m.base(), j, out.crs);
    gather_column(m, j, out.incrs);
  }
  if (out.incrs.total() > 0) {
    out.ratio = static_cast<double>(out.crs.total()) / static_cast<double>(out.incrs.total());
  }
  return out;
}

MaMeasurement measured_ma_ratio(const CsrMatrix& m, const InCrsConfig& cfg, Index probes,
                                std::uint64_t seed) {
  return measured_ma_ratio(build_incrs(m, cfg), probes, seed);
}

void write_incrs(std::ostream& out, const InCrsMatrix& m) {
  const auto& cfg = m.config();
  if (cfg.section_prefix_bits != 16 || cfg.block_count_bits != 6) {
    throw MatrixError("InCRS file format requires 16-bit prefix and 6-bit block fields");
  }
  const auto& base = m.base();
  for (std::uint64_t w : {kIncrsMagic, kIncrsVersion, std::uint64_t{base.rows()},
                          std::uint64_t{base.cols()}, std::uint64_t{base.nnz()},
                          std::uint64_t{cfg.section_size}, std::uint64_t{cfg.block_size}}) {
    put_word(out, w);
  }
  for (Index p : base.row_ptr()) put_word(out, p);
  for (Index c : base.col_indices()) put_word(out, c);
  for (double v : base.values()) put_word(out, std::bit_cast<std::uint64_t>(v));
  for (CounterVector cv : m.counters()) put_word(out, cv.word());
}

InCrsMatrix read_incrs(std::istream& in) {
  if (get_word(in) != kIncrsMagic) throw MatrixError("not an InCRS file (bad magic)");
  const auto version = get_word(in);
  if (version != kIncrsVersion) {
    throw MatrixError("unsupported InCRS version " + std::to_string(version));
  }
  const Index rows = get_word(in);
  const Index cols = get_word(in);
  const Index nnz = get_word(in);
  InCrsConfig cfg;
  cfg.section_size = get_word(in);
  cfg.block_size = get_word(in);
  cfg.validate();

  auto row_ptr = get_indices(in, rows + 1);
  auto col_idx = get_indices(in, nnz);
  std::vector<double> values(nnz);
  for (auto& v : values) v = std::bit_cast<double>(get_word(in));
  CsrMatrix base(rows, cols, std::move(values), std::move(col_idx), std::move(row_ptr));

  std::vector<CounterVector> counters(rows * ceil_div(cols, cfg.section_size));
  for (auto& cv : counters) cv = CounterVector(get_word(in));

  InCrsMatrix m(std::move(base), cfg, std::move(counters));
  if (auto err = m.find_inconsistency()) throw MatrixError("InCRS file: " + *err);
  return m;
}

void save_incrs(const std::filesystem::path& path, const InCrsMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MatrixError("cannot write " + path.string());
  write_incrs(out, m);
  if (!out) throw MatrixError("write failed for " + path.string());
}

InCrsMatrix load_incrs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MatrixError("cannot open " + path.string());
  return read_incrs(in);
}

}  // namespace spw
