#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "spw/cost_model.hpp"
#include "spw/incrs.hpp"
#include "spw/synthetic.hpp"

using namespace spw;

namespace {

// Counter-vector contents recomputed straight from the dense row, no CSR walk.
struct NaiveCounter {
  Index prefix = 0;
  std::vector<Index> blocks;
};

NaiveCounter naive_counter(const DenseMatrix& d, Index i, Index section, const InCrsConfig& cfg) {
  NaiveCounter out;
  out.blocks.assign(cfg.blocks_per_section(), 0);
  for (Index j = 0; j < d.cols(); ++j) {
    if (d(i, j) == 0.0) continue;
    if (j / cfg.section_size < section) ++out.prefix;
    if (j / cfg.section_size == section) ++out.blocks[(j % cfg.section_size) / cfg.block_size];
  }
  return out;
}

InCrsConfig fig2_config() { return {8, 2, 8, 2}; }

CsrMatrix fig2_row() {
  std::vector<Triplet> t;
  for (Index c : {0, 3, 5, 9, 10, 12, 13}) t.push_back({0, c, 1.0 + static_cast<double>(c)});
  return coo_to_csr(CooMatrix(1, 24, t));
}

}  // namespace

TEST_CASE("InCrsConfig validation") {
  CHECK_NOTHROW(InCrsConfig{}.validate());
  CHECK_THROWS_AS((InCrsConfig{250, 32, 16, 6}.validate()), MatrixError);  // S not multiple of b
  CHECK_THROWS_AS((InCrsConfig{256, 32, 16, 5}.validate()), MatrixError);  // 5 bits cannot hold 32
  CHECK_THROWS_AS((InCrsConfig{512, 32, 16, 6}.validate()), MatrixError);  // 16 + 16*6 > 64
}

TEST_CASE("counter-vector packing") {
  const InCrsConfig cfg;
  const std::vector<Index> blocks{1, 0, 32, 5, 0, 0, 7, 31};
  const auto cv = CounterVector::pack(cfg, 1234, blocks);
  CHECK(cv.prefix_nnz(cfg) == 1234);
  for (Index k = 0; k < 8; ++k) CHECK(cv.block_count(cfg, k) == blocks[k]);
  CHECK(cv.nnz_before_block(cfg, 3) == 1234 + 33);
  // Fixed layout: prefix low 16 bits, block k at 16 + 6k.
  CHECK((cv.word() & 0xffff) == 1234);
  CHECK(((cv.word() >> 28) & 0x3f) == 32);
  CHECK((cv.word() >> 58) == 31);
}

TEST_CASE("build_incrs") {
  SUBCASE("empty 4x600") {
    auto m = build_incrs(coo_to_csr(CooMatrix(4, 600, {})));
    CHECK(m.counters().size() == 12);
    for (auto cv : m.counters()) CHECK(cv.word() == 0);
  }
  SUBCASE("small worked row") {
    const auto cfg = fig2_config();
    auto m = build_incrs(fig2_row(), cfg);
    REQUIRE(m.sections_per_row() == 3);
    const auto cv = m.counter(0, 1);
    CHECK(cv.prefix_nnz(cfg) == 3);
    CHECK(cv.block_count(cfg, 0) == 1);
    CHECK(cv.block_count(cfg, 1) == 1);
    CHECK(cv.block_count(cfg, 2) == 2);
    CHECK(cv.block_count(cfg, 3) == 0);
    // Column 13 sits in section 1, block 2: between 5 and 7 nonzeros precede it.
    const Index lo = cv.nnz_before_block(cfg, 2);
    const Index hi = lo + cv.block_count(cfg, 2);
    CHECK(lo == 5);
    CHECK(hi == 7);
    AccessCounter ctr;
    CHECK(incrs_get(m, 0, 13, ctr) == 14.0);
  }
  SUBCASE("random 100x1000 matches the naive counters") {
    const InCrsConfig cfg;
    auto csr = random_integer_matrix(100, 1000, 0.05, 21);
    auto m = build_incrs(csr, cfg);
    CHECK_FALSE(m.find_inconsistency().has_value());
    auto d = to_dense(csr);
    CHECK(m.counters().size() == 100 * 4);
    for (Index i = 0; i < 100; ++i) {
      Index running = 0, total = 0;
      for (Index s = 0; s < 4; ++s) {
        const auto want = naive_counter(d, i, s, cfg);
        const auto cv = m.counter(i, s);
        CHECK(cv.prefix_nnz(cfg) == want.prefix);
        CHECK(cv.prefix_nnz(cfg) == running);
        for (Index k = 0; k < cfg.blocks_per_section(); ++k) {
          CHECK(cv.block_count(cfg, k) == want.blocks[k]);
          CHECK(cv.block_count(cfg, k) <= cfg.block_size);
          running += cv.block_count(cfg, k);
          total += cv.block_count(cfg, k);
        }
      }
      CHECK(total == csr.row_nnz(i));
    }
  }
  SUBCASE("partial trailing section leaves unused blocks zero") {
    const InCrsConfig cfg;
    auto m = build_incrs(coo_to_csr(generate_synthetic(SynthProfile::uniform(20, 300, 1.0, 1))), cfg);
    // Columns 256..299 cover blocks 0 and 1 (partially); blocks 2..7 are empty.
    for (Index i = 0; i < 20; ++i) {
      const auto cv = m.counter(i, 1);
      CHECK(cv.prefix_nnz(cfg) == 256);
      CHECK(cv.block_count(cfg, 0) == 32);
      CHECK(cv.block_count(cfg, 1) == 12);
      for (Index k = 2; k < 8; ++k) CHECK(cv.block_count(cfg, k) == 0);
    }
  }
  SUBCASE("row overflowing the prefix field is rejected by id") {
    InCrsConfig cfg{8, 2, 3, 2};  // prefix holds at most 7
    std::vector<Triplet> t;
    for (Index c = 0; c < 8; ++c) t.push_back({2, c, 1.0});
    try {
      build_incrs(coo_to_csr(CooMatrix(4, 8, t)), cfg);
      FAIL("expected rejection");
    } catch (const MatrixError& e) {
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
  }
}

TEST_CASE("incrs_get") {
  SUBCASE("all-zero matrix") {
    auto m = build_incrs(coo_to_csr(CooMatrix(3, 700, {})));
    for (Index j : {0, 255, 256, 699}) {
      AccessCounter ctr;
      CHECK(incrs_get(m, 1, j, ctr) == 0.0);
      CHECK(ctr.counter_reads == 1);
      CHECK(ctr.pointer_reads <= 2);
      CHECK(ctr.element_reads == 0);
    }
  }
  SUBCASE("j=300 probes section 1 block 1") {
    // Column 300 is the only nonzero of section 1, block 1 (cols 288..319).
    // Everything else in the row would cost element reads if scanned.
    std::vector<Triplet> t;
    for (Index c = 256; c < 288; ++c) t.push_back({0, c, 1.0});
    t.push_back({0, 300, 9.0});
    for (Index c = 320; c < 350; ++c) t.push_back({0, c, 1.0});
    auto m = build_incrs(coo_to_csr(CooMatrix(1, 512, t)));
    AccessCounter ctr;
    CHECK(incrs_get(m, 0, 300, ctr) == 9.0);
    CHECK(ctr.element_reads == 2);  // one index, one value
    CHECK(ctr.counter_reads == 1);
  }
  SUBCASE("out of range") {
    auto m = build_incrs(CsrMatrix::identity(5));
    AccessCounter ctr;
    CHECK_THROWS_AS(incrs_get(m, 5, 0, ctr), std::out_of_range);
    CHECK_THROWS_AS(incrs_get(m, 0, 5, ctr), std::out_of_range);
    CHECK_THROWS_AS(csr_get(m.base(), 0, 5, ctr), std::out_of_range);
  }
  SUBCASE("format equivalence on every position") {
    auto csr = random_integer_matrix(200, 2000, 0.04, 8);
    auto m = build_incrs(csr);
    auto d = to_dense(csr);
    Index mismatches = 0, bound_violations = 0;
    for (Index i = 0; i < 200; ++i) {
      for (Index j = 0; j < 2000; ++j) {
        AccessCounter ci, cc;
        const double vi = incrs_get(m, i, j, ci);
        const double vc = csr_get(csr, i, j, cc);
        if (vi != d(i, j) || vc != d(i, j)) ++mismatches;
        if (ci.counter_reads != 1 || ci.element_reads > 2 * 32) ++bound_violations;
      }
    }
    CHECK(mismatches == 0);
    CHECK(bound_violations == 0);
  }
  SUBCASE("non-default section and block sizes") {
    for (InCrsConfig cfg : {InCrsConfig{64, 8, 16, 4}, InCrsConfig{16, 16, 32, 5}}) {
      auto csr = random_integer_matrix(30, 150, 0.3, 4);
      auto m = build_incrs(csr, cfg);
      auto d = to_dense(csr);
      for (Index i = 0; i < 30; ++i) {
        for (Index j = 0; j < 150; ++j) {
          AccessCounter ctr;
          REQUIRE(incrs_get(m, i, j, ctr) == d(i, j));
        }
      }
    }
  }
}

TEST_CASE("csr_get") {
  SUBCASE("first column reads at most one index") {
    auto csr = random_integer_matrix(20, 50, 0.5, 2);
    for (Index i = 0; i < 20; ++i) {
      AccessCounter ctr;
      const double v = csr_get(csr, i, 0, ctr);
      CHECK(ctr.pointer_reads == 2);
      CHECK(ctr.element_reads - (v != 0.0 ? 1 : 0) <= 1);
    }
  }
  SUBCASE("docword-like density averages about half a row") {
    auto csr = coo_to_csr(generate_synthetic(SynthProfile::uniform(60, 12000, 0.04, 3)));
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<Index> row(0, 59), col(0, 11999);
    AccessCounter ctr;
    const Index probes = 4000;
    for (Index k = 0; k < probes; ++k) csr_get(csr, row(rng), col(rng), ctr);
    const double mean = static_cast<double>(ctr.element_reads) / probes;
    CHECK(mean >= 192.0);
    CHECK(mean <= 288.0);
  }
}

TEST_CASE("gather_column") {
  SUBCASE("identity") {
    auto m = build_incrs(CsrMatrix::identity(600));
    AccessCounter ctr;
    auto col = gather_column(m, 417, ctr);
    CHECK(col.indices == std::vector<Index>{417});
    CHECK(col.values == std::vector<double>{1.0});
  }
  SUBCASE("matches the dense column and the CRS gather") {
    auto csr = random_integer_matrix(100, 500, 0.10, 6);
    auto m = build_incrs(csr);
    auto d = to_dense(csr);
    for (Index j = 0; j < 500; j += 7) {
      AccessCounter a, b;
      auto gi = gather_column(m, j, a);
      auto gc = gather_column(csr, j, b);
      SparseVector expect;
      for (Index i = 0; i < 100; ++i)
        if (d(i, j) != 0.0) expect.push_back(i, d(i, j));
      CHECK(gi == expect);
      CHECK(gc == expect);
    }
  }
  SUBCASE("out of range") {
    AccessCounter ctr;
    CHECK_THROWS_AS(gather_column(CsrMatrix::identity(3), 3, ctr), std::out_of_range);
  }
}

TEST_CASE("storage accounting") {
  auto csr = random_integer_matrix(37, 1000, 0.02, 1);
  auto m = build_incrs(csr);
  CHECK(counter_words(m) == 37 * 4);
  CHECK(crs_words(csr) == 2 * csr.nnz() + 38);
}

TEST_CASE("cost model formulas") {
  CHECK(table1_cost(FormatFamily::EllpackLilCrs, 1, 12000, 0.04) == doctest::Approx(240.0));
  CHECK(table1_cost(FormatFamily::Jad, 1, 12000, 0.04) == doctest::Approx(480.0));
  CHECK(table1_cost(FormatFamily::CooSll, 2, 12000, 0.04) ==
        doctest::Approx(2 * table1_cost(FormatFamily::EllpackLilCrs, 2, 12000, 0.04)));
  CHECK(table1_cost(FormatFamily::InCrs, 1, 12000, 0.04, 32) == 17.0);

  CHECK(ma_ratio_estimate(10000, 0.14, 32) == doctest::Approx(41.18).epsilon(1e-3));
  CHECK(ma_ratio_estimate(12000, 0.04, 32) == doctest::Approx(14.12).epsilon(1e-3));
  CHECK(ma_ratio_estimate(1000, 0.034, 32) == doctest::Approx(1.0));

  CHECK(storage_ratio_estimate(0.14, 256) == doctest::Approx(0.986).epsilon(1e-3));
  CHECK(storage_ratio_estimate(0.015, 256) == doctest::Approx(0.885).epsilon(1e-3));
  CHECK(storage_ratio_estimate(0.04, 256) == doctest::Approx(0.953).epsilon(1e-3));
}

TEST_CASE("measured_ma_ratio") {
  SUBCASE("dense matrix sits near N/(b+2)") {
    auto csr = coo_to_csr(generate_synthetic(SynthProfile::uniform(40, 1024, 1.0, 1)));
    auto r = measured_ma_ratio(csr, InCrsConfig{}, 50, 3);
    CHECK(r.ratio == doctest::Approx(ma_ratio_estimate(1024, 1.0, 32)).epsilon(0.2));
  }
  SUBCASE("zero probes") {
    auto r = measured_ma_ratio(CsrMatrix::identity(10), InCrsConfig{}, 0, 1);
    CHECK(r.ratio == 0.0);
    CHECK(r.crs.total() == 0);
  }
  SUBCASE("non-decreasing in density") {
    double prev = 0.0;
    for (double d : {0.01, 0.04, 0.14, 0.4, 1.0}) {
      auto csr = coo_to_csr(generate_synthetic(SynthProfile::uniform(60, 4096, d, 5)));
      const double r = measured_ma_ratio(csr, InCrsConfig{}, 100, 9).ratio;
      CHECK(r >= prev);
      prev = r;
    }
  }
  SUBCASE("deterministic for a seed") {
    auto csr = random_integer_matrix(50, 900, 0.1, 3);
    auto a = measured_ma_ratio(csr, InCrsConfig{}, 30, 4);
    auto b = measured_ma_ratio(csr, InCrsConfig{}, 30, 4);
    CHECK(a.crs == b.crs);
    CHECK(a.incrs == b.incrs);
  }
}

TEST_CASE("binary serialization") {
  auto csr = random_integer_matrix(33, 700, 0.07, 12);
  auto m = build_incrs(csr);
  std::stringstream buf;
  write_incrs(buf, m);
  SUBCASE("round trip") {
    auto back = read_incrs(buf);
    CHECK(back.base() == m.base());
    CHECK(back.counters() == m.counters());
    CHECK(back.config() == m.config());
  }
  SUBCASE("header words are little-endian") {
    const std::string s = buf.str();
    CHECK(s.substr(0, 8) == std::string("InCRSv1\0", 8));
    CHECK(s.size() == 8 * (7 + 34 + 2 * csr.nnz() + 33 * 3));
  }
  SUBCASE("corrupted counter rejected") {
    std::string s = buf.str();
    s[s.size() - 3] ^= 0x10;
    std::istringstream in(s);
    CHECK_THROWS_AS(read_incrs(in), MatrixError);
  }
  SUBCASE("truncated and bad magic rejected") {
    std::string s = buf.str();
    std::istringstream cut(s.substr(0, s.size() - 4));
    CHECK_THROWS_AS(read_incrs(cut), MatrixError);
    s[0] = 'X';
    std::istringstream bad(s);
    CHECK_THROWS_AS(read_incrs(bad), MatrixError);
  }
  SUBCASE("non-default field widths are not serializable") {
    std::stringstream out;
    CHECK_THROWS_AS(write_incrs(out, build_incrs(fig2_row(), fig2_config())), MatrixError);
  }
}
