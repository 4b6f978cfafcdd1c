// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "spw/cost_model.hpp"
#include "spw/incrs.hpp"
#include "spw/mesh_sim.hpp"
#include "spw/spmm.hpp"
#include "spw/synthetic.hpp"

using namespace spw;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

bool near(double got, double want, double tol) { return std::abs(got - want) <= tol; }

void formulas() {
  bool ok = true;
  std::string detail = "storage";
  const double sd[] = {0.14, 0.06, 0.04, 0.015};
  const double sw[] = {0.99, 0.97, 0.95, 0.88};
  for (int k = 0; k < 4; ++k) {
    const double r = storage_ratio_estimate(sd[k], 256);
    ok = ok && near(r, sw[k], 0.01);
    detail += fmt(" %.3f", r);
  }
  detail += "; ma";
  const double mn[] = {10000, 22000, 12000};
  const double md[] = {0.14, 0.06, 0.04};
  const double mw[] = {42, 39, 14};
  for (int k = 0; k < 3; ++k) {
    const double r = ma_ratio_estimate(mn[k], md[k], 32);
    ok = ok && near(r, mw[k], 1.5);
    detail += fmt(" %.2f", r);
  }
  report(1, ok, detail);
}

void measured_ratio() {
  bool ok = true;
  std::string detail;
  for (auto p : {SynthProfile::amazon(300, 1), SynthProfile::docword(700, 1)}) {
    const auto m = coo_to_csr(generate_synthetic(p));
    const auto st = matrix_stats(m);
    const auto meas = measured_ma_ratio(m, InCrsConfig{}, 200, 7);
    const double pred = ma_ratio_estimate(static_cast<double>(st.cols), st.density, 32);
    const double factor = meas.ratio / pred;
    ok = ok && factor >= 0.5 && factor <= 2.0;
    detail += fmt("N=%.0f ", static_cast<double>(st.cols)) + fmt("measured %.1f ", meas.ratio) +
              fmt("predicted %.1f ", pred) + fmt("(x%.2f); ", factor);
  }
  report(2, ok, detail + "window [0.5, 2]");
}

struct SuiteTotals {
  int cases = 0;
  int mismatches = 0;
  SyncMeshStats sync;
  std::uint64_t worst_high_water_over_r = 0;  // cases with high water above R
};

void oracle_suite(SuiteTotals& t) {
  std::mt19937_64 rng(20240601);
  const double densities[] = {0.0, 0.01, 0.05, 0.20, 1.0};
  const Index meshes[] = {2, 4, 8, 16, 32};
  const Index rounds[] = {1, 4, 8, 16, 32};
  for (int c = 0; c < 250; ++c) {
    const double d = densities[c % 5];
    const Index m = 1 + rng() % 96, k = 1 + rng() % 96, n = 1 + rng() % 96;
    const auto a = random_integer_matrix(m, k, d, rng());
    const auto b = random_integer_matrix(k, n, d, rng());
    const auto expect = dense_matmul(to_dense(a), to_dense(b));
    const Index mesh = meshes[rng() % 5];
    const Index R = rounds[rng() % 5];

    int bad = 0;
    auto sync = run_sync_mesh(a, b, ArchConfig::sync_mesh(mesh, R));
    bad += to_dense(sync.result) != expect;
    bad += to_dense(run_fpic(a, b, ArchConfig::fpic(1 + rng() % 8)).result) != expect;
    bad += to_dense(run_conventional(a, b, ArchConfig::conventional(mesh)).result) != expect;
    AccessCounter ctr;
    bad += to_dense(spmm(a, b, ctr)) != expect;
    bad += to_dense(spmm(a, build_incrs(b), ctr)) != expect;
    bad += to_dense(spmm_a_at(a)) != dense_matmul(to_dense(a), to_dense(transpose(a)));
    t.mismatches += bad;
    ++t.cases;

    const auto& s = *sync.sync_stats;
    t.sync.node_rounds += s.node_rounds;
    t.sync.pairs_consumed += s.pairs_consumed;
    t.sync.stall_violations += s.stall_violations;
    t.sync.searches += s.searches;
    t.sync.search_bound_violations += s.search_bound_violations;
    t.sync.node_mismatches += s.node_mismatches;
    if (s.max_search_comparisons > search_comparison_bound(R)) ++t.sync.search_bound_violations;
    if (sync.buffer_high_water > R) ++t.worst_high_water_over_r;
  }
  report(3, t.mismatches == 0,
         std::to_string(t.cases) + " cases x 6 kernels, " + std::to_string(t.mismatches) +
             " mismatches against dense oracle");
}

void resource_table() {
  const auto p = parity_sizing(64, 16, 32);
  bool ok = p.k_fpic_same_bw == 8 && p.k_fpic_same_buffer == 32 && p.n_conv == 96 && p.integral;
  const Resources want[] = {{4096, 768, 6}, {512, 192, 6}, {2048, 768, 24}, {9216, 0, 6}};
  const auto set = parity_configs(64);
  std::string detail = fmt("sizing (%.0f, ", p.k_fpic_same_bw) +
                       fmt("%.0f, ", p.k_fpic_same_buffer) + fmt("%.0f)", p.n_conv);
  for (std::size_t k = 0; k < set.size(); ++k) {
    const auto r = resource_account(set[k].config);
    ok = ok && r == want[k];
    detail += "; " + set[k].name + " " + std::to_string(r.mac_units) + " MACs " +
              fmt("%g kB ", r.buffer_kB) + fmt("%g kb/cycle", r.bandwidth_kb_per_cycle);
  }
  report(4, ok && set.size() == 4, detail);
}

void no_stall(const SuiteTotals& t) {
  const bool ok = t.sync.stall_violations == 0 && t.sync.search_bound_violations == 0 &&
                  t.worst_high_water_over_r == 0 && t.sync.node_mismatches == 0 &&
                  t.sync.pairs_consumed > 0;
  report(5, ok,
         std::to_string(t.sync.node_rounds) + " node-rounds, " + std::to_string(t.sync.searches) +
             " searches; stalls " + std::to_string(t.sync.stall_violations) + ", search-bound " +
             std::to_string(t.sync.search_bound_violations) + ", buffer>R " +
             std::to_string(t.worst_high_water_over_r) + ", node mismatches " +
             std::to_string(t.sync.node_mismatches));
}

void trend() {
  const auto set = parity_configs(64);
  const double densities[] = {0.14, 0.04, 0.015, 0.001};
  std::vector<double> vs_bw, vs_buf;
  std::string detail;
  for (double d : densities) {
    const auto a = coo_to_csr(generate_synthetic(SynthProfile::uniform(512, 512, d, 11)));
    const auto at = transpose(a);
    const double sync = run_sync_mesh(a, at, set[0].config).total_cycles;
    const double bw = run_fpic(a, at, set[1].config).total_cycles;
    const double buf = run_fpic(a, at, set[2].config).total_cycles;
    vs_bw.push_back(bw / sync);
    vs_buf.push_back(buf / sync);
    detail += fmt("D=%g: ", d) + fmt("sync %.0f ", sync) + fmt("bw %.0f ", bw) +
              fmt("buf %.0f; ", buf);
  }
  bool a_ok = true, b_ok = true;
  for (std::size_t k = 0; k < vs_bw.size(); ++k) {
    a_ok = a_ok && vs_bw[k] > 1.0;
    // Densities are listed high to low, so speedup must not drop.
    if (k > 0) b_ok = b_ok && vs_bw[k] >= vs_bw[k - 1];
  }
  const bool c_ok = vs_buf[2] > 1.0 && vs_buf[3] > 1.0;
  detail += "speedup vs same-bw";
  for (double s : vs_bw) detail += fmt(" %.2f", s);
  detail += ", vs same-buffer";
  for (double s : vs_buf) detail += fmt(" %.2f", s);
  detail += std::string("; (a) ") + (a_ok ? "ok" : "no") + " (b) " + (b_ok ? "ok" : "no") +
            " (c) " + (c_ok ? "ok" : "no");
  report(6, a_ok && b_ok && c_ok, detail);
}

void fpic_cross_check() {
  std::mt19937_64 rng(99);
  int bad = 0;
  for (int c = 0; c < 50; ++c) {
    const Index m = 1 + rng() % 80, k = 1 + rng() % 80, n = 1 + rng() % 80;
    const double d = (1 + rng() % 40) / 100.0;
    const auto a = random_integer_matrix(m, k, d, rng());
    const auto b = random_integer_matrix(k, n, d, rng());
    const auto rep = run_fpic(a, b, ArchConfig::fpic(1 + rng() % 4));
    const auto bt = csr_to_ccs(b);
    std::uint64_t total = 0;
    for (Index r0 = 0; r0 < m; r0 += 8) {
      for (Index c0 = 0; c0 < n; c0 += 8) {
        Index worst = 0;
        for (Index r = r0; r < std::min(m, r0 + 8); ++r)
          for (Index q = c0; q < std::min(n, c0 + 8); ++q)
            worst = std::max(worst, sparse_dot_alg1(row_view(a, r), column_view(bt, q)).cycles);
        total += worst;
      }
    }
    if (rep.fpic_stats->single_unit_cycles != total) ++bad;
    if (rep.total_cycles != static_cast<double>(total) / static_cast<double>(rep.config.unit_count)) ++bad;
  }
  report(7, bad == 0, "50 cases, " + std::to_string(bad) + " disagreements");
}

}  // namespace

int main() {
  formulas();
  measured_ratio();
  SuiteTotals totals;
  oracle_suite(totals);
  resource_table();
  no_stall(totals);
  trend();
  fpic_cross_check();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
