#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "spw/incrs.hpp"
#include "spw/matrix.hpp"
#include "spw/mesh_sim.hpp"
#include "spw/synthetic.hpp"

// Experiment orchestration behind the spmm-bench command line. Each command
// writes its report to a stream and returns a process exit code.

namespace spw::bench {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,
  kDataError = 2,
  kCorrectnessFailure = 3,
};

/// Thrown for invalid flag values or combinations (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Matrix Market / InCRS file, or a synthetic profile.
struct DatasetSource {
  std::optional<std::filesystem::path> path;
  std::optional<SynthProfile> profile;

  std::string label() const;
  nlohmann::json to_json() const;
};

/// "M,N,D,seed" for a uniform profile, or a preset name with optional
/// rows and seed: "docword", "amazon:300", "belcastro:370:7".
SynthProfile parse_profile(const std::string& text);

/// Loads Matrix Market or InCRS binary files (detected by magic word).
CsrMatrix load_dataset(const DatasetSource& src);

/// Everything needed to rerun a report row bit-for-bit.
struct ExperimentSpec {
  DatasetSource dataset;
  std::optional<DatasetSource> rhs;
  std::string operation;  // access-bench | spmm | spmm-aat | sim | convert
  std::string format;     // crs | incrs
  InCrsConfig incrs;
  std::vector<NamedConfig> archs;
  std::string output;
  std::uint64_t seed = 0;
  std::uint64_t probes = 0;

  nlohmann::json to_json() const;
};

nlohmann::json to_json(const ArchConfig& cfg);
nlohmann::json to_json(const Resources& r);
/// Field names: total_cycles, per_round_cycles, skew_cycles,
/// buffer_high_water, mac_ops, resources, checksum (+ sync_stats or
/// fpic_stats when present).
nlohmann::json to_json(const SimReport& r);

inline constexpr const char* kAccessBenchSchema = "access-bench/1";
inline constexpr const char* kSimSummarySchema = "sim-summary/1";
inline constexpr const char* kSimReportSchema = "sim-report/1";

// Command entry points. `out` receives the primary report; `log` receives
// human-readable progress and diagnostics.

int cmd_convert(const ExperimentSpec& spec, std::ostream& log);
int cmd_stats(const DatasetSource& src, std::ostream& out);
int cmd_access_bench(const ExperimentSpec& spec, std::ostream& csv, std::ostream& log);
int cmd_spmm(const ExperimentSpec& spec, std::ostream& log);
/// `csv` gets the latency summary; `json` (optional) the full reports.
int cmd_sim(const ExperimentSpec& spec, std::ostream& csv, std::ostream* json, std::ostream& log);
/// Consolidates access-bench CSVs and sim JSONs into the benefit table and
/// the design-parameter table. `parity_mesh` adds the parity set for that
/// mesh size without needing a simulation input.
int cmd_report(const std::vector<std::filesystem::path>& inputs,
               std::optional<Index> parity_mesh, std::ostream& out, std::ostream& log);

/// Architecture selection for sim: "sync", "fpic", "conventional",
/// "fpic-same-bw", "fpic-same-buffer" or "parity" (all four parity designs).
std::vector<NamedConfig> resolve_archs(const std::vector<std::string>& names, Index mesh,
                                       std::optional<Index> units, Index round_len);

}  // namespace spw::bench
