#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spw/matrix.hpp"

// Cycle-level models of three systolic matrix-multiply architectures:
//
//   Conventional  dense N_conv x N_conv output-stationary mesh; zeros cost
//                 cycles like nonzeros.
//   FPIC          8x8 units whose nodes merge their own (row, column) pair
//                 independently; k units are modelled as perfect division.
//   SyncMesh      N_synch x N_synch comparator mesh. Operands are shared
//                 along mesh rows/columns and stream in index windows
//                 ("rounds") of width R; each node keeps an operand buffer
//                 and flag so it can consume one pair every cycle.
//
// Every operation costs one cycle. Tiles run back to back on one unit.

namespace spw {

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Arch { Conventional, Fpic, SyncMesh };

std::string_view to_string(Arch a);
/// Accepts "sync", "syncmesh", "fpic", "conventional", "conv".
Arch parse_arch(std::string_view s);

inline constexpr Index kFpicMeshDim = 8;
inline constexpr Index kFpicBufferEntries = 32;

struct ArchConfig {
  Arch arch = Arch::SyncMesh;
  Index mesh_dim = 64;      // N_synch, N_conv, or 8 for FPIC
  Index unit_count = 1;     // k_FPIC; 1 for the other architectures
  Index round_len = 32;     // R
  Index buffer_depth = 32;  // Depth_op
  unsigned index_bits = 16;
  unsigned value_bits = 32;

  unsigned total_bits() const { return index_bits + value_bits; }

  static ArchConfig sync_mesh(Index n_synch, Index round_len = 32);
  static ArchConfig fpic(Index units);
  static ArchConfig conventional(Index n_conv);

  /// Throws SimError on an inconsistent configuration.
  void validate() const;

  friend bool operator==(const ArchConfig&, const ArchConfig&) = default;
};

/// Plain-text "key = value" lines; '#' starts a comment. Keys: arch,
/// mesh_dim, unit_count, round_len, buffer_depth, index_bits, value_bits.
/// buffer_depth defaults to round_len when omitted.
ArchConfig parse_arch_config(std::istream& in);
ArchConfig load_arch_config(const std::filesystem::path& path);
std::string format_arch_config(const ArchConfig& cfg);

// ---------------------------------------------------------------------------
// Synchronized-mesh node

inline constexpr Index kSentinelIndex = std::numeric_limits<Index>::max();

struct Operand {
  Index index = kSentinelIndex;
  double value = 0.0;

  static constexpr Operand sentinel() { return {}; }
  bool is_sentinel() const { return index == kSentinelIndex; }
};

enum class BufferFlag { Unset, A, B };

/// Comparator node: accumulator, sorted operand buffer and a flag telling
/// which stream the buffer holds. The flag is Unset exactly when the
/// buffer is empty.
struct NodeState {
  explicit NodeState(Index depth = 32) : depth(depth) { buffer.reserve(depth); }

  double c = 0.0;
  std::vector<Operand> buffer;
  BufferFlag flag = BufferFlag::Unset;
  Index depth;
  Index high_water = 0;

  void reset_buffer() {
    buffer.clear();
    flag = BufferFlag::Unset;
  }
};

struct StepOutcome {
  unsigned macs = 0;
  bool searched = false;
  unsigned comparisons = 0;  // buffer-search comparisons this cycle
};

/// One cycle of index matching. Both operands are always consumed; the
/// larger-index operand is buffered on a mismatch, and the smaller one is
/// looked up in the buffer when the buffer holds the other stream. A
/// sentinel operand marks an exhausted stream and is never buffered.
/// Throws SimError if the buffer would exceed its depth.
StepOutcome sync_node_step(NodeState& state, Operand a, Operand b);

/// Worst-case comparisons allowed per buffer search: ceil(log2(depth)).
unsigned search_comparison_bound(Index depth);

// ---------------------------------------------------------------------------
// Runs

struct Resources {
  std::uint64_t mac_units = 0;
  double buffer_kB = 0.0;
  double bandwidth_kb_per_cycle = 0.0;

  friend bool operator==(const Resources&, const Resources&) = default;
};

/// Invariant monitors of a synchronized-mesh run. Every *_violations and
/// node_mismatches counter is zero for a correct simulation.
struct SyncMeshStats {
  std::uint64_t node_rounds = 0;
  std::uint64_t pairs_consumed = 0;
  std::uint64_t stall_violations = 0;
  std::uint64_t searches = 0;
  unsigned max_search_comparisons = 0;
  std::uint64_t search_bound_violations = 0;
  std::uint64_t node_mismatches = 0;
};

struct FpicStats {
  std::uint64_t single_unit_cycles = 0;
  std::uint64_t merge_bound_violations = 0;
};

struct SimReport {
  ArchConfig config;
  double total_cycles = 0.0;
  /// SyncMesh: slowest-feeder cycles of each non-empty (tile, round).
  /// FPIC and Conventional: cycles of each tile.
  std::vector<std::uint64_t> per_round_cycles;
  std::uint64_t skew_cycles = 0;
  std::uint64_t buffer_high_water = 0;
  std::uint64_t mac_ops = 0;
  Resources resources;
  CsrMatrix result;
  std::optional<SyncMeshStats> sync_stats;
  std::optional<FpicStats> fpic_stats;

  std::string checksum() const { return checksum_hex(result); }
};

/// Wavefront fill/drain charged once per non-empty round: 2 * mesh_dim - 2.
std::uint64_t pipeline_skew(const ArchConfig& cfg);

SimReport run_sync_mesh(const CsrMatrix& a, const CsrMatrix& b, const ArchConfig& cfg);
SimReport run_fpic(const CsrMatrix& a, const CsrMatrix& b, const ArchConfig& cfg);
SimReport run_conventional(const CsrMatrix& a, const CsrMatrix& b, const ArchConfig& cfg);
/// Dispatches on cfg.arch.
SimReport run_simulation(const CsrMatrix& a, const CsrMatrix& b, const ArchConfig& cfg);

/// Analytical conventional-mesh latency: tiles * (K + 2 * N_conv - 2).
std::uint64_t conventional_cycles(Index rows, Index cols, Index inner, Index n_conv);

// ---------------------------------------------------------------------------
// Sizing and resources

struct ParitySizing {
  double k_fpic_same_bw = 0.0;      // 2 N_synch W = 2 * 8 * k W
  double k_fpic_same_buffer = 0.0;  // N_synch^2 = 2 * 8^2 * k
  double n_conv = 0.0;              // (W_tot / W_val) * N_synch
  bool integral = true;             // false when any value is fractional
};

/// Throws SimError when n_synch is zero or a width is zero.
ParitySizing parity_sizing(Index n_synch, unsigned index_bits = 16, unsigned value_bits = 32);

Resources resource_account(const ArchConfig& cfg);

struct NamedConfig {
  std::string name;
  ArchConfig config;
};

/// SyncMesh plus its FPIC-same-BW, FPIC-same-buffer and conventional
/// companions. Throws SimError when the parity sizes are not integral.
std::vector<NamedConfig> parity_configs(Index n_synch, Index round_len = 32,
                                        unsigned index_bits = 16, unsigned value_bits = 32);

}  // namespace spw
