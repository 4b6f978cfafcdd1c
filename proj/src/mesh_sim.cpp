#include "spw/mesh_sim.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "spw/spmm.hpp"

namespace spw {

namespace {

constexpr Index ceil_div(Index a, Index b) { return (a + b - 1) / b; }

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

Index parse_count(const std::string& key, const std::string& value) {
  try {
    if (value.empty() || !std::isdigit(static_cast<unsigned char>(value.front()))) {
      throw std::invalid_argument(value);
    }
    std::size_t used = 0;
    const auto v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return static_cast<Index>(v);
  } catch (const std::exception&) {
    throw SimError("config: '" + key + "' expects a non-negative integer, got '" + value + "'");
  }
}

void append_operand(NodeState& s, Operand op) {
  if (s.buffer.size() >= s.depth) {
    throw SimError("operand buffer overflow (depth " + std::to_string(s.depth) + ")");
  }
  if (!s.buffer.empty() && s.buffer.back().index >= op.index) {
    throw SimError("operand buffer order violated");
  }
  s.buffer.push_back(op);
  s.high_water = std::max<Index>(s.high_water, s.buffer.size());
}

// Three-way binary search; each probe counts as one comparison.
const Operand* search_buffer(const std::vector<Operand>& buf, Index key, unsigned& comparisons) {
  Index lo = 0, hi = buf.size();
  while (lo < hi) {
    const Index mid = lo + (hi - lo) / 2;
    ++comparisons;
    if (buf[mid].index == key) return &buf[mid];
    if (buf[mid].index < key) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return nullptr;
}

// Rows of A and columns of B share this view: the operands of one stream
// that fall in one round window.
struct Window {
  const Index* idx = nullptr;
  const double* val = nullptr;
  Index n = 0;

  Operand at(Index t) const { return t < n ? Operand{idx[t], val[t]} : Operand::sentinel(); }
};

// Advances `cursor` past every index below `limit`, returning the window.
Window take_window(std::span<const Index> idx, std::span<const double> val, Index& cursor,
                   Index limit) {
  const Index begin = cursor;
  while (cursor < idx.size() && idx[cursor] < limit) ++cursor;
  return {idx.data() + begin, val.data() + begin, cursor - begin};
}

struct ReferenceDot {
  double value = 0.0;
  double magnitude = 0.0;
};

ReferenceDot reference_dot(SparseView a, SparseView b) {
  ReferenceDot r;
  Index i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a.indices[i] == b.indices[j]) {
      r.value += a.values[i] * b.values[j];
      r.magnitude += std::abs(a.values[i] * b.values[j]);
      ++i;
      ++j;
    } else if (a.indices[i] < b.indices[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return r;
}

void check_inner(const CsrMatrix& a, const CsrMatrix& b) {
  if (a.cols() != b.rows()) {
    throw MatrixError("simulation: inner dimensions differ (" + std::to_string(a.cols()) +
                      " vs " + std::to_string(b.rows()) + ")");
  }
}

void check_arch(const ArchConfig& cfg, Arch expected) {
  cfg.validate();
  if (cfg.arch != expected) {
    throw SimError("configuration is for " + std::string(to_string(cfg.arch)) + ", expected " +
                   std::string(to_string(expected)));
  }
}

double kilo(double bits) { return bits / 1024.0; }

}  // namespace

std::string_view to_string(Arch a) {
  switch (a) {
    case Arch::Conventional: return "conventional";
    case Arch::Fpic: return "fpic";
    case Arch::SyncMesh: return "sync";
  }
  return "?";
}

Arch parse_arch(std::string_view s) {
  std::string v(s);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "sync" || v == "syncmesh" || v == "sync-mesh") return Arch::SyncMesh;
  if (v == "fpic") return Arch::Fpic;
  if (v == "conventional" || v == "conv") return Arch::Conventional;
  throw SimError("unknown architecture '" + std::string(s) + "'");
}

ArchConfig ArchConfig::sync_mesh(Index n_synch, Index round_len) {
  ArchConfig c;
  c.arch = Arch::SyncMesh;
  c.mesh_dim = n_synch;
  c.round_len = round_len;
  c.buffer_depth = round_len;
  return c;
}

ArchConfig ArchConfig::fpic(Index units) {
  ArchConfig c;
  c.arch = Arch::Fpic;
  c.mesh_dim = kFpicMeshDim;
  c.unit_count = units;
  return c;
}

ArchConfig ArchConfig::conventional(Index n_conv) {
  ArchConfig c;
  c.arch = Arch::Conventional;
  c.mesh_dim = n_conv;
  return c;
}

void ArchConfig::validate() const {
  if (mesh_dim == 0 || unit_count == 0) throw SimError("mesh_dim and unit_count must be positive");
  if (index_bits == 0 || value_bits == 0) throw SimError("bit widths must be positive");
  switch (arch) {
    case Arch::Fpic:
      if (mesh_dim != kFpicMeshDim) throw SimError("FPIC units are fixed at 8x8");
      break;
    case Arch::SyncMesh:
      if (round_len == 0) throw SimError("round length must be positive");
      if (buffer_depth != round_len) {
        throw SimError("synchronized mesh requires buffer_depth == round_len");
      }
      if (unit_count != 1) throw SimError("synchronized mesh is a single unit");
      break;
    case Arch::Conventional:
      if (unit_count != 1) throw SimError("conventional mesh is a single unit");
      break;
  }
}

ArchConfig parse_arch_config(std::istream& in) {
  ArchConfig cfg;
  bool depth_given = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw SimError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(std::string_view(body).substr(0, eq));
    const auto value = trim(std::string_view(body).substr(eq + 1));
    if (key == "arch") {
      cfg.arch = parse_arch(value);
    } else if (key == "mesh_dim") {
      cfg.mesh_dim = parse_count(key, value);
    } else if (key == "unit_count") {
      cfg.unit_count = parse_count(key, value);
    } else if (key == "round_len") {
      cfg.round_len = parse_count(key, value);
    } else if (key == "buffer_depth") {
      cfg.buffer_depth = parse_count(key, value);
      depth_given = true;
    } else if (key == "index_bits") {
      cfg.index_bits = static_cast<unsigned>(parse_count(key, value));
    } else if (key == "value_bits") {
      cfg.value_bits = static_cast<unsigned>(parse_count(key, value));
    } else {
      throw SimError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (!depth_given) cfg.buffer_depth = cfg.round_len;
  if (cfg.arch == Arch::Fpic) cfg.mesh_dim = kFpicMeshDim;
  cfg.validate();
  return cfg;
}

ArchConfig load_arch_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SimError("cannot open " + path.string());
  return parse_arch_config(in);
}

std::string format_arch_config(const ArchConfig& cfg) {
  std::ostringstream os;
  os << "arch = " << to_string(cfg.arch) << '\n'
     << "mesh_dim = " << cfg.mesh_dim << '\n'
     << "unit_count = " << cfg.unit_count << '\n'
     << "round_len = " << cfg.round_len << '\n'
     << "buffer_depth = " << cfg.buffer_depth << '\n'
     << "index_bits = " << cfg.index_bits << '\n'
     << "value_bits = " << cfg.value_bits << '\n';
  return os.str();
}

unsigned search_comparison_bound(Index depth) {
  return depth <= 1 ? 0U : static_cast<unsigned>(std::bit_width(depth - 1));
}

StepOutcome sync_node_step(NodeState& s, Operand a, Operand b) {
  StepOutcome out;
  if (a.is_sentinel() && b.is_sentinel()) return out;

  if (a.index == b.index) {
    s.c += a.value * b.value;
    out.macs = 1;
    s.reset_buffer();
    return out;
  }

  // The smaller operand is matched against the buffer if the buffer holds
  // the other stream; the larger one is buffered.
  const bool a_larger = a.index > b.index;
  const BufferFlag larger_flag = a_larger ? BufferFlag::A : BufferFlag::B;
  const Operand& small = a_larger ? b : a;
  const Operand& large = a_larger ? a : b;

  if (s.flag == larger_flag) {
    out.searched = true;
    if (const Operand* hit = search_buffer(s.buffer, small.index, out.comparisons)) {
      s.c += hit->value * small.value;
      out.macs = 1;
    }
  } else {
    s.reset_buffer();
    s.flag = larger_flag;
  }
  if (!large.is_sentinel()) append_operand(s, large);
  if (s.buffer.empty()) s.flag = BufferFlag::Unset;
  return out;
}

std::uint64_t pipeline_skew(const ArchConfig& cfg) { return 2 * cfg.mesh_dim - 2; }

SimReport run_sync_mesh(const CsrMatrix& a, const CsrMatrix& b, const ArchConfig& cfg) {
  check_arch(cfg, Arch::SyncMesh);
  check_inner(a, b);
  const auto bt = csr_to_ccs(b);
  const Index n = cfg.mesh_dim;
  const Index R = cfg.round_len;
  const Index inner = a.cols();
  const Index rounds = ceil_div(inner, R);
  const unsigned bound = search_comparison_bound(cfg.buffer_depth);
  const std::uint64_t skew = pipeline_skew(cfg);

  SimReport rep;
  rep.config = cfg;
  rep.resources = resource_account(cfg);
  SyncMeshStats st;
  std::vector<Triplet> out;

  std::vector<NodeState> nodes;
  std::vector<Index> row_cursor(n), col_cursor(n);
  std::vector<Window> row_win(n), col_win(n);

  for (Index r0 = 0; r0 < a.rows(); r0 += n) {
    const Index tile_rows = std::min(n, a.rows() - r0);
    for (Index c0 = 0; c0 < b.cols(); c0 += n) {
      const Index tile_cols = std::min(n, b.cols() - c0);
      nodes.assign(tile_rows * tile_cols, NodeState(cfg.buffer_depth));
      std::fill(row_cursor.begin(), row_cursor.end(), 0);
      std::fill(col_cursor.begin(), col_cursor.end(), 0);

      for (Index k = 0; k < rounds; ++k) {
        const Index limit = (k + 1) * R;
        Index len = 0;
        for (Index r = 0; r < tile_rows; ++r) {
          row_win[r] = take_window(a.row_indices(r0 + r), a.row_values(r0 + r), row_cursor[r], limit);
          len = std::max(len, row_win[r].n);
        }
        for (Index c = 0; c < tile_cols; ++c) {
          col_win[c] = take_window(bt.col_rows(c0 + c), bt.col_values(c0 + c), col_cursor[c], limit);
          len = std::max(len, col_win[c].n);
        }
        if (len == 0) continue;  // no feeder has an operand in this window
        rep.per_round_cycles.push_back(len);
        rep.skew_cycles += skew;

        for (Index r = 0; r < tile_rows; ++r) {
          for (Index c = 0; c < tile_cols; ++c) {
            NodeState& node = nodes[r * tile_cols + c];
            node.reset_buffer();
            ++st.node_rounds;
            const Window& wa = row_win[r];
            const Window& wb = col_win[c];
            // With one side empty every step is a sentinel comparison that
            // neither buffers nor matches.
            Index consumed = len;
            if (wa.n != 0 && wb.n != 0) {
              consumed = 0;
              for (Index t = 0; t < len; ++t) {
                const auto step = sync_node_step(node, wa.at(t), wb.at(t));
                ++consumed;
                rep.mac_ops += step.macs;
                if (step.searched) {
                  ++st.searches;
                  st.max_search_comparisons = std::max(st.max_search_comparisons, step.comparisons);
                  if (step.comparisons > bound) ++st.search_bound_violations;
                }
              }
            }
            st.pairs_consumed += consumed;
            if (consumed != len) ++st.stall_violations;
            rep.buffer_high_water = std::max<std::uint64_t>(rep.buffer_high_water, node.high_water);
          }
        }
      }

      for (Index r = 0; r < tile_rows; ++r) {
        for (Index c = 0; c < tile_cols; ++c) {
          const double got = nodes[r * tile_cols + c].c;
          const auto ref = reference_dot(row_view(a, r0 + r), column_view(bt, c0 + c));
          if (std::abs(got - ref.value) > 1e-12 * ref.magnitude) ++st.node_mismatches;
          if (got != 0.0) out.push_back({r0 + r, c0 + c, got});
        }
      }
    }
  }

  std::uint64_t sum = 0;
  for (auto c : rep.per_round_cycles) sum += c;
  rep.total_cycles = static_cast<double>(sum + rep.skew_cycles);
  rep.result = coo_to_csr(CooMatrix(a.rows(), b.cols(), std::move(out)));
  rep.sync_stats = st;
  return rep;
}

SimReport run_fpic(const CsrMatrix& a, const CsrMatrix& b, const ArchConfig& cfg) {
  check_arch(cfg, Arch::Fpic);
  check_inner(a, b);
  const auto bt = csr_to_ccs(b);
  const Index n = cfg.mesh_dim;

  SimReport rep;
  rep.config = cfg;
  rep.resources = resource_account(cfg);
  FpicStats st;
  std::vector<Triplet> out;

  for (Index r0 = 0; r0 < a.rows(); r0 += n) {
    for (Index c0 = 0; c0 < b.cols(); c0 += n) {
      std::uint64_t tile = 0;
      for (Index r = r0; r < std::min(r0 + n, a.rows()); ++r) {
        const auto av = row_view(a, r);
        for (Index c = c0; c < std::min(c0 + n, b.cols()); ++c) {
          const auto bv = column_view(bt, c);
          const auto d = sparse_dot_alg1(av, bv);
          tile = std::max<std::uint64_t>(tile, d.cycles);
          rep.mac_ops += d.macs;
          if (std::max(d.a_consumed, d.b_consumed) > d.cycles || d.cycles > av.size() + bv.size()) {
            ++st.merge_bound_violations;
          }
          if (d.value != 0.0) out.push_back({r, c, d.value});
        }
      }
      rep.per_round_cycles.push_back(tile);
      st.single_unit_cycles += tile;
    }
  }

  rep.total_cycles = static_cast<double>(st.single_unit_cycles) / static_cast<double>(cfg.unit_count);
  rep.result = coo_to_csr(CooMatrix(a.rows(), b.cols(), std::move(out)));
  rep.fpic_stats = st;
  return rep;
}

SimReport run_conventional(const CsrMatrix& a, const CsrMatrix& b, const ArchConfig& cfg) {
  check_arch(cfg, Arch::Conventional);
  check_inner(a, b);
  const Index n = cfg.mesh_dim;
  const Index inner = a.cols();

  SimReport rep;
  rep.config = cfg;
  rep.resources = resource_account(cfg);
  std::vector<Triplet> out;

  // Zero-padded operand panels for one tile: A rows (n x K), B columns
  // stored transposed (n x K) so both are read along K.
  std::vector<double> pa(n * inner), pb(n * inner), acc(n * n);
  for (Index r0 = 0; r0 < a.rows(); r0 += n) {
    std::fill(pa.begin(), pa.end(), 0.0);
    const Index tile_rows = std::min(n, a.rows() - r0);
    for (Index r = 0; r < tile_rows; ++r) {
      auto idx = a.row_indices(r0 + r);
      auto val = a.row_values(r0 + r);
      for (Index p = 0; p < idx.size(); ++p) pa[r * inner + idx[p]] = val[p];
    }
    for (Index c0 = 0; c0 < b.cols(); c0 += n) {
      std::fill(pb.begin(), pb.end(), 0.0);
      std::fill(acc.begin(), acc.end(), 0.0);
      const Index tile_cols = std::min(n, b.cols() - c0);
      for (Index k = 0; k < inner; ++k) {
        auto idx = b.row_indices(k);
        auto val = b.row_values(k);
        auto first = std::lower_bound(idx.begin(), idx.end(), c0);
        for (auto it = first; it != idx.end() && *it < c0 + tile_cols; ++it) {
          pb[(*it - c0) * inner + k] = val[static_cast<Index>(it - idx.begin())];
        }
      }

      // Row r of A enters r cycles late and column c of B c cycles late, so
      // node (r, c) sees operand k at cycle k + r + c.
      std::uint64_t cycles = 0;
      for (Index t = 0;; ++t) {
        bool active = false;
        for (Index r = 0; r < n && r <= t; ++r) {
          const Index c_hi = std::min(n - 1, t - r);
          const Index c_lo = t - r + 1 > inner ? t - r + 1 - inner : 0;
          for (Index c = c_lo; c <= c_hi; ++c) {
            const Index k = t - r - c;
            acc[r * n + c] += pa[r * inner + k] * pb[c * inner + k];
            active = true;
          }
        }
        if (!active) break;
        cycles = t + 1;
      }
      rep.per_round_cycles.push_back(cycles);
      rep.mac_ops += static_cast<std::uint64_t>(tile_rows) * tile_cols * inner;

      for (Index r = 0; r < tile_rows; ++r) {
        for (Index c = 0; c < tile_cols; ++c) {
          if (acc[r * n + c] != 0.0) out.push_back({r0 + r, c0 + c, acc[r * n + c]});
        }
      }
    }
  }

  std::uint64_t sum = 0;
  for (auto c : rep.per_round_cycles) sum += c;
  rep.total_cycles = static_cast<double>(sum);
  rep.result = coo_to_csr(CooMatrix(a.rows(), b.cols(), std::move(out)));
  return rep;
}

SimReport run_simulation(const CsrMatrix& a, const CsrMatrix& b, const ArchConfig& cfg) {
  switch (cfg.arch) {
    case Arch::SyncMesh: return run_sync_mesh(a, b, cfg);
    case Arch::Fpic: return run_fpic(a, b, cfg);
    case Arch::Conventional: return run_conventional(a, b, cfg);
  }
  throw SimError("unknown architecture");
}

std::uint64_t conventional_cycles(Index rows, Index cols, Index inner, Index n_conv) {
  if (inner == 0) return 0;
  const std::uint64_t tiles = ceil_div(rows, n_conv) * ceil_div(cols, n_conv);
  return tiles * (inner + 2 * n_conv - 2);
}

ParitySizing parity_sizing(Index n_synch, unsigned index_bits, unsigned value_bits) {
  if (n_synch == 0 || index_bits == 0 || value_bits == 0) {
    throw SimError("parity sizing needs a positive mesh size and bit widths");
  }
  const double n = static_cast<double>(n_synch);
  const unsigned total = index_bits + value_bits;
  ParitySizing p;
  p.k_fpic_same_bw = n / static_cast<double>(kFpicMeshDim);
  p.k_fpic_same_buffer = n * n / (2.0 * kFpicMeshDim * kFpicMeshDim);
  p.n_conv = static_cast<double>(total) * n / value_bits;
  p.integral = n_synch % kFpicMeshDim == 0 &&
               (n_synch * n_synch) % (2 * kFpicMeshDim * kFpicMeshDim) == 0 &&
               (total * n_synch) % value_bits == 0;
  return p;
}

Resources resource_account(const ArchConfig& cfg) {
  cfg.validate();
  const double w_tot = cfg.total_bits();
  const double n = static_cast<double>(cfg.mesh_dim);
  Resources r;
  switch (cfg.arch) {
    case Arch::SyncMesh:
      r.mac_units = cfg.mesh_dim * cfg.mesh_dim;
      r.buffer_kB = kilo(n * n * static_cast<double>(cfg.buffer_depth) * w_tot / 8.0);
      r.bandwidth_kb_per_cycle = kilo(2.0 * n * w_tot);
      break;
    case Arch::Fpic: {
      const double k = static_cast<double>(cfg.unit_count);
      const double buffers = 2.0 * kFpicMeshDim * kFpicMeshDim;  // one per row and column pairing
      r.mac_units = cfg.unit_count * kFpicMeshDim * kFpicMeshDim;
      r.buffer_kB = kilo(k * buffers * kFpicBufferEntries * w_tot / 8.0);
      r.bandwidth_kb_per_cycle = kilo(2.0 * kFpicMeshDim * k * w_tot);
      break;
    }
    case Arch::Conventional:
      // Dense operands carry no index field.
      r.mac_units = cfg.mesh_dim * cfg.mesh_dim;
      r.buffer_kB = 0.0;
      r.bandwidth_kb_per_cycle = kilo(2.0 * n * cfg.value_bits);
      break;
  }
  return r;
}

std::vector<NamedConfig> parity_configs(Index n_synch, Index round_len, unsigned index_bits,
                                        unsigned value_bits) {
  const auto p = parity_sizing(n_synch, index_bits, value_bits);
  if (!p.integral) {
    throw SimError("mesh size " + std::to_string(n_synch) + " has no integral FPIC/conventional parity");
  }
  auto sync = ArchConfig::sync_mesh(n_synch, round_len);
  auto same_bw = ArchConfig::fpic(static_cast<Index>(p.k_fpic_same_bw));
  auto same_buf = ArchConfig::fpic(static_cast<Index>(p.k_fpic_same_buffer));
  auto conv = ArchConfig::conventional(static_cast<Index>(p.n_conv));
  for (auto* c : {&sync, &same_bw, &same_buf, &conv}) {
    c->index_bits = index_bits;
    c->value_bits = value_bits;
  }
  return {{"sync", sync}, {"fpic-same-bw", same_bw}, {"fpic-same-buffer", same_buf}, {"conventional", conv}};
}

}  // namespace spw
