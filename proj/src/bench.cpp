#include "spw/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "spw/cost_model.hpp"
#include "spw/matrix_market.hpp"
#include "spw/spmm.hpp"

namespace spw::bench {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

bool has_incrs_magic(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  unsigned char bytes[8] = {};
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) return false;
  std::uint64_t w = 0;
  for (int k = 0; k < 8; ++k) w |= std::uint64_t{bytes[k]} << (8 * k);
  return w == kIncrsMagic;
}

void print_stats(const MatrixStats& s, std::ostream& os) {
  os << "rows: " << s.rows << "\ncols: " << s.cols << "\nnnz: " << s.nnz
     << "\ndensity: " << num(s.density) << "\nnz_per_row: (" << s.nz_per_row_min << ", "
     << num(s.nz_per_row_mean) << ", " << s.nz_per_row_max << ")\n";
}

// Runs `fn`, mapping exceptions onto exit codes.
template <typename Fn>
int guarded(std::ostream& log, Fn&& fn) {
  try {
    return fn();
  } catch (const UsageError& e) {
    log << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const SimError& e) {
    log << "configuration error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    log << "data error: " << e.what() << '\n';
    return kDataError;
  }
}

json sync_stats_json(const SyncMeshStats& s) {
  return {{"node_rounds", s.node_rounds},
          {"pairs_consumed", s.pairs_consumed},
          {"stall_violations", s.stall_violations},
          {"searches", s.searches},
          {"max_search_comparisons", s.max_search_comparisons},
          {"search_bound_violations", s.search_bound_violations},
          {"node_mismatches", s.node_mismatches}};
}

bool invariants_hold(const SimReport& r) {
  if (r.sync_stats) {
    const auto& s = *r.sync_stats;
    if (s.stall_violations || s.search_bound_violations || s.node_mismatches) return false;
  }
  if (r.fpic_stats && r.fpic_stats->merge_bound_violations) return false;
  return true;
}

const char* kBenefitHeader =
    "dataset,dimension,density,nz_min,nz_mean,nz_max,ma_ratio,ma_ratio_predicted,"
    "storage_ratio,storage_ratio_predicted";
const char* kDesignHeader = "design,units,mesh,bw_kb_per_cycle,macs,buffer_kB";

std::string design_row(const std::string& name, const ArchConfig& cfg, const Resources& r) {
  return name + "," + std::to_string(cfg.unit_count) + "," + std::to_string(cfg.mesh_dim) + "x" +
         std::to_string(cfg.mesh_dim) + "," + num(r.bandwidth_kb_per_cycle) + "," +
         std::to_string(r.mac_units) + "," + num(r.buffer_kB);
}

}  // namespace

std::string DatasetSource::label() const {
  if (path) return path->filename().string();
  if (profile) {
    std::ostringstream os;
    os << "synth-" << profile->rows << "x" << profile->cols << "-d" << num(profile->target_density)
       << "-s" << profile->seed;
    return os.str();
  }
  return "none";
}

json DatasetSource::to_json() const {
  json j;
  if (path) j["path"] = path->string();
  if (profile) {
    j["profile"] = {{"rows", profile->rows},       {"cols", profile->cols},
                    {"density", profile->target_density}, {"nz_min", profile->nz_min},
                    {"nz_mean", profile->nz_mean}, {"nz_max", profile->nz_max},
                    {"seed", profile->seed}};
  }
  j["label"] = label();
  return j;
}

SynthProfile parse_profile(const std::string& text) {
  const auto parts = split(text, text.find(',') != std::string::npos ? ',' : ':');
  auto as_count = [&](const std::string& s) -> std::uint64_t {
    try {
      std::size_t used = 0;
      auto v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError("bad number '" + s + "' in profile '" + text + "'");
    }
  };
  if (text.find(',') != std::string::npos) {
    if (parts.size() != 4) throw UsageError("profile '" + text + "' must be M,N,D,seed");
    double d = 0.0;
    try {
      d = std::stod(parts[2]);
    } catch (const std::exception&) {
      throw UsageError("bad density in profile '" + text + "'");
    }
    auto p = SynthProfile::uniform(as_count(parts[0]), as_count(parts[1]), d, as_count(parts[3]));
    p.validate();
    return p;
  }
  const std::string& name = parts.at(0);
  const Index rows = parts.size() > 1 ? as_count(parts[1]) : 0;
  const std::uint64_t seed = parts.size() > 2 ? as_count(parts[2]) : 1;
  if (name == "amazon") return SynthProfile::amazon(rows ? rows : 300, seed);
  if (name == "belcastro") return SynthProfile::belcastro(rows ? rows : 370, seed);
  if (name == "docword") return SynthProfile::docword(rows ? rows : 700, seed);
  throw UsageError("unknown profile '" + text + "'");
}

CsrMatrix load_dataset(const DatasetSource& src) {
  if (src.path) {
    if (has_incrs_magic(*src.path)) return load_incrs(*src.path).base();
    return coo_to_csr(load_matrix_market(*src.path));
  }
  if (src.profile) return coo_to_csr(generate_synthetic(*src.profile));
  throw UsageError("no dataset given (use --input or --profile)");
}

json to_json(const ArchConfig& cfg) {
  return {{"arch", std::string(to_string(cfg.arch))},
          {"mesh_dim", cfg.mesh_dim},
          {"unit_count", cfg.unit_count},
          {"round_len", cfg.round_len},
          {"buffer_depth", cfg.buffer_depth},
          {"index_bits", cfg.index_bits},
          {"value_bits", cfg.value_bits}};
}

json to_json(const Resources& r) {
  return {{"mac_units", r.mac_units},
          {"buffer_kB", r.buffer_kB},
          {"bandwidth_kb_per_cycle", r.bandwidth_kb_per_cycle}};
}

json to_json(const SimReport& r) {
  json j = {{"config", to_json(r.config)},
            {"total_cycles", r.total_cycles},
            {"per_round_cycles", r.per_round_cycles},
            {"skew_cycles", r.skew_cycles},
            {"buffer_high_water", r.buffer_high_water},
            {"mac_ops", r.mac_ops},
            {"resources", to_json(r.resources)},
            {"checksum", r.checksum()}};
  if (r.sync_stats) j["sync_stats"] = sync_stats_json(*r.sync_stats);
  if (r.fpic_stats) {
    j["fpic_stats"] = {{"single_unit_cycles", r.fpic_stats->single_unit_cycles},
                       {"merge_bound_violations", r.fpic_stats->merge_bound_violations}};
  }
  return j;
}

json ExperimentSpec::to_json() const {
  json j = {{"dataset", dataset.to_json()},
            {"operation", operation},
            {"format", format},
            {"incrs", {{"section_size", incrs.section_size}, {"block_size", incrs.block_size}}},
            {"output", output},
            {"seed", seed},
            {"probes", probes}};
  if (rhs) j["rhs"] = rhs->to_json();
  json archs = json::array();
  for (const auto& a : this->archs) {
    archs.push_back({{"name", a.name}, {"config", bench::to_json(a.config)}});
  }
  j["archs"] = archs;
  return j;
}

std::vector<NamedConfig> resolve_archs(const std::vector<std::string>& names, Index mesh,
                                       std::optional<Index> units, Index round_len) {
  std::vector<NamedConfig> out;
  auto add = [&out](NamedConfig nc) {
    auto same = [&](const NamedConfig& x) { return x.name == nc.name; };
    if (std::none_of(out.begin(), out.end(), same)) out.push_back(std::move(nc));
  };
  auto parity = [&](const std::string& name) {
    for (auto& nc : parity_configs(mesh, round_len)) {
      if (nc.name == name) return nc;
    }
    throw UsageError("no parity design named " + name);
  };
  for (const auto& n : names) {
    if (n == "parity") {
      for (auto& nc : parity_configs(mesh, round_len)) add(nc);
    } else if (n == "fpic-same-bw" || n == "fpic-same-buffer") {
      add(parity(n));
    } else {
      const Arch a = parse_arch(n);
      switch (a) {
        case Arch::SyncMesh: add({"sync", ArchConfig::sync_mesh(mesh, round_len)}); break;
        case Arch::Fpic: add({"fpic", ArchConfig::fpic(units.value_or(1))}); break;
        case Arch::Conventional: add({"conventional", ArchConfig::conventional(mesh)}); break;
      }
    }
  }
  for (const auto& nc : out) nc.config.validate();
  return out;
}

int cmd_convert(const ExperimentSpec& spec, std::ostream& log) {
  return guarded(log, [&] {
    if (spec.output.empty()) throw UsageError("convert needs --out");
    const auto m = load_dataset(spec.dataset);
    const auto stats = matrix_stats(m);
    if (spec.format == "crs") {
      save_matrix_market(spec.output, csr_to_coo(m));
    } else if (spec.format == "incrs") {
      const auto in = build_incrs(m, spec.incrs);
      save_incrs(spec.output, in);
      const double crs = static_cast<double>(crs_words(m));
      log << "counter_words: " << counter_words(in) << "\nstorage_ratio: "
          << num(crs / (crs + static_cast<double>(counter_words(in))))
          << "\nstorage_ratio_predicted: "
          << num(storage_ratio_estimate(stats.density, static_cast<double>(spec.incrs.section_size)))
          << '\n';
    } else {
      throw UsageError("unknown format '" + spec.format + "'");
    }
    print_stats(stats, log);
    log << "wrote: " << spec.output << '\n';
    return kOk;
  });
}

int cmd_stats(const DatasetSource& src, std::ostream& out) {
  return guarded(out, [&] {
    if (src.path && has_incrs_magic(*src.path)) {
      // load_incrs rejects files whose counters disagree with the arrays.
      const auto m = load_incrs(*src.path);
      print_stats(matrix_stats(m.base()), out);
      out << "format: incrs (S=" << m.config().section_size << ", b=" << m.config().block_size
          << ")\ncounters: consistent\n";
      return kOk;
    }
    print_stats(matrix_stats(load_dataset(src)), out);
    return kOk;
  });
}

int cmd_access_bench(const ExperimentSpec& spec, std::ostream& csv, std::ostream& log) {
  return guarded(log, [&] {
    const auto m = load_dataset(spec.dataset);
    const auto stats = matrix_stats(m);
    const auto in = build_incrs(m, spec.incrs);
    const auto meas = measured_ma_ratio(in, spec.probes, spec.seed);

    csv << "# schema: " << kAccessBenchSchema << '\n'
        << "# experiment: " << spec.to_json().dump() << '\n'
        << "dataset,rows,cols,density,nz_min,nz_mean,nz_max,format,probes,element_reads,"
           "pointer_reads,counter_reads,total_reads,ma_ratio,ma_ratio_predicted,storage_ratio,"
           "storage_ratio_predicted\n";
    if (spec.probes == 0) return kOk;

    const double crs = static_cast<double>(crs_words(m));
    const double storage = crs / (crs + static_cast<double>(counter_words(in)));
    const double storage_pred =
        storage_ratio_estimate(stats.density, static_cast<double>(spec.incrs.section_size));
    const double ma_pred = ma_ratio_estimate(static_cast<double>(stats.cols), stats.density,
                                             static_cast<double>(spec.incrs.block_size));
    const std::string prefix = spec.dataset.label() + "," + std::to_string(stats.rows) + "," +
                               std::to_string(stats.cols) + "," + num(stats.density) + "," +
                               std::to_string(stats.nz_per_row_min) + "," +
                               num(stats.nz_per_row_mean) + "," +
                               std::to_string(stats.nz_per_row_max) + ",";
    auto row = [&](const char* fmt, const AccessCounter& c, double ratio, double pred, double st,
                   double st_pred) {
      csv << prefix << fmt << ',' << meas.probes << ',' << c.element_reads << ','
          << c.pointer_reads << ',' << c.counter_reads << ',' << c.total() << ',' << num(ratio)
          << ',' << num(pred) << ',' << num(st) << ',' << num(st_pred) << '\n';
    };
    row("crs", meas.crs, 1.0, 1.0, 1.0, 1.0);
    row("incrs", meas.incrs, meas.ratio, ma_pred, storage, storage_pred);
    log << spec.dataset.label() << ": measured MA ratio " << num(meas.ratio) << ", predicted "
        << num(ma_pred) << '\n';
    return kOk;
  });
}

int cmd_spmm(const ExperimentSpec& spec, std::ostream& log) {
  return guarded(log, [&] {
    const auto a = load_dataset(spec.dataset);
    const auto b = spec.rhs ? load_dataset(*spec.rhs) : transpose(a);
    AccessCounter ctr;
    CsrMatrix c;
    if (spec.format == "incrs") {
      c = spmm(a, build_incrs(b, spec.incrs), ctr);
    } else if (spec.format == "crs") {
      c = spmm(a, b, ctr);
    } else {
      throw UsageError("unknown format '" + spec.format + "'");
    }
    log << "operation: " << (spec.rhs ? "A x B" : "A x A^T") << "\nformat: " << spec.format
        << "\nelement_reads: " << ctr.element_reads << "\npointer_reads: " << ctr.pointer_reads
        << "\ncounter_reads: " << ctr.counter_reads << "\ntotal_reads: " << ctr.total()
        << "\nresult_nnz: " << c.nnz() << "\nchecksum: " << checksum_hex(c) << '\n';
    if (!spec.output.empty()) {
      save_matrix_market(spec.output, csr_to_coo(c));
      log << "wrote: " << spec.output << '\n';
    }
    return kOk;
  });
}

int cmd_sim(const ExperimentSpec& spec, std::ostream& csv, std::ostream* json_out,
            std::ostream& log) {
  return guarded(log, [&]() -> int {
    if (spec.archs.empty()) throw UsageError("sim needs at least one architecture");
    const auto a = load_dataset(spec.dataset);
    const auto b = spec.rhs ? load_dataset(*spec.rhs) : transpose(a);

    std::vector<SimReport> reports;
    for (const auto& nc : spec.archs) {
      reports.push_back(run_simulation(a, b, nc.config));
      log << nc.name << ": " << num(reports.back().total_cycles) << " cycles\n";
    }

    bool ok = true;
    for (std::size_t k = 0; k < reports.size(); ++k) {
      if (reports[k].checksum() != reports.front().checksum()) {
        log << "correctness failure: " << spec.archs[k].name << " result checksum "
            << reports[k].checksum() << " differs from " << spec.archs.front().name << " "
            << reports.front().checksum() << '\n';
        ok = false;
      }
      if (!invariants_hold(reports[k])) {
        log << "correctness failure: " << spec.archs[k].name << " violated a simulator invariant\n";
        ok = false;
      }
    }
    if (!ok) return kCorrectnessFailure;

    double base = reports.front().total_cycles;
    for (std::size_t k = 0; k < reports.size(); ++k) {
      if (spec.archs[k].config.arch == Arch::SyncMesh) {
        base = reports[k].total_cycles;
        break;
      }
    }
    const auto stats = matrix_stats(a);
    csv << "# schema: " << kSimSummarySchema << '\n'
        << "# experiment: " << spec.to_json().dump() << '\n'
        << "arch,dataset,density,total_cycles,normalized_latency\n";
    for (std::size_t k = 0; k < reports.size(); ++k) {
      const double norm = base > 0.0 ? reports[k].total_cycles / base : 1.0;
      csv << spec.archs[k].name << ',' << spec.dataset.label() << ',' << num(stats.density) << ','
          << num(reports[k].total_cycles) << ',' << num(norm) << '\n';
    }

    if (json_out) {
      json doc = {{"schema", kSimReportSchema}, {"experiment", spec.to_json()}};
      json arr = json::array();
      for (std::size_t k = 0; k < reports.size(); ++k) {
        auto j = to_json(reports[k]);
        j["name"] = spec.archs[k].name;
        arr.push_back(std::move(j));
      }
      doc["reports"] = std::move(arr);
      *json_out << doc.dump(2) << '\n';
    }
    return kOk;
  });
}

int cmd_report(const std::vector<std::filesystem::path>& inputs, std::optional<Index> parity_mesh,
               std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    std::vector<std::string> benefit;
    std::vector<std::string> designs;
    auto add_design = [&designs](std::string row) {
      if (std::find(designs.begin(), designs.end(), row) == designs.end()) {
        designs.push_back(std::move(row));
      }
    };

    if (parity_mesh) {
      for (const auto& nc : parity_configs(*parity_mesh)) {
        add_design(design_row(nc.name, nc.config, resource_account(nc.config)));
      }
    }

    for (const auto& path : inputs) {
      std::ifstream in(path);
      if (!in) throw MatrixError("cannot open " + path.string());
      if (path.extension() == ".json") {
        json doc;
        try {
          doc = json::parse(in);
        } catch (const json::exception& e) {
          throw MatrixError(path.string() + ": " + e.what());
        }
        if (doc.value("schema", "") != kSimReportSchema) {
          throw MatrixError(path.string() + ": expected schema " + kSimReportSchema);
        }
        for (const auto& r : doc.at("reports")) {
          ArchConfig cfg;
          const auto& c = r.at("config");
          cfg.arch = parse_arch(c.at("arch").get<std::string>());
          cfg.mesh_dim = c.at("mesh_dim").get<Index>();
          cfg.unit_count = c.at("unit_count").get<Index>();
          Resources res;
          res.mac_units = r.at("resources").at("mac_units").get<std::uint64_t>();
          res.buffer_kB = r.at("resources").at("buffer_kB").get<double>();
          res.bandwidth_kb_per_cycle = r.at("resources").at("bandwidth_kb_per_cycle").get<double>();
          const auto name = r.at("name").get<std::string>();
          add_design(design_row(name, cfg, res));
        }
        continue;
      }

      std::string line;
      if (!std::getline(in, line) || line != std::string("# schema: ") + kAccessBenchSchema) {
        throw MatrixError(path.string() + ": expected schema " + kAccessBenchSchema);
      }
      std::vector<std::string> header;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto cells = split(line, ',');
        if (header.empty()) {
          header = std::move(cells);
          continue;
        }
        if (cells.size() != header.size()) throw MatrixError(path.string() + ": ragged row");
        std::map<std::string, std::string> row;
        for (std::size_t k = 0; k < header.size(); ++k) row[header[k]] = cells[k];
        if (row["format"] != "incrs") continue;
        benefit.push_back(row["dataset"] + "," + row["rows"] + "x" + row["cols"] + "," +
                          row["density"] + "," + row["nz_min"] + "," + row["nz_mean"] + "," +
                          row["nz_max"] + "," + row["ma_ratio"] + "," + row["ma_ratio_predicted"] +
                          "," + row["storage_ratio"] + "," + row["storage_ratio_predicted"]);
      }
    }

    out << "# table: incrs-benefit\n" << kBenefitHeader << '\n';
    for (const auto& r : benefit) out << r << '\n';
    out << "# table: design-parameters\n" << kDesignHeader << '\n';
    for (const auto& d : designs) out << d << '\n';
    return kOk;
  });
}

}  // namespace spw::bench
