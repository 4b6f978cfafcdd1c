#include "spw/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

namespace spw {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string_view skip_space(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  return s;
}

template <typename T>
bool next_number(std::string_view& s, T& out) {
  s = skip_space(s);
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{}) return false;
  s.remove_prefix(static_cast<std::size_t>(ptr - first));
  return true;
}

}  // namespace

CooMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw MatrixError("Matrix Market: empty input");

  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") throw MatrixError("Matrix Market: missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw MatrixError("Matrix Market: unsupported object '" + object + "'");
  if (format != "coordinate") {
    throw MatrixError("Matrix Market: only coordinate format is supported, got '" + format + "'");
  }
  if (field == "pattern") {
    throw MatrixError("Matrix Market: pattern-only files carry no values and are not supported");
  }
  if (field != "real" && field != "integer" && field != "double") {
    throw MatrixError("Matrix Market: unsupported field '" + field + "'");
  }
  const bool symmetric = symmetry == "symmetric";
  if (!symmetric && symmetry != "general") {
    throw MatrixError("Matrix Market: unsupported symmetry '" + symmetry + "'");
  }

  do {
    if (!std::getline(in, line)) throw MatrixError("Matrix Market: missing size line");
  } while (line.empty() || line[0] == '%' ||
           skip_space(line).empty());

  std::string_view size_line(line);
  Index rows = 0, cols = 0, entries = 0;
  if (!next_number(size_line, rows) || !next_number(size_line, cols) ||
      !next_number(size_line, entries)) {
    throw MatrixError("Matrix Market: malformed size line '" + line + "'");
  }
  if (symmetric && rows != cols) throw MatrixError("Matrix Market: symmetric matrix must be square");

  std::vector<Triplet> triplets;
  triplets.reserve(symmetric ? 2 * entries : entries);
  Index seen = 0;
  while (seen < entries && std::getline(in, line)) {
    std::string_view s(line);
    if (skip_space(s).empty() || s.front() == '%') continue;
    Index r = 0, c = 0;
    double v = 0.0;
    if (!next_number(s, r) || !next_number(s, c) || !next_number(s, v)) {
      throw MatrixError("Matrix Market: malformed entry '" + line + "'");
    }
    if (r < 1 || c < 1 || r > rows || c > cols) {
      throw MatrixError("Matrix Market: entry (" + std::to_string(r) + ", " +
                        std::to_string(c) + ") out of range");
    }
    triplets.push_back({r - 1, c - 1, v});
    if (symmetric && r != c) triplets.push_back({c - 1, r - 1, v});
    ++seen;
  }
  if (seen != entries) {
    throw MatrixError("Matrix Market: expected " + std::to_string(entries) +
                      " entries, found " + std::to_string(seen));
  }
  return CooMatrix(rows, cols, std::move(triplets));
}

CooMatrix load_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MatrixError("cannot open " + path.string());
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const CooMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
  char buf[64];
  for (const auto& t : m.triplets()) {
    auto res = std::to_chars(buf, buf + sizeof buf, t.value);
    out << t.row + 1 << ' ' << t.col + 1 << ' '
        << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
  }
}

void save_matrix_market(const std::filesystem::path& path, const CooMatrix& m) {
  std::ofstream out(path);
  if (!out) throw MatrixError("cannot write " + path.string());
  write_matrix_market(out, m);
  if (!out) throw MatrixError("write failed for " + path.string());
}

}  // namespace spw
