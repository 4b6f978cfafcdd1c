#pragma once

#include <filesystem>
#include <iosfwd>

#include "spw/matrix.hpp"

namespace spw {

/// Reads a coordinate-format Matrix Market stream (real or integer field,
/// general or symmetric). Indices become 0-based and symmetric entries are
/// expanded. Throws MatrixError on malformed input.
CooMatrix read_matrix_market(std::istream& in);
CooMatrix load_matrix_market(const std::filesystem::path& path);

/// Writes "%%MatrixMarket matrix coordinate real general" with values in
/// round-trip precision.
void write_matrix_market(std::ostream& out, const CooMatrix& m);
void save_matrix_market(const std::filesystem::path& path, const CooMatrix& m);

}  // namespace spw
