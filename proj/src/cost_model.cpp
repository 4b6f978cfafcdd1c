#include "spw/cost_model.hpp"

namespace spw {

std::string_view to_string(FormatFamily f) {
  switch (f) {
    case FormatFamily::EllpackLilCrs: return "ELLPACK/LiL/CRS";
    case FormatFamily::Jad: return "JAD";
    case FormatFamily::CooSll: return "COO/SLL";
    case FormatFamily::InCrs: return "InCRS";
  }
  return "?";
}

double table1_cost(FormatFamily family, double rows, double cols, double density,
                   double block_size) {
  switch (family) {
    case FormatFamily::EllpackLilCrs: return 0.5 * cols * density;
    case FormatFamily::Jad: return cols * density;
    case FormatFamily::CooSll: return 0.5 * rows * cols * density;
    case FormatFamily::InCrs: return block_size / 2.0 + 1.0;
  }
  return 0.0;
}

double ma_ratio_estimate(double cols, double density, double block_size) {
  return cols * density / (block_size + 2.0);
}

double storage_ratio_estimate(double density, double section_size) {
  const double x = 2.0 * density * section_size;
  return x / (x + 1.0);
}

}  // namespace spw
