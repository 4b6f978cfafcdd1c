#pragma once

#include <string_view>

#include "spw/matrix.hpp"

// Analytical memory-access estimates for locating one arbitrary element,
// and the InCRS benefit/cost ratios derived from them.

namespace spw {

enum class FormatFamily {
  EllpackLilCrs,  // scan the row's nonzeros before the element
  Jad,            // row nonzeros are strided; each one located via jadPtr
  CooSll,         // no pointers; scan all nonzeros before the element
  InCrs,          // one counter-vector read plus half a block
};

std::string_view to_string(FormatFamily f);

/// Expected memory accesses to locate one element of an M x N matrix with
/// density D. `block_size` is only used by the InCrs family.
double table1_cost(FormatFamily family, double rows, double cols, double density,
                   double block_size = 32.0);

/// Expected access reduction of InCRS over CRS for reading one column:
/// N*D / (b + 2).
double ma_ratio_estimate(double cols, double density, double block_size);

/// CRS storage over InCRS storage: 2*D*S / (2*D*S + 1).
double storage_ratio_estimate(double density, double section_size);

}  // namespace spw
