#pragma once

#include <string>

#include "mmt/builders.hpp"
#include "mmt/measure.hpp"

namespace mmt {

// Two horizontal density strips (mu above, nu below), iteration slices
// shaded by a deterministic grayscale ramp. Pure rect elements; byte-stable
// for identical inputs.
std::string render_barcode_svg(const BarcodeTrace& trace, const Measure& mu, const Measure& nu);

}  // namespace mmt
