// io_util.hpp - deterministic number formatting for CSV output.

#pragma once

#include <string>

namespace rfpa {

/// Shortest round-trip decimal form; locale-independent and stable, so
/// identical runs produce byte-identical files.
std::string format_double(double v);

} // namespace rfpa
