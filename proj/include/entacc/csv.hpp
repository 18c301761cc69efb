#pragma once

#include <string>

namespace entacc {

/// 17 significant digits: lossless for IEEE doubles.
std::string format_data(double v);

/// 6 significant digits for console summaries.
std::string format_summary(double v);

}  // namespace entacc
