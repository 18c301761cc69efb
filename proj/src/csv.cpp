#include "entacc/csv.hpp"

#include <fmt/format.h>

namespace entacc {

std::string format_data(double v) { return fmt::format("{:.17g}", v); }

std::string format_summary(double v) { return fmt::format("{:.6g}", v); }

}  // namespace entacc
