#pragma once

#include <cstddef>
#include <functional>
#include <string>

namespace irj {

using WarningHandler = std::function<void(const std::string&)>;

/// Replaces the process-wide warning sink (default: first 20 warnings to stderr).
/// Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

/// Number of warnings emitted since start-up (all handlers).
std::size_t warning_count();

}  // namespace irj
