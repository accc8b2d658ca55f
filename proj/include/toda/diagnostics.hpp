#pragma once

#include <functional>
#include <string>

namespace toda {

using WarningHandler = std::function<void(const std::string&)>;

/// Installs a sink for non-fatal diagnostics and returns the previous one.
/// The default writes "warning: ..." lines to stderr.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

}  // namespace toda
