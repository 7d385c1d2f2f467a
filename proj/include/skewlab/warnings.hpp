#pragma once

// Warning channel for non-fatal numerical diagnostics (starved bins, fit
// ranges shrunk, missing plateaus). Default sink writes to stderr.

#include <functional>
#include <string>

namespace skewlab {

using WarningSink = std::function<void(const std::string&)>;

/// Installs a sink and returns the previous one. Not thread-safe; install
/// before starting parallel work.
WarningSink set_warning_sink(WarningSink sink);

void warn(const std::string& message);

}  // namespace skewlab
