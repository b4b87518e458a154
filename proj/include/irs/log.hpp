// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <string_view>

namespace irs {

// Non-fatal diagnostics (clamped table lookups, dark IRS links, ...).
// The default sink writes to stderr; tests and the CLI can swap it out.
using WarningSink = std::function<void(std::string_view)>;

void warn(std::string_view message);
WarningSink set_warning_sink(WarningSink sink);
std::size_t warning_count();

}  // namespace irs
