#pragma once

#include "kcc/selection.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace kcc {

/// Standalone SVG line plot of SSE_k against k. The marked k (the elbow by
/// default, when the curve is long enough) gets a circle carrying data-k.
std::string elbow_svg(const SseCurve& sse, std::optional<int> marked_k = std::nullopt);

void emit_elbow_svg(const SseCurve& sse, const std::filesystem::path& path,
                    std::optional<int> marked_k = std::nullopt);

} // namespace kcc
