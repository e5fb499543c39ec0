#pragma once

#include <string>

#include "cspc/charts.hpp"
#include "cspc/simulate.hpp"

namespace cspc {

struct render_spec {
    int width = 900;
    int height = 360;
    bool show_alpha_line = true;
    bool annotate_flags = true;
    std::string title;
};

/// Deterministic SVG 1.1 rendering of a chart series. Uses only line, circle,
/// rect, text and polyline elements. Flagged points get `flag` (and `spike`)
/// markers; p-value charts draw one horizontal `alpha-line`; interval kinds
/// draw a shaded band between lower and upper.
std::string render_chart(const chart_series& series, const render_spec& spec);

/// Tab-separated comparison table, one row per repetition per chart, rates to
/// 6 significant digits, '\n' line endings.
std::string render_report(const comparison_report& report);

} // namespace cspc
