#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cspc/calibration.hpp"
#include "cspc/core.hpp"
#include "cspc/scores.hpp"

namespace cspc {

enum class chart_kind {
    shewhart,
    conformal_score,
    conformal_interval,
    uncertainty_spike,
    p_value,
};

std::string_view to_string(chart_kind kind);

/// Classical 3-sigma limits around the calibration mean.
struct shewhart_limits {
    double center = 0.0;
    double sigma = 0.0;
    double ucl = 0.0;
    double lcl = 0.0;
};

/// A chart as pure data: points plus whatever limit the kind uses. Every
/// signal flag is recomputable from (kind, limits, point data).
struct chart_series {
    chart_kind kind = chart_kind::shewhart;
    std::vector<chart_point> points;
    std::optional<double> alpha;
    std::optional<double> limit;          ///< conformal threshold q
    std::optional<double> width_limit;    ///< spike chart width threshold
    std::optional<shewhart_limits> shewhart;
};

/// Baseline individuals chart: mean +- 3 * sample std (n-1 denominator) from
/// the calibration set; strict exceedance flags.
chart_series shewhart_chart(std::span<const observation> calibration,
                            std::span<const observation> stream);

/// One point per stream element, value = nonconformity score, flagged when the
/// score exceeds the model threshold.
chart_series conformal_score_chart(const calibration_model& model,
                                   const nonconformity_scorer& scorer,
                                   std::span<const observation> stream);
chart_series conformal_score_chart(const calibration_model& model,
                                   const nonconformity_scorer& scorer,
                                   std::span<const subgroup> stream);

/// Interval [yhat - q, yhat + q] around the model prediction; flagged when the
/// observed y falls outside, which is the same event as |y - yhat| > q.
chart_series conformal_interval_chart(const calibration_model& model,
                                      const predictive_model& predictive,
                                      std::span<const labeled_point> stream);

/// Adaptive interval yhat +- q * spread(x). A point is flagged as an
/// uncertainty spike when its interval width strictly exceeds the
/// ceil((1-width_alpha)(m+1))-th smallest calibration interval width; the
/// limit_exceeded flag (normalized score > q) is carried independently.
chart_series uncertainty_spike_chart(const calibration_model& model,
                                     const predictive_model& predictive,
                                     double width_alpha,
                                     std::span<const labeled_point> calibration,
                                     std::span<const labeled_point> stream);

/// One point per stream element, value = conformal p-value, flagged when
/// p <= alpha.
chart_series p_value_chart(const calibration_model& model,
                           const nonconformity_scorer& scorer, double alpha,
                           std::span<const observation> stream);
chart_series p_value_chart(const calibration_model& model,
                           const nonconformity_scorer& scorer, double alpha,
                           std::span<const subgroup> stream);

/// p-value series over precomputed scores (shared by the detector monitor).
chart_series p_value_series(const calibration_model& model,
                            std::span<const double> scores,
                            std::span<const std::int64_t> indices, double alpha);

} // namespace cspc
