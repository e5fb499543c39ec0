#include "cspc/charts.hpp"

#include <algorithm>
#include <cmath>

#include "cspc/kernels.hpp"

namespace cspc {

std::string_view to_string(chart_kind kind) {
    switch (kind) {
    case chart_kind::shewhart: return "shewhart";
    case chart_kind::conformal_score: return "conformal_score";
    case chart_kind::conformal_interval: return "conformal_interval";
    case chart_kind::uncertainty_spike: return "uncertainty_spike";
    case chart_kind::p_value: return "p_value";
    }
    throw std::invalid_argument("unknown chart kind");
}

chart_series shewhart_chart(std::span<const observation> calibration,
                            std::span<const observation> stream) {
    if (calibration.size() < 2)
        throw std::invalid_argument("need >=2 points for std");
    double sum = 0.0;
    for (const auto& o : calibration) {
        require_finite(o.value, "calibration value");
        sum += o.value;
    }
    const double n = static_cast<double>(calibration.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& o : calibration) {
        const double d = o.value - mean;
        ss += d * d;
    }
    const double sigma = std::sqrt(ss / (n - 1.0));

    chart_series series;
    series.kind = chart_kind::shewhart;
    series.shewhart = shewhart_limits{mean, sigma, mean + 3.0 * sigma, mean - 3.0 * sigma};
    series.points.reserve(stream.size());
    for (const auto& o : stream) {
        require_finite(o.value, "stream value");
        chart_point p{o.index, o.value, {}, {}, false, false};
        p.limit_exceeded = o.value > series.shewhart->ucl || o.value < series.shewhart->lcl;
        series.points.push_back(p);
    }
    return series;
}

namespace {

void require_scorer_match(const calibration_model& model, const nonconformity_scorer& scorer) {
    if (model.scorer_id() != scorer.id())
        throw std::invalid_argument("calibration mismatch");
}

template <class Item>
chart_series score_chart_impl(const calibration_model& model,
                              const nonconformity_scorer& scorer,
                              std::span<const Item> stream) {
    require_scorer_match(model, scorer);
    const auto scores = kernels::score_stream(scorer, stream);
    chart_series series;
    series.kind = chart_kind::conformal_score;
    series.limit = model.threshold();
    series.alpha = model.alpha();
    series.points.reserve(stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i)
        series.points.push_back({stream[i].index, scores[i], {}, {},
                                 is_out_of_control(model, scores[i]), false});
    return series;
}

template <class Item>
chart_series p_chart_impl(const calibration_model& model, const nonconformity_scorer& scorer,
                          double alpha, std::span<const Item> stream) {
    require_scorer_match(model, scorer);
    const auto scores = kernels::score_stream(scorer, stream);
    std::vector<std::int64_t> indices(stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i)
        indices[i] = stream[i].index;
    return p_value_series(model, scores, indices, alpha);
}

} // namespace

chart_series conformal_score_chart(const calibration_model& model,
                                   const nonconformity_scorer& scorer,
                                   std::span<const observation> stream) {
    return score_chart_impl(model, scorer, stream);
}

chart_series conformal_score_chart(const calibration_model& model,
                                   const nonconformity_scorer& scorer,
                                   std::span<const subgroup> stream) {
    return score_chart_impl(model, scorer, stream);
}

chart_series conformal_interval_chart(const calibration_model& model,
                                      const predictive_model& predictive,
                                      std::span<const labeled_point> stream) {
    if (model.scorer_id() != to_string(scorer_kind::model_residual))
        throw std::invalid_argument("calibration mismatch");
    const auto scorer = fit_model_residual(
        std::shared_ptr<const predictive_model>(&predictive, [](const predictive_model*) {}));
    const auto scores = kernels::score_stream(scorer, stream);
    const double q = model.threshold();

    chart_series series;
    series.kind = chart_kind::conformal_interval;
    series.limit = q;
    series.alpha = model.alpha();
    series.points.reserve(stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const auto& pt = stream[i];
        const double yhat = predictive.predict(pt.x);
        chart_point p{static_cast<std::int64_t>(i), pt.y, yhat - q, yhat + q, false, false};
        // flagged exactly when the residual score exceeds q, the same event
        // as y leaving [yhat - q, yhat + q]
        p.limit_exceeded = is_out_of_control(model, scores[i]);
        series.points.push_back(p);
    }
    return series;
}

chart_series uncertainty_spike_chart(const calibration_model& model,
                                     const predictive_model& predictive,
                                     double width_alpha,
                                     std::span<const labeled_point> calibration,
                                     std::span<const labeled_point> stream) {
    if (model.scorer_id() != to_string(scorer_kind::normalized_residual))
        throw std::invalid_argument("calibration mismatch");
    if (!(width_alpha > 0.0 && width_alpha < 1.0))
        throw std::invalid_argument("invalid alpha");
    if (!predictive.has_spread())
        throw std::invalid_argument("invalid spread estimate");
    if (calibration.empty())
        throw std::invalid_argument("empty calibration");

    const double q = model.threshold();
    std::vector<double> calib_widths(calibration.size());
    for (std::size_t i = 0; i < calibration.size(); ++i) {
        const double s = predictive.spread(calibration[i].x);
        if (!std::isfinite(s) || s <= 0.0)
            throw std::invalid_argument("invalid spread estimate");
        calib_widths[i] = 2.0 * q * s;
    }
    std::sort(calib_widths.begin(), calib_widths.end());
    const auto [wk, wclamped] = conformal_quantile_index(calib_widths.size(), width_alpha);
    const double width_limit = calib_widths[wk - 1];

    const auto scorer = fit_normalized_residual(
        std::shared_ptr<const predictive_model>(&predictive, [](const predictive_model*) {}));
    const auto scores = kernels::score_stream(scorer, stream);

    chart_series series;
    series.kind = chart_kind::uncertainty_spike;
    series.limit = q;
    series.width_limit = width_limit;
    series.alpha = model.alpha();
    series.points.reserve(stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const auto& pt = stream[i];
        const double yhat = predictive.predict(pt.x);
        const double half = q * predictive.spread(pt.x);
        chart_point p{static_cast<std::int64_t>(i), pt.y, yhat - half, yhat + half, false, false};
        p.limit_exceeded = is_out_of_control(model, scores[i]);
        p.uncertainty_spike = 2.0 * half > width_limit;
        series.points.push_back(p);
    }
    return series;
}

chart_series p_value_chart(const calibration_model& model, const nonconformity_scorer& scorer,
                           double alpha, std::span<const observation> stream) {
    return p_chart_impl(model, scorer, alpha, stream);
}

chart_series p_value_chart(const calibration_model& model, const nonconformity_scorer& scorer,
                           double alpha, std::span<const subgroup> stream) {
    return p_chart_impl(model, scorer, alpha, stream);
}

chart_series p_value_series(const calibration_model& model, std::span<const double> scores,
                            std::span<const std::int64_t> indices, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("invalid alpha");
    if (scores.size() != indices.size())
        throw std::invalid_argument("dimension mismatch");
    chart_series series;
    series.kind = chart_kind::p_value;
    series.alpha = alpha;
    series.points.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double p = conformal_p_value(model, scores[i]);
        series.points.push_back({indices[i], p, {}, {}, p <= alpha, false});
    }
    return series;
}

} // namespace cspc
