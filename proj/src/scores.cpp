#include "cspc/scores.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cspc {

std::string_view to_string(scorer_kind kind) {
    switch (kind) {
    case scorer_kind::individual_median: return "individual_median";
    case scorer_kind::subgroup_mean_median: return "subgroup_mean_median";
    case scorer_kind::subgroup_range_median: return "subgroup_range_median";
    case scorer_kind::model_residual: return "model_residual";
    case scorer_kind::normalized_residual: return "normalized_residual";
    }
    throw std::invalid_argument("unknown scorer kind");
}

scorer_kind scorer_kind_from_string(std::string_view name) {
    for (auto kind : {scorer_kind::individual_median, scorer_kind::subgroup_mean_median,
                      scorer_kind::subgroup_range_median, scorer_kind::model_residual,
                      scorer_kind::normalized_residual})
        if (name == to_string(kind))
            return kind;
    throw std::invalid_argument("unknown scorer kind: " + std::string(name));
}

double predictive_model::spread(std::span<const double>) const {
    throw std::invalid_argument("invalid spread estimate");
}

line_model::line_model(double intercept, double slope)
    : intercept_(intercept), slope_(slope) {
    require_finite(intercept, "intercept");
    require_finite(slope, "slope");
}

line_model line_model::fit(std::span<const labeled_point> data) {
    if (data.empty())
        throw std::invalid_argument("empty calibration");
    double sx = 0.0, sy = 0.0;
    for (const auto& p : data) {
        if (p.x.size() != 1)
            throw std::invalid_argument("line model requires 1-d inputs");
        require_finite(p.x[0], "x");
        require_finite(p.y, "y");
        sx += p.x[0];
        sy += p.y;
    }
    const double n = static_cast<double>(data.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : data) {
        const double dx = p.x[0] - mx;
        sxx += dx * dx;
        sxy += dx * (p.y - my);
    }
    if (sxx == 0.0)
        throw std::invalid_argument("degenerate x values");
    const double slope = sxy / sxx;
    return line_model(my - slope * mx, slope);
}

double line_model::predict(std::span<const double> x) const {
    if (x.size() != 1)
        throw std::invalid_argument("dimension mismatch");
    require_finite(x[0], "x");
    return intercept_ + slope_ * x[0];
}

knn_regressor::knn_regressor(std::vector<labeled_point> train, std::size_t k)
    : train_(std::move(train)), k_(k) {
    if (train_.empty())
        throw std::invalid_argument("empty calibration");
    if (k_ < 1 || k_ > train_.size())
        throw std::invalid_argument("k too large");
    const std::size_t dim = train_[0].x.size();
    for (const auto& p : train_) {
        if (p.x.size() != dim)
            throw std::invalid_argument("dimension mismatch");
        for (double v : p.x)
            require_finite(v, "x");
        require_finite(p.y, "y");
    }
}

knn_regressor knn_regressor::fit(std::span<const labeled_point> data, std::size_t k) {
    return knn_regressor(std::vector<labeled_point>(data.begin(), data.end()), k);
}

std::vector<std::size_t> knn_regressor::nearest(std::span<const double> x) const {
    if (x.size() != train_[0].x.size())
        throw std::invalid_argument("dimension mismatch");
    for (double v : x)
        require_finite(v, "x");
    std::vector<std::pair<double, std::size_t>> dist(train_.size());
    for (std::size_t i = 0; i < train_.size(); ++i) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double d = train_[i].x[j] - x[j];
            d2 += d * d;
        }
        dist[i] = {d2, i};
    }
    // index tie-break keeps neighbor selection deterministic
    std::nth_element(dist.begin(), dist.begin() + (k_ - 1), dist.end());
    std::vector<std::size_t> idx(k_);
    for (std::size_t i = 0; i < k_; ++i)
        idx[i] = dist[i].second;
    std::sort(idx.begin(), idx.end());
    return idx;
}

double knn_regressor::predict(std::span<const double> x) const {
    double sum = 0.0;
    for (std::size_t i : nearest(x))
        sum += train_[i].y;
    return sum / static_cast<double>(k_);
}

double knn_regressor::spread(std::span<const double> x) const {
    const auto idx = nearest(x);
    double mean = 0.0;
    for (std::size_t i : idx)
        mean += train_[i].y;
    mean /= static_cast<double>(k_);
    double ss = 0.0;
    for (std::size_t i : idx) {
        const double d = train_[i].y - mean;
        ss += d * d;
    }
    const double sd = k_ > 1 ? std::sqrt(ss / static_cast<double>(k_ - 1)) : 0.0;
    return std::max(sd, spread_floor);
}

nonconformity_scorer::nonconformity_scorer(scorer_kind kind, double reference,
                                           std::shared_ptr<const predictive_model> model)
    : kind_(kind), reference_(reference), model_(std::move(model)) {}

nonconformity_scorer nonconformity_scorer::individual(double reference) {
    require_finite(reference, "reference");
    return {scorer_kind::individual_median, reference, nullptr};
}

nonconformity_scorer nonconformity_scorer::subgroup_mean(double reference) {
    require_finite(reference, "reference");
    return {scorer_kind::subgroup_mean_median, reference, nullptr};
}

nonconformity_scorer nonconformity_scorer::subgroup_range(double reference) {
    require_finite(reference, "reference");
    return {scorer_kind::subgroup_range_median, reference, nullptr};
}

nonconformity_scorer
nonconformity_scorer::model_residual(std::shared_ptr<const predictive_model> model) {
    if (!model)
        throw std::invalid_argument("null model");
    return {scorer_kind::model_residual, 0.0, std::move(model)};
}

nonconformity_scorer
nonconformity_scorer::normalized_residual(std::shared_ptr<const predictive_model> model) {
    if (!model)
        throw std::invalid_argument("null model");
    if (!model->has_spread())
        throw std::invalid_argument("invalid spread estimate");
    return {scorer_kind::normalized_residual, 0.0, std::move(model)};
}

const predictive_model& nonconformity_scorer::model() const {
    if (!model_)
        throw std::invalid_argument("scorer has no model");
    return *model_;
}

double nonconformity_scorer::score(double value) const {
    if (kind_ != scorer_kind::individual_median)
        throw std::invalid_argument("scorer kind mismatch");
    require_finite(value, "value");
    return std::abs(value - reference_);
}

double nonconformity_scorer::score(const subgroup& g) const {
    switch (kind_) {
    case scorer_kind::subgroup_mean_median:
        return std::abs(mean_of(g) - reference_);
    case scorer_kind::subgroup_range_median:
        return std::abs(range_of(g) - reference_);
    default:
        throw std::invalid_argument("scorer kind mismatch");
    }
}

double nonconformity_scorer::score(const labeled_point& p) const {
    if (kind_ != scorer_kind::model_residual && kind_ != scorer_kind::normalized_residual)
        throw std::invalid_argument("scorer kind mismatch");
    require_finite(p.y, "y");
    const double yhat = model_->predict(p.x);
    if (!std::isfinite(yhat))
        throw std::invalid_argument("model output invalid");
    const double residual = std::abs(p.y - yhat);
    if (kind_ == scorer_kind::model_residual)
        return residual;
    const double s = model_->spread(p.x);
    if (!std::isfinite(s) || s <= 0.0)
        throw std::invalid_argument("invalid spread estimate");
    return residual / s;
}

nonconformity_scorer fit_individual(std::span<const observation> calibration) {
    if (calibration.empty())
        throw std::invalid_argument("empty calibration");
    std::vector<double> values(calibration.size());
    for (std::size_t i = 0; i < calibration.size(); ++i)
        values[i] = calibration[i].value;
    return nonconformity_scorer::individual(median(values));
}

nonconformity_scorer fit_subgroup_mean(std::span<const subgroup> calibration) {
    if (calibration.empty())
        throw std::invalid_argument("empty calibration");
    std::vector<double> means(calibration.size());
    for (std::size_t i = 0; i < calibration.size(); ++i)
        means[i] = mean_of(calibration[i]);
    return nonconformity_scorer::subgroup_mean(median(means));
}

nonconformity_scorer fit_subgroup_range(std::span<const subgroup> calibration) {
    if (calibration.empty())
        throw std::invalid_argument("empty calibration");
    std::vector<double> ranges(calibration.size());
    for (std::size_t i = 0; i < calibration.size(); ++i)
        ranges[i] = range_of(calibration[i]);
    return nonconformity_scorer::subgroup_range(median(ranges));
}

nonconformity_scorer fit_model_residual(std::shared_ptr<const predictive_model> model) {
    return nonconformity_scorer::model_residual(std::move(model));
}

nonconformity_scorer fit_normalized_residual(std::shared_ptr<const predictive_model> model) {
    return nonconformity_scorer::normalized_residual(std::move(model));
}

} // namespace cspc
