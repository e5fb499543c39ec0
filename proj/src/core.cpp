#include "cspc/core.hpp"

#include <algorithm>
#include <cmath>

namespace cspc {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string(what) + ": non-finite value");
}

double median(std::span<const double> values) {
    if (values.empty())
        throw std::invalid_argument("empty sample");
    for (double v : values)
        require_finite(v, "median");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    if (n % 2 == 1)
        return sorted[n / 2];
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double mean_of(const subgroup& g) {
    if (g.values.empty())
        throw std::invalid_argument("empty sample");
    double sum = 0.0;
    for (double v : g.values) {
        require_finite(v, "subgroup value");
        sum += v;
    }
    return sum / static_cast<double>(g.values.size());
}

double range_of(const subgroup& g) {
    if (g.values.size() < 2)
        throw std::invalid_argument("subgroup too small");
    for (double v : g.values)
        require_finite(v, "subgroup value");
    const auto [lo, hi] = std::minmax_element(g.values.begin(), g.values.end());
    return *hi - *lo;
}

calibration_model::calibration_model(std::vector<double> sorted_scores, double alpha, double q,
                                     std::size_t k, bool clamped, double center,
                                     std::string scorer_id)
    : scores_(std::move(sorted_scores)),
      alpha_(alpha),
      q_(q),
      k_(k),
      clamped_(clamped),
      center_(center),
      scorer_id_(std::move(scorer_id)) {
    if (scores_.empty())
        throw std::invalid_argument("empty calibration");
    if (!(alpha_ > 0.0 && alpha_ < 1.0))
        throw std::invalid_argument("invalid alpha");
    for (double s : scores_) {
        require_finite(s, "calibration score");
        if (s < 0.0)
            throw std::invalid_argument("negative calibration score");
    }
    if (!std::is_sorted(scores_.begin(), scores_.end()))
        throw std::invalid_argument("calibration scores not sorted");
    if (k_ < 1 || k_ > scores_.size())
        throw std::invalid_argument("quantile rank out of range");
    if (q_ != scores_[k_ - 1])
        throw std::invalid_argument("threshold does not match quantile rank");
    require_finite(center_, "center");
}

} // namespace cspc
