#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cspc {

/// A single measurement in a time-ordered stream.
struct observation {
    std::int64_t index = 0;
    double value = 0.0;
};

/// A rational subgroup: a small sample of consecutive measurements.
/// Mean and range are always derived from `values`, never cached.
struct subgroup {
    std::int64_t index = 0;
    std::vector<double> values;
};

/// A (process parameters, quality characteristic) pair for model-based scoring.
struct labeled_point {
    std::vector<double> x;
    double y = 0.0;
};

/// One snapshot of all monitored process variables.
struct process_vector {
    std::int64_t index = 0;
    std::vector<double> components;
};

/// One plotted point. `value` depends on the chart kind (raw value, score,
/// p-value, or observed y). A point may carry both signal flags at once.
struct chart_point {
    std::int64_t index = 0;
    double value = 0.0;
    std::optional<double> lower;
    std::optional<double> upper;
    bool limit_exceeded = false;
    bool uncertainty_spike = false;
};

void require_finite(double v, const char* what);

/// Sample median. Even length: arithmetic mean of the two middle order
/// statistics.
double median(std::span<const double> values);

double mean_of(const subgroup& g);

/// max - min of a subgroup. Requires size >= 2.
double range_of(const subgroup& g);

/// Frozen in-control score distribution with its conformal threshold.
/// Immutable after construction; the product of phase-1 calibration.
class calibration_model {
  public:
    /// `scores` must be sorted ascending, finite and non-negative;
    /// `q` must equal scores[k-1]. Violations throw std::invalid_argument.
    calibration_model(std::vector<double> sorted_scores, double alpha, double q,
                      std::size_t k, bool clamped, double center, std::string scorer_id);

    const std::vector<double>& scores() const { return scores_; }
    std::size_t size() const { return scores_.size(); }
    double alpha() const { return alpha_; }
    double threshold() const { return q_; }
    /// 1-based rank of the threshold in the sorted score list.
    std::size_t quantile_rank() const { return k_; }
    /// True when ceil((1-alpha)(n+1)) exceeded n and the rank was clamped;
    /// the coverage guarantee then requires a larger calibration set.
    bool clamped() const { return clamped_; }
    double center() const { return center_; }
    const std::string& scorer_id() const { return scorer_id_; }

    bool operator==(const calibration_model&) const = default;

  private:
    std::vector<double> scores_;
    double alpha_;
    double q_;
    std::size_t k_;
    bool clamped_;
    double center_;
    std::string scorer_id_;
};

} // namespace cspc
