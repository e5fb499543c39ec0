#pragma once

#include <memory>
#include <span>
#include <string_view>

#include "cspc/core.hpp"

namespace cspc {

enum class scorer_kind {
    individual_median,
    subgroup_mean_median,
    subgroup_range_median,
    model_residual,
    normalized_residual,
};

std::string_view to_string(scorer_kind kind);
scorer_kind scorer_kind_from_string(std::string_view name);

/// Point predictor with an optional local-variability estimate. Any regressor
/// can sit behind this interface; two concrete models ship below.
class predictive_model {
  public:
    virtual ~predictive_model() = default;
    virtual double predict(std::span<const double> x) const = 0;
    virtual bool has_spread() const { return false; }
    /// Local variability estimate, > 0 on the admitted domain.
    virtual double spread(std::span<const double> x) const;
    virtual std::string id() const = 0;
};

/// Ordinary least-squares line on 1-d inputs. No spread estimate.
class line_model final : public predictive_model {
  public:
    line_model(double intercept, double slope);
    static line_model fit(std::span<const labeled_point> data);

    double predict(std::span<const double> x) const override;
    std::string id() const override { return "line"; }

    double intercept() const { return intercept_; }
    double slope() const { return slope_; }

  private:
    double intercept_;
    double slope_;
};

/// k-nearest-neighbor regressor: prediction is the mean of the k nearest
/// training responses, spread their sample standard deviation (floored at a
/// small positive epsilon so normalized scores stay defined).
class knn_regressor final : public predictive_model {
  public:
    static constexpr double spread_floor = 1e-9;

    knn_regressor(std::vector<labeled_point> train, std::size_t k);
    static knn_regressor fit(std::span<const labeled_point> data, std::size_t k);

    double predict(std::span<const double> x) const override;
    bool has_spread() const override { return true; }
    double spread(std::span<const double> x) const override;
    std::string id() const override { return "knn_regressor"; }

    std::size_t k() const { return k_; }
    const std::vector<labeled_point>& train() const { return train_; }

  private:
    std::vector<std::size_t> nearest(std::span<const double> x) const;

    std::vector<labeled_point> train_;
    std::size_t k_;
};

/// Pluggable nonconformity score: maps an observation (or subgroup, or (x,y)
/// pair) to a non-negative score. The reference is frozen at fit time.
class nonconformity_scorer {
  public:
    static nonconformity_scorer individual(double reference);
    static nonconformity_scorer subgroup_mean(double reference);
    static nonconformity_scorer subgroup_range(double reference);
    static nonconformity_scorer model_residual(std::shared_ptr<const predictive_model> model);
    static nonconformity_scorer normalized_residual(std::shared_ptr<const predictive_model> model);

    double score(double value) const;            ///< individual_median only
    double score(const observation& o) const { return score(o.value); }
    double score(const subgroup& g) const;       ///< subgroup kinds only
    double score(const labeled_point& p) const;  ///< model kinds only

    scorer_kind kind() const { return kind_; }
    std::string_view id() const { return to_string(kind_); }
    double reference() const { return reference_; }
    bool has_model() const { return model_ != nullptr; }
    const predictive_model& model() const;
    std::shared_ptr<const predictive_model> model_ptr() const { return model_; }

  private:
    nonconformity_scorer(scorer_kind kind, double reference,
                         std::shared_ptr<const predictive_model> model);

    scorer_kind kind_;
    double reference_;
    std::shared_ptr<const predictive_model> model_;
};

/// s(x) = |x - median(calibration values)|
nonconformity_scorer fit_individual(std::span<const observation> calibration);

/// s(g) = |mean(g) - median(calibration means)|
nonconformity_scorer fit_subgroup_mean(std::span<const subgroup> calibration);

/// s(g) = |range(g) - median(calibration ranges)|
nonconformity_scorer fit_subgroup_range(std::span<const subgroup> calibration);

/// s(x, y) = |y - model.predict(x)|
nonconformity_scorer fit_model_residual(std::shared_ptr<const predictive_model> model);

/// s(x, y) = |y - model.predict(x)| / model.spread(x)
nonconformity_scorer fit_normalized_residual(std::shared_ptr<const predictive_model> model);

} // namespace cspc
