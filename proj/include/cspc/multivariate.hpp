#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cspc/charts.hpp"
#include "cspc/core.hpp"

namespace cspc {

/// Trained unsupervised detector: maps a process vector to a non-negative
/// anomaly score. Immutable after training. Any model fits behind this
/// interface (the conformal guarantee does not depend on which); the two
/// concrete detectors below ship with the library.
class anomaly_detector {
  public:
    virtual ~anomaly_detector() = default;
    virtual double score(std::span<const double> v) const = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::string id() const = 0;
};

/// score(v) = mean Euclidean distance from v to its k nearest training vectors.
class knn_detector final : public anomaly_detector {
  public:
    knn_detector(std::span<const process_vector> train, std::size_t k);

    double score(std::span<const double> v) const override;
    std::size_t dimension() const override { return dim_; }
    std::string id() const override { return "knn_distance"; }

    std::size_t k() const { return k_; }
    std::size_t train_size() const { return n_; }
    /// Row-major training matrix, n x dimension.
    const std::vector<double>& train_data() const { return data_; }

  private:
    std::vector<double> data_;
    std::size_t n_;
    std::size_t dim_;
    std::size_t k_;
};

/// score(v) = sqrt((v - mu)^T (Sigma + ridge I)^-1 (v - mu)) with mu, Sigma the
/// training sample mean and covariance (n-1 denominator). The regularized
/// covariance is factored once at training time.
class mahalanobis_detector final : public anomaly_detector {
  public:
    /// Default ridge: 1e-6 * trace(Sigma) / d.
    mahalanobis_detector(std::span<const process_vector> train,
                         std::optional<double> ridge = std::nullopt);
    /// Rebuild from persisted state; `chol_lower` is the row-major lower
    /// Cholesky factor of the regularized covariance.
    mahalanobis_detector(std::vector<double> mean, std::vector<double> chol_lower,
                         double ridge);

    double score(std::span<const double> v) const override;
    std::size_t dimension() const override { return mean_.size(); }
    std::string id() const override { return "mahalanobis"; }

    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& cholesky_lower() const { return chol_; }
    double ridge() const { return ridge_; }

  private:
    std::vector<double> mean_;
    std::vector<double> chol_; // row-major lower triangular, d x d
    double ridge_;
};

knn_detector train_knn(std::span<const process_vector> train, std::size_t k);
mahalanobis_detector train_mahalanobis(std::span<const process_vector> train,
                                       std::optional<double> ridge = std::nullopt);

/// Score the calibration vectors with the detector and freeze the conformal
/// threshold. The calibration set must be disjoint from the training set
/// (contract of the upstream split; not verifiable here).
calibration_model calibrate_detector(const anomaly_detector& detector,
                                     std::span<const process_vector> calibration,
                                     double alpha);

/// Conformal p-value chart over detector scores: in control while p-values
/// stay above the alpha line.
chart_series monitor(const anomaly_detector& detector, const calibration_model& model,
                     std::span<const process_vector> stream, double alpha);

} // namespace cspc
