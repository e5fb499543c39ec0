#include "cspc/multivariate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cspc/calibration.hpp"
#include "cspc/kernels.hpp"

namespace cspc {

namespace {

std::size_t checked_dimension(std::span<const process_vector> data) {
    if (data.empty())
        throw std::invalid_argument("empty calibration");
    const std::size_t dim = data[0].components.size();
    if (dim == 0)
        throw std::invalid_argument("dimension mismatch");
    for (const auto& v : data) {
        if (v.components.size() != dim)
            throw std::invalid_argument("dimension mismatch");
        for (double c : v.components)
            require_finite(c, "vector component");
    }
    return dim;
}

} // namespace

knn_detector::knn_detector(std::span<const process_vector> train, std::size_t k)
    : n_(train.size()), dim_(checked_dimension(train)), k_(k) {
    if (k_ < 1 || k_ > n_)
        throw std::invalid_argument("k too large");
    data_.resize(n_ * dim_);
    for (std::size_t i = 0; i < n_; ++i)
        std::copy(train[i].components.begin(), train[i].components.end(),
                  data_.begin() + static_cast<std::ptrdiff_t>(i * dim_));
}

double knn_detector::score(std::span<const double> v) const {
    if (v.size() != dim_)
        throw std::invalid_argument("dimension mismatch");
    for (double c : v)
        require_finite(c, "vector component");
    std::vector<double> dist(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        double d2 = 0.0;
        const double* row = data_.data() + i * dim_;
        for (std::size_t j = 0; j < dim_; ++j) {
            const double d = row[j] - v[j];
            d2 += d * d;
        }
        dist[i] = d2;
    }
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_ - 1),
                     dist.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < k_; ++i)
        sum += std::sqrt(dist[i]);
    return sum / static_cast<double>(k_);
}

mahalanobis_detector::mahalanobis_detector(std::span<const process_vector> train,
                                           std::optional<double> ridge)
    : ridge_(0.0) {
    const std::size_t d = checked_dimension(train);
    const std::size_t n = train.size();
    if (n < 2)
        throw std::invalid_argument("need >=2 points for covariance");

    mean_.assign(d, 0.0);
    for (const auto& v : train)
        for (std::size_t j = 0; j < d; ++j)
            mean_[j] += v.components[j];
    for (double& m : mean_)
        m /= static_cast<double>(n);

    std::vector<double> cov(d * d, 0.0);
    for (const auto& v : train)
        for (std::size_t r = 0; r < d; ++r) {
            const double dr = v.components[r] - mean_[r];
            for (std::size_t c = 0; c <= r; ++c)
                cov[r * d + c] += dr * (v.components[c] - mean_[c]);
        }
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c <= r; ++c) {
            cov[r * d + c] /= static_cast<double>(n - 1);
            cov[c * d + r] = cov[r * d + c];
        }

    if (ridge) {
        ridge_ = *ridge;
        if (ridge_ < 0.0 || !std::isfinite(ridge_))
            throw std::invalid_argument("invalid ridge");
    } else {
        double trace = 0.0;
        for (std::size_t j = 0; j < d; ++j)
            trace += cov[j * d + j];
        ridge_ = 1e-6 * trace / static_cast<double>(d);
    }
    for (std::size_t j = 0; j < d; ++j)
        cov[j * d + j] += ridge_;

    // in-place lower Cholesky of the regularized covariance
    chol_.assign(d * d, 0.0);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c <= r; ++c) {
            double sum = cov[r * d + c];
            for (std::size_t t = 0; t < c; ++t)
                sum -= chol_[r * d + t] * chol_[c * d + t];
            if (r == c) {
                if (sum <= 0.0 || !std::isfinite(sum))
                    throw std::invalid_argument("singular covariance");
                chol_[r * d + r] = std::sqrt(sum);
            } else {
                chol_[r * d + c] = sum / chol_[c * d + c];
            }
        }
    }
}

mahalanobis_detector::mahalanobis_detector(std::vector<double> mean,
                                           std::vector<double> chol_lower, double ridge)
    : mean_(std::move(mean)), chol_(std::move(chol_lower)), ridge_(ridge) {
    const std::size_t d = mean_.size();
    if (d == 0 || chol_.size() != d * d)
        throw std::invalid_argument("dimension mismatch");
    for (double m : mean_)
        require_finite(m, "mean");
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c)
            require_finite(chol_[r * d + c], "cholesky factor");
        if (chol_[r * d + r] <= 0.0)
            throw std::invalid_argument("singular covariance");
    }
}

double mahalanobis_detector::score(std::span<const double> v) const {
    const std::size_t d = mean_.size();
    if (v.size() != d)
        throw std::invalid_argument("dimension mismatch");
    for (double c : v)
        require_finite(c, "vector component");
    // forward-solve L z = (v - mu); score = |z|
    std::vector<double> z(d);
    for (std::size_t r = 0; r < d; ++r) {
        double sum = v[r] - mean_[r];
        for (std::size_t c = 0; c < r; ++c)
            sum -= chol_[r * d + c] * z[c];
        z[r] = sum / chol_[r * d + r];
    }
    double norm2 = 0.0;
    for (double zi : z)
        norm2 += zi * zi;
    return std::sqrt(norm2);
}

knn_detector train_knn(std::span<const process_vector> train, std::size_t k) {
    return knn_detector(train, k);
}

mahalanobis_detector train_mahalanobis(std::span<const process_vector> train,
                                       std::optional<double> ridge) {
    return mahalanobis_detector(train, ridge);
}

calibration_model calibrate_detector(const anomaly_detector& detector,
                                     std::span<const process_vector> calibration,
                                     double alpha) {
    if (calibration.empty())
        throw std::invalid_argument("empty calibration");
    auto scores = kernels::detector_scores(detector, calibration);
    return calibrate(std::move(scores), alpha, detector.id(), 0.0);
}

chart_series monitor(const anomaly_detector& detector, const calibration_model& model,
                     std::span<const process_vector> stream, double alpha) {
    if (model.scorer_id() != detector.id())
        throw std::invalid_argument("calibration mismatch");
    const auto scores = kernels::detector_scores(detector, stream);
    std::vector<std::int64_t> indices(stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i)
        indices[i] = stream[i].index;
    return p_value_series(model, scores, indices, alpha);
}

} // namespace cspc
