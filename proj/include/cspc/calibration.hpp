#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cspc/core.hpp"
#include "cspc/rng.hpp"

namespace cspc {

struct split_spec {
    double train_fraction = 0.5;
    std::uint64_t seed = 0;
};

struct quantile_index {
    std::size_t k = 0;   ///< 1-based rank of the threshold score
    bool clamped = false; ///< true when ceil((1-alpha)(n+1)) > n
};

/// Rank of the conformal threshold: k = ceil((1-alpha)(n+1)), clamped to n.
/// Evaluated exactly (128-bit integer arithmetic on alpha's mantissa), so the
/// result never drifts off an order-statistic boundary through rounding.
quantile_index conformal_quantile_index(std::size_t n, double alpha);

/// Smallest calibration size for which the rank does not clamp: (1-alpha)/alpha.
double min_calibration_size(double alpha);

/// Sort the scores and freeze the threshold q = k-th smallest. Duplicates are
/// kept; the order statistic is taken over the multiset.
calibration_model calibrate(std::vector<double> scores, double alpha,
                            std::string scorer_id = "raw", double center = 0.0);

/// Strict threshold rule: out of control iff score > q.
bool is_out_of_control(const calibration_model& model, double score);

/// Smoothed conformal p-value (1 + #{calibration scores >= score}) / (n + 1).
/// Always in (0, 1]; equals 1/(n+1) when the score beats every calibration
/// score. With the smoothing, p <= alpha and score > q flag the same points
/// whenever the rank did not clamp.
double conformal_p_value(const calibration_model& model, double score);

namespace detail {
/// Exact floor(fraction * m) for fraction in (0, 1).
std::uint64_t floor_scaled(double fraction, std::uint64_t m);
} // namespace detail

/// Seeded shuffle-and-cut partition into (train, calibration) of sizes
/// (floor(f*N), N - floor(f*N)). Same seed, same partition.
template <class T>
std::pair<std::vector<T>, std::vector<T>> split(const std::vector<T>& data,
                                                const split_spec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw std::invalid_argument("invalid split fraction");
    const std::size_t n = data.size();
    if (n < 2)
        throw std::invalid_argument("split too extreme");
    const std::size_t n_train =
        static_cast<std::size_t>(detail::floor_scaled(spec.train_fraction, n));
    if (n_train == 0 || n_train == n)
        throw std::invalid_argument("split too extreme");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    rng::engine g(spec.seed);
    for (std::size_t i = n - 1; i > 0; --i) // Fisher-Yates
        std::swap(order[i], order[rng::uniform_index(g, i + 1)]);

    std::pair<std::vector<T>, std::vector<T>> parts;
    parts.first.reserve(n_train);
    parts.second.reserve(n - n_train);
    for (std::size_t i = 0; i < n; ++i)
        (i < n_train ? parts.first : parts.second).push_back(data[order[i]]);
    return parts;
}

} // namespace cspc
