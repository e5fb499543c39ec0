#include "cspc/calibration.hpp"

#include <algorithm>
#include <cmath>

namespace cspc {

namespace detail {

std::uint64_t floor_scaled(double fraction, std::uint64_t m) {
    // fraction = mant / 2^shift with mant, shift integers, so
    // floor(fraction * m) = (mant * m) >> shift, computed exactly in 128 bits.
    int exp2 = 0;
    const double f = std::frexp(fraction, &exp2); // fraction = f * 2^exp2, f in [0.5, 1)
    const auto mant = static_cast<unsigned __int128>(std::ldexp(f, 53));
    const int shift = 53 - exp2; // >= 53 because fraction < 1
    if (shift >= 128)
        return 0;
    const unsigned __int128 prod = mant * static_cast<unsigned __int128>(m);
    return static_cast<std::uint64_t>(prod >> shift);
}

} // namespace detail

quantile_index conformal_quantile_index(std::size_t n, double alpha) {
    if (n < 1)
        throw std::invalid_argument("empty calibration");
    if (!std::isfinite(alpha) || !(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("invalid alpha");
    // ceil((1-alpha)(n+1)) == (n+1) - floor(alpha*(n+1))
    const std::uint64_t m = static_cast<std::uint64_t>(n) + 1;
    const std::uint64_t k = m - detail::floor_scaled(alpha, m);
    if (k > n)
        return {n, true};
    return {static_cast<std::size_t>(k), false};
}

double min_calibration_size(double alpha) {
    if (!std::isfinite(alpha) || !(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("invalid alpha");
    return (1.0 - alpha) / alpha;
}

calibration_model calibrate(std::vector<double> scores, double alpha,
                            std::string scorer_id, double center) {
    if (scores.empty())
        throw std::invalid_argument("empty calibration");
    for (double s : scores) {
        require_finite(s, "calibration score");
        if (s < 0.0)
            throw std::invalid_argument("negative calibration score");
    }
    std::sort(scores.begin(), scores.end());
    const auto [k, clamped] = conformal_quantile_index(scores.size(), alpha);
    const double q = scores[k - 1];
    return calibration_model(std::move(scores), alpha, q, k, clamped, center,
                             std::move(scorer_id));
}

bool is_out_of_control(const calibration_model& model, double score) {
    require_finite(score, "score");
    if (score < 0.0)
        throw std::invalid_argument("negative score");
    return score > model.threshold();
}

double conformal_p_value(const calibration_model& model, double score) {
    require_finite(score, "score");
    if (score < 0.0)
        throw std::invalid_argument("negative score");
    const auto& s = model.scores();
    const auto first_ge = std::lower_bound(s.begin(), s.end(), score);
    const auto count_ge = static_cast<double>(s.end() - first_ge);
    return (1.0 + count_ge) / (static_cast<double>(s.size()) + 1.0);
}

} // namespace cspc
