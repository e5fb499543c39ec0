#include "cspc/kernels.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cspc::kernels {

namespace {

// Maps scorer(stream[i]) over the stream. Exceptions cannot cross an OpenMP
// region, so worker failures are marked per index and the lowest-index failing
// item is re-scored serially afterwards to rethrow its exception, which keeps
// failures deterministic.
template <class Item, class Fn>
std::vector<double> map_parallel(std::span<const Item> stream, Fn&& fn) {
    std::vector<double> out(stream.size());
    std::vector<unsigned char> bad(stream.size(), 0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(stream.size()); ++i) {
        try {
            out[static_cast<std::size_t>(i)] = fn(stream[static_cast<std::size_t>(i)]);
        } catch (...) {
            bad[static_cast<std::size_t>(i)] = 1;
        }
    }
    for (std::size_t i = 0; i < bad.size(); ++i)
        if (bad[i]) {
            fn(stream[i]); // scoring is pure, so this rethrows the same error
            throw std::runtime_error("scoring failed");
        }
    return out;
}

template <class Item, class Fn>
std::vector<double> map_serial(std::span<const Item> stream, Fn&& fn) {
    std::vector<double> out(stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i)
        out[i] = fn(stream[i]);
    return out;
}

} // namespace

std::vector<double> score_stream(const nonconformity_scorer& scorer,
                                 std::span<const observation> stream) {
    return map_parallel(stream, [&](const observation& o) { return scorer.score(o); });
}

std::vector<double> score_stream_serial(const nonconformity_scorer& scorer,
                                        std::span<const observation> stream) {
    return map_serial(stream, [&](const observation& o) { return scorer.score(o); });
}

std::vector<double> score_stream(const nonconformity_scorer& scorer,
                                 std::span<const subgroup> stream) {
    return map_parallel(stream, [&](const subgroup& g) { return scorer.score(g); });
}

std::vector<double> score_stream_serial(const nonconformity_scorer& scorer,
                                        std::span<const subgroup> stream) {
    return map_serial(stream, [&](const subgroup& g) { return scorer.score(g); });
}

std::vector<double> score_stream(const nonconformity_scorer& scorer,
                                 std::span<const labeled_point> stream) {
    return map_parallel(stream, [&](const labeled_point& p) { return scorer.score(p); });
}

std::vector<double> score_stream_serial(const nonconformity_scorer& scorer,
                                        std::span<const labeled_point> stream) {
    return map_serial(stream, [&](const labeled_point& p) { return scorer.score(p); });
}

std::vector<double> detector_scores(const anomaly_detector& detector,
                                    std::span<const process_vector> stream) {
    return map_parallel(stream, [&](const process_vector& v) {
        return detector.score(v.components);
    });
}

std::vector<double> detector_scores_serial(const anomaly_detector& detector,
                                           std::span<const process_vector> stream) {
    return map_serial(stream, [&](const process_vector& v) {
        return detector.score(v.components);
    });
}

} // namespace cspc::kernels
