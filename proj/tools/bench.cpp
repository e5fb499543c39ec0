// Times the OpenMP kernels against their serial reference implementations and
// verifies the outputs match exactly.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cspc/calibration.hpp"
#include "cspc/kernels.hpp"
#include "cspc/multivariate.hpp"
#include "cspc/rng.hpp"
#include "cspc/scores.hpp"
#include "cspc/simulate.hpp"

using namespace cspc;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class Fn>
double time_best_of(int rounds, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < rounds; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

void report(const char* name, double serial_s, double parallel_s, bool equal) {
    std::printf("%-28s serial %8.4fs   parallel %8.4fs   speedup %5.2fx   %s\n", name, serial_s,
                parallel_s, serial_s / parallel_s, equal ? "outputs equal" : "OUTPUTS DIFFER");
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; parallel variants run serially\n");
#endif

    rng::engine eng(7);

    // univariate scorer over a long stream
    {
        const std::size_t n = 2'000'000;
        std::vector<observation> stream(n);
        for (std::size_t i = 0; i < n; ++i)
            stream[i] = {static_cast<std::int64_t>(i), rng::normal(eng, 0.0, 1.0)};
        const auto scorer = nonconformity_scorer::individual(0.0);

        std::vector<double> a, b;
        const double ts = time_best_of(3, [&] { a = kernels::score_stream_serial(scorer, stream); });
        const double tp = time_best_of(3, [&] { a = kernels::score_stream(scorer, stream); });
        b = kernels::score_stream_serial(scorer, stream);
        report("individual scorer (2e6)", ts, tp, a == b);
    }

    // knn detector over a vector stream
    {
        const std::size_t d = 8, n_train = 2000, n_stream = 20'000;
        std::vector<process_vector> train(n_train), stream(n_stream);
        const auto fill = [&](process_vector& v, std::size_t i) {
            v.index = static_cast<std::int64_t>(i);
            v.components.resize(d);
            for (auto& c : v.components)
                c = rng::normal(eng, 0.0, 1.0);
        };
        for (std::size_t i = 0; i < n_train; ++i)
            fill(train[i], i);
        for (std::size_t i = 0; i < n_stream; ++i)
            fill(stream[i], i);
        const knn_detector detector(train, 5);

        std::vector<double> a, b;
        const double ts =
            time_best_of(3, [&] { a = kernels::detector_scores_serial(detector, stream); });
        const double tp = time_best_of(3, [&] { a = kernels::detector_scores(detector, stream); });
        b = kernels::detector_scores_serial(detector, stream);
        report("knn detector (2e4 x 2e3)", ts, tp, a == b);
    }

    // Monte-Carlo chart comparison
    {
        simulation_spec spec;
        spec.generator.kind = generator_kind::normal;
        spec.n_calibration = 500;
        spec.n_stream = 500;
        spec.shift = {shift_kind::mean_shift, 250, 2.0, 1.0};
        spec.seed = 11;

        comparison_report ra, rb;
        const double ts = time_best_of(3, [&] { ra = compare_charts(spec, 0.01, 64, false); });
        const double tp = time_best_of(3, [&] { ra = compare_charts(spec, 0.01, 64, true); });
        rb = compare_charts(spec, 0.01, 64, false);
        bool equal = ra.per_repetition.size() == rb.per_repetition.size();
        for (std::size_t i = 0; equal && i < ra.per_repetition.size(); ++i) {
            const auto &x = ra.per_repetition[i], &y = rb.per_repetition[i];
            equal = x.seed == y.seed &&
                    x.shewhart.pre_shift_alarm_rate == y.shewhart.pre_shift_alarm_rate &&
                    x.shewhart.post_shift_detection_rate == y.shewhart.post_shift_detection_rate &&
                    x.conformal.pre_shift_alarm_rate == y.conformal.pre_shift_alarm_rate &&
                    x.conformal.post_shift_detection_rate == y.conformal.post_shift_detection_rate &&
                    x.shewhart.first_detection_index == y.shewhart.first_detection_index &&
                    x.conformal.first_detection_index == y.conformal.first_detection_index;
        }
        report("compare_charts (64 reps)", ts, tp, equal);
    }

    return 0;
}
