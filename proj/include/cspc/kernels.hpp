#pragma once

#include <span>
#include <vector>

#include "cspc/multivariate.hpp"
#include "cspc/scores.hpp"

// Data-parallel scoring kernels. Each stream point is scored independently,
// so the OpenMP variants produce bit-identical output to the serial reference
// implementations for any thread count. The serial variants are kept as the
// reference the tests compare against; tools/bench.cpp times both.

namespace cspc::kernels {

std::vector<double> score_stream(const nonconformity_scorer& scorer,
                                 std::span<const observation> stream);
std::vector<double> score_stream_serial(const nonconformity_scorer& scorer,
                                        std::span<const observation> stream);

std::vector<double> score_stream(const nonconformity_scorer& scorer,
                                 std::span<const subgroup> stream);
std::vector<double> score_stream_serial(const nonconformity_scorer& scorer,
                                        std::span<const subgroup> stream);

std::vector<double> score_stream(const nonconformity_scorer& scorer,
                                 std::span<const labeled_point> stream);
std::vector<double> score_stream_serial(const nonconformity_scorer& scorer,
                                        std::span<const labeled_point> stream);

std::vector<double> detector_scores(const anomaly_detector& detector,
                                    std::span<const process_vector> stream);
std::vector<double> detector_scores_serial(const anomaly_detector& detector,
                                           std::span<const process_vector> stream);

} // namespace cspc::kernels
