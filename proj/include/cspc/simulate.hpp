#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cspc/core.hpp"

namespace cspc {

enum class generator_kind { normal, exponential, bimodal };
enum class shift_kind { none, mean_shift, scale_shift, noise_shift };

generator_kind generator_kind_from_string(std::string_view name);
std::string_view to_string(generator_kind kind);

struct generator_spec {
    generator_kind kind = generator_kind::normal;
    double mu = 0.0;     // normal
    double sigma = 1.0;  // normal and bimodal component std
    double rate = 1.0;   // exponential
    double mu1 = -2.0;   // bimodal
    double mu2 = 2.0;
    double weight = 0.5; // probability of the mu1 component

    double mean() const;
};

/// Shift injected into the monitoring stream from onset_index onward.
/// mean_shift adds delta; scale_shift and noise_shift rescale dispersion
/// around the generator mean by `factor` (the mean stays on target).
struct shift_spec {
    shift_kind kind = shift_kind::none;
    std::size_t onset_index = 0;
    double delta = 0.0;
    double factor = 1.0;
};

struct simulation_spec {
    generator_spec generator;
    std::size_t n_calibration = 999;
    std::size_t n_stream = 1000;
    shift_spec shift;
    std::uint64_t seed = 0;
};

struct generated_streams {
    std::vector<observation> calibration;
    std::vector<observation> stream;
};

/// Draw calibration and monitoring streams; deterministic given the seed.
generated_streams generate(const simulation_spec& spec);

struct chart_comparison {
    std::string chart;
    double pre_shift_alarm_rate = 0.0;
    double post_shift_detection_rate = 0.0;
    std::optional<double> first_detection_index; ///< first flagged index >= onset
};

struct repetition_result {
    std::uint64_t seed = 0;
    chart_comparison shewhart;
    chart_comparison conformal;
};

struct comparison_report {
    simulation_spec spec;
    double alpha = 0.0;
    std::size_t repetitions = 0;
    std::vector<repetition_result> per_repetition;
    chart_comparison shewhart_mean;  ///< rates averaged over repetitions
    chart_comparison conformal_mean; ///< detection index averaged where present
};

/// Run the Shewhart baseline and the conformal score chart on identical
/// streams for each repetition (repetition r uses seed spec.seed + r) and
/// aggregate alarm and detection rates. Repetitions are independent; with
/// `parallel` they run under OpenMP and produce a report identical to the
/// serial one.
comparison_report compare_charts(const simulation_spec& spec, double alpha,
                                 std::size_t repetitions, bool parallel = true);

/// Heteroscedastic regression scenario for the adaptive-interval charts:
/// y = 2 + 3x + noise, with noise sigma multiplied by noise_factor for
/// x in the high-noise region [0.7, 1]. Training inputs span [0, 1] so the
/// k-NN spread estimate knows both regions; calibration and the pre-onset
/// stream stay in the quiet region [0, 0.6]; from onset_index onward the
/// stream x moves into [0.75, 0.95] while the response stays on the line.
struct labeled_scenario_spec {
    std::size_t n_train = 500;
    std::size_t n_calibration = 300;
    std::size_t n_stream = 120;
    std::size_t onset_index = 20;
    double sigma = 0.5;
    double noise_factor = 3.0;
    std::uint64_t seed = 0;
};

struct labeled_scenario {
    std::vector<labeled_point> train;
    std::vector<labeled_point> calibration;
    std::vector<labeled_point> stream;
};

labeled_scenario generate_labeled(const labeled_scenario_spec& spec);

} // namespace cspc
