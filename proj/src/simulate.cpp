#include "cspc/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "cspc/charts.hpp"
#include "cspc/rng.hpp"
#include "cspc/scores.hpp"

namespace cspc {

generator_kind generator_kind_from_string(std::string_view name) {
    if (name == "normal") return generator_kind::normal;
    if (name == "exponential") return generator_kind::exponential;
    if (name == "bimodal") return generator_kind::bimodal;
    throw std::invalid_argument("unknown generator: " + std::string(name));
}

std::string_view to_string(generator_kind kind) {
    switch (kind) {
    case generator_kind::normal: return "normal";
    case generator_kind::exponential: return "exponential";
    case generator_kind::bimodal: return "bimodal";
    }
    throw std::invalid_argument("unknown generator");
}

double generator_spec::mean() const {
    switch (kind) {
    case generator_kind::normal: return mu;
    case generator_kind::exponential: return 1.0 / rate;
    case generator_kind::bimodal: return weight * mu1 + (1.0 - weight) * mu2;
    }
    throw std::invalid_argument("unknown generator");
}

namespace {

void validate(const simulation_spec& spec) {
    const auto& g = spec.generator;
    switch (g.kind) {
    case generator_kind::normal:
        if (!(g.sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
        break;
    case generator_kind::exponential:
        if (!(g.rate > 0.0)) throw std::invalid_argument("rate must be > 0");
        break;
    case generator_kind::bimodal:
        if (!(g.sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
        if (!(g.weight > 0.0 && g.weight < 1.0))
            throw std::invalid_argument("weight must be in (0,1)");
        break;
    }
    if (spec.n_calibration < 1 || spec.n_stream < 1)
        throw std::invalid_argument("streams must be non-empty");
    if (spec.shift.onset_index > spec.n_stream)
        throw std::invalid_argument("onset beyond stream end");
    if (spec.shift.kind == shift_kind::scale_shift || spec.shift.kind == shift_kind::noise_shift)
        if (!(spec.shift.factor > 0.0))
            throw std::invalid_argument("factor must be > 0");
}

double draw(const generator_spec& g, rng::engine& eng) {
    switch (g.kind) {
    case generator_kind::normal:
        return rng::normal(eng, g.mu, g.sigma);
    case generator_kind::exponential:
        return rng::exponential(eng, g.rate);
    case generator_kind::bimodal:
        return rng::uniform01(eng) < g.weight ? rng::normal(eng, g.mu1, g.sigma)
                                              : rng::normal(eng, g.mu2, g.sigma);
    }
    throw std::invalid_argument("unknown generator");
}

double apply_shift(double value, const shift_spec& shift, double center) {
    switch (shift.kind) {
    case shift_kind::none:
        return value;
    case shift_kind::mean_shift:
        return value + shift.delta;
    case shift_kind::scale_shift:
    case shift_kind::noise_shift:
        return center + shift.factor * (value - center);
    }
    throw std::invalid_argument("unknown shift");
}

} // namespace

generated_streams generate(const simulation_spec& spec) {
    validate(spec);
    rng::engine eng(spec.seed);
    const double center = spec.generator.mean();

    generated_streams out;
    out.calibration.reserve(spec.n_calibration);
    for (std::size_t i = 0; i < spec.n_calibration; ++i)
        out.calibration.push_back({static_cast<std::int64_t>(i), draw(spec.generator, eng)});
    out.stream.reserve(spec.n_stream);
    for (std::size_t i = 0; i < spec.n_stream; ++i) {
        double v = draw(spec.generator, eng);
        if (i >= spec.shift.onset_index)
            v = apply_shift(v, spec.shift, center);
        out.stream.push_back({static_cast<std::int64_t>(i), v});
    }
    return out;
}

namespace {

chart_comparison summarize(const char* name, const chart_series& series, std::size_t onset) {
    chart_comparison c;
    c.chart = name;
    std::size_t pre_hits = 0, post_hits = 0;
    std::optional<double> first;
    for (std::size_t i = 0; i < series.points.size(); ++i) {
        if (!series.points[i].limit_exceeded)
            continue;
        if (i < onset) {
            ++pre_hits;
        } else {
            ++post_hits;
            if (!first)
                first = static_cast<double>(i);
        }
    }
    const std::size_t n_post = series.points.size() - onset;
    c.pre_shift_alarm_rate = onset ? static_cast<double>(pre_hits) / static_cast<double>(onset) : 0.0;
    c.post_shift_detection_rate =
        n_post ? static_cast<double>(post_hits) / static_cast<double>(n_post) : 0.0;
    c.first_detection_index = first;
    return c;
}

repetition_result run_repetition(const simulation_spec& base, double alpha, std::size_t rep) {
    simulation_spec spec = base;
    spec.seed = base.seed + rep;
    const auto streams = generate(spec);

    repetition_result result;
    result.seed = spec.seed;

    const auto shew = shewhart_chart(streams.calibration, streams.stream);
    result.shewhart = summarize("shewhart", shew, spec.shift.onset_index);

    const auto scorer = fit_individual(streams.calibration);
    std::vector<double> calib_scores(streams.calibration.size());
    for (std::size_t i = 0; i < streams.calibration.size(); ++i)
        calib_scores[i] = scorer.score(streams.calibration[i]);
    const auto model = calibrate(std::move(calib_scores), alpha,
                                 std::string(scorer.id()), scorer.reference());
    const auto conf = conformal_score_chart(model, scorer, streams.stream);
    result.conformal = summarize("conformal", conf, spec.shift.onset_index);
    return result;
}

chart_comparison aggregate(const char* name, const std::vector<repetition_result>& reps,
                           chart_comparison repetition_result::*member) {
    chart_comparison mean;
    mean.chart = name;
    double sum_pre = 0.0, sum_post = 0.0, sum_first = 0.0;
    std::size_t n_first = 0;
    for (const auto& r : reps) {
        const chart_comparison& c = r.*member;
        sum_pre += c.pre_shift_alarm_rate;
        sum_post += c.post_shift_detection_rate;
        if (c.first_detection_index) {
            sum_first += *c.first_detection_index;
            ++n_first;
        }
    }
    if (!reps.empty()) {
        mean.pre_shift_alarm_rate = sum_pre / static_cast<double>(reps.size());
        mean.post_shift_detection_rate = sum_post / static_cast<double>(reps.size());
    }
    if (n_first > 0)
        mean.first_detection_index = sum_first / static_cast<double>(n_first);
    return mean;
}

} // namespace

comparison_report compare_charts(const simulation_spec& spec, double alpha,
                                 std::size_t repetitions, bool parallel) {
    validate(spec);
    if (repetitions < 1)
        throw std::invalid_argument("repetitions must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("invalid alpha");

    comparison_report report;
    report.spec = spec;
    report.alpha = alpha;
    report.repetitions = repetitions;
    report.per_repetition.resize(repetitions);

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(repetitions); ++r)
            report.per_repetition[static_cast<std::size_t>(r)] =
                run_repetition(spec, alpha, static_cast<std::size_t>(r));
    } else {
        for (std::size_t r = 0; r < repetitions; ++r)
            report.per_repetition[r] = run_repetition(spec, alpha, r);
    }

    report.shewhart_mean = aggregate("shewhart", report.per_repetition,
                                     &repetition_result::shewhart);
    report.conformal_mean = aggregate("conformal", report.per_repetition,
                                      &repetition_result::conformal);
    return report;
}

labeled_scenario generate_labeled(const labeled_scenario_spec& spec) {
    if (spec.n_train < 2 || spec.n_calibration < 1 || spec.n_stream < 1)
        throw std::invalid_argument("streams must be non-empty");
    if (spec.onset_index > spec.n_stream)
        throw std::invalid_argument("onset beyond stream end");
    if (!(spec.sigma > 0.0) || !(spec.noise_factor > 0.0))
        throw std::invalid_argument("sigma and factor must be > 0");

    rng::engine eng(spec.seed);
    const auto response = [](double x) { return 2.0 + 3.0 * x; };
    const auto local_sigma = [&](double x) {
        return x >= 0.7 ? spec.sigma * spec.noise_factor : spec.sigma;
    };
    const auto make = [&](double x) {
        return labeled_point{{x}, response(x) + local_sigma(x) * rng::standard_normal(eng)};
    };

    labeled_scenario out;
    out.train.reserve(spec.n_train);
    for (std::size_t i = 0; i < spec.n_train; ++i)
        out.train.push_back(make(rng::uniform01(eng)));
    out.calibration.reserve(spec.n_calibration);
    for (std::size_t i = 0; i < spec.n_calibration; ++i)
        out.calibration.push_back(make(0.6 * rng::uniform01(eng)));
    out.stream.reserve(spec.n_stream);
    for (std::size_t i = 0; i < spec.n_stream; ++i) {
        const double x = i < spec.onset_index ? 0.6 * rng::uniform01(eng)
                                              : 0.75 + 0.2 * rng::uniform01(eng);
        out.stream.push_back(make(x));
    }
    return out;
}

} // namespace cspc
