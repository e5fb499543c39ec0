// cspc: conformal statistical process control from the command line.
//
// Subcommands compose the library end to end: `calibrate` freezes a model
// archive from in-control data, `monitor` scores a stream against an archive
// (exit code 1 when anything alarms), `simulate` reproduces the
// Shewhart-vs-conformal comparison experiments, `chart` renders SVG charts.

#include <ctime>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cspc/calibration.hpp"
#include "cspc/charts.hpp"
#include "cspc/format.hpp"
#include "cspc/io.hpp"
#include "cspc/kernels.hpp"
#include "cspc/multivariate.hpp"
#include "cspc/persist.hpp"
#include "cspc/render.hpp"
#include "cspc/scores.hpp"
#include "cspc/simulate.hpp"

namespace {

using namespace cspc;

std::string now_utc() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t clamp_warning_size(double alpha) {
    return static_cast<std::uint64_t>(std::ceil(min_calibration_size(alpha)));
}

void print_clamp_warning(const calibration_model& model) {
    if (model.clamped())
        std::cerr << "warning: rank ceil((1-alpha)(n+1)) exceeds n=" << model.size()
                  << "; q clamped to the maximum score. The false-alarm guarantee needs n >= "
                  << clamp_warning_size(model.alpha()) << " at alpha=" << model.alpha() << "\n";
}

struct calibrate_options {
    std::string input;
    std::string out;
    double alpha = 0.05;
    std::string scorer = "auto";
    std::string model = "auto";
    std::string detector = "knn";
    std::size_t k = 5;
    double ridge = -1.0; // < 0 means default
    double split_fraction = 0.5;
    std::uint64_t seed = 0;
};

int run_calibrate(const calibrate_options& opt) {
    const dataset ds = read_dataset(opt.input);
    const split_spec splitter{opt.split_fraction, opt.seed};

    std::optional<calibration_model> model;
    std::shared_ptr<const predictive_model> predictive;
    std::shared_ptr<const anomaly_detector> detector;
    std::vector<labeled_point> calibration_points;

    std::string scorer_choice = opt.scorer;
    if (scorer_choice == "auto") {
        switch (ds.kind) {
        case dataset_kind::individuals: scorer_choice = "individual"; break;
        case dataset_kind::subgroups: scorer_choice = "subgroup-mean"; break;
        case dataset_kind::labeled: scorer_choice = "model-residual"; break;
        case dataset_kind::vectors: scorer_choice = "detector"; break;
        }
    }

    if (scorer_choice == "individual") {
        if (ds.kind != dataset_kind::individuals)
            throw std::runtime_error("scorer 'individual' needs a `value` input file");
        const auto scorer = fit_individual(ds.individuals);
        auto scores = kernels::score_stream(scorer, std::span<const observation>(ds.individuals));
        model = calibrate(std::move(scores), opt.alpha, std::string(scorer.id()),
                          scorer.reference());
    } else if (scorer_choice == "subgroup-mean" || scorer_choice == "subgroup-range") {
        if (ds.kind != dataset_kind::subgroups)
            throw std::runtime_error("subgroup scorers need a `subgroup,value` input file");
        const auto scorer = scorer_choice == "subgroup-mean" ? fit_subgroup_mean(ds.subgroups)
                                                             : fit_subgroup_range(ds.subgroups);
        auto scores = kernels::score_stream(scorer, std::span<const subgroup>(ds.subgroups));
        model = calibrate(std::move(scores), opt.alpha, std::string(scorer.id()),
                          scorer.reference());
    } else if (scorer_choice == "model-residual" || scorer_choice == "normalized-residual") {
        if (ds.kind != dataset_kind::labeled)
            throw std::runtime_error("model scorers need an `x...,y` input file");
        const auto [train, calib] = split(ds.labeled, splitter);

        std::string model_choice = opt.model;
        if (model_choice == "auto")
            model_choice = scorer_choice == "model-residual" ? "line" : "knn";
        if (model_choice == "line")
            predictive = std::make_shared<line_model>(line_model::fit(train));
        else if (model_choice == "knn")
            predictive = std::make_shared<knn_regressor>(knn_regressor::fit(train, opt.k));
        else
            throw std::runtime_error("unknown model: " + model_choice);

        const auto scorer = scorer_choice == "model-residual"
                                ? fit_model_residual(predictive)
                                : fit_normalized_residual(predictive);
        auto scores = kernels::score_stream(scorer, std::span<const labeled_point>(calib));
        model = calibrate(std::move(scores), opt.alpha, std::string(scorer.id()), 0.0);
        if (scorer_choice == "normalized-residual")
            calibration_points = calib; // spike-chart widths come from these
    } else if (scorer_choice == "detector") {
        if (ds.kind != dataset_kind::vectors)
            throw std::runtime_error("detectors need a `v1..vd` input file");
        const auto [train, calib] = split(ds.vectors, splitter);
        if (opt.detector == "knn")
            detector = std::make_shared<knn_detector>(train, opt.k);
        else if (opt.detector == "mahalanobis")
            detector = std::make_shared<mahalanobis_detector>(
                train, opt.ridge < 0.0 ? std::optional<double>{} : std::optional<double>{opt.ridge});
        else
            throw std::runtime_error("unknown detector: " + opt.detector);
        model = calibrate_detector(*detector, calib, opt.alpha);
    } else {
        throw std::runtime_error("unknown scorer: " + scorer_choice);
    }

    const model_archive archive{model_archive::current_version,
                                std::move(*model),
                                std::move(predictive),
                                std::move(detector),
                                std::move(calibration_points),
                                {file_digest(opt.input), now_utc(), opt.seed}};
    save_archive(archive, opt.out);
    std::cout << "n=" << archive.model.size() << " k=" << archive.model.quantile_rank()
              << " q=" << fmt_shortest(archive.model.threshold())
              << " alpha=" << fmt_shortest(archive.model.alpha())
              << " scorer=" << archive.model.scorer_id() << "\n"
              << "archive written to " << opt.out << "\n";
    print_clamp_warning(archive.model);
    return 0;
}

struct monitor_options {
    std::string archive;
    std::string input;
    std::string out;
};

int run_monitor(const monitor_options& opt) {
    const model_archive archive = load_archive(opt.archive);
    const dataset ds = read_dataset(opt.input);

    std::vector<double> scores;
    std::vector<std::int64_t> indices;
    chart_series series;

    if (archive.detector) {
        if (ds.kind != dataset_kind::vectors)
            throw std::runtime_error("archive expects a `v1..vd` stream");
        series = monitor(*archive.detector, archive.model, ds.vectors, archive.model.alpha());
        scores = kernels::detector_scores(*archive.detector, ds.vectors);
        for (const auto& v : ds.vectors)
            indices.push_back(v.index);
    } else {
        const auto scorer = scorer_from_archive(archive);
        switch (scorer.kind()) {
        case scorer_kind::individual_median:
            if (ds.kind != dataset_kind::individuals)
                throw std::runtime_error("archive expects a `value` stream");
            scores = kernels::score_stream(scorer, std::span<const observation>(ds.individuals));
            series = conformal_score_chart(archive.model, scorer, ds.individuals);
            for (const auto& o : ds.individuals)
                indices.push_back(o.index);
            break;
        case scorer_kind::subgroup_mean_median:
        case scorer_kind::subgroup_range_median:
            if (ds.kind != dataset_kind::subgroups)
                throw std::runtime_error("archive expects a `subgroup,value` stream");
            scores = kernels::score_stream(scorer, std::span<const subgroup>(ds.subgroups));
            series = conformal_score_chart(archive.model, scorer, ds.subgroups);
            for (const auto& g : ds.subgroups)
                indices.push_back(g.index);
            break;
        case scorer_kind::model_residual:
        case scorer_kind::normalized_residual:
            if (ds.kind != dataset_kind::labeled)
                throw std::runtime_error("archive expects an `x...,y` stream");
            scores = kernels::score_stream(scorer, std::span<const labeled_point>(ds.labeled));
            if (scorer.kind() == scorer_kind::model_residual)
                series = conformal_interval_chart(archive.model, scorer.model(), ds.labeled);
            else
                series = uncertainty_spike_chart(archive.model, scorer.model(), 0.05,
                                                 archive.calibration_points, ds.labeled);
            for (std::size_t i = 0; i < ds.labeled.size(); ++i)
                indices.push_back(static_cast<std::int64_t>(i));
            break;
        }
    }

    if (!opt.out.empty())
        write_file(opt.out, format_chart_series(series));

    std::size_t alarms = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!is_out_of_control(archive.model, scores[i]))
            continue;
        ++alarms;
        std::cout << "ALARM index=" << indices[i] << " score=" << fmt_shortest(scores[i])
                  << " p=" << fmt_shortest(conformal_p_value(archive.model, scores[i])) << "\n";
    }
    std::cout << alarms << " alarm(s) in " << scores.size() << " points\n";
    return alarms > 0 ? 1 : 0;
}

struct simulate_options {
    simulation_spec spec;
    std::string shift = "none";
    double alpha = 0.0027;
    std::size_t reps = 1;
    std::string out;
    std::string svg_prefix;
    bool serial = false;
    std::string generator = "normal";
};

int run_simulate(const simulate_options& opt) {
    simulation_spec spec = opt.spec;
    spec.generator.kind = generator_kind_from_string(opt.generator);
    if (opt.shift == "none") spec.shift.kind = shift_kind::none;
    else if (opt.shift == "mean") spec.shift.kind = shift_kind::mean_shift;
    else if (opt.shift == "scale") spec.shift.kind = shift_kind::scale_shift;
    else if (opt.shift == "noise") spec.shift.kind = shift_kind::noise_shift;
    else throw std::runtime_error("unknown shift: " + opt.shift);

    const auto report = compare_charts(spec, opt.alpha, opt.reps, !opt.serial);
    const std::string table = render_report(report);
    if (!opt.out.empty())
        write_file(opt.out, table);
    else
        std::cout << table;

    std::cout << "mean pre-shift alarm rate: shewhart="
              << fmt_sig(report.shewhart_mean.pre_shift_alarm_rate, 6)
              << " conformal=" << fmt_sig(report.conformal_mean.pre_shift_alarm_rate, 6) << "\n"
              << "mean post-shift detection rate: shewhart="
              << fmt_sig(report.shewhart_mean.post_shift_detection_rate, 6)
              << " conformal=" << fmt_sig(report.conformal_mean.post_shift_detection_rate, 6)
              << "\n";

    if (!opt.svg_prefix.empty()) {
        // charts for the first repetition
        simulation_spec first = spec;
        first.seed = spec.seed;
        const auto streams = generate(first);
        render_spec rspec;
        rspec.title = "shewhart baseline";
        write_file(opt.svg_prefix + "-shewhart.svg",
                   render_chart(shewhart_chart(streams.calibration, streams.stream), rspec));
        const auto scorer = fit_individual(streams.calibration);
        auto calib_scores =
            kernels::score_stream(scorer, std::span<const observation>(streams.calibration));
        const auto model = calibrate(std::move(calib_scores), opt.alpha,
                                     std::string(scorer.id()), scorer.reference());
        rspec.title = "conformal score chart";
        write_file(opt.svg_prefix + "-conformal.svg",
                   render_chart(conformal_score_chart(model, scorer, streams.stream), rspec));
    }
    return 0;
}

struct chart_options {
    std::string archive;
    std::string input;
    std::string calibration;
    std::string kind = "score";
    std::string out;
    std::string title;
    double alpha = -1.0;       // default: archive alpha
    double width_alpha = 0.05;
    int width = 900;
    int height = 360;
};

int run_chart(const chart_options& opt) {
    render_spec rspec;
    rspec.width = opt.width;
    rspec.height = opt.height;
    rspec.title = opt.title;

    chart_series series;
    if (opt.kind == "shewhart") {
        if (opt.calibration.empty())
            throw std::runtime_error("shewhart chart needs --calibration");
        const dataset calib = read_dataset(opt.calibration);
        const dataset stream = read_dataset(opt.input);
        if (calib.kind != dataset_kind::individuals || stream.kind != dataset_kind::individuals)
            throw std::runtime_error("shewhart chart needs `value` files");
        series = shewhart_chart(calib.individuals, stream.individuals);
    } else {
        if (opt.archive.empty())
            throw std::runtime_error("chart kind '" + opt.kind + "' needs --archive");
        const model_archive archive = load_archive(opt.archive);
        const dataset ds = read_dataset(opt.input);
        const double alpha = opt.alpha > 0.0 ? opt.alpha : archive.model.alpha();

        if (opt.kind == "interval") {
            if (archive.model.scorer_id() != to_string(scorer_kind::model_residual))
                throw std::runtime_error("chart kind requires model-residual archive");
            if (ds.kind != dataset_kind::labeled)
                throw std::runtime_error("interval chart needs an `x...,y` stream");
            series = conformal_interval_chart(archive.model, *archive.predictive, ds.labeled);
        } else if (opt.kind == "spike") {
            if (archive.model.scorer_id() != to_string(scorer_kind::normalized_residual))
                throw std::runtime_error("chart kind requires normalized-residual archive");
            if (ds.kind != dataset_kind::labeled)
                throw std::runtime_error("spike chart needs an `x...,y` stream");
            series = uncertainty_spike_chart(archive.model, *archive.predictive, opt.width_alpha,
                                             archive.calibration_points, ds.labeled);
        } else if (opt.kind == "score" || opt.kind == "pvalue") {
            if (archive.detector) {
                if (ds.kind != dataset_kind::vectors)
                    throw std::runtime_error("archive expects a `v1..vd` stream");
                if (opt.kind == "pvalue") {
                    series = monitor(*archive.detector, archive.model, ds.vectors, alpha);
                } else {
                    const auto scores = kernels::detector_scores(*archive.detector, ds.vectors);
                    series.kind = chart_kind::conformal_score;
                    series.limit = archive.model.threshold();
                    series.alpha = archive.model.alpha();
                    for (std::size_t i = 0; i < scores.size(); ++i)
                        series.points.push_back({ds.vectors[i].index, scores[i], {}, {},
                                                 is_out_of_control(archive.model, scores[i]),
                                                 false});
                }
            } else {
                const auto scorer = scorer_from_archive(archive);
                if (scorer.kind() == scorer_kind::individual_median) {
                    if (ds.kind != dataset_kind::individuals)
                        throw std::runtime_error("archive expects a `value` stream");
                    series = opt.kind == "pvalue"
                                 ? p_value_chart(archive.model, scorer, alpha, ds.individuals)
                                 : conformal_score_chart(archive.model, scorer, ds.individuals);
                } else if (scorer.kind() == scorer_kind::subgroup_mean_median ||
                           scorer.kind() == scorer_kind::subgroup_range_median) {
                    if (ds.kind != dataset_kind::subgroups)
                        throw std::runtime_error("archive expects a `subgroup,value` stream");
                    series = opt.kind == "pvalue"
                                 ? p_value_chart(archive.model, scorer, alpha, ds.subgroups)
                                 : conformal_score_chart(archive.model, scorer, ds.subgroups);
                } else {
                    throw std::runtime_error("score/pvalue charts need an individual, subgroup "
                                             "or detector archive");
                }
            }
        } else {
            throw std::runtime_error("unknown chart kind: " + opt.kind);
        }
    }

    write_file(opt.out, render_chart(series, rspec));
    std::cout << "chart written to " << opt.out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"conformal statistical process control toolkit"};
    app.require_subcommand(1);

    calibrate_options copt;
    auto* cal = app.add_subcommand("calibrate", "freeze a calibration model from in-control data");
    cal->add_option("--input", copt.input, "delimited input file with header row")
        ->required()
        ->check(CLI::ExistingFile);
    cal->add_option("--alpha", copt.alpha, "target false-alarm rate in (0,1)")->required();
    cal->add_option("--scorer", copt.scorer,
                    "individual|subgroup-mean|subgroup-range|model-residual|"
                    "normalized-residual|detector (default: inferred from header)");
    cal->add_option("--model", copt.model, "predictive model for model scorers: line|knn");
    cal->add_option("--detector", copt.detector, "detector for vector inputs: knn|mahalanobis");
    cal->add_option("--k", copt.k, "k for knn model/detector");
    cal->add_option("--ridge", copt.ridge, "mahalanobis ridge (default 1e-6*trace/d)");
    cal->add_option("--split", copt.split_fraction, "train fraction for model/detector scorers");
    cal->add_option("--seed", copt.seed, "split shuffle seed");
    cal->add_option("--out", copt.out, "archive output path")->required();

    monitor_options mopt;
    auto* mon = app.add_subcommand("monitor", "score a stream against an archive");
    mon->add_option("--archive", mopt.archive, "model archive")->required()->check(CLI::ExistingFile);
    mon->add_option("--input", mopt.input, "stream file")->required()->check(CLI::ExistingFile);
    mon->add_option("--out", mopt.out, "chart data output (TSV)");

    simulate_options sopt;
    auto* sim = app.add_subcommand("simulate", "Shewhart vs conformal comparison experiments");
    sim->add_option("--generator", sopt.generator, "normal|exponential|bimodal");
    sim->add_option("--mu", sopt.spec.generator.mu, "normal mean");
    sim->add_option("--sigma", sopt.spec.generator.sigma, "normal/bimodal sigma");
    sim->add_option("--rate", sopt.spec.generator.rate, "exponential rate");
    sim->add_option("--mu1", sopt.spec.generator.mu1, "bimodal mode 1");
    sim->add_option("--mu2", sopt.spec.generator.mu2, "bimodal mode 2");
    sim->add_option("--weight", sopt.spec.generator.weight, "bimodal mode-1 weight");
    sim->add_option("--n-calib", sopt.spec.n_calibration, "calibration size");
    sim->add_option("--n-stream", sopt.spec.n_stream, "monitoring stream size");
    sim->add_option("--onset", sopt.spec.shift.onset_index, "shift onset index");
    sim->add_option("--shift", sopt.shift, "none|mean|scale|noise");
    sim->add_option("--delta", sopt.spec.shift.delta, "mean shift delta");
    sim->add_option("--factor", sopt.spec.shift.factor, "scale/noise factor");
    sim->add_option("--alpha", sopt.alpha, "false-alarm rate");
    sim->add_option("--reps", sopt.reps, "Monte-Carlo repetitions");
    sim->add_option("--seed", sopt.spec.seed, "base seed");
    sim->add_option("--out", sopt.out, "report output (TSV)");
    sim->add_option("--svg", sopt.svg_prefix, "write <prefix>-{shewhart,conformal}.svg");
    sim->add_flag("--serial", sopt.serial, "disable parallel repetitions");

    chart_options hopt;
    auto* cha = app.add_subcommand("chart", "render a chart as SVG");
    cha->add_option("--kind", hopt.kind, "score|interval|spike|pvalue|shewhart");
    cha->add_option("--archive", hopt.archive, "model archive")->check(CLI::ExistingFile);
    cha->add_option("--input", hopt.input, "stream file")->required()->check(CLI::ExistingFile);
    cha->add_option("--calibration", hopt.calibration, "calibration file (shewhart kind)")
        ->check(CLI::ExistingFile);
    cha->add_option("--alpha", hopt.alpha, "alpha line for pvalue charts");
    cha->add_option("--width-alpha", hopt.width_alpha, "spike width quantile level");
    cha->add_option("--width", hopt.width, "SVG width in px");
    cha->add_option("--height", hopt.height, "SVG height in px");
    cha->add_option("--title", hopt.title, "chart title");
    cha->add_option("--out", hopt.out, "SVG output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cal->parsed())
            return run_calibrate(copt);
        if (mon->parsed())
            return run_monitor(mopt);
        if (sim->parsed())
            return run_simulate(sopt);
        if (cha->parsed())
            return run_chart(hopt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
