#include "cspc/persist.hpp"

#include <fstream>

#include <json.hpp>

#include "cspc/calibration.hpp"

namespace cspc {

using nlohmann::json;

namespace {

json labeled_to_json(const std::vector<labeled_point>& points) {
    json arr = json::array();
    for (const auto& p : points)
        arr.push_back(json{{"x", p.x}, {"y", p.y}});
    return arr;
}

std::vector<labeled_point> labeled_from_json(const json& arr) {
    std::vector<labeled_point> points;
    points.reserve(arr.size());
    for (const auto& item : arr)
        points.push_back({item.at("x").get<std::vector<double>>(), item.at("y").get<double>()});
    return points;
}

json predictive_to_json(const predictive_model& model) {
    json j;
    j["id"] = model.id();
    if (const auto* line = dynamic_cast<const line_model*>(&model)) {
        j["intercept"] = line->intercept();
        j["slope"] = line->slope();
    } else if (const auto* knn = dynamic_cast<const knn_regressor*>(&model)) {
        j["k"] = knn->k();
        j["train"] = labeled_to_json(knn->train());
    } else {
        // external models re-attach at load time by identifier
        j["external"] = true;
    }
    return j;
}

std::shared_ptr<const predictive_model> predictive_from_json(const json& j) {
    const auto id = j.at("id").get<std::string>();
    if (id == "line")
        return std::make_shared<line_model>(j.at("intercept").get<double>(),
                                            j.at("slope").get<double>());
    if (id == "knn_regressor")
        return std::make_shared<knn_regressor>(labeled_from_json(j.at("train")),
                                               j.at("k").get<std::size_t>());
    throw std::runtime_error("archive references external model '" + id +
                             "'; re-attach it before monitoring");
}

json detector_to_json(const anomaly_detector& detector) {
    json j;
    j["id"] = detector.id();
    if (const auto* knn = dynamic_cast<const knn_detector*>(&detector)) {
        j["k"] = knn->k();
        j["n"] = knn->train_size();
        j["dimension"] = knn->dimension();
        j["train"] = knn->train_data();
    } else if (const auto* maha = dynamic_cast<const mahalanobis_detector*>(&detector)) {
        j["mean"] = maha->mean();
        j["chol_lower"] = maha->cholesky_lower();
        j["ridge"] = maha->ridge();
    } else {
        j["external"] = true;
    }
    return j;
}

std::shared_ptr<const anomaly_detector> detector_from_json(const json& j) {
    const auto id = j.at("id").get<std::string>();
    if (id == "knn_distance") {
        const auto n = j.at("n").get<std::size_t>();
        const auto dim = j.at("dimension").get<std::size_t>();
        const auto flat = j.at("train").get<std::vector<double>>();
        if (flat.size() != n * dim)
            throw std::runtime_error("corrupt archive");
        std::vector<process_vector> train(n);
        for (std::size_t i = 0; i < n; ++i) {
            train[i].index = static_cast<std::int64_t>(i);
            train[i].components.assign(flat.begin() + static_cast<std::ptrdiff_t>(i * dim),
                                       flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
        }
        return std::make_shared<knn_detector>(train, j.at("k").get<std::size_t>());
    }
    if (id == "mahalanobis")
        return std::make_shared<mahalanobis_detector>(
            j.at("mean").get<std::vector<double>>(),
            j.at("chol_lower").get<std::vector<double>>(), j.at("ridge").get<double>());
    throw std::runtime_error("archive references external detector '" + id +
                             "'; re-attach it before monitoring");
}

} // namespace

std::string archive_to_json(const model_archive& archive) {
    json j;
    j["format_version"] = archive.format_version;
    j["scorer_id"] = archive.model.scorer_id();
    j["alpha"] = archive.model.alpha();
    j["q"] = archive.model.threshold();
    j["quantile_rank"] = archive.model.quantile_rank();
    j["clamped"] = archive.model.clamped();
    j["center"] = archive.model.center();
    j["scores"] = archive.model.scores();
    if (archive.predictive)
        j["predictive"] = predictive_to_json(*archive.predictive);
    if (archive.detector)
        j["detector"] = detector_to_json(*archive.detector);
    if (!archive.calibration_points.empty())
        j["calibration_points"] = labeled_to_json(archive.calibration_points);
    j["provenance"] = {{"source_digest", archive.prov.source_digest},
                       {"created", archive.prov.created},
                       {"seed", archive.prov.seed}};
    return j.dump(2) + "\n";
}

model_archive archive_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception&) {
        throw std::runtime_error("corrupt archive");
    }

    try {
        const int version = j.at("format_version").get<int>();
        if (version != model_archive::current_version)
            throw std::runtime_error("unsupported archive version");

        auto scores = j.at("scores").get<std::vector<double>>();
        const auto alpha = j.at("alpha").get<double>();
        const auto q = j.at("q").get<double>();
        const auto rank = j.at("quantile_rank").get<std::size_t>();
        const auto clamped = j.at("clamped").get<bool>();

        // the stored rank and threshold must agree with the quantile rule
        const auto expected = conformal_quantile_index(scores.size(), alpha);
        if (expected.k != rank || expected.clamped != clamped)
            throw std::runtime_error("corrupt archive");

        calibration_model model(std::move(scores), alpha, q, rank, clamped,
                                j.at("center").get<double>(),
                                j.at("scorer_id").get<std::string>());

        model_archive archive{version, std::move(model), nullptr, nullptr, {}, {}};
        if (j.contains("predictive"))
            archive.predictive = predictive_from_json(j.at("predictive"));
        if (j.contains("detector"))
            archive.detector = detector_from_json(j.at("detector"));
        if (j.contains("calibration_points"))
            archive.calibration_points = labeled_from_json(j.at("calibration_points"));
        if (j.contains("provenance")) {
            const auto& p = j.at("provenance");
            archive.prov.source_digest = p.value("source_digest", "");
            archive.prov.created = p.value("created", "");
            archive.prov.seed = p.value("seed", std::uint64_t{0});
        }
        return archive;
    } catch (const json::exception&) {
        throw std::runtime_error("corrupt archive");
    } catch (const std::invalid_argument&) {
        // calibration_model invariant violations (unsorted scores, q mismatch)
        throw std::runtime_error("corrupt archive");
    }
}

void save_archive(const model_archive& archive, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path.string());
    out << archive_to_json(archive);
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

model_archive load_archive(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return archive_from_json(text);
}

nonconformity_scorer scorer_from_archive(const model_archive& archive) {
    const auto kind = scorer_kind_from_string(archive.model.scorer_id());
    switch (kind) {
    case scorer_kind::individual_median:
        return nonconformity_scorer::individual(archive.model.center());
    case scorer_kind::subgroup_mean_median:
        return nonconformity_scorer::subgroup_mean(archive.model.center());
    case scorer_kind::subgroup_range_median:
        return nonconformity_scorer::subgroup_range(archive.model.center());
    case scorer_kind::model_residual:
        if (!archive.predictive)
            throw std::runtime_error("corrupt archive");
        return nonconformity_scorer::model_residual(archive.predictive);
    case scorer_kind::normalized_residual:
        if (!archive.predictive)
            throw std::runtime_error("corrupt archive");
        return nonconformity_scorer::normalized_residual(archive.predictive);
    }
    throw std::runtime_error("corrupt archive");
}

} // namespace cspc
