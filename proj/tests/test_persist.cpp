#include <doctest.h>

#include <memory>

#include <json.hpp>

#include "cspc/calibration.hpp"
#include "cspc/kernels.hpp"
#include "cspc/persist.hpp"
#include "cspc/rng.hpp"
#include "helpers.hpp"

using namespace cspc;

namespace {

model_archive individual_archive(std::size_t n, double alpha, rng::engine& g) {
    const auto calib = testutil::exponential_observations(n, 1.0, g);
    const auto scorer = fit_individual(calib);
    auto scores = kernels::score_stream(scorer, std::span<const observation>(calib));
    return {model_archive::current_version,
            calibrate(std::move(scores), alpha, std::string(scorer.id()), scorer.reference()),
            nullptr,
            nullptr,
            {},
            {"deadbeef00000000", "2026-01-01T00:00:00Z", 7}};
}

std::string tamper(const std::string& text, const char* field, nlohmann::json value) {
    auto j = nlohmann::json::parse(text);
    j[field] = std::move(value);
    return j.dump();
}

} // namespace

TEST_CASE("archive round trip preserves every field") {
    rng::engine g(40);
    const auto archive = individual_archive(99, 0.1, g);
    const auto loaded = archive_from_json(archive_to_json(archive));
    CHECK(loaded.format_version == archive.format_version);
    CHECK(loaded.model == archive.model);
    CHECK(loaded.prov == archive.prov);
    // and a second trip is byte-identical
    CHECK(archive_to_json(loaded) == archive_to_json(archive));
}

TEST_CASE("file round trip") {
    testutil::temp_dir dir;
    rng::engine g(41);
    const auto archive = individual_archive(50, 0.2, g);
    save_archive(archive, dir.file("m.json"));
    const auto loaded = load_archive(dir.file("m.json"));
    CHECK(loaded.model == archive.model);
    CHECK_THROWS(load_archive(dir.file("missing.json")));
}

TEST_CASE("tampered archives are rejected") {
    rng::engine g(42);
    const auto archive = individual_archive(20, 0.25, g);
    const auto text = archive_to_json(archive);
    // q off the quantile rank
    CHECK_THROWS_WITH(
        archive_from_json(tamper(text, "q", archive.model.threshold() + 1.0)).model.size(),
        "corrupt archive");
    // rank inconsistent with (n, alpha)
    CHECK_THROWS_WITH(
        archive_from_json(tamper(text, "quantile_rank", 1)).model.size(), "corrupt archive");
    // unsorted scores
    auto scores = archive.model.scores();
    std::swap(scores.front(), scores.back());
    CHECK_THROWS_WITH(archive_from_json(tamper(text, "scores", scores)).model.size(),
                      "corrupt archive");
}

TEST_CASE("truncated and malformed archives are rejected") {
    rng::engine g(43);
    const auto text = archive_to_json(individual_archive(20, 0.25, g));
    CHECK_THROWS_WITH(archive_from_json(text.substr(0, text.size() / 2)).model.size(),
                      "corrupt archive");
    CHECK_THROWS_WITH(archive_from_json("not json at all").model.size(), "corrupt archive");
    CHECK_THROWS_WITH(archive_from_json("{}").model.size(), "corrupt archive");
}

TEST_CASE("unsupported version is reported as such") {
    rng::engine g(44);
    const auto text = archive_to_json(individual_archive(20, 0.25, g));
    CHECK_THROWS_WITH(archive_from_json(tamper(text, "format_version", 99)).model.size(),
                      "unsupported archive version");
}

TEST_CASE("predictive model round trip predicts identically") {
    std::vector<labeled_point> train;
    rng::engine g(45);
    for (int i = 0; i < 40; ++i) {
        const double x = 10.0 * rng::uniform01(g);
        train.push_back({{x}, 3.0 - 0.5 * x + rng::normal(g, 0, 0.2)});
    }
    const auto line = std::make_shared<line_model>(line_model::fit(train));
    const auto knn = std::make_shared<knn_regressor>(knn_regressor::fit(train, 5));

    for (const std::shared_ptr<const predictive_model>& m :
         {std::static_pointer_cast<const predictive_model>(line),
          std::static_pointer_cast<const predictive_model>(knn)}) {
        const auto scorer = fit_model_residual(m);
        std::vector<double> scores;
        for (const auto& p : train)
            scores.push_back(scorer.score(p));
        model_archive archive{model_archive::current_version,
                              calibrate(std::move(scores), 0.1, "model_residual", 0.0),
                              m,
                              nullptr,
                              {},
                              {}};
        const auto loaded = archive_from_json(archive_to_json(archive));
        REQUIRE(loaded.predictive != nullptr);
        for (double x = 0.0; x < 10.0; x += 0.37)
            CHECK(loaded.predictive->predict(std::vector<double>{x}) ==
                  m->predict(std::vector<double>{x}));
    }
}

TEST_CASE("detector round trip scores identically") {
    rng::engine g(46);
    const auto chol = testutil::cholesky_of(testutil::ar1_covariance(3, 0.3), 3);
    const auto train = testutil::gaussian_vectors(80, {0, 0, 0}, chol, g);
    const auto calib = testutil::gaussian_vectors(59, {0, 0, 0}, chol, g);
    const auto probe = testutil::gaussian_vectors(40, {0, 0, 0}, chol, g);

    const auto knn = std::make_shared<knn_detector>(train, 3);
    const auto maha = std::make_shared<mahalanobis_detector>(train);
    for (const std::shared_ptr<const anomaly_detector>& d :
         {std::static_pointer_cast<const anomaly_detector>(knn),
          std::static_pointer_cast<const anomaly_detector>(maha)}) {
        model_archive archive{model_archive::current_version,
                              calibrate_detector(*d, calib, 0.1),
                              nullptr,
                              d,
                              {},
                              {}};
        const auto loaded = archive_from_json(archive_to_json(archive));
        REQUIRE(loaded.detector != nullptr);
        const auto a = kernels::detector_scores_serial(*d, probe);
        const auto b = kernels::detector_scores_serial(*loaded.detector, probe);
        CHECK(a == b);
    }
}

TEST_CASE("decisions survive the round trip bit for bit") {
    rng::engine g(47);
    const auto archive = individual_archive(999, 0.05, g);
    const auto loaded = archive_from_json(archive_to_json(archive));
    const auto scorer = scorer_from_archive(archive);
    const auto scorer2 = scorer_from_archive(loaded);
    const auto stream = testutil::exponential_observations(1000, 1.0, g);
    for (const auto& o : stream) {
        const double s1 = scorer.score(o), s2 = scorer2.score(o);
        CHECK(s1 == s2);
        CHECK(is_out_of_control(archive.model, s1) == is_out_of_control(loaded.model, s2));
        CHECK(conformal_p_value(archive.model, s1) == conformal_p_value(loaded.model, s2));
    }
}
