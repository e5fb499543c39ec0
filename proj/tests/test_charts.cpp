#include <doctest.h>

#include <cmath>
#include <memory>

#include "cspc/charts.hpp"
#include "cspc/kernels.hpp"
#include "cspc/rng.hpp"
#include "helpers.hpp"

using namespace cspc;

namespace {

std::vector<observation> obs(std::initializer_list<double> values) {
    std::vector<observation> out;
    std::int64_t i = 0;
    for (double v : values)
        out.push_back({i++, v});
    return out;
}

// individual-median model with threshold q built from raw scores
calibration_model model_with_q3() {
    return calibrate({1, 2, 3}, 0.25, "individual_median", 0.0); // k = ceil(0.75*4) = 3
}

} // namespace

TEST_CASE("shewhart_chart limits and flags") {
    const auto calib = obs({-1, 0, 1}); // mean 0, sample std 1
    const auto series = shewhart_chart(calib, obs({3.5, 3.0, -3.5, 0.0}));
    REQUIRE(series.shewhart.has_value());
    CHECK(series.shewhart->center == 0.0);
    CHECK(series.shewhart->sigma == 1.0);
    CHECK(series.shewhart->ucl == 3.0);
    CHECK(series.shewhart->lcl == -3.0);
    CHECK(series.points[0].limit_exceeded);       // 3.5 > ucl
    CHECK_FALSE(series.points[1].limit_exceeded); // boundary is in control
    CHECK(series.points[2].limit_exceeded);
    CHECK_FALSE(series.points[3].limit_exceeded);
}

TEST_CASE("shewhart_chart degenerate calibration") {
    const auto series = shewhart_chart(obs({5, 5, 5}), obs({5.0, 5.1, 4.9}));
    CHECK(series.shewhart->sigma == 0.0);
    CHECK_FALSE(series.points[0].limit_exceeded); // exactly on both limits
    CHECK(series.points[1].limit_exceeded);
    CHECK(series.points[2].limit_exceeded);
}

TEST_CASE("shewhart_chart needs two calibration points") {
    CHECK_THROWS_WITH(shewhart_chart(obs({1}), obs({2})), "need >=2 points for std");
}

TEST_CASE("shewhart flags ignore index labels") {
    const auto calib = obs({-1, 0, 1});
    auto stream = obs({3.5, 0.0, -4.0});
    const auto a = shewhart_chart(calib, stream);
    for (auto& o : stream)
        o.index += 1000;
    const auto b = shewhart_chart(calib, stream);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i)
        CHECK(a.points[i].limit_exceeded == b.points[i].limit_exceeded);
}

TEST_CASE("conformal_score_chart threshold rule") {
    const auto model = model_with_q3();
    const auto scorer = nonconformity_scorer::individual(0.0); // score = |x|
    const auto series = conformal_score_chart(model, scorer, obs({1, 2, 5}));
    REQUIRE(series.points.size() == 3);
    CHECK(series.limit == 3.0);
    CHECK(series.points[0].value == 1.0);
    CHECK_FALSE(series.points[0].limit_exceeded);
    CHECK_FALSE(series.points[1].limit_exceeded);
    CHECK(series.points[2].limit_exceeded);
}

TEST_CASE("conformal_score_chart empty stream and mismatch") {
    const auto model = model_with_q3();
    const auto scorer = nonconformity_scorer::individual(0.0);
    CHECK(conformal_score_chart(model, scorer, std::vector<observation>{}).points.empty());

    const auto wrong = calibrate({1, 2, 3}, 0.25, "subgroup_mean_median", 0.0);
    CHECK_THROWS_WITH(conformal_score_chart(wrong, scorer, obs({1})).points.size(),
                      "calibration mismatch");
}

TEST_CASE("conformal flags are invariant under calibration permutation") {
    rng::engine g(20);
    std::vector<double> scores(99);
    for (auto& s : scores)
        s = rng::exponential(g, 1.0);
    const auto scorer = nonconformity_scorer::individual(0.0);
    const auto stream = testutil::normal_observations(200, 0, 3, g);
    const auto base = conformal_score_chart(
        calibrate(scores, 0.1, "individual_median", 0.0), scorer, stream);
    for (std::size_t i = scores.size() - 1; i > 0; --i)
        std::swap(scores[i], scores[rng::uniform_index(g, i + 1)]);
    const auto permuted = conformal_score_chart(
        calibrate(scores, 0.1, "individual_median", 0.0), scorer, stream);
    for (std::size_t i = 0; i < base.points.size(); ++i)
        CHECK(base.points[i].limit_exceeded == permuted.points[i].limit_exceeded);
}

TEST_CASE("conformal_interval_chart containment rule") {
    const line_model flat(10.0, 0.0); // yhat = 10
    const auto model = calibrate({1.0, 1.5, 2.0}, 0.25, "model_residual", 0.0); // q = 2
    const std::vector<labeled_point> stream{{{0.0}, 13.0}, {{0.0}, 12.0}, {{0.0}, 10.0},
                                            {{0.0}, 7.9}};
    const auto series = conformal_interval_chart(model, flat, stream);
    CHECK(series.points[0].lower == 8.0);
    CHECK(series.points[0].upper == 12.0);
    CHECK(series.points[0].limit_exceeded);       // 13 outside [8, 12]
    CHECK_FALSE(series.points[1].limit_exceeded); // boundary stays in control
    CHECK_FALSE(series.points[2].limit_exceeded);
    CHECK(series.points[3].limit_exceeded);

    // y = yhat is never flagged and the width is the constant 2q
    for (const auto& p : series.points)
        CHECK(*p.upper - *p.lower == 4.0);
    const auto centered = conformal_interval_chart(
        model, flat, std::vector<labeled_point>{{{0.0}, 10.0}});
    CHECK_FALSE(centered.points[0].limit_exceeded);

    const auto wrong = calibrate({1.0}, 0.25, "normalized_residual", 0.0);
    CHECK_THROWS_WITH(conformal_interval_chart(wrong, flat, stream).points.size(),
                      "calibration mismatch");
}

TEST_CASE("interval flag equals the residual rule on random data") {
    rng::engine g(21);
    std::vector<labeled_point> train, calib, stream;
    for (int i = 0; i < 200; ++i) {
        const double x = 10.0 * rng::uniform01(g);
        train.push_back({{x}, 1.0 + 2.0 * x + rng::normal(g, 0, 1)});
    }
    const auto predictive = std::make_shared<line_model>(line_model::fit(train));
    const auto scorer = fit_model_residual(predictive);
    std::vector<double> scores;
    for (int i = 0; i < 150; ++i) {
        const double x = 10.0 * rng::uniform01(g);
        calib.push_back({{x}, 1.0 + 2.0 * x + rng::normal(g, 0, 1)});
        scores.push_back(scorer.score(calib.back()));
    }
    const auto model = calibrate(scores, 0.1, "model_residual", 0.0);
    for (int i = 0; i < 300; ++i) {
        const double x = 10.0 * rng::uniform01(g);
        stream.push_back({{x}, 1.0 + 2.0 * x + rng::normal(g, 0, 1.5)});
    }
    const auto series = conformal_interval_chart(model, *predictive, stream);
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const bool residual_rule = scorer.score(stream[i]) > model.threshold();
        CHECK(series.points[i].limit_exceeded == residual_rule);
        const bool containment = stream[i].y < *series.points[i].lower ||
                                 stream[i].y > *series.points[i].upper;
        CHECK(series.points[i].limit_exceeded == containment);
    }
}

namespace {

class step_spread_model final : public predictive_model {
  public:
    step_spread_model(double base, double high, double edge)
        : base_(base), high_(high), edge_(edge) {}
    double predict(std::span<const double>) const override { return 0.0; }
    bool has_spread() const override { return true; }
    double spread(std::span<const double> x) const override {
        return x[0] >= edge_ ? high_ : base_;
    }
    std::string id() const override { return "step_spread_stub"; }

  private:
    double base_, high_, edge_;
};

} // namespace

TEST_CASE("uncertainty_spike_chart width rule") {
    const auto model = calibrate({0.5, 1.0, 1.5}, 0.25, "normalized_residual", 0.0); // q = 1.5

    // constant spread: every width equals the threshold, strict rule never fires
    const step_spread_model flat(1.0, 1.0, 1e9);
    std::vector<labeled_point> calib{{{0.0}, 0.0}, {{0.1}, 0.0}, {{0.2}, 0.0}};
    std::vector<labeled_point> quiet{{{0.3}, 0.0}, {{0.4}, 0.0}};
    auto series = uncertainty_spike_chart(model, flat, 0.25, calib, quiet);
    for (const auto& p : series.points)
        CHECK_FALSE(p.uncertainty_spike);
    CHECK(series.width_limit == 2.0 * 1.5 * 1.0);

    // a tenfold spread is a spike; an on-target y carries no limit flag
    const step_spread_model step(1.0, 10.0, 5.0);
    std::vector<labeled_point> stream{{{0.0}, 0.0}, {{6.0}, 0.0}};
    series = uncertainty_spike_chart(model, step, 0.25, calib, stream);
    CHECK_FALSE(series.points[0].uncertainty_spike);
    CHECK(series.points[1].uncertainty_spike);
    CHECK_FALSE(series.points[1].limit_exceeded);

    // flags are carried independently: big residual inside a spike region
    std::vector<labeled_point> both{{{6.0}, 200.0}};
    series = uncertainty_spike_chart(model, step, 0.25, calib, both);
    CHECK(series.points[0].uncertainty_spike);
    CHECK(series.points[0].limit_exceeded); // |200|/10 = 20 > q

    CHECK_THROWS_WITH(
        uncertainty_spike_chart(model, step, 0.25, {}, stream).points.size(),
        "empty calibration");
    const auto wrong = calibrate({1.0}, 0.25, "model_residual", 0.0);
    CHECK_THROWS_WITH(uncertainty_spike_chart(wrong, step, 0.25, calib, stream).points.size(),
                      "calibration mismatch");
}

TEST_CASE("p_value_chart flags p <= alpha") {
    std::vector<double> scores(9);
    for (std::size_t i = 0; i < 9; ++i)
        scores[i] = static_cast<double>(i + 1);
    const auto model = calibrate(scores, 0.1, "individual_median", 0.0);
    const auto scorer = nonconformity_scorer::individual(0.0);

    // scores 9.5, 5.5, 8.5 -> p = 0.1, 0.5, 0.2
    const auto series = p_value_chart(model, scorer, 0.1, obs({9.5, 5.5, 8.5}));
    CHECK(series.points[0].value == 0.1);
    CHECK(series.points[1].value == 0.5);
    CHECK(series.points[2].value == 0.2);
    CHECK(series.points[0].limit_exceeded); // p = alpha flags (inclusive)
    CHECK_FALSE(series.points[1].limit_exceeded);
    CHECK_FALSE(series.points[2].limit_exceeded);

    // minimum achievable p-value is 1/(n+1)
    const auto extreme = p_value_chart(model, scorer, 0.1, obs({1e6}));
    CHECK(extreme.points[0].value == 0.1);
}

TEST_CASE("score chart and p-value chart flag identical points") {
    rng::engine g(22);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 20 + rng::uniform_index(g, 200);
        std::vector<double> scores(n);
        for (auto& s : scores)
            s = rng::exponential(g, 1.0);
        const double alpha = 0.02 + 0.5 * rng::uniform01(g);
        const auto model = calibrate(scores, alpha, "individual_median", 0.0);
        if (model.clamped())
            continue;
        const auto scorer = nonconformity_scorer::individual(0.0);
        const auto stream = testutil::normal_observations(100, 0, 2, g);
        const auto score_chart = conformal_score_chart(model, scorer, stream);
        const auto p_chart = p_value_chart(model, scorer, alpha, stream);
        for (std::size_t i = 0; i < stream.size(); ++i)
            CHECK(score_chart.points[i].limit_exceeded == p_chart.points[i].limit_exceeded);
    }
}
