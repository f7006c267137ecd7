#include <doctest.h>

#include <cmath>

#include "sglm/benchmark.hpp"

using namespace sglm;

TEST_CASE("benchmark results do not depend on the job count") {
    BenchmarkConfig c;
    c.m = 60;
    c.q_grid = {2, 4};
    c.estimators = {Estimator::Glm, Estimator::Sglm, Estimator::ThreeQuarter, Estimator::HalfSibling};
    c.residual_kinds = {ResidualKind::FisherScaled, ResidualKind::Raw};
    c.replicates = 6;
    c.seed = 11;
    const auto serial = benchmark::run(c);
    c.jobs = 3;
    const auto parallel = benchmark::run(c);
    REQUIRE(serial.size() == 2 * 5);
    REQUIRE(parallel.size() == serial.size());
    for (std::size_t k = 0; k < serial.size(); ++k) {
        CHECK(serial[k].label() == parallel[k].label());
        CHECK(serial[k].mse().mean == parallel[k].mse().mean);
        CHECK(serial[k].n_failed() == parallel[k].n_failed());
    }
    CHECK(serial[0].label() == "q=2 glm");
    CHECK(serial[1].label() == "q=2 sglm/fisher");
    CHECK(serial[1].noise_corr().n == 6);
    CHECK_FALSE(serial[0].replicates[0]->noise_corr.has_value());
}

TEST_CASE("failed cells are recorded and the sweep continues") {
    BenchmarkConfig c;
    c.family = Family::gamma(2.0);
    c.gamma_margin = -3.0;  // generation fails
    c.q_grid = {2};
    c.replicates = 3;
    const auto cells = benchmark::run(c);
    REQUIRE(cells.size() == 2);
    CHECK(cells[0].n_failed() == 3);
    CHECK(cells[0].errors.size() == 3);
    CHECK(std::isnan(cells[0].mse().mean));
}

TEST_CASE("benchmark config validation and summaries") {
    BenchmarkConfig c;
    c.q_grid = {};
    CHECK_THROWS_AS(benchmark::run(c), ConfigError);
    c.q_grid = {1};
    CHECK_THROWS_AS(benchmark::run(c), ConfigError);
    c.q_grid = {2};
    c.replicates = 0;
    CHECK_THROWS_AS(benchmark::run(c), ConfigError);

    const MetricSummary s = benchmark::summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == 2.5);
    CHECK(s.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(benchmark::replicate_seed(1, 0) != benchmark::replicate_seed(1, 1));
    CHECK(parse_estimator("3qs") == Estimator::ThreeQuarter);
    CHECK_THROWS_AS(parse_estimator("em"), ConfigError);
}
