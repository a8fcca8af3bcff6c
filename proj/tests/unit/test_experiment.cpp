#include "coastal/errors.hpp"
#include "coastal/experiment.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace coastal;

namespace {

ExperimentConfig small_config() {
    return parse_experiment_config(R"({
        "grid": {"nx": 16, "ny": 16},
        "eps": [0.1, 0.05, 0.025],
        "end_time": 0.05,
        "limit_outputs": 20,
        "workers": 1
    })");
}

EpsRun done_run(double eps, std::vector<double> p) {
    EpsRun r;
    r.eps = eps;
    r.done = true;
    r.pairings = std::move(p);
    r.h4_initial = 1.0;
    r.h4_sup = 1.0;
    return r;
}

VariantReport variant(InitVariant v, std::vector<double> limit) {
    VariantReport r;
    r.variant = v;
    r.limit_pairings = std::move(limit);
    return r;
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST(Config, DefaultsAreValid) {
    ExperimentConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.test_functions.size(), 5u);
    EXPECT_EQ(c.eps.size(), 4u);
}

TEST(Config, UnknownKeysRejectedAtEveryLevel) {
    EXPECT_THROW(parse_experiment_config(R"({"grid": {"nx": 16, "ny": 16}, "colour": 1})"), DomainError);
    EXPECT_THROW(parse_experiment_config(R"({"grid": {"nx": 16, "nz": 16}})"), DomainError);
    EXPECT_THROW(parse_experiment_config(R"({"initial": {"kind": "bumps", "iota": {"sigma": 1}}})"), DomainError);
    EXPECT_THROW(parse_experiment_config(R"({"scenario": {"schema": "coastal-fields/1", "tides": {}}})"), DomainError);
    EXPECT_THROW(parse_experiment_config(R"({"test_functions": [{"phi": [{"kx": 1, "phase": 0}]}]})"), DomainError);
}

TEST(Config, InvalidValuesRejected) {
    EXPECT_THROW(parse_experiment_config("{not json"), DomainError);
    EXPECT_THROW(parse_experiment_config(R"({"eps": [0.1, 0.2]})"), DomainError);
    EXPECT_THROW(parse_experiment_config(R"({"eps": [1.5]})"), DomainError);
    EXPECT_THROW(parse_experiment_config(R"({"end_time": -1})"), DomainError);
    EXPECT_THROW(parse_experiment_config(R"({"safety": 0})"), DomainError);
    EXPECT_THROW(parse_experiment_config(R"({"workers": 0})"), DomainError);
    EXPECT_THROW(parse_experiment_config(R"({"init_variant": "other"})"), DomainError);
    EXPECT_THROW(parse_experiment_config(R"({"grid": {"nx": 1}})"), DomainError);
    EXPECT_THROW(parse_experiment_config(R"({"scenario": "storm"})"), DomainError);
    EXPECT_NO_THROW(parse_experiment_config(R"({"end_time": 0, "eps": 0.1})"));
}

TEST(Config, CanonicalJsonRoundTrip) {
    auto c = small_config();
    c.init_variant = InitChoice::Curl;
    c.initial.kind = InitialDataSpec::Kind::Constant;
    c.initial.iota_value = 0.25;
    c.initial.n_value = {0.5, -1.0};
    const std::string text = experiment_config_to_json(c);
    const auto back = parse_experiment_config(text);
    EXPECT_EQ(experiment_config_to_json(back), text);
    EXPECT_EQ(back.init_variant, InitChoice::Curl);
    EXPECT_EQ(back.initial.n_value[1], -1.0);
    EXPECT_EQ(back.eps, c.eps);
}

TEST(Config, ScenarioDocumentRoundTrip) {
    const Scenario s = default_scenario();
    const std::string text = scenario_to_json(s);
    EXPECT_EQ(scenario_to_json(parse_scenario(text)), text);
    EXPECT_THROW(parse_scenario(R"({"schema": "coastal-fields/2"})"), DomainError);
    const Scenario z = parse_scenario(R"({"schema": "coastal-fields/1"})");
    EXPECT_EQ(z.tide_velocity.harmonics().size(), 0u);
}

TEST(Hash, KnownVectors) {
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Hash, DirectoryNameIgnoresOutputDir) {
    auto a = small_config();
    auto b = a;
    b.output_dir = "elsewhere";
    const auto na = run_directory_name("full", a, "x");
    EXPECT_EQ(na, run_directory_name("full", b, "x"));
    EXPECT_EQ(na.size(), 5u + 16u);
    EXPECT_NE(na, run_directory_name("full", a, "y"));
    b.eps = {0.2, 0.1, 0.05};
    EXPECT_NE(na, run_directory_name("full", b, "x"));
}

TEST(TestFunctions, ConstraintViolationNamesTheConstraint) {
    const auto phi = test_function_from_phi("ok", Amplitude({AmplitudeTerm{1, 2, 1.0, 0.5, {}}}));
    EXPECT_NO_THROW(validate_test_function(phi));
    TestFunctionSpec bad{"bad", {Amplitude(), Amplitude::constant(1.0), Amplitude()}, true};
    try {
        validate_test_function(bad);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_TRUE(contains(e.what(), "constraint")) << e.what();
    }
    EXPECT_THROW(parse_experiment_config(R"({"test_functions": [{"psi": [[], [{"cos": 1}], []]}]})"), DomainError);
}

TEST(TestFunctions, DefaultsSatisfyConstraint) {
    const auto tfs = default_test_functions();
    ASSERT_EQ(tfs.size(), 5u);
    for (const auto& t : tfs) EXPECT_NO_THROW(validate_test_function(t));
    // cos x1: psi = (cos x1, 0, -sin x1)
    const auto& c = tfs[0].psi;
    EXPECT_NEAR(c[0].value(0, 0.3, 1.0), std::cos(0.3), 1e-15);
    EXPECT_NEAR(c[1].value(0, 0.3, 1.0), 0.0, 1e-15);
    EXPECT_NEAR(c[2].value(0, 0.3, 1.0), -std::sin(0.3), 1e-15);
}

TEST(TestFunctions, EnvelopeVanishesAtEndTime) {
    const TorusGrid g(8, 8);
    const auto s = make_sampler(default_test_functions()[1], 2.0);
    const auto start = s(g, 0.0);
    const auto end = s(g, 2.0);
    EXPECT_GT(start[0].max_abs(), 0.9);
    EXPECT_LE(end[0].max_abs(), 1e-15);
}

TEST(Report, RelativeErrorsAndMonotonicity) {
    std::vector<EpsRun> runs{done_run(0.1, {1.2, 2.0}), done_run(0.05, {1.1, 2.5}), done_run(0.025, {1.05, 2.1})};
    const auto r = assemble_report({"a", "b"}, runs, {variant(InitVariant::Printed, {1.0, 2.0})});
    const auto& v = r.best();
    EXPECT_NEAR(v.rel_errors[0][0], 0.2, 1e-15);
    EXPECT_NEAR(v.rel_errors[2][0], 0.05, 1e-15);
    EXPECT_TRUE(v.monotone[0]);
    EXPECT_FALSE(v.monotone[1]);  // 0 -> 0.25
    EXPECT_NEAR(v.final_max_error, 0.05, 1e-15);
    EXPECT_TRUE(r.complete());
    EXPECT_EQ(r.sup_ratio_spread, 1.0);
}

TEST(Report, TenPercentSlack) {
    std::vector<EpsRun> runs{done_run(0.1, {1.10}), done_run(0.05, {1.109}), done_run(0.025, {1.05})};
    const auto r = assemble_report({"a"}, runs, {variant(InitVariant::CurlConsistent, {1.0})});
    EXPECT_TRUE(r.best().monotone[0]);
    runs[1].pairings = {1.111};
    EXPECT_FALSE(assemble_report({"a"}, runs, {variant(InitVariant::CurlConsistent, {1.0})}).best().monotone[0]);
}

TEST(Report, FailedRunsAreMarkedAndSkipped) {
    std::vector<EpsRun> runs{done_run(0.1, {1.3}), done_run(0.05, {1.2}), EpsRun{}};
    runs[2].eps = 0.025;
    runs[2].failure = "depth factor vanished";
    const auto r = assemble_report({"a"}, runs, {variant(InitVariant::Printed, {1.0})});
    EXPECT_FALSE(r.complete());
    EXPECT_TRUE(std::isnan(r.best().rel_errors[2][0]));
    EXPECT_NEAR(r.best().final_max_error, 0.2, 1e-15);
    std::ostringstream js;
    write_report_json(js, r);
    EXPECT_TRUE(contains(js.str(), "failed"));
    EXPECT_TRUE(contains(js.str(), "null"));
}

TEST(Report, BestVariantHasSmallestFinalError) {
    std::vector<EpsRun> runs{done_run(0.1, {1.0}), done_run(0.05, {1.0}), done_run(0.025, {1.0})};
    const auto r = assemble_report(
        {"a"}, runs, {variant(InitVariant::Printed, {2.0}), variant(InitVariant::CurlConsistent, {1.01})});
    EXPECT_EQ(r.best_variant, 1u);
    EXPECT_EQ(r.best().variant, InitVariant::CurlConsistent);
}

TEST(Compare, RejectsShortSweepsAndZeroTime) {
    auto c = small_config();
    c.eps = {0.1, 0.05};
    EXPECT_THROW(run_compare(c), DomainError);
    c = small_config();
    c.end_time = 0.0;
    EXPECT_THROW(run_compare(c), DomainError);
}

TEST(Compare, SelfComparisonGivesZeroErrors) {
    auto c = small_config();
    c.self_compare = true;
    const auto r = run_compare(c);
    ASSERT_EQ(r.variants.size(), 1u);
    for (const auto& row : r.best().rel_errors)
        for (double e : row) EXPECT_EQ(e, 0.0);
    EXPECT_EQ(r.best().final_max_error, 0.0);
}

TEST(Compare, WorkerCountDoesNotChangeResults) {
    auto c = small_config();
    const auto one = run_compare(c);
    c.workers = 3;
    const auto three = run_compare(c);
    std::ostringstream a, b, na, nb;
    write_pairings_csv(a, one);
    write_pairings_csv(b, three);
    write_norms_csv(na, one);
    write_norms_csv(nb, three);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(na.str(), nb.str());
    EXPECT_TRUE(one.complete());
}

TEST(Compare, AbortedMemberIsReportedNotFatal) {
    auto c = small_config();
    c.initial.kind = InitialDataSpec::Kind::Constant;
    c.initial.iota_value = -200.0;  // depth factor 1 + eps^2 iota crosses zero for eps >= 0.071
    c.init_variant = InitChoice::Curl;
    const auto r = run_compare(c);
    EXPECT_FALSE(r.complete());
    EXPECT_FALSE(r.runs[0].done);
    EXPECT_FALSE(r.runs[0].failure.empty());
    EXPECT_TRUE(r.runs[2].done);
}
