#include "affmatch/evaluation.hpp"

#include "affmatch/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <fstream>
#include <random>

using namespace affmatch;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("gold records load with absent keys as empty expectations") {
    const auto gold = load_gold(test::fixture_dir() / "gold.json");
    REQUIRE(gold.size() == 5);
    CHECK(gold[0].affiliation ==
          "French Ministry of Higher Education, Research and Innovation, Paris, France");
    CHECK(gold[0].expected.at("grid") == std::set<std::string>{"grid.425729.f"});
    CHECK(gold[0].expected.at("country") == std::set<std::string>{"FR"});
    CHECK(gold[0].expected.at("rnsr").empty());
    CHECK(gold[0].expected.at("siren").empty());
    CHECK(gold[1].expected.at("rnsr") == std::set<std::string>{"199912442E"});
}

TEST_CASE("a record with no expected ids is a valid true-negative case") {
    const auto path = write_temp("affmatch_tn.json", R"([{"affiliation":"Acme Corp, Nowhere"}])");
    const auto gold = load_gold(path);
    REQUIRE(gold.size() == 1);
    for (const auto& [_, ids] : gold[0].expected) {
        CHECK(ids.empty());
    }
}

TEST_CASE("malformed gold records name their index") {
    const auto path = write_temp("affmatch_bad_gold.json",
                                 R"([{"affiliation":"ok"},{"grid":["x"]}])");
    CHECK_THROWS_WITH_AS(load_gold(path), doctest::Contains("record 1"), DataError);
    CHECK_THROWS_AS(load_gold(test::fixture_dir() / "missing_gold.json"), DataError);

    const auto bad_ids = write_temp("affmatch_bad_ids.json",
                                    R"([{"affiliation":"ok","grid":"not-an-array"}])");
    CHECK_THROWS_AS(load_gold(bad_ids), DataError);
}

TEST_CASE("hand-counted two-record example gives precision and recall 0.5") {
    // E1={a}, P1={a,b}: tp 1, fp 1. E2={c}, P2={}: fn 1.
    std::vector<GoldRecord> gold(2);
    gold[0].affiliation = "first";
    gold[0].expected["grid"] = {"a"};
    gold[1].affiliation = "second";
    gold[1].expected["grid"] = {"c"};

    const MatcherFn matcher = [](const std::string& affiliation) -> std::set<std::string> {
        if (affiliation == "first") {
            return {"a", "b"};
        }
        return {};
    };
    const MetricsReport report = evaluate(matcher, gold, "grid");
    CHECK(report.tp == 1);
    CHECK(report.fp == 1);
    CHECK(report.fn == 1);
    CHECK(report.precision() == doctest::Approx(0.5));
    CHECK(report.recall() == doctest::Approx(0.5));
    REQUIRE(report.errors.size() == 2);
    CHECK(report.errors[0].index == 0);
    CHECK(report.errors[1].index == 1);
}

TEST_CASE("a perfect matcher scores 1.0 on both axes") {
    std::vector<GoldRecord> gold(3);
    gold[0].affiliation = "x";
    gold[0].expected["country"] = {"FR"};
    gold[1].affiliation = "y";
    gold[1].expected["country"] = {"LB", "FR"};
    gold[2].affiliation = "z"; // empty expectation

    const MatcherFn matcher = [&](const std::string& affiliation) -> std::set<std::string> {
        if (affiliation == "x") {
            return {"FR"};
        }
        if (affiliation == "y") {
            return {"LB", "FR"};
        }
        return {};
    };
    const MetricsReport report = evaluate(matcher, gold, "country");
    CHECK(report.precision() == doctest::Approx(1.0));
    CHECK(report.recall() == doctest::Approx(1.0));
    CHECK(report.errors.empty());
}

TEST_CASE("an empty-prediction matcher has perfect precision and zero recall") {
    std::vector<GoldRecord> gold(1);
    gold[0].affiliation = "x";
    gold[0].expected["grid"] = {"a", "b"};
    const MetricsReport report =
        evaluate([](const std::string&) { return std::set<std::string>{}; }, gold, "grid");
    CHECK(report.tp == 0);
    CHECK(report.fp == 0);
    CHECK(report.fn == 2);
    CHECK(report.precision() == doctest::Approx(1.0)); // 0/0 convention
    CHECK(report.recall() == doctest::Approx(0.0));
}

TEST_CASE("counts always reconcile with expectation and prediction sizes") {
    std::mt19937 rng(5150);
    std::uniform_int_distribution<int> id_pick(0, 9);
    std::uniform_int_distribution<int> count_pick(0, 4);
    for (int round = 0; round < 100; ++round) {
        std::vector<GoldRecord> gold(10);
        std::map<std::string, std::set<std::string>> predictions;
        std::size_t sum_expected = 0;
        std::size_t sum_predicted = 0;
        for (std::size_t i = 0; i < gold.size(); ++i) {
            gold[i].affiliation = "record " + std::to_string(i);
            auto& expected = gold[i].expected["grid"];
            for (int k = count_pick(rng); k > 0; --k) {
                expected.insert("id" + std::to_string(id_pick(rng)));
            }
            auto& predicted = predictions[gold[i].affiliation];
            for (int k = count_pick(rng); k > 0; --k) {
                predicted.insert("id" + std::to_string(id_pick(rng)));
            }
            sum_expected += expected.size();
            sum_predicted += predicted.size();
        }
        const MetricsReport report = evaluate(
            [&](const std::string& affiliation) { return predictions[affiliation]; }, gold,
            "grid");
        CHECK(report.tp + report.fn == sum_expected);
        CHECK(report.tp + report.fp == sum_predicted);
        CHECK(report.precision() >= 0.0);
        CHECK(report.precision() <= 1.0);
        CHECK(report.recall() >= 0.0);
        CHECK(report.recall() <= 1.0);
    }
}

TEST_CASE("swapping expected and predicted swaps fp with fn and keeps tp") {
    std::mt19937 rng(5151);
    std::uniform_int_distribution<int> id_pick(0, 6);
    std::uniform_int_distribution<int> count_pick(0, 3);
    for (int round = 0; round < 50; ++round) {
        std::vector<GoldRecord> forward(5), backward(5);
        std::map<std::string, std::set<std::string>> left, right;
        for (std::size_t i = 0; i < forward.size(); ++i) {
            const std::string name = "record " + std::to_string(i);
            forward[i].affiliation = name;
            backward[i].affiliation = name;
            for (int k = count_pick(rng); k > 0; --k) {
                left[name].insert("id" + std::to_string(id_pick(rng)));
            }
            for (int k = count_pick(rng); k > 0; --k) {
                right[name].insert("id" + std::to_string(id_pick(rng)));
            }
            forward[i].expected["grid"] = left[name];
            backward[i].expected["grid"] = right[name];
        }
        const auto predict_right = [&](const std::string& a) { return right[a]; };
        const auto predict_left = [&](const std::string& a) { return left[a]; };
        const MetricsReport fwd = evaluate(predict_right, forward, "grid");
        const MetricsReport bwd = evaluate(predict_left, backward, "grid");
        CHECK(fwd.tp == bwd.tp);
        CHECK(fwd.fp == bwd.fn);
        CHECK(fwd.fn == bwd.fp);
        CHECK(fwd.precision() == doctest::Approx(bwd.recall()));
    }
}

TEST_CASE("report json carries counts, metrics and per-record diffs") {
    std::vector<GoldRecord> gold(1);
    gold[0].affiliation = "x";
    gold[0].expected["grid"] = {"a"};
    const MetricsReport report =
        evaluate([](const std::string&) { return std::set<std::string>{"b"}; }, gold, "grid");
    const auto j = report.to_json();
    CHECK(j.at("registry") == "grid");
    CHECK(j.at("tp") == 0);
    CHECK(j.at("fp") == 1);
    CHECK(j.at("fn") == 1);
    REQUIRE(j.at("errors").size() == 1);
    CHECK(j.at("errors")[0].at("expected") == std::vector<std::string>{"a"});
    CHECK(j.at("errors")[0].at("predicted") == std::vector<std::string>{"b"});
}
