#include "affmatch/matcher.hpp"

#include "affmatch/errors.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <random>

using namespace affmatch;

namespace {

RegistrySnapshot load_fixture_snapshot(RegistryKind kind) {
    const std::string file = to_string(kind) + ".jsonl";
    auto entries = load_registry(test::fixture_dir() / file, kind);
    GeoMapping mapping;
    if (kind == RegistryKind::Rnsr) {
        mapping = GeoMapping::load(test::fixture_dir() / "geo_mapping.json");
    }
    return RegistrySnapshot::build(kind, std::move(entries),
                                   CriterionCatalog::default_catalog(), mapping);
}

const RegistrySnapshot& grid_snapshot() {
    static const RegistrySnapshot snapshot = load_fixture_snapshot(RegistryKind::Grid);
    return snapshot;
}

const RegistrySnapshot& country_snapshot() {
    static const RegistrySnapshot snapshot = load_fixture_snapshot(RegistryKind::Country);
    return snapshot;
}

const RegistrySnapshot& rnsr_snapshot() {
    static const RegistrySnapshot snapshot = load_fixture_snapshot(RegistryKind::Rnsr);
    return snapshot;
}

const CriterionCatalog& catalog() {
    return CriterionCatalog::default_catalog();
}

Strategy strategy(std::vector<std::string> criteria) {
    return Strategy{std::move(criteria)};
}

} // namespace

TEST_CASE("name+city+country pins the ministry to a single entry") {
    const std::string input =
        "French Ministry of Higher Education, Research and Innovation, Paris, France";
    const auto results = run_strategy(strategy({"grid_city", "grid_country", "grid_name"}), input,
                                      grid_snapshot(), {}, catalog());
    REQUIRE(results.size() == 1);
    CHECK(results[0].registry_id == "grid.425729.f");
    CHECK(results[0].evidence.count("grid_city") == 1);
    CHECK(results[0].evidence.count("grid_country") == 1);
    CHECK(results[0].evidence.count("grid_name") == 1);
}

TEST_CASE("country-name-only strategy admits a false positive; adding a city removes it") {
    const std::string input = "Hotel Dieu de France, Beirut, Lebanon";
    const auto loose =
        run_strategy(strategy({"country_name"}), input, country_snapshot(), {}, catalog());
    CHECK(test::result_ids(loose) == std::set<std::string>{"FR", "LB"});

    const auto strict = run_strategy(strategy({"country_name", "grid_city"}), input,
                                     country_snapshot(), {}, catalog());
    CHECK(test::result_ids(strict) == std::set<std::string>{"LB"});
}

TEST_CASE("unknown criterion in a strategy fails before any percolation") {
    CHECK_THROWS_AS(run_strategy(strategy({"grid_shoesize"}), "x", grid_snapshot(), {}, catalog()),
                    ConfigError);
    CHECK_THROWS_AS(run_strategy(strategy({}), "x", grid_snapshot(), {}, catalog()), ConfigError);
}

TEST_CASE("sub-match filtering drops the contained Columbia entry") {
    const std::string input = "Columbia University Medical Center, New York, USA";
    auto results = run_strategy(strategy({"grid_name", "grid_city", "grid_country"}), input,
                                grid_snapshot(), {}, catalog());
    CHECK(test::result_ids(results) ==
          std::set<std::string>{"grid.21729.3f", "grid.239585.0"});

    const auto filtered = filter_submatches(std::move(results), input);
    REQUIRE(filtered.size() == 1);
    CHECK(filtered[0].registry_id == "grid.239585.0");
}

TEST_CASE("a single result passes the sub-match filter unchanged") {
    const std::string input = "Columbia University Medical Center, New York, USA";
    MatchResult only;
    only.registry_id = "a";
    only.evidence["grid_name"] = {Span{0, 8}};
    const auto filtered = filter_submatches({only}, input);
    REQUIRE(filtered.size() == 1);
    CHECK(filtered[0].registry_id == "a");
}

TEST_CASE("disjoint evidence keeps both results") {
    // Hand-applied containment: neither name evidence contains the other.
    const std::string input =
        "Laboratoire Jean Kuntzmann and Institut des Géosciences de l'Environnement, Grenoble";
    const auto tokens = analyze(input, standard_analyzer());
    REQUIRE(tokens.size() >= 10);

    MatchResult ljk;
    ljk.registry_id = "200311843C";
    for (std::size_t i = 0; i < 3; ++i) { // "Laboratoire Jean Kuntzmann"
        ljk.evidence["rnsr_name"].insert(Span{tokens[i].start_offset, tokens[i].end_offset});
    }
    MatchResult ige;
    ige.registry_id = "199912442E";
    for (std::size_t i = 4; i < 10; ++i) { // "Institut des Géosciences de l'Environnement"
        ige.evidence["rnsr_name"].insert(Span{tokens[i].start_offset, tokens[i].end_offset});
    }

    const auto filtered = filter_submatches({ljk, ige}, input);
    CHECK(test::result_ids(filtered) ==
          std::set<std::string>{"199912442E", "200311843C"});
}

TEST_CASE("identical evidence keeps every peer") {
    const std::string input = "CNRS Paris";
    const auto tokens = analyze(input, standard_analyzer());
    MatchResult a, b;
    a.registry_id = "a";
    b.registry_id = "b";
    for (const Token& t : tokens) {
        a.evidence["rnsr_supervisor_acronym"].insert(Span{t.start_offset, t.end_offset});
        b.evidence["rnsr_supervisor_acronym"].insert(Span{t.start_offset, t.end_offset});
    }
    CHECK(filter_submatches({a, b}, input).size() == 2);
}

TEST_CASE("direct strategy matches the unit by name, supervisor acronym and city") {
    const std::string input =
        "Institut des Géosciences de l'Environnement CNRS Saint Martin d'Hères";
    const auto results = match_affiliation(input, {}, MatchConfig::defaults(RegistryKind::Rnsr),
                                           rnsr_snapshot());
    REQUIRE(results.size() == 1);
    CHECK(results[0].registry_id == "199912442E");
    CHECK(results[0].matched_by.count(
              {"rnsr_name", "rnsr_supervisor_acronym", "rnsr_city"}) == 1);
}

TEST_CASE("neighbouring city fails the city strategy but matches via the employment zone") {
    const std::string input = "Institut des Géosciences de l'Environnement CNRS Grenoble";

    const auto by_city =
        run_strategy(strategy({"rnsr_name", "rnsr_supervisor_acronym", "rnsr_city"}), input,
                     rnsr_snapshot(), {}, catalog());
    CHECK(by_city.empty());

    const auto by_zone =
        run_strategy(strategy({"rnsr_name", "rnsr_supervisor_acronym", "rnsr_zone_emploi"}), input,
                     rnsr_snapshot(), {}, catalog());
    REQUIRE(by_zone.size() == 1);
    CHECK(by_zone[0].registry_id == "199912442E");

    const auto results = match_affiliation(input, {}, MatchConfig::defaults(RegistryKind::Rnsr),
                                           rnsr_snapshot());
    REQUIRE(results.size() == 1);
    CHECK(results[0].registry_id == "199912442E");
    CHECK(results[0].matched_by.count(
              {"rnsr_name", "rnsr_supervisor_acronym", "rnsr_zone_emploi"}) == 1);
}

TEST_CASE("matching against empty indexes yields nothing") {
    RegistrySnapshot empty;
    empty.registry = RegistryKind::Grid;
    CHECK(match_affiliation("anything at all", {}, MatchConfig::defaults(RegistryKind::Grid),
                            empty)
              .empty());
}

TEST_CASE("conditions restrict results to entries with matching field values") {
    const std::string input =
        "Ministry of Higher Education and Research and the Max Planck Society";
    auto unconditioned =
        run_strategy(strategy({"grid_name"}), input, grid_snapshot(), {}, catalog());
    CHECK(test::result_ids(unconditioned) ==
          std::set<std::string>{"grid.425729.f", "grid.4372.2"});

    const auto conditioned =
        run_strategy(strategy({"grid_name"}), input, grid_snapshot(),
                     {Condition{"grid_country", "France"}}, catalog());
    CHECK(test::result_ids(conditioned) == std::set<std::string>{"grid.425729.f"});

    // Value comparison happens on the folded form.
    const auto folded = run_strategy(strategy({"grid_name"}), input, grid_snapshot(),
                                     {Condition{"grid_country", "  france "}}, catalog());
    CHECK(test::result_ids(folded) == std::set<std::string>{"grid.425729.f"});

    const auto empty_conditions = apply_conditions(unconditioned, {}, grid_snapshot().entries,
                                                   catalog());
    CHECK(empty_conditions.size() == unconditioned.size());

    CHECK_THROWS_AS(apply_conditions(unconditioned, {Condition{"grid_shoesize", "12"}},
                                     grid_snapshot().entries, catalog()),
                    ConfigError);
}

TEST_CASE("adding criteria to a strategy never adds result ids") {
    std::mt19937 rng(90210);
    const std::vector<std::string> criteria_pool = {
        "grid_name", "grid_city", "grid_country", "grid_country_code", "grid_acronym"};
    const std::vector<std::string> corpus = {
        "French Ministry of Higher Education, Research and Innovation, Paris, France",
        "Columbia University Medical Center, New York, USA",
        "Hotel Dieu de France, Beirut, Lebanon",
        "Indiana University Northwest, Gary",
        "Max Planck Society, Munich, Germany",
        "Institut Universitaire du Nord, Lille, France",
    };
    std::uniform_int_distribution<std::size_t> pick_input(0, corpus.size() - 1);
    for (int round = 0; round < 100; ++round) {
        auto pool = criteria_pool;
        std::shuffle(pool.begin(), pool.end(), rng);
        std::uniform_int_distribution<std::size_t> base_len(1, pool.size() - 1);
        const std::size_t base = base_len(rng);
        std::uniform_int_distribution<std::size_t> extra_len(base + 1, pool.size());
        const std::size_t extended = extra_len(rng);

        const Strategy small{std::vector<std::string>(pool.begin(),
                                                      pool.begin() + static_cast<std::ptrdiff_t>(base))};
        const Strategy large{std::vector<std::string>(
            pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(extended))};

        const std::string& input = corpus[pick_input(rng)];
        const auto small_ids =
            test::result_ids(run_strategy(small, input, grid_snapshot(), {}, catalog()));
        const auto large_ids =
            test::result_ids(run_strategy(large, input, grid_snapshot(), {}, catalog()));
        for (const auto& id : large_ids) {
            CAPTURE(input);
            CHECK(small_ids.count(id) == 1);
        }
    }
}

TEST_CASE("a productive group stops the loop before later groups percolate") {
    MatchConfig config;
    config.registry = RegistryKind::Grid;
    config.groups = {
        StrategyGroup{{strategy({"grid_name", "grid_city", "grid_country"})}},
        StrategyGroup{{strategy({"grid_acronym"})}},
    };
    const auto& snapshot = grid_snapshot();
    const auto before = snapshot.indexes.at("grid_acronym").percolation_count();
    const auto results = match_affiliation(
        "French Ministry of Higher Education, Research and Innovation, Paris, France", {}, config,
        snapshot);
    REQUIRE_FALSE(results.empty());
    CHECK(snapshot.indexes.at("grid_acronym").percolation_count() == before);

    // An unproductive first group falls through to the second.
    const auto more = match_affiliation("IUN", {}, config, snapshot);
    CHECK(test::result_ids(more) ==
          std::set<std::string>{"grid.257418.d", "grid.489012.6"});
    CHECK(snapshot.indexes.at("grid_acronym").percolation_count() == before + 1);
}

TEST_CASE("strategies within one group merge results for the same id") {
    MatchConfig config;
    config.registry = RegistryKind::Grid;
    config.groups = {StrategyGroup{{strategy({"grid_name", "grid_city"}),
                                    strategy({"grid_name", "grid_country"})}}};
    const auto results = match_affiliation(
        "French Ministry of Higher Education, Research and Innovation, Paris, France", {}, config,
        grid_snapshot());
    REQUIRE(results.size() == 1);
    CHECK(results[0].matched_by.size() == 2);
    CHECK(results[0].evidence.count("grid_city") == 1);
    CHECK(results[0].evidence.count("grid_country") == 1);
}

TEST_CASE("results are deterministic and ordered by registry id") {
    const std::string input = "Columbia University Medical Center, New York, USA";
    const auto a = run_strategy(strategy({"grid_city", "grid_country"}), input, grid_snapshot(),
                                {}, catalog());
    const auto b = run_strategy(strategy({"grid_city", "grid_country"}), input, grid_snapshot(),
                                {}, catalog());
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].registry_id == b[i].registry_id);
        CHECK(a[i].evidence == b[i].evidence);
        if (i > 0) {
            CHECK(a[i - 1].registry_id < a[i].registry_id);
        }
    }
}

TEST_CASE("evidence spans fold back to terms of contributing query docs") {
    const std::string input =
        "French Ministry of Higher Education, Research and Innovation, Paris, France";
    const auto results = run_strategy(strategy({"grid_city", "grid_country", "grid_name"}), input,
                                      grid_snapshot(), {}, catalog());
    REQUIRE(results.size() == 1);
    for (const auto& [criterion, spans] : results[0].evidence) {
        const auto& index = grid_snapshot().indexes.at(criterion);
        for (const Span& span : spans) {
            const std::string folded =
                fold_join(input.substr(span.start, span.end - span.start));
            bool found = false;
            for (const QueryDoc& doc : index.docs()) {
                if (std::find(doc.ids.begin(), doc.ids.end(), results[0].registry_id) ==
                    doc.ids.end()) {
                    continue;
                }
                if (std::find(doc.query.terms.begin(), doc.query.terms.end(), folded) !=
                    doc.query.terms.end()) {
                    found = true;
                    break;
                }
            }
            CAPTURE(criterion);
            CAPTURE(folded);
            CHECK(found);
        }
    }
}

TEST_CASE("match config files load, validate and mirror the built-in defaults") {
    for (const RegistryKind kind :
         {RegistryKind::Country, RegistryKind::Grid, RegistryKind::Rnsr}) {
        const auto path = test::config_dir() / (to_string(kind) + ".json");
        const MatchConfig from_file = MatchConfig::load(path);
        const MatchConfig built_in = MatchConfig::defaults(kind);
        CHECK(from_file.registry == built_in.registry);
        REQUIRE(from_file.groups.size() == built_in.groups.size());
        for (std::size_t g = 0; g < from_file.groups.size(); ++g) {
            REQUIRE(from_file.groups[g].strategies.size() ==
                    built_in.groups[g].strategies.size());
            for (std::size_t s = 0; s < from_file.groups[g].strategies.size(); ++s) {
                CHECK(from_file.groups[g].strategies[s] == built_in.groups[g].strategies[s]);
            }
        }
        from_file.validate(catalog());
    }
}

TEST_CASE("config validation rejects malformed strategy sets") {
    MatchConfig config;
    config.registry = RegistryKind::Grid;
    CHECK_THROWS_AS(config.validate(catalog()), ConfigError); // no groups

    config.groups = {StrategyGroup{}};
    CHECK_THROWS_AS(config.validate(catalog()), ConfigError); // empty group

    config.groups = {StrategyGroup{{strategy({"grid_name", "grid_name"})}}};
    CHECK_THROWS_AS(config.validate(catalog()), ConfigError); // duplicate criterion

    config.groups = {StrategyGroup{{strategy({"grid_shoesize"})}}};
    CHECK_THROWS_AS(config.validate(catalog()), ConfigError); // unknown criterion
}
