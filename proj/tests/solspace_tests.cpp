#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "spmiti/overhead.hpp"
#include "spmiti/prep.hpp"
#include "spmiti/solspace.hpp"

using namespace spmiti;
using nlohmann::json;

namespace {

KnowledgeBase ordering_kb(const std::string& rel) {
    auto j = test::mini_kb_json();
    if (!rel.empty())
        j["precedence"].push_back({{"before", "obf"}, {"after", "guard"}, {"rel", rel}});
    return kb_from_json(j);
}

std::vector<DeployedProtection> pair_on_a1() {
    return {{"cp_obf", "a1"}, {"cp_guard", "a1"}};
}

std::set<std::uint64_t> drain(SolutionSpace& space) {
    std::set<std::uint64_t> hashes;
    space.reset();
    while (auto s = space.next()) {
        auto [it, inserted] = hashes.insert(s->canonical_hash());
        (void)it;
        REQUIRE(inserted);  // duplicate-freedom
    }
    return hashes;
}

}  // namespace

TEST_CASE("sequence validity is a per-artifact check") {
    auto kb = ordering_kb("");
    Solution empty;
    CHECK(is_valid_sequence(empty, kb));  // vanilla

    auto j = test::mini_kb_json();
    j["precedence"].push_back({{"before", "obf"}, {"after", "obf"}, {"rel", "forbidden"}});
    auto self_forbidden = kb_from_json(j);
    Solution twice;
    twice.dsps = {{"cp_obf", "a1"}, {"cp_obf", "a1"}};
    CHECK_FALSE(is_valid_sequence(twice, self_forbidden));

    Solution split;  // same pair on different artifacts: relations do not apply
    split.dsps = {{"cp_obf", "a1"}, {"cp_obf", "a2"}};
    CHECK(is_valid_sequence(split, self_forbidden));
}

TEST_CASE("valid orderings of a two-element multiset") {
    SUBCASE("unrelated DSPs on different artifacts") {
        auto kb = ordering_kb("");
        auto orderings = valid_orderings({{"cp_obf", "a1"}, {"cp_guard", "a2"}}, kb);
        CHECK(orderings.size() == 2);
    }
    SUBCASE("a required predecessor pins the order") {
        auto kb = ordering_kb("required");
        auto orderings = valid_orderings(pair_on_a1(), kb);
        REQUIRE(orderings.size() == 1);
        CHECK(orderings[0].dsps[0].cp_id == "cp_obf");
        CHECK(orderings[0].dsps[1].cp_id == "cp_guard");
    }
    SUBCASE("a forbidden pair removes one permutation") {
        auto kb = ordering_kb("forbidden");
        auto orderings = valid_orderings(pair_on_a1(), kb);
        REQUIRE(orderings.size() == 1);
        CHECK(orderings[0].dsps[0].cp_id == "cp_guard");
    }
    SUBCASE("a self-forbidden duplicate has no ordering") {
        auto j = test::mini_kb_json();
        j["precedence"].push_back({{"before", "obf"}, {"after", "obf"}, {"rel", "forbidden"}});
        auto kb = kb_from_json(j);
        auto orderings = valid_orderings({{"cp_obf", "a1"}, {"cp_obf", "a1"}}, kb);
        CHECK(orderings.empty());
    }
}

TEST_CASE("discouraged pairs are detected but not filtered by default") {
    auto kb = ordering_kb("discouraged");
    Solution s;
    s.dsps = pair_on_a1();
    CHECK(has_discouraged_pair(s, kb));
    Solution rev;
    rev.dsps = {{"cp_guard", "a1"}, {"cp_obf", "a1"}};
    CHECK_FALSE(has_discouraged_pair(rev, kb));

    auto model = test::mini_model();
    auto ccs = compute_ccs(model, kb);
    SolutionSpaceConfig cfg;
    cfg.sigma = 1;
    SolutionSpace keep(model, kb, model.pos, ccs, cfg);
    cfg.skip_discouraged = true;
    SolutionSpace skip(model, kb, model.pos, ccs, cfg);
    CHECK(drain(keep).size() == drain(skip).size() + 1);
}

TEST_CASE("one objective, two compatible protections, sigma 1") {
    auto j = test::mini_kb_json();
    j["cps"].push_back({{"id", "cp_obf2"}, {"asp", "obf"},
                        {"metric_deltas", {{"halstead", {{"multiplier", 1.5}}}}}});
    auto kb = kb_from_json(j);

    auto jm = test::mini_model_json();
    jm["protection_objectives"].erase(1);
    auto model = model_from_json(jm);
    auto ccs = compute_ccs(model, kb);

    SolutionSpaceConfig cfg;
    cfg.sigma = 1;
    SolutionSpace space(model, kb, model.pos, ccs, cfg);
    auto all = space.enumerate_all();
    CHECK(all.size() == 3);  // vanilla, cp_obf, cp_obf2
    CHECK(drain(space).size() == 3);
}

TEST_CASE("the stream and the exhaustive enumeration agree") {
    auto kb = test::mini_kb();
    auto model = test::mini_model();
    auto ccs = compute_ccs(model, kb);

    for (std::uint64_t seed : {0ull, 1ull, 42ull}) {
        SolutionSpaceConfig cfg;
        cfg.sigma = 2;
        cfg.seed = seed;
        SolutionSpace space(model, kb, model.pos, ccs, cfg);
        auto streamed = drain(space);

        std::set<std::uint64_t> enumerated;
        for (const auto& s : space.enumerate_all()) enumerated.insert(s.canonical_hash());
        CHECK(streamed == enumerated);
    }
}

TEST_CASE("every yielded solution is valid and within thresholds") {
    auto jm = test::mini_model_json();
    jm["overhead_thresholds"]["client_time"]["global"] = 1.05;
    auto model = model_from_json(jm);
    auto kb = test::mini_kb();
    auto ccs = compute_ccs(model, kb);

    SolutionSpaceConfig cfg;
    cfg.sigma = 2;
    SolutionSpace space(model, kb, model.pos, ccs, cfg);
    std::size_t count = 0;
    while (auto s = space.next()) {
        ++count;
        CHECK(is_valid_sequence(*s, kb));
        auto parts = split_solution(*s, ccs);
        for (const auto& c : ccs) CHECK(within_thresholds(parts.at(c.id), c, model, kb));
    }
    CHECK(count >= 1);  // vanilla at minimum
}

TEST_CASE("a seed solution outside the space is rejected") {
    auto kb = test::mini_kb();
    auto model = test::mini_model();
    auto ccs = compute_ccs(model, kb);
    SolutionSpaceConfig cfg;
    Solution seed;
    seed.dsps = {{"cp_obf", "ghost"}};
    cfg.seed_solution = seed;
    CHECK_THROWS_AS(SolutionSpace(model, kb, model.pos, ccs, cfg), ConfigError);
}

TEST_CASE("a valid seed solution starts the walk") {
    auto kb = test::mini_kb();
    auto model = test::mini_model();
    auto ccs = compute_ccs(model, kb);
    SolutionSpaceConfig cfg;
    cfg.sigma = 1;
    Solution seed;
    seed.dsps = {{"cp_obf", "a1"}};
    cfg.seed_solution = seed;
    SolutionSpace space(model, kb, model.pos, ccs, cfg);
    auto first = space.next();
    REQUIRE(first.has_value());
    CHECK(*first == seed);
}

TEST_CASE("sigma caps the DSP count per objective") {
    auto kb = test::mini_kb();
    auto model = test::mini_model();
    auto ccs = compute_ccs(model, kb);
    SolutionSpaceConfig cfg;
    cfg.sigma = 2;
    SolutionSpace space(model, kb, model.pos, ccs, cfg);
    for (const auto& s : space.enumerate_all()) {
        int conf = 0, integ = 0;
        for (const auto& d : s.dsps) (d.cp_id == "cp_obf" ? conf : integ)++;
        CHECK(conf <= 2);
        CHECK(integ <= 2);
    }
    CHECK_THROWS_AS(([&] {
                        SolutionSpaceConfig bad;
                        bad.sigma = 0;
                        SolutionSpace s2(model, kb, model.pos, ccs, bad);
                    }()),
                    ConfigError);
}

TEST_CASE("oversized spaces are guarded") {
    auto kb = test::mini_kb();
    auto model = test::mini_model();
    auto ccs = compute_ccs(model, kb);
    SolutionSpaceConfig cfg;
    cfg.sigma = 3;
    cfg.max_space = 5;
    SolutionSpace space(model, kb, model.pos, ccs, cfg);
    CHECK_THROWS_AS(space.enumerate_all(), SpaceTooLarge);
}
