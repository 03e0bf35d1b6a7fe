#include <doctest.h>

#include "helpers.hpp"
#include "spmiti/index.hpp"

using namespace spmiti;
using nlohmann::json;

TEST_CASE("measures map to requirements") {
    CHECK(measure_requirement("CC") == req::confidentiality);
    CHECK(measure_requirement("CT") == req::confidentiality);
    CHECK(measure_requirement("TD") == req::integrity);
    CHECK(measure_requirement("TA") == req::integrity);
    CHECK_THROWS_AS(measure_requirement("XX"), UnknownMetric);
}

TEST_CASE("repeated effort compounds the step success probability") {
    auto kb = test::mini_kb();  // pi_base(st, code) = 0.5
    auto model = test::mini_model();
    const auto& a = model.artifact("a1");
    CHECK(step_success_prob("st", a, 1, kb) == 0.5);
    CHECK(step_success_prob("st", a, 2, kb) == 0.75);  // 1 - 0.5^2
    CHECK(step_success_prob("st", a, 3, kb) == 0.875);
}

TEST_CASE("mitigation multiplies zetas and ordered synergies") {
    auto j = test::mini_kb_json();
    j["cps"][1]["mitigation"]["st"] = 0.9;
    j["precedence"].push_back({{"before", "obf"}, {"after", "guard"}, {"rel", "encouraged"}});
    j["synergy"].push_back(
        {{"step", "st"}, {"cp_before", "cp_obf"}, {"cp_after", "cp_guard"}, {"omega", 0.8}});
    auto kb = kb_from_json(j);
    auto model = test::mini_model();
    const auto& a = model.artifact("a1");

    Solution s;
    s.dsps = {{"cp_obf", "a1"}, {"cp_guard", "a1"}};
    CHECK(mitigation(a, s, "st", kb) == doctest::Approx(0.5 * 0.9 * 0.8).epsilon(1e-12));

    // Reversed order: the synergy entry no longer applies.
    Solution rev;
    rev.dsps = {{"cp_guard", "a1"}, {"cp_obf", "a1"}};
    CHECK(mitigation(a, rev, "st", kb) == doctest::Approx(0.45).epsilon(1e-12));

    CHECK(mitigation(a, Solution{}, "st", kb) == 1.0);  // empty product
}

TEST_CASE("likelihood multiplies per-step clamped factors") {
    auto kb = test::mini_kb();
    auto model = test::mini_model();
    auto cpath = ConcreteAttackPath::unit(model.attack_paths[0]);

    CHECK(likelihood(Solution{}, cpath, model, kb) == 0.5);  // pi only
    Solution s;
    s.dsps = {{"cp_obf", "a1"}};
    CHECK(likelihood(s, cpath, model, kb) == 0.25);  // mu 0.5 * pi 0.5
}

TEST_CASE("raw measures follow their formulas") {
    auto kb = test::mini_kb();
    auto model = test::mini_model();
    const auto& a = model.artifact("a1");

    Solution conf;
    conf.dsps = {{"cp_obf", "a1"}};  // halstead x2, cyclomatic x2
    CHECK(raw_measure("CC", a, conf, kb) == 2.0);  // potency 1 + potency 1
    CHECK(raw_measure("CT", a, conf, kb) == 0.0);  // no remote instructions

    Solution integ;
    integ.dsps = {{"cp_guard", "a1"}};  // guarded +128, local +64 on 256 instructions
    CHECK(raw_measure("TD", a, integ, kb) == 0.5);
    CHECK(raw_measure("TA", a, integ, kb) == 0.25);

    CHECK(raw_measure("CC", a, Solution{}, kb) == 0.0);  // vanilla potency
}

TEST_CASE("attacks attenuate only matching measures") {
    auto kb = test::mini_kb();
    auto model = test::mini_model();
    const auto& a = model.artifact("a1");

    State t;
    t.solution.dsps = {{"cp_obf", "a1"}};
    t.paths.push_back(ConcreteAttackPath::unit(model.attack_paths[0]));  // conf path, lambda 0.25

    CHECK(adjusted_measure("CC", a, t, model, kb) == doctest::Approx(0.75 * 2.0).epsilon(1e-12));
    // The integrity measures ignore the confidentiality path.
    CHECK(adjusted_measure("TD", a, t, model, kb) == raw_measure("TD", a, t.solution, kb));
}

TEST_CASE("breached measures pay the rho penalty, the floor itself does not") {
    auto j = test::mini_kb_json();
    j["measure_config"]["TD"] = {{"tau", 1.0}, {"rho", 1000.0}, {"epsilon", 0.5}};
    auto kb = kb_from_json(j);
    auto model = test::mini_model();
    const auto& a = model.artifact("a1");

    State t;
    t.solution.dsps = {{"cp_guard", "a1"}};
    // TD = 0.5 exactly: H(epsilon - M') = H(0) = 0, no penalty.
    CHECK(measure("TD", a, t, model, kb) == 0.5);

    j["measure_config"]["TD"]["epsilon"] = 0.75;
    auto strict = kb_from_json(j);
    CHECK(measure("TD", a, t, model, strict) == 0.5 - 1000.0);
}

TEST_CASE("the vanilla state scores exactly zero") {
    auto kb = test::mini_kb();
    auto model = test::mini_model();
    CHECK(sp_index(State{}, model, kb).value == 0.0);
}

TEST_CASE("sp_index weights requirement-relevant measures per objective") {
    auto j = test::mini_kb_json();
    // Disable breach penalties for a clean arithmetic check.
    for (const auto& m : kMeasures)
        j["measure_config"][m] = {{"tau", 1.0}, {"rho", 0.0}, {"epsilon", 0.0}};
    auto kb = kb_from_json(j);

    auto jm = test::mini_model_json();
    jm["protection_objectives"] = json::array(
        {{{"requirement", "integrity"}, {"artifact", "a1"}, {"weight", 2.0}}});
    jm["attack_paths"].erase(0);
    auto model = model_from_json(jm);

    State t;
    t.solution.dsps = {{"cp_guard", "a1"}};  // TD 0.5, TA 0.25
    CHECK(sp_index(t, model, kb).value == 2.0 * (0.5 + 0.25));
}

TEST_CASE("appending a path weakly decreases the index") {
    auto kb = test::mini_kb();
    auto model = test::mini_model();

    State t;
    t.solution.dsps = {{"cp_obf", "a1"}, {"cp_guard", "a1"}};
    double prev = sp_index(t, model, kb).value;
    for (int i = 0; i < 4; ++i) {
        t.paths.push_back(ConcreteAttackPath::unit(model.attack_paths[i % 2]));
        double cur = sp_index(t, model, kb).value;
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("the index is invariant under path permutation") {
    auto kb = test::mini_kb();
    auto model = test::mini_model();

    State t;
    t.solution.dsps = {{"cp_obf", "a1"}};
    t.paths = {ConcreteAttackPath::unit(model.attack_paths[0]),
               ConcreteAttackPath::unit(model.attack_paths[1]),
               ConcreteAttackPath::unit(model.attack_paths[0])};
    State swapped = t;
    std::swap(swapped.paths[0], swapped.paths[2]);
    std::swap(swapped.paths[0], swapped.paths[1]);
    CHECK(sp_index(t, model, kb).value == sp_index(swapped, model, kb).value);
}
