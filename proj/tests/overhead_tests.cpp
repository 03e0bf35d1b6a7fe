#include <doctest.h>

#include "helpers.hpp"
#include "spmiti/overhead.hpp"
#include "spmiti/prep.hpp"

using namespace spmiti;
using nlohmann::json;

namespace {

ApplicationModel model_with_instructions(double ins) {
    auto j = test::mini_model_json();
    j["artifacts"][0]["vanilla_metrics"]["instructions"] = ins;
    return model_from_json(j);
}

}  // namespace

TEST_CASE("linear additive overhead") {
    // base 2% + 0.01% per instruction on 500 instructions = +7% total.
    auto model = model_with_instructions(500);
    auto kb = test::mini_kb();
    Solution s;
    s.dsps = {{"cp_obf", "a1"}};
    CHECK(overhead("client_time", s, {"a1"}, model, kb) == doctest::Approx(1.07).epsilon(1e-12));
}

TEST_CASE("vanilla overhead is exactly 1") {
    auto model = test::mini_model();
    auto kb = test::mini_kb();
    for (const auto& type : kOverheadTypes)
        CHECK(overhead(type, Solution{}, {"a1"}, model, kb) == 1.0);
}

TEST_CASE("contributions sum over deployed protections") {
    auto model = model_with_instructions(500);
    auto kb = test::mini_kb();
    Solution s;
    s.dsps = {{"cp_obf", "a1"}, {"cp_guard", "a1"}};  // +7% and +4%
    CHECK(overhead("client_time", s, {"a1"}, model, kb) == doctest::Approx(1.11).epsilon(1e-12));
}

TEST_CASE("artifacts outside the scope do not contribute") {
    auto model = model_with_instructions(500);
    auto kb = test::mini_kb();
    Solution s;
    s.dsps = {{"cp_obf", "a1"}};
    CHECK(overhead("client_time", s, {"other"}, model, kb) == 1.0);
}

TEST_CASE("server and network overheads need online protections") {
    auto jk = test::mini_kb_json();
    jk["cps"][0]["overhead_coeffs"]["server_time"] = {{"base_pct", 10.0}};
    auto offline_kb = kb_from_json(jk);
    jk["cps"][0]["online"] = true;
    auto online_kb = kb_from_json(jk);

    auto model = test::mini_model();
    Solution s;
    s.dsps = {{"cp_obf", "a1"}};
    CHECK(overhead("server_time", s, {"a1"}, model, offline_kb) == 1.0);
    CHECK(overhead("server_time", s, {"a1"}, model, online_kb) == doctest::Approx(1.10));
}

TEST_CASE("unknown overhead types are rejected") {
    auto model = test::mini_model();
    auto kb = test::mini_kb();
    CHECK_THROWS_AS(overhead("gpu_time", Solution{}, {"a1"}, model, kb), UnknownOverheadType);
}

TEST_CASE("within_thresholds honors per-CCS theta with infinite default") {
    auto model = model_with_instructions(500);
    auto kb = test::mini_kb();
    auto ccs_list = compute_ccs(model, kb);
    REQUIRE(ccs_list.size() == 1);
    Solution s;
    s.dsps = {{"cp_obf", "a1"}};
    CHECK(within_thresholds(s, ccs_list[0], model, kb));  // theta defaults to infinity

    auto jt = test::mini_model_json();
    jt["artifacts"][0]["vanilla_metrics"]["instructions"] = 500;
    jt["overhead_thresholds"]["client_time"]["global"] = 1.05;
    auto tight = model_from_json(jt);
    auto tight_ccs = compute_ccs(tight, kb);
    CHECK_FALSE(within_thresholds(s, tight_ccs[0], tight, kb));
    CHECK(within_thresholds(Solution{}, tight_ccs[0], tight, kb));
}
