#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "spmiti/explorer.hpp"

using namespace spmiti;

namespace {

// Independent brute-force minimax over an evaluator: the oracle the engine is
// checked against.
double oracle_min(Evaluator& ev, const Solution& s, std::vector<int>& seq, int remaining) {
    if (remaining == 0) return ev.eval(s, seq);
    double best = kInf;
    for (int m = 0; m < ev.move_count(); ++m) {
        seq.push_back(m);
        best = std::min(best, oracle_min(ev, s, seq, remaining - 1));
        seq.pop_back();
    }
    return best;
}

double oracle_max(Evaluator& ev, const std::vector<Solution>& solutions, int depth) {
    double best = -kInf;
    for (const auto& s : solutions) {
        std::vector<int> seq;
        best = std::max(best, oracle_min(ev, s, seq, depth));
    }
    return best;
}

ScriptedEvaluator random_scripted(std::mt19937_64& rng, int n_solutions, int n_moves, int depth) {
    ScriptedEvaluator ev;
    ev.depth_ = depth;
    for (int m = 0; m < n_moves; ++m) {
        ev.move_ids_.push_back("m" + std::to_string(m));
        ev.move_labels_.push_back(ev.move_ids_.back());
    }
    for (int s = 0; s < n_solutions; ++s) ev.solution_ids_.push_back("S" + std::to_string(s));

    // Every state down to the leaves gets an integral value.
    for (const auto& sol : ev.solution_ids_) {
        std::vector<std::string> keys = {""};
        for (int d = 0; d <= depth; ++d) {
            std::vector<std::string> next;
            for (const auto& k : keys) {
                ev.values_[sol + "|" + k] = static_cast<double>(rng() % 32);
                for (int m = 0; m < n_moves; ++m)
                    next.push_back(k.empty() ? ev.move_ids_[m] : k + "," + ev.move_ids_[m]);
            }
            keys = std::move(next);
        }
    }
    return ev;
}

}  // namespace

TEST_CASE("the figure fixture search picks S3 with residual 8") {
    auto ev = ScriptedEvaluator::from_file(test::fixture("fig_tree_scripted.json"));
    VectorSource source(ev.solutions());

    SearchConfig cfg;
    cfg.depth = ev.depth();
    Explorer plain(cfg, ev);
    auto r = plain.run(source);
    CHECK(r.solution.label == "S3");
    CHECK(r.residual == 8.0);
    CHECK(r.base == 15.0);
    REQUIRE(r.attack_labels.size() == 3);
    CHECK(r.attack_labels[0] == "K1(a1,r1)");
    CHECK(r.attack_labels[1] == "K1(a1,r1)");
    CHECK(r.attack_labels[2] == "K2(a2,r2)");

    // Exact optimizations agree, in value and in the marked winner.
    cfg.engine = SearchConfig::Engine::Optimized;
    cfg.alpha_beta = cfg.tt = cfg.aspiration = true;
    Explorer fast(cfg, ev);
    auto ro = fast.run(source);
    CHECK(ro.solution.label == "S3");
    CHECK(ro.residual == 8.0);
    CHECK(ro.nodes_visited <= r.nodes_visited + 15);  // aspiration probe re-searches S1
    CHECK_FALSE(ro.approximate);
}

TEST_CASE("plain search equals the brute-force oracle on random tables") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        const int n_solutions = 1 + static_cast<int>(rng() % 4);
        const int n_moves = 1 + static_cast<int>(rng() % 3);
        const int depth = 1 + static_cast<int>(rng() % 3);
        auto ev = random_scripted(rng, n_solutions, n_moves, depth);

        SearchConfig cfg;
        cfg.depth = depth;
        Explorer plain(cfg, ev);
        VectorSource source(ev.solutions());
        auto r = plain.run(source);
        CHECK(r.residual == oracle_max(ev, ev.solutions(), depth));
    }
}

TEST_CASE("exact optimizations preserve the value on random tables") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const int n_solutions = 1 + static_cast<int>(rng() % 4);
        const int n_moves = 1 + static_cast<int>(rng() % 3);
        const int depth = 1 + static_cast<int>(rng() % 3);
        auto ev = random_scripted(rng, n_solutions, n_moves, depth);
        VectorSource source(ev.solutions());

        SearchConfig cfg;
        cfg.depth = depth;
        Explorer plain(cfg, ev);
        const double expected = plain.run(source).residual;

        for (int mask = 1; mask < 8; ++mask) {
            SearchConfig oc = cfg;
            oc.engine = SearchConfig::Engine::Optimized;
            oc.alpha_beta = mask & 1;
            oc.tt = mask & 2;
            oc.aspiration = mask & 4;
            Explorer fast(oc, ev);
            CHECK(fast.run(source).residual == expected);
        }

        // Futility and razoring with infinite margins never fire.
        SearchConfig spec = cfg;
        spec.engine = SearchConfig::Engine::Optimized;
        spec.alpha_beta = spec.futility = spec.ext_futility = spec.razoring = true;
        Explorer speculative(spec, ev);
        auto rs = speculative.run(source);
        CHECK(rs.residual == expected);
        CHECK_FALSE(rs.approximate);
    }
}

TEST_CASE("finite futility margins flag the result approximate") {
    // S0 scores 5; S1 has a low static eval (3) but high true leaves, so the
    // margin-0 futility test at the last ply prunes it and the result is an
    // approximation.
    ScriptedEvaluator ev;
    ev.depth_ = 1;
    ev.move_ids_ = {"m"};
    ev.move_labels_ = {"m"};
    ev.solution_ids_ = {"S0", "S1"};
    ev.values_ = {{"S0|", 9.0}, {"S0|m", 5.0}, {"S1|", 3.0}, {"S1|m", 10.0}};
    VectorSource source(ev.solutions());
    SearchConfig cfg;
    cfg.depth = 1;
    cfg.engine = SearchConfig::Engine::Optimized;
    cfg.alpha_beta = true;
    cfg.futility = true;
    cfg.futility_margin = 0.0;
    Explorer ex(cfg, ev);
    auto r = ex.run(source);
    CHECK(r.approximate);
}

TEST_CASE("the plain engine normalizes every toggle off") {
    SearchConfig cfg;
    cfg.alpha_beta = cfg.tt = cfg.aspiration = true;
    auto n = cfg.normalized();
    CHECK_FALSE(n.alpha_beta);
    CHECK_FALSE(n.tt);
    CHECK_FALSE(n.aspiration);
    cfg.engine = SearchConfig::Engine::Optimized;
    CHECK(cfg.normalized().alpha_beta);
}

TEST_CASE("index-backed search agrees with the oracle") {
    auto kb = test::mini_kb();
    auto model = test::mini_model();
    std::vector<const AttackPath*> paths;
    for (const auto& p : model.attack_paths) paths.push_back(&p);
    IndexEvaluator ev(model, kb, paths);

    std::vector<Solution> candidates;
    candidates.push_back(Solution{});
    Solution s1;
    s1.dsps = {{"cp_obf", "a1"}};
    Solution s2;
    s2.dsps = {{"cp_guard", "a1"}};
    Solution s3;
    s3.dsps = {{"cp_obf", "a1"}, {"cp_guard", "a1"}};
    candidates.push_back(s1);
    candidates.push_back(s2);
    candidates.push_back(s3);

    for (int depth = 1; depth <= 3; ++depth) {
        SearchConfig cfg;
        cfg.depth = depth;
        Explorer plain(cfg, ev);
        VectorSource source(candidates);
        auto r = plain.run(source);
        CHECK(r.residual == oracle_max(ev, candidates, depth));

        cfg.engine = SearchConfig::Engine::Optimized;
        cfg.alpha_beta = cfg.tt = true;
        Explorer fast(cfg, ev);
        auto ro = fast.run(source);
        CHECK(ro.residual == r.residual);
        CHECK(ro.nodes_visited <= r.nodes_visited);
    }
}

TEST_CASE("worker count does not change the value") {
    auto ev = ScriptedEvaluator::from_file(test::fixture("fig_tree_scripted.json"));
    VectorSource source(ev.solutions());
    SearchConfig cfg;
    cfg.depth = ev.depth();
    Explorer seq(cfg, ev);
    auto rs = seq.run(source);
    cfg.workers = 3;
    Explorer par(cfg, ev);
    auto rp = par.run(source);
    CHECK(rp.residual == rs.residual);
    CHECK(rp.solution.label == rs.solution.label);
    CHECK(rp.nodes_visited == rs.nodes_visited);  // no pruning in the plain engine
}

TEST_CASE("per-CCS and monolithic optimization agree on a single set") {
    auto kb = test::mini_kb();
    auto model = test::mini_model();
    SearchConfig cfg;
    cfg.depth = 2;
    SolutionSpaceConfig scfg;
    scfg.sigma = 1;
    auto per = optimize_per_ccs(model, kb, cfg, scfg);
    auto mono = optimize_monolithic(model, kb, cfg, scfg);
    CHECK(per.global.residual == mono.global.residual);
    REQUIRE(per.per_ccs.size() == 1);
    CHECK(per.per_ccs[0].overheads.count("client_time"));
}

TEST_CASE("the DOT rendering marks a single winning root branch") {
    auto ev = ScriptedEvaluator::from_file(test::fixture("fig_tree_scripted.json"));
    VectorSource source(ev.solutions());
    SearchConfig cfg;
    cfg.depth = ev.depth();
    Explorer ex(cfg, ev);
    TreeCapture capture;
    ex.set_capture(&capture);
    auto r = ex.run(source);
    REQUIRE_FALSE(capture.nodes.empty());
    CHECK(capture.nodes.size() == r.nodes_visited);  // full plain tree, root included

    auto dot = to_dot(capture);
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("S3:8(15)") != std::string::npos);

    // The winning path runs root -> S3 -> K1 -> K1 -> K2.
    int winning = 0;
    for (const auto& n : capture.nodes)
        if (n.winning) ++winning;
    CHECK(winning == 5);
}

TEST_CASE("tiny capture limits raise TooLarge") {
    auto ev = ScriptedEvaluator::from_file(test::fixture("fig_tree_scripted.json"));
    VectorSource source(ev.solutions());
    SearchConfig cfg;
    cfg.depth = ev.depth();
    Explorer ex(cfg, ev);
    TreeCapture capture;
    capture.limit = 3;
    ex.set_capture(&capture);
    CHECK_THROWS_AS(ex.run(source), TooLarge);
}
