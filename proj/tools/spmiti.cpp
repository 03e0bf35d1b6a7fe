// spmiti: selects optimal ordered software protections for application assets.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spmiti/bench.hpp"
#include "spmiti/errors.hpp"
#include "spmiti/explorer.hpp"
#include "spmiti/overhead.hpp"
#include "spmiti/prep.hpp"
#include "spmiti/solspace.hpp"

using json = nlohmann::json;
using namespace spmiti;

namespace {

int log_level() {
    const char* env = std::getenv("SPMITI_LOG");
    if (!env) return 0;
    std::string v = env;
    if (v == "debug") return 2;
    if (v == "info") return 1;
    return 0;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[spmiti] " << msg << "\n";
}

json solution_json(const Solution& s) {
    if (!s.label.empty()) return json{{"label", s.label}};
    json dsps = json::array();
    for (const auto& d : s.dsps) dsps.push_back({{"cp_id", d.cp_id}, {"artifact_id", d.artifact_id}});
    return json{{"dsps", dsps}};
}

json result_json(const SearchResult& r) {
    json top = json::array();
    for (const auto& rs : r.top) {
        top.push_back({{"solution", solution_json(rs.solution)},
                       {"residual", rs.residual},
                       {"base", rs.base}});
    }
    return json{{"solution", solution_json(r.solution)},
                {"residual", r.residual},
                {"base", r.base},
                {"attack_sequence", r.attack_labels},
                {"top", top},
                {"nodes_visited", r.nodes_visited},
                {"tt_hits", r.tt_hits},
                {"wall_ms", r.wall_ms},
                {"approximate", r.approximate}};
}

Solution load_seed_solution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open seed solution file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    Solution s;
    for (const auto& d : j.at("dsps"))
        s.dsps.push_back(DeployedProtection{d.at("cp_id").get<std::string>(),
                                            d.at("artifact_id").get<std::string>()});
    return s;
}

struct SearchFlags {
    int depth = 3;
    std::string engine = "plain";
    std::string enable;   // comma list: alpha_beta,aspiration,tt,futility,ext_futility,razoring
    std::string margins;  // f=<v>,ef=<v>,rz=<v>
    int top_n = 10;
    double warm_start = 0;
    bool has_warm_start = false;
    int workers = 1;
};

void add_search_flags(CLI::App* cmd, SearchFlags& f) {
    cmd->add_option("--depth", f.depth, "attacker moves in the game tree");
    cmd->add_option("--engine", f.engine, "plain|optimized")
        ->check(CLI::IsMember({"plain", "optimized"}));
    cmd->add_option("--enable", f.enable,
                    "comma list of optimizations (alpha_beta,aspiration,tt,futility,"
                    "ext_futility,razoring)");
    cmd->add_option("--margins", f.margins, "f=<v>,ef=<v>,rz=<v> pruning margins");
    cmd->add_option("--top-n", f.top_n, "ranked solutions to report");
    cmd->add_option("--warm-start", f.warm_start, "aspiration center from a previous run")
        ->each([&f](const std::string&) { f.has_warm_start = true; });
    cmd->add_option("--workers", f.workers, "parallel root tasks");
}

SearchConfig make_search_config(const SearchFlags& f) {
    SearchConfig cfg;
    cfg.depth = f.depth;
    cfg.top_n = f.top_n;
    cfg.workers = f.workers;
    if (f.has_warm_start) cfg.warm_start = f.warm_start;
    if (f.engine == "optimized") {
        cfg.engine = SearchConfig::Engine::Optimized;
        if (f.enable.empty()) {
            cfg.alpha_beta = cfg.aspiration = cfg.tt = true;
        } else {
            std::stringstream ss(f.enable);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (tok == "alpha_beta") cfg.alpha_beta = true;
                else if (tok == "aspiration") cfg.aspiration = true;
                else if (tok == "tt") cfg.tt = true;
                else if (tok == "futility") cfg.futility = true;
                else if (tok == "ext_futility") cfg.ext_futility = true;
                else if (tok == "razoring") cfg.razoring = true;
                else throw ConfigError("unknown optimization '" + tok + "'");
            }
        }
    } else if (!f.enable.empty()) {
        throw ConfigError("--enable requires --engine optimized");
    }
    if (!f.margins.empty()) {
        std::stringstream ss(f.margins);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) throw ConfigError("bad margin token '" + tok + "'");
            const std::string key = tok.substr(0, eq);
            const double v = std::stod(tok.substr(eq + 1));
            if (key == "f") cfg.futility_margin = v;
            else if (key == "ef") cfg.ext_futility_margin = v;
            else if (key == "rz") cfg.razor_margin = v;
            else throw ConfigError("unknown margin '" + key + "'");
        }
    }
    return cfg;
}

struct SpaceFlags {
    int sigma = 3;
    std::uint64_t seed = 0;
    bool exhaustive = false;
    bool skip_discouraged = false;
    std::string seed_solution;
};

void add_space_flags(CLI::App* cmd, SpaceFlags& f) {
    cmd->add_option("--sigma", f.sigma, "max DSPs per protection objective");
    cmd->add_option("--seed", f.seed, "solution-space walk seed");
    cmd->add_flag("--exhaustive", f.exhaustive, "canonical enumeration instead of the fuzz walk");
    cmd->add_flag("--skip-discouraged", f.skip_discouraged,
                  "drop orderings containing a discouraged pair");
    cmd->add_option("--seed-solution", f.seed_solution, "JSON file with the starting solution");
}

SolutionSpaceConfig make_space_config(const SpaceFlags& f) {
    SolutionSpaceConfig cfg;
    cfg.sigma = f.sigma;
    cfg.seed = f.seed;
    cfg.exhaustive = f.exhaustive;
    cfg.skip_discouraged = f.skip_discouraged;
    if (!f.seed_solution.empty()) cfg.seed_solution = load_seed_solution(f.seed_solution);
    return cfg;
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"software protection selection via a defender/attacker game"};
    app.require_subcommand(1);

    std::string kb_path, model_path, scripted_path, report = "json";
    SearchFlags search;
    SpaceFlags space;
    bool monolithic = false, dot = false;

    auto add_inputs = [&](CLI::App* cmd, bool scripted_ok) {
        cmd->add_option("--kb", kb_path, "knowledge base JSON");
        cmd->add_option("--model", model_path, "application model JSON");
        if (scripted_ok)
            cmd->add_option("--scripted", scripted_path,
                            "evaluate from a scripted fixture (testing hook)");
    };

    auto* validate = app.add_subcommand("validate", "load and validate KB and model");
    add_inputs(validate, false);

    auto* prepare = app.add_subcommand("prepare", "compute code correlation sets");
    add_inputs(prepare, false);

    auto* optimize = app.add_subcommand("optimize", "pick the optimal ordered solution");
    add_inputs(optimize, true);
    add_search_flags(optimize, search);
    add_space_flags(optimize, space);
    optimize->add_option("--report", report, "json|text")
        ->check(CLI::IsMember({"json", "text"}));
    optimize->add_flag("--monolithic", monolithic, "one tree over the whole application");

    auto* explain = app.add_subcommand("explain", "render the search tree");
    add_inputs(explain, true);
    add_search_flags(explain, search);
    add_space_flags(explain, space);
    explain->add_flag("--dot", dot, "emit DOT");

    auto* bench = app.add_subcommand("bench", "synthetic scaling benchmark, CSV on stdout");
    std::string po_counts = "4,8,16", path_counts = "3", depths = "3";
    BenchSpec bspec;
    bench->add_option("--po-counts", po_counts, "comma list of PO counts");
    bench->add_option("--path-counts", path_counts, "comma list of attack path counts");
    bench->add_option("--depths", depths, "comma list of depths");
    bench->add_option("--seed", bspec.seed, "instance/walk seed");
    bench->add_option("--repeats", bspec.repeats, "repeats per cell");
    bench->add_option("--engine", bspec.engine, "plain|optimized")
        ->check(CLI::IsMember({"plain", "optimized"}));
    bench->add_option("--cap", bspec.solution_cap, "solutions per tree (0: 2*po_count)");
    bench->add_option("--workers", bspec.workers, "parallel root tasks");
    bench->add_flag("--force", bspec.force, "lift desk-scale guardrails");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) {
            auto kb = load_kb(kb_path);
            auto model = load_model(model_path);
            cross_validate(model, kb);
            for (const auto& w : model.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << "OK\n";
            return 0;
        }

        if (*prepare) {
            auto kb = load_kb(kb_path);
            auto model = load_model(model_path);
            cross_validate(model, kb);
            auto ccs_list = compute_ccs(model, kb);
            json out{{"schema_version", 1}, {"ccs", json::array()}};
            std::size_t min_size = SIZE_MAX, max_size = 0, total = 0;
            for (const auto& c : ccs_list) {
                out["ccs"].push_back({{"id", c.id},
                                      {"assets", c.assets},
                                      {"closure", c.closure},
                                      {"thresholds", c.thresholds}});
                min_size = std::min(min_size, c.assets.size());
                max_size = std::max(max_size, c.assets.size());
                total += c.assets.size();
            }
            out["stats"] = {{"count", ccs_list.size()},
                            {"min_size", ccs_list.empty() ? 0 : min_size},
                            {"max_size", max_size},
                            {"mean_size", ccs_list.empty()
                                              ? 0.0
                                              : static_cast<double>(total) / ccs_list.size()}};
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (*optimize) {
            auto cfg = make_search_config(search);
            if (!scripted_path.empty()) {
                auto eval = ScriptedEvaluator::from_file(scripted_path);
                if (!optimize->count("--depth")) cfg.depth = eval.depth();
                VectorSource source(eval.solutions());
                Explorer explorer(cfg, eval);
                auto r = explorer.run(source);
                if (report == "text") {
                    std::cout << "best solution: " << r.solution.label << "\n"
                              << "residual index: " << r.residual << " (base " << r.base << ")\n"
                              << "attack sequence:";
                    for (const auto& l : r.attack_labels) std::cout << " " << l;
                    std::cout << "\nnodes visited: " << r.nodes_visited << "\n";
                    return 0;
                }
                json out = result_json(r);
                out["schema_version"] = 1;
                std::cout << out.dump(2) << "\n";
                return 0;
            }
            auto kb = load_kb(kb_path);
            auto model = load_model(model_path);
            cross_validate(model, kb);
            auto scfg = make_space_config(space);
            log_info("searching (engine=" + search.engine + ", depth=" +
                     std::to_string(cfg.depth) + ")");
            OptimizeResult res = monolithic ? optimize_monolithic(model, kb, cfg, scfg)
                                            : optimize_per_ccs(model, kb, cfg, scfg);
            if (report == "text") {
                std::cout << "best solution: " << res.global.solution.to_string() << "\n"
                          << "residual index: " << res.global.residual
                          << " (base " << res.global.base << ")\n"
                          << "attack sequence:";
                for (const auto& l : res.global.attack_labels) std::cout << " " << l;
                std::cout << "\nnodes visited: " << res.global.nodes_visited << "\n";
                return 0;
            }
            json out{{"schema_version", 1}, {"result", result_json(res.global)}};
            out["per_ccs"] = json::array();
            for (const auto& rep : res.per_ccs) {
                out["per_ccs"].push_back({{"id", rep.id},
                                          {"solution", solution_json(rep.solution)},
                                          {"attack_sequence", rep.attack_labels},
                                          {"residual", rep.residual},
                                          {"base", rep.base},
                                          {"nodes_visited", rep.nodes_visited},
                                          {"tt_hits", rep.tt_hits},
                                          {"overheads", rep.overheads}});
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (*explain) {
            auto cfg = make_search_config(search);
            TreeCapture capture;
            SearchResult r;
            if (!scripted_path.empty()) {
                auto eval = ScriptedEvaluator::from_file(scripted_path);
                if (!explain->count("--depth")) cfg.depth = eval.depth();
                VectorSource source(eval.solutions());
                Explorer explorer(cfg, eval);
                explorer.set_capture(&capture);
                r = explorer.run(source);
            } else {
                auto kb = load_kb(kb_path);
                auto model = load_model(model_path);
                cross_validate(model, kb);
                auto scfg = make_space_config(space);
                auto ccs_list = compute_ccs(model, kb);
                SolutionSpace sspace(model, kb, model.pos, ccs_list, scfg);
                SpaceSource source(sspace);
                std::vector<const AttackPath*> paths;
                for (const auto& p : model.attack_paths) paths.push_back(&p);
                IndexEvaluator eval(model, kb, paths);
                Explorer explorer(cfg, eval);
                explorer.set_capture(&capture);
                r = explorer.run(source);
            }
            if (dot) {
                std::cout << to_dot(capture);
            } else {
                std::cout << "best: " << r.solution.to_string() << " residual " << r.residual
                          << " over " << capture.nodes.size() << " rendered nodes\n";
            }
            return 0;
        }

        if (*bench) {
            bspec.po_counts = parse_int_list(po_counts);
            bspec.path_counts = parse_int_list(path_counts);
            bspec.depths = parse_int_list(depths);
            auto rows = run_bench(bspec);
            std::cout << bench_csv(rows);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
