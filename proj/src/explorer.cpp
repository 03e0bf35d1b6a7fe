#include "spmiti/explorer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spmiti/errors.hpp"
#include "spmiti/overhead.hpp"

namespace spmiti {

using json = nlohmann::json;

namespace {
constexpr std::size_t kNoCapture = static_cast<std::size_t>(-1);
}

SearchConfig SearchConfig::normalized() const {
    SearchConfig out = *this;
    if (out.engine == Engine::Plain) {
        out.alpha_beta = false;
        out.aspiration = false;
        out.tt = false;
        out.futility = false;
        out.ext_futility = false;
        out.razoring = false;
    }
    if (out.depth < 0) throw ConfigError("depth must be >= 0");
    if (out.workers < 1) throw ConfigError("workers must be >= 1");
    if (out.top_n < 1) throw ConfigError("top-n must be >= 1");
    if (out.aspiration_half_width <= 0) throw ConfigError("aspiration window must be > 0");
    return out;
}

// ---------------------------------------------------------------------------
// evaluators

IndexEvaluator::IndexEvaluator(const ApplicationModel& model, const KnowledgeBase& kb,
                               std::vector<const AttackPath*> moves)
    : model_(model), kb_(kb), moves_(std::move(moves)) {
    unit_paths_.reserve(moves_.size());
    for (const auto* p : moves_) unit_paths_.push_back(ConcreteAttackPath::unit(*p));
}

double IndexEvaluator::eval(const Solution& s, const std::vector<int>& move_seq) {
    std::vector<int> sorted_seq = move_seq;
    std::sort(sorted_seq.begin(), sorted_seq.end());
    const auto key = std::make_pair(s.canonical_hash(), std::move(sorted_seq));

    std::lock_guard<std::mutex> lock(memo_mutex_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;

    State t;
    t.solution = s;
    for (int m : move_seq) t.paths.push_back(unit_paths_.at(static_cast<std::size_t>(m)));
    const double v = sp_index(t, model_, kb_).value;
    memo_.emplace(key, v);
    return v;
}

std::string IndexEvaluator::move_label(int move) const {
    const auto& p = *moves_.at(static_cast<std::size_t>(move));
    return p.id + "(" + p.target_asset + "," + p.requirement + ")";
}

ScriptedEvaluator ScriptedEvaluator::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scripted fixture " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }

    ScriptedEvaluator ev;
    ev.depth_ = j.value("depth", 3);
    for (const auto& m : j.at("moves")) {
        ev.move_ids_.push_back(m.at("id").get<std::string>());
        ev.move_labels_.push_back(m.value("label", m.at("id").get<std::string>()));
    }
    for (const auto& s : j.at("solutions")) ev.solution_ids_.push_back(s.get<std::string>());
    for (const auto& [key, value] : j.at("values").items())
        ev.values_[key] = value.get<double>();
    return ev;
}

double ScriptedEvaluator::eval(const Solution& s, const std::vector<int>& move_seq) {
    std::string key = s.label + "|";
    for (std::size_t i = 0; i < move_seq.size(); ++i) {
        if (i) key += ",";
        key += move_ids_.at(static_cast<std::size_t>(move_seq[i]));
    }
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("scripted fixture has no value for state " + key);
    return it->second;
}

std::string ScriptedEvaluator::move_label(int move) const {
    return move_labels_.at(static_cast<std::size_t>(move));
}

std::vector<Solution> ScriptedEvaluator::solutions() const {
    std::vector<Solution> out;
    for (const auto& id : solution_ids_) {
        Solution s;
        s.label = id;
        out.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// transposition table

Explorer::TT::TT(std::size_t capacity) {
    std::size_t n = 1;
    while (n < capacity) n <<= 1;
    slots.resize(n);
    mask = n - 1;
}

const Explorer::TTEntry* Explorer::TT::probe(std::uint64_t key, int depth) const {
    const auto& e = slots[key & mask];
    if (e.used && e.key == key && e.depth == depth) return &e;
    return nullptr;
}

void Explorer::TT::store(std::uint64_t key, int depth, double value,
                         const std::vector<int>& line) {
    auto& e = slots[key & mask];
    if (e.used && e.depth > depth) return;  // depth-preferred replacement
    e = TTEntry{key, depth, value, line, true};
}

std::uint64_t Explorer::state_key(const Solution& s, const std::vector<int>& seq,
                                  int remaining) const {
    std::uint64_t h = s.canonical_hash();
    if (eval_.order_invariant()) {
        std::vector<int> sorted_seq = seq;
        std::sort(sorted_seq.begin(), sorted_seq.end());
        for (int m : sorted_seq) h = fnv1a(&m, sizeof(m), h);
    } else {
        for (int m : seq) h = fnv1a(&m, sizeof(m), h);
    }
    return fnv1a(&remaining, sizeof(remaining), h);
}

// ---------------------------------------------------------------------------
// search

Explorer::Explorer(const SearchConfig& cfg, Evaluator& eval)
    : cfg_(cfg.normalized()), eval_(eval) {
    if (cfg_.tt) tt_ = std::make_unique<TT>(cfg_.tt_capacity);
}

std::size_t Explorer::capture_child(std::size_t parent, const std::string& label) {
    if (capture_->nodes.size() >= capture_->limit)
        throw TooLarge("explanation tree exceeds " + std::to_string(capture_->limit) + " nodes");
    capture_->nodes.push_back(TreeNode{label, 0, 0, false, false, {}});
    const std::size_t idx = capture_->nodes.size() - 1;
    capture_->nodes[parent].children.push_back(idx);
    return idx;
}

double Explorer::attacker_search(const Solution& s, std::vector<int>& seq, int remaining,
                                 double alpha, double beta, std::vector<int>& line, TT* tt,
                                 std::size_t capture_node) {
    ++nodes_;
    line.clear();

    const bool capturing = capture_ && capture_node != kNoCapture;

    if (remaining == 0) {
        const double v = eval_.eval(s, seq);
        if (capturing) {
            auto& node = capture_->nodes[capture_node];
            node.leaf = true;
            node.propagated = v;
            node.static_eval = v;
        }
        return v;
    }

    std::uint64_t key = 0;
    if (tt && !capturing) {  // keep the capture tree complete
        key = state_key(s, seq, remaining);
        if (const auto* e = tt->probe(key, remaining)) {
            ++tt_hits_;
            line = e->line;
            return e->value;
        }
    }

    // Speculative forward pruning; an infinite margin never fires.
    const bool want_static =
        capturing || (cfg_.futility && remaining == 1 && std::isfinite(cfg_.futility_margin)) ||
        (cfg_.ext_futility && remaining == 2 && std::isfinite(cfg_.ext_futility_margin)) ||
        (cfg_.razoring && std::isfinite(cfg_.razor_margin));
    double st = 0;
    if (want_static) st = eval_.eval(s, seq);
    if (capturing) {
        capture_->nodes[capture_node].static_eval = st;
    }
    if (cfg_.futility && remaining == 1 && st + cfg_.futility_margin <= alpha) {
        approximate_ = true;
        if (capturing) capture_->nodes[capture_node].propagated = st;
        return st;
    }
    if (cfg_.ext_futility && remaining == 2 && st + cfg_.ext_futility_margin <= alpha) {
        approximate_ = true;
        if (capturing) capture_->nodes[capture_node].propagated = st;
        return st;
    }
    if (cfg_.razoring && st < alpha - cfg_.razor_margin) {
        approximate_ = true;
        if (capturing) capture_->nodes[capture_node].propagated = st;
        return st;
    }

    double v = kInf;
    bool cut = false;
    std::vector<int> best_line, child_line;
    const int moves = eval_.move_count();
    for (int m = 0; m < moves; ++m) {
        seq.push_back(m);
        std::size_t child_cap = kNoCapture;
        if (capturing) child_cap = capture_child(capture_node, eval_.move_label(m));
        const double cv =
            attacker_search(s, seq, remaining - 1, alpha, std::min(beta, v), child_line, tt,
                            child_cap);
        seq.pop_back();
        if (capturing) capture_->nodes[child_cap].propagated = cv;
        if (cv < v) {
            v = cv;
            best_line.clear();
            best_line.push_back(m);
            best_line.insert(best_line.end(), child_line.begin(), child_line.end());
        }
        if (cfg_.alpha_beta && v <= alpha) {
            cut = true;
            break;
        }
    }
    if (capturing) capture_->nodes[capture_node].propagated = v;

    // v > alpha at a min node implies every explored child bound was exact.
    if (tt && !capturing && !cut && v > alpha) tt->store(key, remaining, v, best_line);

    line = best_line;
    return v;
}

namespace {

bool better_tie(const Solution& a, const Solution& b) {
    if (a.dsps.size() != b.dsps.size()) return a.dsps.size() < b.dsps.size();
    return a.canonical_hash() < b.canonical_hash();
}

}  // namespace

SearchResult Explorer::run_window(SolutionSource& source, double alpha0, double beta0) {
    source.reset();
    nodes_ = 1;  // the defender's root
    tt_hits_ = 0;
    approximate_ = false;
    if (capture_) {
        capture_->nodes.clear();
        capture_->nodes.push_back(TreeNode{"defender", 0, 0, false, true, {}});
    }

    SearchResult r;
    double alpha = alpha0;
    bool have = false;
    std::size_t best_cap = kNoCapture;

    auto consider = [&](const Solution& s, double v, double base, std::vector<int> line,
                        std::size_t cap_idx) {
        r.top.push_back(RankedSolution{s, v, base, line});
        bool better = false;
        if (!have || v > r.residual)
            better = true;
        else if (!cfg_.alpha_beta && v == r.residual)
            better = better_tie(s, r.solution);
        if (better) {
            r.solution = s;
            r.residual = v;
            r.base = base;
            r.attack_seq = std::move(line);
            best_cap = cap_idx;
        }
        have = true;
        if (cfg_.alpha_beta) alpha = std::max(alpha, v);
    };

    if (cfg_.workers == 1) {
        while (auto s = source.next()) {
            std::size_t cap_idx = kNoCapture;
            if (capture_) cap_idx = capture_child(0, s->to_string());
            std::vector<int> seq, line;
            const double v =
                attacker_search(*s, seq, cfg_.depth, alpha, beta0, line, tt_.get(), cap_idx);
            const double base = eval_.eval(*s, {});
            if (capture_) {
                capture_->nodes[cap_idx].propagated = v;
                capture_->nodes[cap_idx].static_eval = base;
            }
            consider(*s, v, base, std::move(line), cap_idx);
        }
    } else {
        // Root solutions searched in batches; alpha is frozen per batch, so the
        // value matches the sequential run while pruning may differ.
        bool drained = false;
        while (!drained) {
            std::vector<Solution> batch;
            while (static_cast<int>(batch.size()) < cfg_.workers) {
                auto s = source.next();
                if (!s) {
                    drained = true;
                    break;
                }
                batch.push_back(std::move(*s));
            }
            if (batch.empty()) break;

            struct TaskResult {
                double value = 0;
                double base = 0;
                std::vector<int> line;
                std::uint64_t nodes = 0;
                std::uint64_t tt_hits = 0;
                bool approximate = false;
            };
            std::vector<std::future<TaskResult>> futures;
            const double batch_alpha = alpha;
            for (const auto& s : batch) {
                futures.push_back(std::async(std::launch::async, [this, &s, batch_alpha, beta0] {
                    Explorer sub(cfg_, eval_);
                    TaskResult tr;
                    std::vector<int> seq;
                    sub.nodes_ = 0;
                    tr.value = sub.attacker_search(s, seq, cfg_.depth, batch_alpha, beta0,
                                                   tr.line, sub.tt_.get(), kNoCapture);
                    tr.base = eval_.eval(s, {});
                    tr.nodes = sub.nodes_;
                    tr.tt_hits = sub.tt_hits_;
                    tr.approximate = sub.approximate_;
                    return tr;
                }));
            }
            for (std::size_t i = 0; i < batch.size(); ++i) {
                TaskResult tr = futures[i].get();
                nodes_ += tr.nodes;
                tt_hits_ += tr.tt_hits;
                approximate_ = approximate_ || tr.approximate;
                consider(batch[i], tr.value, tr.base, std::move(tr.line), kNoCapture);
            }
        }
    }

    if (!have) throw EmptySolutionSpace("the solution space produced no candidate");

    std::stable_sort(r.top.begin(), r.top.end(),
                     [](const RankedSolution& a, const RankedSolution& b) {
                         return a.residual > b.residual;
                     });
    if (r.top.size() > static_cast<std::size_t>(cfg_.top_n))
        r.top.resize(static_cast<std::size_t>(cfg_.top_n));

    for (int m : r.attack_seq) r.attack_labels.push_back(eval_.move_label(m));

    if (capture_ && best_cap != kNoCapture) {
        capture_->nodes[0].propagated = r.residual;
        std::size_t node = best_cap;
        capture_->nodes[node].winning = true;
        for (int m : r.attack_seq) {
            node = capture_->nodes[node].children.at(static_cast<std::size_t>(m));
            capture_->nodes[node].winning = true;
        }
    }

    r.nodes_visited = nodes_;
    r.tt_hits = tt_hits_;
    r.approximate = approximate_;
    return r;
}

SearchResult Explorer::run(SolutionSource& source) {
    const auto t0 = std::chrono::steady_clock::now();

    SearchResult r;
    if (!cfg_.aspiration) {
        r = run_window(source, -kInf, kInf);
    } else {
        double center = 0;
        std::uint64_t probe_nodes = 0;
        if (cfg_.warm_start) {
            center = *cfg_.warm_start;
        } else {
            // No prior estimate: search the first candidate with a full window
            // and center the aspiration window on its value.
            source.reset();
            auto first = source.next();
            if (!first) throw EmptySolutionSpace("the solution space produced no candidate");
            nodes_ = 0;
            tt_hits_ = 0;
            approximate_ = false;
            std::vector<int> seq, line;
            center = attacker_search(*first, seq, cfg_.depth, -kInf, kInf, line, tt_.get(),
                                     kNoCapture);
            probe_nodes = nodes_;
        }
        const double a = center - cfg_.aspiration_half_width;
        const double b = center + cfg_.aspiration_half_width;
        r = run_window(source, a, b);
        if (r.residual <= a || r.residual >= b) {  // fail-low / fail-high: re-search
            SearchResult full = run_window(source, -kInf, kInf);
            full.nodes_visited += r.nodes_visited;
            full.tt_hits += r.tt_hits;
            full.approximate = full.approximate || r.approximate;
            r = full;
        }
        r.nodes_visited += probe_nodes;
    }

    const auto t1 = std::chrono::steady_clock::now();
    r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return r;
}

// ---------------------------------------------------------------------------
// per-CCS optimization

namespace {

CcsReport make_report(const CodeCorrelationSet& ccs, const SearchResult& r,
                      const ApplicationModel& model, const KnowledgeBase& kb) {
    CcsReport rep;
    rep.id = ccs.id;
    rep.solution = r.solution;
    rep.attack_labels = r.attack_labels;
    rep.residual = r.residual;
    rep.base = r.base;
    rep.nodes_visited = r.nodes_visited;
    rep.tt_hits = r.tt_hits;
    std::set<std::string> scope(ccs.closure.begin(), ccs.closure.end());
    for (const auto& type : kOverheadTypes)
        rep.overheads[type] = overhead(type, r.solution, scope, model, kb);
    return rep;
}

SearchResult search_subinstance(const ApplicationModel& model, const KnowledgeBase& kb,
                                const std::vector<ProtectionObjective>& pos,
                                const std::vector<const AttackPath*>& paths,
                                const std::vector<CodeCorrelationSet>& ccs_list,
                                const SearchConfig& cfg, const SolutionSpaceConfig& space_cfg) {
    SolutionSpace space(model, kb, pos, ccs_list, space_cfg);
    IndexEvaluator eval(model, kb, paths);
    Explorer explorer(cfg, eval);
    if (space_cfg.exhaustive) {
        VectorSource source(space.enumerate_all());
        return explorer.run(source);
    }
    SpaceSource source(space);
    return explorer.run(source);
}

}  // namespace

OptimizeResult optimize_per_ccs(const ApplicationModel& model, const KnowledgeBase& kb,
                                const SearchConfig& cfg, const SolutionSpaceConfig& space_cfg) {
    auto ccs_list = compute_ccs(model, kb);

    OptimizeResult out;
    out.global.residual = 0;
    out.global.base = 0;

    if (ccs_list.size() == 1) {
        // A single CCS carries the full result (including the ranked list).
        std::vector<const AttackPath*> paths;
        for (const auto& p : model.attack_paths) paths.push_back(&p);
        out.global = search_subinstance(model, kb, model.pos, paths, ccs_list, cfg, space_cfg);
        out.per_ccs.push_back(make_report(ccs_list.front(), out.global, model, kb));
        return out;
    }

    for (const auto& ccs : ccs_list) {
        std::vector<ProtectionObjective> pos;
        for (const auto& po : model.pos)
            if (ccs.assets.count(po.artifact_id)) pos.push_back(po);
        std::vector<const AttackPath*> paths;
        for (const auto& p : model.attack_paths)
            if (ccs.assets.count(p.target_asset)) paths.push_back(&p);

        auto r = search_subinstance(model, kb, pos, paths, {ccs}, cfg, space_cfg);
        out.per_ccs.push_back(make_report(ccs, r, model, kb));

        out.global.solution.dsps.insert(out.global.solution.dsps.end(),
                                        r.solution.dsps.begin(), r.solution.dsps.end());
        out.global.residual += r.residual;
        out.global.base += r.base;
        out.global.nodes_visited += r.nodes_visited;
        out.global.tt_hits += r.tt_hits;
        out.global.wall_ms += r.wall_ms;
        out.global.approximate = out.global.approximate || r.approximate;
        for (const auto& label : r.attack_labels)
            out.global.attack_labels.push_back(ccs.id + ":" + label);
    }
    return out;
}

OptimizeResult optimize_monolithic(const ApplicationModel& model, const KnowledgeBase& kb,
                                   const SearchConfig& cfg, const SolutionSpaceConfig& space_cfg) {
    auto ccs_list = compute_ccs(model, kb);
    std::vector<const AttackPath*> paths;
    for (const auto& p : model.attack_paths) paths.push_back(&p);

    OptimizeResult out;
    out.global = search_subinstance(model, kb, model.pos, paths, ccs_list, cfg, space_cfg);
    return out;
}

// ---------------------------------------------------------------------------
// DOT rendering

std::string to_dot(const TreeCapture& capture) {
    std::ostringstream os;
    os << "digraph explore {\n  node [shape=box];\n";
    for (std::size_t i = 0; i < capture.nodes.size(); ++i) {
        const auto& n = capture.nodes[i];
        os << "  n" << i << " [label=\"" << n.label << ":" << n.propagated;
        if (!n.leaf) os << "(" << n.static_eval << ")";
        os << "\"";
        if (n.winning) os << ", penwidth=2, color=red";
        os << "];\n";
    }
    for (std::size_t i = 0; i < capture.nodes.size(); ++i) {
        for (auto c : capture.nodes[i].children) {
            os << "  n" << i << " -> n" << c;
            if (capture.nodes[i].winning && capture.nodes[c].winning)
                os << " [penwidth=2, color=red]";
            os << ";\n";
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace spmiti
