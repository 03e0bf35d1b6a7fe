#include "spmiti/prep.hpp"

#include <algorithm>
#include <numeric>

namespace spmiti {

namespace {

// Union-find with path compression and union by size.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

bool art_sets_joint(const std::set<std::string>& s1, const std::set<std::string>& s2,
                    const ApplicationModel& model) {
    for (const auto& x : s1)
        for (const auto& y : s2)
            if (joint(model.artifact(x), model.artifact(y))) return true;
    return false;
}

}  // namespace

std::vector<DeployedProtection> compatible_dsps(const ProtectionObjective& po,
                                                const ApplicationModel& model,
                                                const KnowledgeBase& kb, PrepStats* stats) {
    const Artifact& a = model.artifact(po.artifact_id);
    std::vector<DeployedProtection> out;
    for (const auto& cp : kb.cps) {
        if (stats) ++stats->cp_scans;
        const auto& asp = kb.asp_of(cp);
        if (kb.compatible(asp, a.kind) && kb.enforces(asp, po.requirement))
            out.push_back({cp.id, a.id});
    }
    return out;
}

std::set<std::string> art(const std::string& asset_id, const ApplicationModel& model) {
    std::set<std::string> touched;
    for (const auto& path : model.attack_paths) {
        if (path.target_asset != asset_id) continue;
        for (const auto& step : path.steps) touched.insert(step.artifact_id);
    }
    return touched;
}

std::vector<CodeCorrelationSet> compute_ccs(const ApplicationModel& model, const KnowledgeBase& kb,
                                            PrepStats* stats) {
    (void)kb;
    const auto& assets = model.asset_ids;  // sorted
    const std::size_t n = assets.size();

    std::vector<std::set<std::string>> foot(n);
    for (std::size_t i = 0; i < n; ++i) foot[i] = art(assets[i], model);

    UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) {
            if (stats) ++stats->pair_tests;
            if (art_sets_joint(foot[i], foot[k], model)) uf.unite(i, k);
        }
    }

    std::map<std::size_t, CodeCorrelationSet> groups;
    for (std::size_t i = 0; i < n; ++i) {
        auto& ccs = groups[uf.find(i)];
        ccs.assets.insert(assets[i]);
        ccs.closure.insert(assets[i]);
        ccs.closure.insert(foot[i].begin(), foot[i].end());
    }

    std::vector<CodeCorrelationSet> out;
    for (auto& [root, ccs] : groups) {
        (void)root;
        ccs.id = *ccs.assets.begin();
        out.push_back(std::move(ccs));
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });

    // Every explicitly scoped threshold must name a real CCS.
    for (const auto& [type, scopes] : model.overhead_thresholds) {
        (void)type;
        for (const auto& [scope, theta] : scopes) {
            (void)theta;
            if (scope == "global") continue;
            bool known = std::any_of(out.begin(), out.end(),
                                     [&](const auto& c) { return c.id == scope; });
            if (!known)
                throw ConfigError("overhead threshold references unknown CCS id '" + scope + "'");
        }
    }

    for (auto& ccs : out)
        for (const auto& type : kOverheadTypes)
            ccs.thresholds[type] = model.threshold(type, ccs.id);

    return out;
}

std::map<std::string, Solution> split_solution(const Solution& s,
                                               const std::vector<CodeCorrelationSet>& ccs_list) {
    std::map<std::string, Solution> parts;
    for (const auto& ccs : ccs_list) parts[ccs.id] = Solution{};

    for (const auto& dsp : s.dsps) {
        const CodeCorrelationSet* home = nullptr;
        for (const auto& ccs : ccs_list) {
            if (ccs.closure.count(dsp.artifact_id)) {
                home = &ccs;
                break;
            }
        }
        if (!home)
            throw SplitError("DSP on artifact '" + dsp.artifact_id + "' belongs to no CCS closure");
        parts[home->id].dsps.push_back(dsp);
    }
    return parts;
}

}  // namespace spmiti
