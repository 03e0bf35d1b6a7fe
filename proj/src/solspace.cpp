#include "spmiti/solspace.hpp"

#include <algorithm>

#include "spmiti/overhead.hpp"

namespace spmiti {

namespace {

// Per-artifact subsequences of the DSP list, order preserved.
std::map<std::string, std::vector<const DeployedProtection*>> by_artifact(const Solution& s) {
    std::map<std::string, std::vector<const DeployedProtection*>> groups;
    for (const auto& dsp : s.dsps) groups[dsp.artifact_id].push_back(&dsp);
    return groups;
}

// Whether appending `next` to the per-artifact prefix `prefix` keeps the
// sequence valid. Monotone: an invalid prefix cannot become valid.
bool extension_ok(const std::vector<const DeployedProtection*>& prefix,
                  const DeployedProtection& next, const KnowledgeBase& kb) {
    const auto& next_asp = kb.cp(next.cp_id).asp_id;
    for (const auto* earlier : prefix) {
        if (kb.asp_precedence(kb.cp(earlier->cp_id).asp_id, next_asp) == Precedence::Forbidden)
            return false;
    }
    // Every required predecessor of `next` must already be present.
    for (const auto& [pair, rel] : kb.precedence_entries) {
        if (rel != Precedence::Required || pair.second != next_asp) continue;
        bool found = false;
        for (const auto* earlier : prefix)
            if (kb.cp(earlier->cp_id).asp_id == pair.first) found = true;
        if (!found) return false;
    }
    return true;
}

}  // namespace

bool is_valid_sequence(const Solution& s, const KnowledgeBase& kb) {
    for (const auto& [artifact, seq] : by_artifact(s)) {
        (void)artifact;
        std::vector<const DeployedProtection*> prefix;
        for (const auto* dsp : seq) {
            if (!extension_ok(prefix, *dsp, kb)) return false;
            prefix.push_back(dsp);
        }
    }
    return true;
}

bool has_discouraged_pair(const Solution& s, const KnowledgeBase& kb) {
    for (const auto& [artifact, seq] : by_artifact(s)) {
        (void)artifact;
        for (std::size_t i = 0; i < seq.size(); ++i)
            for (std::size_t j = i + 1; j < seq.size(); ++j)
                if (kb.asp_precedence(kb.cp(seq[i]->cp_id).asp_id, kb.cp(seq[j]->cp_id).asp_id) ==
                    Precedence::Discouraged)
                    return true;
    }
    return false;
}

namespace {

void permute_rec(std::vector<DeployedProtection>& remaining, Solution& prefix,
                 const KnowledgeBase& kb, std::vector<Solution>& out) {
    if (remaining.empty()) {
        out.push_back(prefix);
        return;
    }
    for (std::size_t i = 0; i < remaining.size(); ++i) {
        if (i > 0 && remaining[i] == remaining[i - 1]) continue;  // multiset dedup
        DeployedProtection pick = remaining[i];

        std::vector<const DeployedProtection*> artifact_prefix;
        for (const auto& d : prefix.dsps)
            if (d.artifact_id == pick.artifact_id) artifact_prefix.push_back(&d);
        if (!extension_ok(artifact_prefix, pick, kb)) continue;  // prune this prefix

        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(i));
        prefix.dsps.push_back(pick);
        permute_rec(remaining, prefix, kb, out);
        prefix.dsps.pop_back();
        remaining.insert(remaining.begin() + static_cast<std::ptrdiff_t>(i), pick);
    }
}

}  // namespace

std::vector<Solution> valid_orderings(std::vector<DeployedProtection> dsps,
                                      const KnowledgeBase& kb) {
    std::sort(dsps.begin(), dsps.end());
    std::vector<Solution> out;
    Solution prefix;
    permute_rec(dsps, prefix, kb, out);
    return out;
}

SolutionSpace::SolutionSpace(const ApplicationModel& model, const KnowledgeBase& kb,
                             const std::vector<ProtectionObjective>& pos,
                             const std::vector<CodeCorrelationSet>& ccs_list,
                             SolutionSpaceConfig cfg)
    : model_(model), kb_(kb), ccs_list_(ccs_list), cfg_(cfg), rng_(cfg.seed) {
    if (cfg_.sigma < 1) throw ConfigError("sigma must be >= 1");

    std::set<DeployedProtection> pool_set;
    std::vector<std::vector<DeployedProtection>> per_po;
    for (const auto& po : pos) {
        auto dsps = compatible_dsps(po, model_, kb_);
        pool_set.insert(dsps.begin(), dsps.end());
        per_po.push_back(std::move(dsps));
    }
    pool_.assign(pool_set.begin(), pool_set.end());

    for (const auto& dsps : per_po) {
        std::vector<std::size_t> members;
        for (const auto& d : dsps) {
            auto it = std::lower_bound(pool_.begin(), pool_.end(), d);
            members.push_back(static_cast<std::size_t>(it - pool_.begin()));
        }
        std::sort(members.begin(), members.end());
        po_members_.push_back(std::move(members));
    }

    if (cfg_.seed_solution) counts_of(*cfg_.seed_solution);  // reject bad seeds up front
    reset();
}

void SolutionSpace::reset() {
    rng_.seed(cfg_.seed);
    visited_.clear();
    pending_.clear();
    pending_pos_ = 0;
    started_ = false;
    exhausted_ = false;
}

bool SolutionSpace::caps_ok(const Counts& c) const {
    for (const auto& members : po_members_) {
        int sum = 0;
        for (auto i : members) sum += c[i];
        if (sum > cfg_.sigma) return false;
    }
    return true;
}

bool SolutionSpace::caps_ok_after_inc(const Counts& c, std::size_t i) const {
    for (const auto& members : po_members_) {
        int sum = 0;
        bool contains = false;
        for (auto m : members) {
            sum += c[m];
            if (m == i) contains = true;
        }
        if (contains && sum + 1 > cfg_.sigma) return false;
    }
    return true;
}

bool SolutionSpace::feasible(const Counts& c) const {
    Solution canonical;
    for (std::size_t i = 0; i < pool_.size(); ++i)
        for (int k = 0; k < c[i]; ++k) canonical.dsps.push_back(pool_[i]);
    if (ccs_list_.empty()) return true;
    auto parts = split_solution(canonical, ccs_list_);
    for (const auto& ccs : ccs_list_)
        if (!within_thresholds(parts.at(ccs.id), ccs, model_, kb_)) return false;
    return true;
}

std::vector<Solution> SolutionSpace::orderings_of(const Counts& c) const {
    std::vector<DeployedProtection> dsps;
    for (std::size_t i = 0; i < pool_.size(); ++i)
        for (int k = 0; k < c[i]; ++k) dsps.push_back(pool_[i]);
    auto orderings = valid_orderings(std::move(dsps), kb_);
    if (cfg_.skip_discouraged) {
        std::erase_if(orderings,
                      [&](const Solution& s) { return has_discouraged_pair(s, kb_); });
    }
    return orderings;
}

bool SolutionSpace::next_canonical(Counts& c) const {
    // Lexicographic successor over the downward-closed cap constraint.
    for (std::size_t pos = c.size(); pos-- > 0;) {
        const int old = c[pos];
        for (std::size_t k = pos + 1; k < c.size(); ++k) c[k] = 0;
        c[pos] = old + 1;
        if (c[pos] <= cfg_.sigma && caps_ok(c)) return true;
        c[pos] = 0;
    }
    return false;
}

std::uint64_t SolutionSpace::count_multisets() const {
    Counts c(pool_.size(), 0);
    std::uint64_t count = 1;
    while (next_canonical(c)) {
        if (++count > cfg_.max_space)
            throw SpaceTooLarge("more than " + std::to_string(cfg_.max_space) + " DSP multisets");
    }
    return count;
}

SolutionSpace::Counts SolutionSpace::counts_of(const Solution& s) const {
    Counts c(pool_.size(), 0);
    for (const auto& dsp : s.dsps) {
        auto it = std::lower_bound(pool_.begin(), pool_.end(), dsp);
        if (it == pool_.end() || !(*it == dsp))
            throw ConfigError("seed solution DSP " + dsp.cp_id + "(" + dsp.artifact_id +
                              ") is outside the DSP space");
        ++c[static_cast<std::size_t>(it - pool_.begin())];
    }
    if (!caps_ok(c)) throw ConfigError("seed solution exceeds sigma for some PO");
    return c;
}

std::optional<SolutionSpace::Counts> SolutionSpace::fuzz_step(const Counts& c) {
    std::vector<std::size_t> adds, removes;
    std::vector<std::pair<std::size_t, std::size_t>> replaces;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] < cfg_.sigma && caps_ok_after_inc(c, i)) adds.push_back(i);
        if (c[i] > 0) removes.push_back(i);
    }
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] == 0) continue;
        Counts tmp = c;
        --tmp[i];
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (j == i) continue;
            if (tmp[j] < cfg_.sigma && caps_ok_after_inc(tmp, j)) replaces.emplace_back(i, j);
        }
    }

    std::vector<int> kinds;
    if (!adds.empty()) kinds.push_back(0);
    if (!removes.empty()) kinds.push_back(1);
    if (!replaces.empty()) kinds.push_back(2);
    if (kinds.empty()) return std::nullopt;

    Counts out = c;
    switch (kinds[rng_() % kinds.size()]) {
        case 0: ++out[adds[rng_() % adds.size()]]; break;
        case 1: --out[removes[rng_() % removes.size()]]; break;
        default: {
            auto [i, j] = replaces[rng_() % replaces.size()];
            --out[i];
            ++out[j];
        }
    }
    return out;
}

std::optional<Solution> SolutionSpace::next() {
    if (exhausted_) return std::nullopt;

    auto enter = [&](const Counts& c) {
        visited_.insert(c);
        if (visited_.size() > cfg_.max_space)
            throw SpaceTooLarge("visited more than " + std::to_string(cfg_.max_space) +
                                " DSP multisets");
        pending_ = feasible(c) ? orderings_of(c) : std::vector<Solution>{};
        pending_pos_ = 0;
        current_ = c;
    };

    if (!started_) {
        started_ = true;
        Counts start(pool_.size(), 0);
        if (cfg_.seed_solution) start = counts_of(*cfg_.seed_solution);
        enter(start);
    }

    while (true) {
        if (pending_pos_ < pending_.size()) return pending_[pending_pos_++];

        // Advance to an unvisited multiset: a few fuzz attempts, then a
        // canonical scan as fallback.
        std::optional<Counts> next_counts;
        for (int attempt = 0; attempt < 64 && !next_counts; ++attempt) {
            auto mutated = fuzz_step(current_);
            if (mutated && !visited_.count(*mutated)) next_counts = std::move(mutated);
        }
        if (!next_counts) {
            Counts scan(pool_.size(), 0);
            do {
                if (!visited_.count(scan)) {
                    next_counts = scan;
                    break;
                }
            } while (next_canonical(scan));
        }
        if (!next_counts) {
            exhausted_ = true;
            return std::nullopt;
        }
        enter(*next_counts);
    }
}

std::vector<Solution> SolutionSpace::enumerate_all() {
    count_multisets();  // throws SpaceTooLarge on oversized spaces

    std::vector<Solution> out;
    Counts c(pool_.size(), 0);
    do {
        if (!feasible(c)) continue;
        auto orderings = orderings_of(c);
        if (out.size() + orderings.size() > cfg_.max_space)
            throw SpaceTooLarge("more than " + std::to_string(cfg_.max_space) + " solutions");
        out.insert(out.end(), orderings.begin(), orderings.end());
    } while (next_canonical(c));
    return out;
}

}  // namespace spmiti
