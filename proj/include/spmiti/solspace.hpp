#ifndef SPMITI_SOLSPACE_HPP
#define SPMITI_SOLSPACE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "spmiti/kb.hpp"
#include "spmiti/model.hpp"
#include "spmiti/prep.hpp"
#include "spmiti/solution.hpp"

namespace spmiti {

// Per-artifact check: no Forbidden ordered pair, and every Required
// predecessor appears earlier in the same artifact's subsequence.
bool is_valid_sequence(const Solution& s, const KnowledgeBase& kb);

// True iff some per-artifact ordered pair is Discouraged.
bool has_discouraged_pair(const Solution& s, const KnowledgeBase& kb);

// Lexicographic stream of the distinct permutations of a DSP multiset that
// pass is_valid_sequence, generated with prefix pruning.
std::vector<Solution> valid_orderings(std::vector<DeployedProtection> dsps,
                                      const KnowledgeBase& kb);

struct SolutionSpaceConfig {
    int sigma = 3;                 // max DSPs per protection objective
    std::uint64_t seed = 0;        // fuzz PRNG seed (mt19937_64)
    bool skip_discouraged = false; // drop orderings containing a Discouraged pair
    bool exhaustive = false;       // canonical enumeration instead of the fuzz walk
    std::optional<Solution> seed_solution;  // starting point; vanilla when absent
    std::uint64_t max_space = 1'000'000;    // guard on multiset / solution counts
};

// Streams every valid, threshold-feasible solution of a (sub-)instance exactly
// once. The space is structured as DSP multisets over the union of the
// per-PO compatible pools (per-PO count capped at sigma); each multiset yields
// its valid orderings. next() visits multisets in a seeded fuzz-walk order
// with a canonical fallback, so coverage is exhaustive and duplicate-free;
// enumerate_all() uses canonical order throughout.
class SolutionSpace {
public:
    SolutionSpace(const ApplicationModel& model, const KnowledgeBase& kb,
                  const std::vector<ProtectionObjective>& pos,
                  const std::vector<CodeCorrelationSet>& ccs_list,
                  SolutionSpaceConfig cfg);

    void reset();
    std::optional<Solution> next();

    std::vector<Solution> enumerate_all();

    const std::vector<DeployedProtection>& pool() const { return pool_; }

private:
    using Counts = std::vector<int>;

    bool caps_ok(const Counts& c) const;
    bool caps_ok_after_inc(const Counts& c, std::size_t i) const;
    bool feasible(const Counts& c) const;  // per-CCS overhead thresholds
    std::vector<Solution> orderings_of(const Counts& c) const;
    bool next_canonical(Counts& c) const;  // lex successor under caps; false at end
    std::uint64_t count_multisets() const;
    std::optional<Counts> fuzz_step(const Counts& c);
    Counts counts_of(const Solution& s) const;

    const ApplicationModel& model_;
    const KnowledgeBase& kb_;
    std::vector<CodeCorrelationSet> ccs_list_;
    SolutionSpaceConfig cfg_;

    std::vector<DeployedProtection> pool_;       // sorted, deduped
    std::vector<std::vector<std::size_t>> po_members_;  // per PO: pool indices

    // iteration state
    Counts current_;
    std::vector<Solution> pending_;  // orderings of current_ not yet yielded
    std::size_t pending_pos_ = 0;
    std::set<Counts> visited_;
    std::mt19937_64 rng_;
    bool started_ = false;
    bool exhausted_ = false;
};

}  // namespace spmiti

#endif
