#ifndef SPMITI_PREP_HPP
#define SPMITI_PREP_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "spmiti/kb.hpp"
#include "spmiti/model.hpp"
#include "spmiti/solution.hpp"

namespace spmiti {

struct CodeCorrelationSet {
    std::string id;                       // smallest asset id in the set
    std::set<std::string> assets;
    std::set<std::string> closure;        // assets plus every artifact reachable via art()
    std::map<std::string, double> thresholds;  // overhead type -> theta
};

// Operation counters backing the complexity checks.
struct PrepStats {
    std::uint64_t cp_scans = 0;    // CP iterations inside compatible_dsps
    std::uint64_t pair_tests = 0;  // asset pair jointness tests inside compute_ccs
};

std::vector<DeployedProtection> compatible_dsps(const ProtectionObjective& po,
                                                const ApplicationModel& model,
                                                const KnowledgeBase& kb,
                                                PrepStats* stats = nullptr);

// Artifacts touched by any attack step of any path targeting the asset.
std::set<std::string> art(const std::string& asset_id, const ApplicationModel& model);

std::vector<CodeCorrelationSet> compute_ccs(const ApplicationModel& model,
                                            const KnowledgeBase& kb,
                                            PrepStats* stats = nullptr);

// Order-preserving partition of a solution's DSP list by CCS closure membership.
std::map<std::string, Solution> split_solution(const Solution& s,
                                               const std::vector<CodeCorrelationSet>& ccs_list);

}  // namespace spmiti

#endif
