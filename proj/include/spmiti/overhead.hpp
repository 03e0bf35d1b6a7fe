#ifndef SPMITI_OVERHEAD_HPP
#define SPMITI_OVERHEAD_HPP

#include <set>
#include <string>

#include "spmiti/kb.hpp"
#include "spmiti/model.hpp"
#include "spmiti/prep.hpp"
#include "spmiti/solution.hpp"

namespace spmiti {

// Linear additive upper-bound model:
//   1 + sum over DSPs on artifacts in `arts` of (base% + per_instruction% * vanilla instructions) / 100.
// Online-only types (server_*/network) take contributions only from CPs flagged online.
double overhead(const std::string& type, const Solution& s,
                const std::set<std::string>& artifact_ids, const ApplicationModel& model,
                const KnowledgeBase& kb);

// True iff every overhead type of the partial solution stays within the CCS thresholds.
bool within_thresholds(const Solution& s, const CodeCorrelationSet& ccs,
                       const ApplicationModel& model, const KnowledgeBase& kb);

}  // namespace spmiti

#endif
