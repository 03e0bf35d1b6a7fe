#include "spmiti/overhead.hpp"

#include <algorithm>

namespace spmiti {

double overhead(const std::string& type, const Solution& s,
                const std::set<std::string>& artifact_ids, const ApplicationModel& model,
                const KnowledgeBase& kb) {
    if (std::find(kOverheadTypes.begin(), kOverheadTypes.end(), type) == kOverheadTypes.end())
        throw UnknownOverheadType(type);

    const bool online_only = overhead_type_is_online(type);
    double extra_pct = 0;
    for (const auto& dsp : s.dsps) {
        if (!artifact_ids.count(dsp.artifact_id)) continue;
        const auto& cp = kb.cp(dsp.cp_id);
        if (online_only && !cp.online) continue;
        auto it = cp.overhead_coeffs.find(type);
        if (it == cp.overhead_coeffs.end()) continue;
        const double vanilla_ins = model.artifact(dsp.artifact_id).vanilla_metrics.instructions;
        extra_pct += it->second.base_pct + it->second.per_instruction_pct * vanilla_ins;
    }
    return 1.0 + extra_pct / 100.0;
}

bool within_thresholds(const Solution& s, const CodeCorrelationSet& ccs,
                       const ApplicationModel& model, const KnowledgeBase& kb) {
    for (const auto& type : kOverheadTypes) {
        auto it = ccs.thresholds.find(type);
        const double theta = it == ccs.thresholds.end()
                                 ? model.threshold(type, ccs.id)
                                 : it->second;
        if (overhead(type, s, ccs.closure, model, kb) > theta) return false;
    }
    return true;
}

}  // namespace spmiti
