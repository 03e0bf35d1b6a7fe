#include "spmiti/metrics.hpp"

#include <algorithm>

#include "spmiti/errors.hpp"

namespace spmiti {

namespace {

bool is_instruction_subcount(const std::string& metric) {
    return metric == "remote_instructions" || metric == "local_instructions" ||
           metric == "guarded_instructions";
}

double fold_step(double value, const ConcreteProtection& cp, const std::string& metric) {
    auto it = cp.metric_deltas.find(metric);
    if (it == cp.metric_deltas.end()) return value;  // identity delta
    return std::max(0.0, value * it->second.multiplier + it->second.offset);
}

}  // namespace

double predict_metric(const std::string& metric, const Solution& s, const Artifact& a,
                      const KnowledgeBase& kb) {
    if (std::find(kMetricNames.begin(), kMetricNames.end(), metric) == kMetricNames.end())
        throw UnknownMetric(metric);

    double value = a.vanilla_metrics.get(metric);
    const bool capped = is_instruction_subcount(metric);
    double instructions = a.vanilla_metrics.instructions;

    for (const auto& dsp : s.dsps) {
        if (dsp.artifact_id != a.id) continue;
        const auto& cp = kb.cp(dsp.cp_id);
        value = fold_step(value, cp, metric);
        if (capped) {
            instructions = fold_step(instructions, cp, "instructions");
            value = std::min(value, instructions);
        }
    }
    return value;
}

double potency(const std::string& metric, const Artifact& a, const Solution& s,
               const KnowledgeBase& kb) {
    const double vanilla = a.vanilla_metrics.get(metric);
    if (vanilla == 0) return 0;  // degenerate vanilla metric (e.g. datum cyclomatic)
    return predict_metric(metric, s, a, kb) / vanilla - 1.0;
}

}  // namespace spmiti
