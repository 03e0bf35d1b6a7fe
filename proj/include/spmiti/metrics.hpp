#ifndef SPMITI_METRICS_HPP
#define SPMITI_METRICS_HPP

#include <string>

#include "spmiti/kb.hpp"
#include "spmiti/model.hpp"
#include "spmiti/solution.hpp"

namespace spmiti {

// Predicted metric value after deploying the solution's DSPs on the artifact,
// folding (multiplier, offset) deltas in solution order and clamping at 0.
// remote/local/guarded counts are additionally capped at the predicted
// instruction count after every fold step.
double predict_metric(const std::string& metric, const Solution& s, const Artifact& a,
                      const KnowledgeBase& kb);

// Collberg-style potency: predicted / vanilla - 1. A zero vanilla value yields 0.
double potency(const std::string& metric, const Artifact& a, const Solution& s,
               const KnowledgeBase& kb);

}  // namespace spmiti

#endif
