#ifndef SPMITI_INDEX_HPP
#define SPMITI_INDEX_HPP

#include <string>
#include <vector>

#include "spmiti/kb.hpp"
#include "spmiti/model.hpp"
#include "spmiti/solution.hpp"

namespace spmiti {

// The unit scored by the SP index: a solution and an ordered sequence of
// concrete attack paths. (vanilla, no attacks) is representable for any model.
struct State {
    Solution solution;
    std::vector<ConcreteAttackPath> paths;
};

// CC/CT relate to confidentiality, TD/TA to integrity.
const Requirement& measure_requirement(const std::string& measure);

// Probability of succeeding at an attack step with n unit efforts:
// 1 - (1 - pi)^n with pi = clamp(pi_base * expertise, (0, 1]).
double step_success_prob(const std::string& step_id, const Artifact& artifact, int n,
                         const KnowledgeBase& kb);

// Product of zeta over DSPs on the artifact times omega over ordered DSP pairs
// on the artifact, for one attack step. Empty products are 1.
double mitigation(const Artifact& artifact, const Solution& s, const std::string& step_id,
                  const KnowledgeBase& kb);

// Success probability of a concrete attack path against the protected application.
double likelihood(const Solution& s, const ConcreteAttackPath& cpath,
                  const ApplicationModel& model, const KnowledgeBase& kb);

// The four security measures at (S, no attacks).
double raw_measure(const std::string& measure, const Artifact& asset, const Solution& s,
                   const KnowledgeBase& kb);

// raw_measure attenuated by prod (1 - likelihood) over the state's paths that
// target this asset with the measure's requirement.
double adjusted_measure(const std::string& measure, const Artifact& asset, const State& t,
                        const ApplicationModel& model, const KnowledgeBase& kb);

// tau * M' - rho * H(epsilon - M'), with H(0) = 0 so hitting the floor exactly
// is not penalized.
double measure(const std::string& measure_name, const Artifact& asset, const State& t,
               const ApplicationModel& model, const KnowledgeBase& kb);

struct SpIndex {
    double value = 0;  // 0 = unprotected baseline, > 0 mitigating, < 0 breached
};

// Weighted sum over protection objectives of their requirement-relevant
// measures. The vanilla state scores exactly 0.
SpIndex sp_index(const State& t, const ApplicationModel& model, const KnowledgeBase& kb);

}  // namespace spmiti

#endif
