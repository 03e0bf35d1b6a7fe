#include "spmiti/index.hpp"

#include <algorithm>
#include <cmath>

#include "spmiti/metrics.hpp"

namespace spmiti {

namespace {

double heaviside(double x) { return x > 0 ? 1.0 : 0.0; }  // H(0) = 0

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

const Requirement& measure_requirement(const std::string& measure) {
    if (measure == "CC" || measure == "CT") return req::confidentiality;
    if (measure == "TD" || measure == "TA") return req::integrity;
    throw UnknownMetric("measure " + measure);
}

double step_success_prob(const std::string& step_id, const Artifact& artifact, int n,
                         const KnowledgeBase& kb) {
    const double expertise = kb.measure_config.expertise;
    double pi = kb.base_prob(step_id, artifact.kind) * expertise;
    pi = std::min(1.0, std::max(0.0, pi));
    // 1 - (1 - pi)^n: strictly increasing in n, asymptotic to 1.
    return 1.0 - std::pow(1.0 - pi, n);
}

double mitigation(const Artifact& artifact, const Solution& s, const std::string& step_id,
                  const KnowledgeBase& kb) {
    std::vector<const DeployedProtection*> on_artifact;
    for (const auto& dsp : s.dsps)
        if (dsp.artifact_id == artifact.id) on_artifact.push_back(&dsp);

    double mu = 1.0;
    for (const auto* dsp : on_artifact) mu *= kb.zeta(dsp->cp_id, step_id);
    for (std::size_t i = 0; i < on_artifact.size(); ++i)
        for (std::size_t j = i + 1; j < on_artifact.size(); ++j)
            mu *= kb.synergy(step_id, on_artifact[i]->cp_id, on_artifact[j]->cp_id);
    return mu;
}

double likelihood(const Solution& s, const ConcreteAttackPath& cpath,
                  const ApplicationModel& model, const KnowledgeBase& kb) {
    const AttackPath* path = model.find_path(cpath.path_id);
    if (!path) throw ValidationError("concrete path references unknown attack path '" + cpath.path_id + "'");

    double lambda = 1.0;
    for (const auto& [step_index, n] : cpath.efforts) {
        const auto& step = path->steps.at(static_cast<std::size_t>(step_index));
        const Artifact& a = model.artifact(step.artifact_id);
        const double mu = mitigation(a, s, step.step_id, kb);
        const double pi = step_success_prob(step.step_id, a, n, kb);
        lambda *= clamp01(mu * pi);  // omega > 1 can push a factor above 1
    }
    return lambda;
}

double raw_measure(const std::string& m, const Artifact& asset, const Solution& s,
                   const KnowledgeBase& kb) {
    if (m == "CC") {
        const double pot = potency("halstead", asset, s, kb) + potency("cyclomatic", asset, s, kb);
        return std::max(pot, 0.0);  // H'(x) = H(x) * x
    }
    if (m == "CT") {
        const double vanilla_ins = asset.vanilla_metrics.instructions;
        if (vanilla_ins == 0) return 0;
        return predict_metric("remote_instructions", s, asset, kb) / vanilla_ins;
    }
    if (m == "TD" || m == "TA") {
        const double ins = predict_metric("instructions", s, asset, kb);
        if (ins == 0) return 0;
        const std::string count = m == "TD" ? "guarded_instructions" : "local_instructions";
        return predict_metric(count, s, asset, kb) / ins;
    }
    throw UnknownMetric("measure " + m);
}

double adjusted_measure(const std::string& m, const Artifact& asset, const State& t,
                        const ApplicationModel& model, const KnowledgeBase& kb) {
    const Requirement& r = measure_requirement(m);
    std::vector<double> factors;
    for (const auto& cpath : t.paths) {
        const AttackPath* path = model.find_path(cpath.path_id);
        if (!path) throw ValidationError("unknown attack path '" + cpath.path_id + "'");
        if (path->target_asset != asset.id || path->requirement != r) continue;
        factors.push_back(1.0 - likelihood(t.solution, cpath, model, kb));
    }
    // Canonical combination order, so the result is invariant under any
    // permutation of the path sequence.
    std::sort(factors.begin(), factors.end());
    double attenuation = 1.0;
    for (double f : factors) attenuation *= f;
    return attenuation * raw_measure(m, asset, t.solution, kb);
}

double measure(const std::string& m, const Artifact& asset, const State& t,
               const ApplicationModel& model, const KnowledgeBase& kb) {
    const auto& p = kb.measure_config.params(m);
    const double adjusted = adjusted_measure(m, asset, t, model, kb);
    return p.tau * adjusted - p.rho * heaviside(p.epsilon - adjusted);
}

SpIndex sp_index(const State& t, const ApplicationModel& model, const KnowledgeBase& kb) {
    // The vanilla state is the zero of the scale by definition.
    if (t.solution.vanilla() && t.paths.empty()) return {0.0};

    double total = 0;
    for (const auto& po : model.pos) {
        const Artifact& asset = model.artifact(po.artifact_id);
        double per_asset = 0;
        for (const auto& m : kMeasures) {
            if (measure_requirement(m) != po.requirement) continue;
            per_asset += measure(m, asset, t, model, kb);
        }
        total += po.weight * per_asset;
    }
    return {total};
}

}  // namespace spmiti
