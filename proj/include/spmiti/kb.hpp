#ifndef SPMITI_KB_HPP
#define SPMITI_KB_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "spmiti/errors.hpp"

namespace spmiti {

enum class ArtifactKind { Code, Datum };

std::string to_string(ArtifactKind kind);
ArtifactKind artifact_kind_from_string(const std::string& s);

// Security requirements are open-ended string tags; these two are the ones
// the stock knowledge base uses.
using Requirement = std::string;
namespace req {
inline const Requirement confidentiality = "confidentiality";
inline const Requirement integrity = "integrity";
}  // namespace req

struct MetricDelta {
    double multiplier = 1.0;
    double offset = 0.0;
};

struct OverheadCoeff {
    double base_pct = 0.0;
    double per_instruction_pct = 0.0;
};

struct AbstractProtection {
    std::string id;
    std::string name;
    std::set<ArtifactKind> applicable_kinds;
    std::set<Requirement> enforced_requirements;
};

struct ConcreteProtection {
    std::string id;
    std::string asp_id;
    std::string config_label;
    bool online = false;                                  // contributes server/network overheads
    std::map<std::string, MetricDelta> metric_deltas;     // metric name -> (multiplier, offset)
    std::map<std::string, OverheadCoeff> overhead_coeffs; // overhead type -> coefficients
    std::map<std::string, double> mitigation;             // attack step id -> zeta in [0,1]
};

enum class Precedence { Allowed, Required, Forbidden, Encouraged, Discouraged };

std::string to_string(Precedence rel);
Precedence precedence_from_string(const std::string& s);

struct AttackStepInfo {
    std::string id;
    std::map<ArtifactKind, double> base_prob;  // pi_base in (0,1] per artifact kind
};

struct MeasureParams {
    double tau = 1.0;
    double rho = 1000.0;
    double epsilon = 0.05;
};

// The four security measures.
inline const std::vector<std::string> kMeasures = {"CC", "CT", "TD", "TA"};

struct IndexConfig {
    std::map<std::string, MeasureParams> measures;  // keyed CC/CT/TD/TA
    double expertise = 1.0;                         // global multiplier on pi_base, clamped to (0,1]

    const MeasureParams& params(const std::string& measure) const;
};

class KnowledgeBase {
public:
    std::vector<AbstractProtection> asps;  // sorted by id
    std::vector<ConcreteProtection> cps;   // sorted by id
    std::vector<AttackStepInfo> attack_steps;
    IndexConfig measure_config;

    // Precedence entries at ASP granularity; unlisted ordered pairs default to Allowed.
    std::map<std::pair<std::string, std::string>, Precedence> precedence_entries;
    // (attack step id, cp before, cp after) -> omega. Missing key means 1.
    std::map<std::tuple<std::string, std::string, std::string>, double> synergy_entries;

    const AbstractProtection* find_asp(const std::string& id) const;
    const ConcreteProtection* find_cp(const std::string& id) const;
    const AttackStepInfo* find_step(const std::string& id) const;

    const AbstractProtection& asp_of(const ConcreteProtection& cp) const;
    const ConcreteProtection& cp(const std::string& id) const;

    bool enforces(const AbstractProtection& asp, const Requirement& r) const;
    bool compatible(const AbstractProtection& asp, ArtifactKind kind) const;

    Precedence asp_precedence(const std::string& before, const std::string& after) const;
    Precedence precedence(const ConcreteProtection& p1, const ConcreteProtection& p2) const;

    double synergy(const std::string& step_id, const std::string& cp_before,
                   const std::string& cp_after) const;
    double zeta(const std::string& cp_id, const std::string& step_id) const;
    double base_prob(const std::string& step_id, ArtifactKind kind) const;  // throws UnknownStep

    void validate() const;  // throws ValidationError naming the first violated invariant
};

KnowledgeBase kb_from_json(const nlohmann::json& j);
KnowledgeBase load_kb(const std::filesystem::path& path);

}  // namespace spmiti

#endif
