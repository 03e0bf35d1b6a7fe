#ifndef SPMITI_MODEL_HPP
#define SPMITI_MODEL_HPP

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "spmiti/kb.hpp"

namespace spmiti {

inline const std::vector<std::string> kMetricNames = {
    "halstead",     "cyclomatic",         "instructions",
    "remote_instructions", "local_instructions", "guarded_instructions"};

inline const std::vector<std::string> kOverheadTypes = {
    "client_time", "client_mem", "server_time", "server_mem", "network"};

// server_time/server_mem/network only matter for online protections.
bool overhead_type_is_online(const std::string& type);

struct MetricVector {
    double halstead = 0;
    double cyclomatic = 0;
    double instructions = 0;
    double remote_instructions = 0;
    double local_instructions = 0;
    double guarded_instructions = 0;

    double get(const std::string& name) const;  // throws UnknownMetric
    void set(const std::string& name, double v);
};

struct Artifact {
    std::string id;
    ArtifactKind kind = ArtifactKind::Code;
    std::string file;
    int line_start = 0;
    int line_end = 0;  // inclusive
    std::set<std::string> depends_on;  // dataflow/alias dependence closure, input-provided
    MetricVector vanilla_metrics;
};

struct ProtectionObjective {
    Requirement requirement;
    std::string artifact_id;
    double weight = 1.0;
};

struct AttackStepRef {
    std::string step_id;
    std::string artifact_id;
};

struct AttackPath {
    std::string id;
    std::string target_asset;
    Requirement requirement;
    std::vector<AttackStepRef> steps;
};

// Unit-effort investments per step of an attack path. efforts[i] = (step index, n).
struct ConcreteAttackPath {
    std::string path_id;
    std::vector<std::pair<int, int>> efforts;

    // One unit of effort on every step, in order.
    static ConcreteAttackPath unit(const AttackPath& path);
};

class ApplicationModel {
public:
    std::vector<Artifact> artifacts;  // sorted by id
    std::vector<ProtectionObjective> pos;
    std::vector<AttackPath> attack_paths;
    // overhead type -> scope ("global" or ccs id) -> theta (>= 1).
    std::map<std::string, std::map<std::string, double>> overhead_thresholds;

    std::vector<std::string> asset_ids;  // derived: artifacts in >= 1 PO, sorted
    std::vector<std::string> warnings;   // non-fatal findings from load

    const Artifact* find_artifact(const std::string& id) const;
    const Artifact& artifact(const std::string& id) const;
    const AttackPath* find_path(const std::string& id) const;
    bool is_asset(const std::string& id) const;

    // Threshold for an overhead type in a scope, falling back to "global", then infinity.
    double threshold(const std::string& type, const std::string& scope) const;

    void validate();  // fills asset_ids/warnings, throws ValidationError
};

// Same file with intersecting line ranges, or a declared dependence between the two.
bool joint(const Artifact& a1, const Artifact& a2);

ApplicationModel model_from_json(const nlohmann::json& j);
ApplicationModel load_model(const std::filesystem::path& path);

// Referential checks that need the KB (attack step ids, CP mitigation keys).
void cross_validate(const ApplicationModel& model, const KnowledgeBase& kb);

}  // namespace spmiti

#endif
