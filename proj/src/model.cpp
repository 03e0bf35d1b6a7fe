#include "spmiti/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "spmiti/errors.hpp"

namespace spmiti {

using nlohmann::json;

bool overhead_type_is_online(const std::string& type) {
    return type == "server_time" || type == "server_mem" || type == "network";
}

double MetricVector::get(const std::string& name) const {
    if (name == "halstead") return halstead;
    if (name == "cyclomatic") return cyclomatic;
    if (name == "instructions") return instructions;
    if (name == "remote_instructions") return remote_instructions;
    if (name == "local_instructions") return local_instructions;
    if (name == "guarded_instructions") return guarded_instructions;
    throw UnknownMetric(name);
}

void MetricVector::set(const std::string& name, double v) {
    if (name == "halstead") halstead = v;
    else if (name == "cyclomatic") cyclomatic = v;
    else if (name == "instructions") instructions = v;
    else if (name == "remote_instructions") remote_instructions = v;
    else if (name == "local_instructions") local_instructions = v;
    else if (name == "guarded_instructions") guarded_instructions = v;
    else throw UnknownMetric(name);
}

ConcreteAttackPath ConcreteAttackPath::unit(const AttackPath& path) {
    ConcreteAttackPath c;
    c.path_id = path.id;
    for (int i = 0; i < static_cast<int>(path.steps.size()); ++i) c.efforts.emplace_back(i, 1);
    return c;
}

const Artifact* ApplicationModel::find_artifact(const std::string& id) const {
    auto it = std::lower_bound(artifacts.begin(), artifacts.end(), id,
                               [](const Artifact& a, const std::string& v) { return a.id < v; });
    if (it != artifacts.end() && it->id == id) return &*it;
    return nullptr;
}

const Artifact& ApplicationModel::artifact(const std::string& id) const {
    const auto* a = find_artifact(id);
    if (!a) throw ValidationError("unknown artifact '" + id + "'");
    return *a;
}

const AttackPath* ApplicationModel::find_path(const std::string& id) const {
    for (const auto& p : attack_paths)
        if (p.id == id) return &p;
    return nullptr;
}

bool ApplicationModel::is_asset(const std::string& id) const {
    return std::binary_search(asset_ids.begin(), asset_ids.end(), id);
}

double ApplicationModel::threshold(const std::string& type, const std::string& scope) const {
    auto ti = overhead_thresholds.find(type);
    if (ti != overhead_thresholds.end()) {
        auto si = ti->second.find(scope);
        if (si != ti->second.end()) return si->second;
        si = ti->second.find("global");
        if (si != ti->second.end()) return si->second;
    }
    return std::numeric_limits<double>::infinity();
}

bool joint(const Artifact& a1, const Artifact& a2) {
    if (a1.id == a2.id) return true;
    if (a1.file == a2.file && !a1.file.empty() &&
        a1.line_start <= a2.line_end && a2.line_start <= a1.line_end)
        return true;
    // Declared dependence closure (either direction keeps the relation commutative).
    return a1.depends_on.count(a2.id) > 0 || a2.depends_on.count(a1.id) > 0;
}

void ApplicationModel::validate() {
    std::sort(artifacts.begin(), artifacts.end(),
              [](const Artifact& a, const Artifact& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < artifacts.size(); ++i)
        if (artifacts[i - 1].id == artifacts[i].id)
            throw ValidationError("duplicate artifact id '" + artifacts[i].id + "'");

    for (const auto& a : artifacts) {
        if (a.line_start > a.line_end)
            throw ValidationError("artifact '" + a.id + "' has start > end");
        for (const auto& dep : a.depends_on)
            if (!find_artifact(dep))
                throw ValidationError("artifact '" + a.id + "' depends on unknown artifact '" + dep + "'");
        const auto& m = a.vanilla_metrics;
        if (m.halstead < 0 || m.instructions < 0)
            throw ValidationError("artifact '" + a.id + "' has negative vanilla metrics");
        if (a.kind == ArtifactKind::Code && m.cyclomatic < 1)
            throw ValidationError("artifact '" + a.id + "' code artifact needs cyclomatic >= 1");
        if (a.kind == ArtifactKind::Datum && m.cyclomatic != 0)
            throw ValidationError("artifact '" + a.id + "' datum artifact needs cyclomatic == 0");
        if (m.remote_instructions != 0 || m.local_instructions != 0 || m.guarded_instructions != 0)
            throw ValidationError("artifact '" + a.id +
                                  "' vanilla remote/local/guarded instruction counts must be 0");
    }

    // Code ranges in the same file must nest or be disjoint.
    for (std::size_t i = 0; i < artifacts.size(); ++i) {
        for (std::size_t k = i + 1; k < artifacts.size(); ++k) {
            const auto& a = artifacts[i];
            const auto& b = artifacts[k];
            if (a.kind != ArtifactKind::Code || b.kind != ArtifactKind::Code) continue;
            if (a.file != b.file || a.file.empty()) continue;
            const bool disjoint = a.line_end < b.line_start || b.line_end < a.line_start;
            const bool a_in_b = b.line_start <= a.line_start && a.line_end <= b.line_end;
            const bool b_in_a = a.line_start <= b.line_start && b.line_end <= a.line_end;
            if (!disjoint && !a_in_b && !b_in_a)
                throw ValidationError("ranges must nest or be disjoint: '" + a.id + "' vs '" + b.id + "'");
        }
    }

    std::set<std::string> assets;
    for (const auto& po : pos) {
        if (po.weight < 0)
            throw ValidationError("protection objective on '" + po.artifact_id + "' has negative weight");
        if (!find_artifact(po.artifact_id))
            throw ValidationError("protection objective references unknown artifact '" + po.artifact_id + "'");
        assets.insert(po.artifact_id);
    }
    asset_ids.assign(assets.begin(), assets.end());

    for (const auto& p : attack_paths) {
        if (p.steps.empty())
            throw ValidationError("attack path '" + p.id + "' has no steps");
        if (!find_artifact(p.target_asset))
            throw ValidationError("attack path '" + p.id + "' targets unknown artifact '" +
                                  p.target_asset + "'");
        for (const auto& s : p.steps)
            if (!find_artifact(s.artifact_id))
                throw ValidationError("attack path '" + p.id + "' step on unknown artifact '" +
                                      s.artifact_id + "'");
    }

    for (const auto& po : pos) {
        bool attacked = false;
        for (const auto& p : attack_paths)
            if (p.target_asset == po.artifact_id) attacked = true;
        if (!attacked)
            warnings.push_back("asset '" + po.artifact_id + "' appears in no attack path (unattacked)");
    }

    for (const auto& [type, scopes] : overhead_thresholds) {
        if (std::find(kOverheadTypes.begin(), kOverheadTypes.end(), type) == kOverheadTypes.end())
            throw ValidationError("unknown overhead type '" + type + "' in thresholds");
        for (const auto& [scope, theta] : scopes) {
            (void)scope;
            if (theta < 1.0)
                throw ValidationError("overhead threshold < 1 is not expressible (type '" + type + "')");
        }
    }
}

ApplicationModel model_from_json(const json& j) {
    ApplicationModel m;
    try {
        if (!j.contains("model_version") || j.at("model_version").get<int>() != 1)
            throw ParseError("missing or unsupported model_version (expected 1)");

        for (const auto& ja : j.value("artifacts", json::array())) {
            Artifact a;
            a.id = ja.at("id").get<std::string>();
            a.kind = artifact_kind_from_string(ja.at("kind").get<std::string>());
            a.file = ja.value("file", std::string());
            if (ja.contains("line_range")) {
                a.line_start = ja.at("line_range").at(0).get<int>();
                a.line_end = ja.at("line_range").at(1).get<int>();
            }
            for (const auto& d : ja.value("depends_on", json::array()))
                a.depends_on.insert(d.get<std::string>());
            const json jm = ja.value("vanilla_metrics", json::object());
            for (const auto& name : kMetricNames)
                if (jm.contains(name)) a.vanilla_metrics.set(name, jm.at(name).get<double>());
            m.artifacts.push_back(std::move(a));
        }

        for (const auto& jp : j.value("protection_objectives", json::array())) {
            ProtectionObjective po;
            po.requirement = jp.at("requirement").get<std::string>();
            po.artifact_id = jp.at("artifact").get<std::string>();
            po.weight = jp.value("weight", 1.0);
            m.pos.push_back(std::move(po));
        }

        for (const auto& jp : j.value("attack_paths", json::array())) {
            AttackPath p;
            p.id = jp.at("id").get<std::string>();
            p.target_asset = jp.at("target").get<std::string>();
            p.requirement = jp.at("requirement").get<std::string>();
            for (const auto& js : jp.at("steps"))
                p.steps.push_back({js.at("step").get<std::string>(), js.at("artifact").get<std::string>()});
            m.attack_paths.push_back(std::move(p));
        }

        const json thresholds = j.value("overhead_thresholds", json::object());
        for (const auto& [type, scopes] : thresholds.items())
            for (const auto& [scope, theta] : scopes.items())
                m.overhead_thresholds[type][scope] = theta.get<double>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("model: ") + e.what());
    }

    m.validate();
    return m;
}

ApplicationModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model: ") + e.what());
    }
    return model_from_json(j);
}

void cross_validate(const ApplicationModel& model, const KnowledgeBase& kb) {
    for (const auto& p : model.attack_paths)
        for (const auto& s : p.steps)
            if (!kb.find_step(s.step_id))
                throw ValidationError("attack path '" + p.id + "' uses unknown attack step '" +
                                      s.step_id + "'");
}

}  // namespace spmiti
