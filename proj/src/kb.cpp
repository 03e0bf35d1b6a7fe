#include "spmiti/kb.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace spmiti {

using nlohmann::json;

std::string to_string(ArtifactKind kind) {
    return kind == ArtifactKind::Code ? "code" : "datum";
}

ArtifactKind artifact_kind_from_string(const std::string& s) {
    if (s == "code") return ArtifactKind::Code;
    if (s == "datum") return ArtifactKind::Datum;
    throw ParseError("unknown artifact kind '" + s + "'");
}

std::string to_string(Precedence rel) {
    switch (rel) {
        case Precedence::Allowed: return "allowed";
        case Precedence::Required: return "required";
        case Precedence::Forbidden: return "forbidden";
        case Precedence::Encouraged: return "encouraged";
        case Precedence::Discouraged: return "discouraged";
    }
    return "allowed";
}

Precedence precedence_from_string(const std::string& s) {
    if (s == "allowed") return Precedence::Allowed;
    if (s == "required") return Precedence::Required;
    if (s == "forbidden") return Precedence::Forbidden;
    if (s == "encouraged") return Precedence::Encouraged;
    if (s == "discouraged") return Precedence::Discouraged;
    throw ParseError("unknown precedence relation '" + s + "'");
}

const MeasureParams& IndexConfig::params(const std::string& measure) const {
    auto it = measures.find(measure);
    if (it != measures.end()) return it->second;
    static const MeasureParams defaults;
    return defaults;
}

const AbstractProtection* KnowledgeBase::find_asp(const std::string& id) const {
    auto it = std::lower_bound(asps.begin(), asps.end(), id,
                               [](const AbstractProtection& a, const std::string& v) { return a.id < v; });
    if (it != asps.end() && it->id == id) return &*it;
    return nullptr;
}

const ConcreteProtection* KnowledgeBase::find_cp(const std::string& id) const {
    auto it = std::lower_bound(cps.begin(), cps.end(), id,
                               [](const ConcreteProtection& c, const std::string& v) { return c.id < v; });
    if (it != cps.end() && it->id == id) return &*it;
    return nullptr;
}

const AttackStepInfo* KnowledgeBase::find_step(const std::string& id) const {
    for (const auto& s : attack_steps)
        if (s.id == id) return &s;
    return nullptr;
}

const AbstractProtection& KnowledgeBase::asp_of(const ConcreteProtection& cp) const {
    const auto* asp = find_asp(cp.asp_id);
    if (!asp) throw ValidationError("CP '" + cp.id + "' references unknown ASP '" + cp.asp_id + "'");
    return *asp;
}

const ConcreteProtection& KnowledgeBase::cp(const std::string& id) const {
    const auto* p = find_cp(id);
    if (!p) throw ValidationError("unknown CP '" + id + "'");
    return *p;
}

bool KnowledgeBase::enforces(const AbstractProtection& asp, const Requirement& r) const {
    return asp.enforced_requirements.count(r) > 0;
}

bool KnowledgeBase::compatible(const AbstractProtection& asp, ArtifactKind kind) const {
    return asp.applicable_kinds.count(kind) > 0;
}

Precedence KnowledgeBase::asp_precedence(const std::string& before, const std::string& after) const {
    auto it = precedence_entries.find({before, after});
    return it == precedence_entries.end() ? Precedence::Allowed : it->second;
}

Precedence KnowledgeBase::precedence(const ConcreteProtection& p1, const ConcreteProtection& p2) const {
    return asp_precedence(p1.asp_id, p2.asp_id);
}

double KnowledgeBase::synergy(const std::string& step_id, const std::string& cp_before,
                              const std::string& cp_after) const {
    auto it = synergy_entries.find({step_id, cp_before, cp_after});
    return it == synergy_entries.end() ? 1.0 : it->second;
}

double KnowledgeBase::zeta(const std::string& cp_id, const std::string& step_id) const {
    const auto& c = cp(cp_id);
    auto it = c.mitigation.find(step_id);
    return it == c.mitigation.end() ? 1.0 : it->second;
}

double KnowledgeBase::base_prob(const std::string& step_id, ArtifactKind kind) const {
    const auto* step = find_step(step_id);
    if (!step) throw UnknownStep(step_id);
    auto it = step->base_prob.find(kind);
    if (it == step->base_prob.end()) throw UnknownStep(step_id + " (no base probability for " + to_string(kind) + ")");
    return it->second;
}

void KnowledgeBase::validate() const {
    for (std::size_t i = 1; i < asps.size(); ++i)
        if (asps[i - 1].id == asps[i].id)
            throw ValidationError("duplicate ASP id '" + asps[i].id + "'");
    for (std::size_t i = 1; i < cps.size(); ++i)
        if (cps[i - 1].id == cps[i].id)
            throw ValidationError("duplicate CP id '" + cps[i].id + "'");

    for (const auto& asp : asps) {
        if (asp.applicable_kinds.empty())
            throw ValidationError("ASP '" + asp.id + "' has empty applicable_kinds");
    }

    for (const auto& c : cps) {
        if (!find_asp(c.asp_id))
            throw ValidationError("CP '" + c.id + "' references unknown ASP '" + c.asp_id + "'");
        for (const auto& [metric, delta] : c.metric_deltas) {
            if (!std::isfinite(delta.multiplier) || delta.multiplier < 0)
                throw ValidationError("CP '" + c.id + "' metric '" + metric +
                                      "' multiplier must be finite and >= 0");
            if (!std::isfinite(delta.offset))
                throw ValidationError("CP '" + c.id + "' metric '" + metric + "' offset must be finite");
        }
        for (const auto& [step, z] : c.mitigation) {
            if (!(z >= 0.0 && z <= 1.0))
                throw ValidationError("CP '" + c.id + "' mitigation for step '" + step +
                                      "' must be in [0,1]");
            if (!find_step(step))
                throw ValidationError("CP '" + c.id + "' mitigates unknown attack step '" + step + "'");
        }
    }

    for (const auto& s : attack_steps) {
        for (const auto& [kind, p] : s.base_prob) {
            (void)kind;
            if (!(p > 0.0 && p <= 1.0))
                throw ValidationError("attack step '" + s.id + "' base probability must be in (0,1]");
        }
    }

    // Synergy/precedence consistency: omega != 1 is only meaningful on
    // Discouraged (> 1) or Encouraged (< 1) ASP pairs.
    for (const auto& [key, omega] : synergy_entries) {
        const auto& [step, cp_i, cp_j] = key;
        if (!find_step(step))
            throw ValidationError("synergy entry references unknown attack step '" + step + "'");
        const auto* pi = find_cp(cp_i);
        const auto* pj = find_cp(cp_j);
        if (!pi || !pj)
            throw ValidationError("synergy entry references unknown CP");
        if (omega < 0)
            throw ValidationError("synergy factor must be >= 0");
        const Precedence rel = asp_precedence(pi->asp_id, pj->asp_id);
        if (omega > 1.0 && rel != Precedence::Discouraged)
            throw ValidationError("synergy/precedence mismatch: omega > 1 on non-discouraged pair (" +
                                  cp_i + ", " + cp_j + ")");
        if (omega < 1.0 && rel != Precedence::Encouraged)
            throw ValidationError("synergy/precedence mismatch: omega < 1 on non-encouraged pair (" +
                                  cp_i + ", " + cp_j + ")");
    }

    for (const auto& [m, p] : measure_config.measures) {
        if (p.tau < 0 || p.rho < 0 || p.epsilon < 0)
            throw ValidationError("measure '" + m + "' parameters must be >= 0");
    }
    if (!(measure_config.expertise > 0.0 && measure_config.expertise <= 1.0))
        throw ValidationError("expertise must be in (0,1]");
}

namespace {

std::set<ArtifactKind> parse_kinds(const json& j) {
    std::set<ArtifactKind> kinds;
    for (const auto& k : j) kinds.insert(artifact_kind_from_string(k.get<std::string>()));
    return kinds;
}

}  // namespace

KnowledgeBase kb_from_json(const json& j) {
    KnowledgeBase kb;
    try {
        if (!j.contains("kb_version") || j.at("kb_version").get<int>() != 1)
            throw ParseError("missing or unsupported kb_version (expected 1)");

        for (const auto& ja : j.value("asps", json::array())) {
            AbstractProtection asp;
            asp.id = ja.at("id").get<std::string>();
            asp.name = ja.value("name", asp.id);
            asp.applicable_kinds = parse_kinds(ja.at("applicable_kinds"));
            for (const auto& r : ja.value("enforced_requirements", json::array()))
                asp.enforced_requirements.insert(r.get<std::string>());
            kb.asps.push_back(std::move(asp));
        }

        for (const auto& jc : j.value("cps", json::array())) {
            ConcreteProtection cp;
            cp.id = jc.at("id").get<std::string>();
            cp.asp_id = jc.at("asp").get<std::string>();
            cp.config_label = jc.value("config_label", std::string("default"));
            cp.online = jc.value("online", false);
            const json deltas = jc.value("metric_deltas", json::object());
            for (const auto& [metric, d] : deltas.items())
                cp.metric_deltas[metric] = {d.value("multiplier", 1.0), d.value("offset", 0.0)};
            const json coeffs = jc.value("overhead_coeffs", json::object());
            for (const auto& [type, c] : coeffs.items())
                cp.overhead_coeffs[type] = {c.value("base_pct", 0.0), c.value("per_instruction_pct", 0.0)};
            const json mitigation = jc.value("mitigation", json::object());
            for (const auto& [step, z] : mitigation.items())
                cp.mitigation[step] = z.get<double>();
            kb.cps.push_back(std::move(cp));
        }

        for (const auto& jp : j.value("precedence", json::array())) {
            auto before = jp.at("before").get<std::string>();
            auto after = jp.at("after").get<std::string>();
            auto rel = precedence_from_string(jp.at("rel").get<std::string>());
            auto key = std::make_pair(before, after);
            auto it = kb.precedence_entries.find(key);
            if (it != kb.precedence_entries.end() && it->second != rel)
                throw ValidationError("conflicting precedence entries for (" + before + ", " + after + ")");
            kb.precedence_entries[key] = rel;
        }

        for (const auto& js : j.value("synergy", json::array())) {
            kb.synergy_entries[{js.at("step").get<std::string>(),
                                js.at("cp_before").get<std::string>(),
                                js.at("cp_after").get<std::string>()}] = js.at("omega").get<double>();
        }

        for (const auto& js : j.value("attack_steps", json::array())) {
            AttackStepInfo step;
            step.id = js.at("id").get<std::string>();
            for (const auto& [kind, p] : js.at("base_prob").items())
                step.base_prob[artifact_kind_from_string(kind)] = p.get<double>();
            kb.attack_steps.push_back(std::move(step));
        }

        const json jm = j.value("measure_config", json::object());
        for (const auto& m : kMeasures) {
            MeasureParams p;
            if (jm.contains(m)) {
                p.tau = jm.at(m).value("tau", 1.0);
                p.rho = jm.at(m).value("rho", 1000.0);
                p.epsilon = jm.at(m).value("epsilon", 0.05);
            }
            kb.measure_config.measures[m] = p;
        }
        kb.measure_config.expertise = jm.value("expertise", 1.0);
    } catch (const json::exception& e) {
        throw ParseError(std::string("KB: ") + e.what());
    }

    std::sort(kb.asps.begin(), kb.asps.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    std::sort(kb.cps.begin(), kb.cps.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    std::sort(kb.attack_steps.begin(), kb.attack_steps.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });

    kb.validate();
    return kb;
}

KnowledgeBase load_kb(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open KB file '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("KB: ") + e.what());
    }
    return kb_from_json(j);
}

}  // namespace spmiti
