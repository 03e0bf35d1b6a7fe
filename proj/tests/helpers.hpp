#ifndef SPMITI_TESTS_HELPERS_HPP
#define SPMITI_TESTS_HELPERS_HPP

#include <string>

#include <nlohmann/json.hpp>

#include "spmiti/kb.hpp"
#include "spmiti/model.hpp"

namespace spmiti::test {

inline std::string fixture(const std::string& name) {
    return std::string(SPMITI_FIXTURES_DIR) + "/" + name;
}

// Smallest interesting KB: one confidentiality and one integrity family, one
// attack step, dyadic numbers throughout so comparisons can be exact.
inline nlohmann::json mini_kb_json() {
    return nlohmann::json::parse(R"({
      "kb_version": 1,
      "asps": [
        { "id": "obf", "applicable_kinds": ["code"], "enforced_requirements": ["confidentiality"] },
        { "id": "guard", "applicable_kinds": ["code"], "enforced_requirements": ["integrity"] }
      ],
      "cps": [
        { "id": "cp_obf", "asp": "obf",
          "metric_deltas": {
            "halstead": { "multiplier": 2.0 },
            "cyclomatic": { "multiplier": 2.0 }
          },
          "overhead_coeffs": { "client_time": { "base_pct": 2.0, "per_instruction_pct": 0.01 } },
          "mitigation": { "st": 0.5 } },
        { "id": "cp_guard", "asp": "guard",
          "metric_deltas": {
            "guarded_instructions": { "multiplier": 1.0, "offset": 128.0 },
            "local_instructions": { "multiplier": 1.0, "offset": 64.0 }
          },
          "overhead_coeffs": { "client_time": { "base_pct": 4.0 } },
          "mitigation": { "st": 0.5 } }
      ],
      "precedence": [],
      "synergy": [],
      "attack_steps": [
        { "id": "st", "base_prob": { "code": 0.5, "datum": 0.5 } }
      ],
      "measure_config": {}
    })");
}

inline KnowledgeBase mini_kb() { return kb_from_json(mini_kb_json()); }

// One code asset, one PO each for confidentiality and integrity on it, and a
// one-step attack path per requirement.
inline nlohmann::json mini_model_json() {
    return nlohmann::json::parse(R"({
      "model_version": 1,
      "artifacts": [
        { "id": "a1", "kind": "code", "file": "m.c", "line_range": [1, 50],
          "vanilla_metrics": { "halstead": 128, "cyclomatic": 4, "instructions": 256 } }
      ],
      "protection_objectives": [
        { "requirement": "confidentiality", "artifact": "a1", "weight": 1.0 },
        { "requirement": "integrity", "artifact": "a1", "weight": 1.0 }
      ],
      "attack_paths": [
        { "id": "p1", "target": "a1", "requirement": "confidentiality",
          "steps": [ { "step": "st", "artifact": "a1" } ] },
        { "id": "p2", "target": "a1", "requirement": "integrity",
          "steps": [ { "step": "st", "artifact": "a1" } ] }
      ],
      "overhead_thresholds": {}
    })");
}

inline ApplicationModel mini_model() { return model_from_json(mini_model_json()); }

}  // namespace spmiti::test

#endif
