#include "spmiti/bench.hpp"

#include <sstream>

#include "spmiti/errors.hpp"
#include "spmiti/explorer.hpp"
#include "spmiti/prep.hpp"
#include "spmiti/solspace.hpp"

namespace spmiti {

SyntheticInstance make_synthetic_instance(int po_count, int path_count, std::uint64_t seed) {
    (void)seed;  // the instance is deterministic; the seed drives the walk order
    SyntheticInstance inst;

    inst.kb.asps.push_back(AbstractProtection{
        "asp_conf", "synthetic confidentiality family", {ArtifactKind::Code},
        {req::confidentiality}});
    inst.kb.asps.push_back(AbstractProtection{
        "asp_int", "synthetic integrity family", {ArtifactKind::Code}, {req::integrity}});

    ConcreteProtection conf_cp;
    conf_cp.id = "cp_conf";
    conf_cp.asp_id = "asp_conf";
    conf_cp.metric_deltas["halstead"] = MetricDelta{2.0, 0.0};
    conf_cp.metric_deltas["cyclomatic"] = MetricDelta{2.0, 0.0};
    conf_cp.mitigation["st"] = 0.5;
    inst.kb.cps.push_back(std::move(conf_cp));

    ConcreteProtection int_cp;
    int_cp.id = "cp_int";
    int_cp.asp_id = "asp_int";
    int_cp.metric_deltas["guarded_instructions"] = MetricDelta{1.0, 128.0};
    int_cp.metric_deltas["local_instructions"] = MetricDelta{1.0, 64.0};
    int_cp.mitigation["st"] = 0.5;
    inst.kb.cps.push_back(std::move(int_cp));

    AttackStepInfo step;
    step.id = "st";
    step.base_prob[ArtifactKind::Code] = 0.5;
    step.base_prob[ArtifactKind::Datum] = 0.5;
    inst.kb.attack_steps.push_back(std::move(step));

    for (const auto& m : kMeasures) inst.kb.measure_config.measures[m] = MeasureParams{};
    inst.kb.validate();

    char buf[16];
    for (int i = 0; i < po_count; ++i) {
        Artifact a;
        std::snprintf(buf, sizeof(buf), "a%04d", i);
        a.id = buf;
        a.kind = ArtifactKind::Code;
        a.file = std::string("f") + buf + ".c";
        a.line_start = 1;
        a.line_end = 100;
        a.vanilla_metrics.halstead = 128;
        a.vanilla_metrics.cyclomatic = 4;
        a.vanilla_metrics.instructions = 256;
        inst.model.artifacts.push_back(std::move(a));

        ProtectionObjective po;
        po.requirement = (i % 2 == 0) ? req::confidentiality : req::integrity;
        po.artifact_id = buf;
        po.weight = 1.0;
        inst.model.pos.push_back(std::move(po));
    }

    for (int j = 0; j < path_count; ++j) {
        const int target = j % po_count;
        std::snprintf(buf, sizeof(buf), "a%04d", target);
        AttackPath p;
        p.id = "p" + std::to_string(j);
        p.target_asset = buf;
        p.requirement = (target % 2 == 0) ? req::confidentiality : req::integrity;
        p.steps.push_back(AttackStepRef{"st", buf});
        inst.model.attack_paths.push_back(std::move(p));
    }

    inst.model.validate();
    cross_validate(inst.model, inst.kb);
    return inst;
}

std::vector<BenchRow> run_bench(const BenchSpec& spec) {
    if (spec.engine != "plain" && spec.engine != "optimized")
        throw ConfigError("unknown engine '" + spec.engine + "'");

    std::vector<BenchRow> rows;
    for (int po : spec.po_counts) {
        for (int pc : spec.path_counts) {
            for (int d : spec.depths) {
                if (!spec.force && (po > 128 || d > 5))
                    throw GuardrailExceeded(
                        "po_count <= 128 and depth <= 5 unless forced (asked for " +
                        std::to_string(po) + "/" + std::to_string(d) + ")");
                for (int rep = 0; rep < spec.repeats; ++rep) {
                    auto inst = make_synthetic_instance(po, pc, spec.seed);
                    auto ccs = compute_ccs(inst.model, inst.kb);

                    SolutionSpaceConfig scfg;
                    scfg.sigma = 1;
                    scfg.seed = spec.seed + static_cast<std::uint64_t>(rep);
                    SolutionSpace space(inst.model, inst.kb, inst.model.pos, ccs, scfg);
                    SpaceSource inner(space);
                    const std::uint64_t cap =
                        spec.solution_cap ? spec.solution_cap
                                          : 2 * static_cast<std::uint64_t>(po);
                    CappedSource source(inner, cap);

                    std::vector<const AttackPath*> paths;
                    for (const auto& p : inst.model.attack_paths) paths.push_back(&p);
                    IndexEvaluator eval(inst.model, inst.kb, paths);

                    SearchConfig cfg;
                    cfg.depth = d;
                    cfg.workers = spec.workers;
                    if (spec.engine == "optimized") {
                        cfg.engine = SearchConfig::Engine::Optimized;
                        cfg.alpha_beta = true;
                        cfg.tt = true;
                    }
                    Explorer explorer(cfg, eval);
                    auto r = explorer.run(source);

                    BenchRow row;
                    row.po_count = po;
                    row.path_count = pc;
                    row.depth = d;
                    row.engine = spec.engine;
                    row.repeat = rep;
                    row.nodes = r.nodes_visited;
                    row.wall_ms = r.wall_ms;
                    row.value = r.residual;
                    rows.push_back(std::move(row));
                }
            }
        }
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os << "po_count,path_count,depth,engine,nodes,wall_ms,value\n";
    for (const auto& r : rows) {
        os << r.po_count << "," << r.path_count << "," << r.depth << "," << r.engine << ","
           << r.nodes << "," << r.wall_ms << "," << r.value << "\n";
    }
    return os.str();
}

}  // namespace spmiti
