#ifndef SPMITI_BENCH_HPP
#define SPMITI_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "spmiti/kb.hpp"
#include "spmiti/model.hpp"

namespace spmiti {

struct BenchSpec {
    std::vector<int> po_counts;
    std::vector<int> path_counts;
    std::vector<int> depths;
    std::uint64_t seed = 0;
    int repeats = 1;
    std::string engine = "plain";  // plain | optimized
    std::uint64_t solution_cap = 0;  // 0: 2 * po_count
    bool force = false;  // lift desk-scale guardrails
    int workers = 1;
};

struct BenchRow {
    int po_count = 0;
    int path_count = 0;
    int depth = 0;
    std::string engine;
    int repeat = 0;
    std::uint64_t nodes = 0;
    double wall_ms = 0;
    double value = 0;
};

struct SyntheticInstance {
    KnowledgeBase kb;
    ApplicationModel model;
};

// Deterministic synthetic instance: po_count assets with alternating
// requirements, path_count attack paths attached round-robin so the two axes
// vary independently.
SyntheticInstance make_synthetic_instance(int po_count, int path_count, std::uint64_t seed);

std::vector<BenchRow> run_bench(const BenchSpec& spec);

std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace spmiti

#endif
