#ifndef SPMITI_EXPLORER_HPP
#define SPMITI_EXPLORER_HPP

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "spmiti/index.hpp"
#include "spmiti/kb.hpp"
#include "spmiti/model.hpp"
#include "spmiti/prep.hpp"
#include "spmiti/solspace.hpp"
#include "spmiti/solution.hpp"

namespace spmiti {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SearchConfig {
    int depth = 3;  // attacker moves below the defender's turn
    enum class Engine { Plain, Optimized };
    Engine engine = Engine::Plain;

    bool alpha_beta = false;
    bool aspiration = false;
    bool tt = false;
    bool futility = false;
    bool ext_futility = false;
    bool razoring = false;

    double aspiration_half_width = 2.0;
    std::optional<double> warm_start;  // aspiration center from a previous run

    // Index-scale absolute margins; infinity disables the technique.
    double futility_margin = kInf;
    double ext_futility_margin = kInf;
    double razor_margin = kInf;

    std::size_t tt_capacity = 1 << 16;  // rounded up to a power of two
    int top_n = 10;
    int workers = 1;

    // The plain engine forces every toggle off.
    SearchConfig normalized() const;
};

// Position evaluation of a state (solution, sequence of attacker move indices).
class Evaluator {
public:
    virtual ~Evaluator() = default;
    virtual double eval(const Solution& s, const std::vector<int>& move_seq) = 0;
    // Whether eval is invariant under permutation of the move sequence
    // (decides the transposition-table key shape).
    virtual bool order_invariant() const { return true; }
    virtual int move_count() const = 0;
    virtual std::string move_label(int move) const = 0;
};

// Backed by the SP index; attacker move m appends one unit-effort pass over
// attack path m. Memoizes on (solution hash, sorted move multiset).
class IndexEvaluator : public Evaluator {
public:
    IndexEvaluator(const ApplicationModel& model, const KnowledgeBase& kb,
                   std::vector<const AttackPath*> moves);

    double eval(const Solution& s, const std::vector<int>& move_seq) override;
    int move_count() const override { return static_cast<int>(moves_.size()); }
    std::string move_label(int move) const override;

private:
    const ApplicationModel& model_;
    const KnowledgeBase& kb_;
    std::vector<const AttackPath*> moves_;
    std::vector<ConcreteAttackPath> unit_paths_;
    std::map<std::pair<std::uint64_t, std::vector<int>>, double> memo_;
    std::mutex memo_mutex_;  // eval may be shared across worker tasks
};

// Test-only hook reading values from a fixture instead of the index module.
class ScriptedEvaluator : public Evaluator {
public:
    static ScriptedEvaluator from_file(const std::filesystem::path& path);

    double eval(const Solution& s, const std::vector<int>& move_seq) override;
    bool order_invariant() const override { return false; }
    int move_count() const override { return static_cast<int>(move_ids_.size()); }
    std::string move_label(int move) const override;

    std::vector<Solution> solutions() const;  // labeled pseudo-solutions
    int depth() const { return depth_; }

    std::vector<std::string> move_ids_;
    std::vector<std::string> move_labels_;
    std::vector<std::string> solution_ids_;
    std::map<std::string, double> values_;  // "<sol>|<m1,m2,...>" -> static index
    int depth_ = 3;
};

class SolutionSource {
public:
    virtual ~SolutionSource() = default;
    virtual void reset() = 0;
    virtual std::optional<Solution> next() = 0;
};

class VectorSource : public SolutionSource {
public:
    explicit VectorSource(std::vector<Solution> items) : items_(std::move(items)) {}
    void reset() override { pos_ = 0; }
    std::optional<Solution> next() override {
        if (pos_ >= items_.size()) return std::nullopt;
        return items_[pos_++];
    }

private:
    std::vector<Solution> items_;
    std::size_t pos_ = 0;
};

class SpaceSource : public SolutionSource {
public:
    explicit SpaceSource(SolutionSpace& space) : space_(space) {}
    void reset() override { space_.reset(); }
    std::optional<Solution> next() override { return space_.next(); }

private:
    SolutionSpace& space_;
};

// Caps the number of solutions drawn from an inner source (bench harness).
class CappedSource : public SolutionSource {
public:
    CappedSource(SolutionSource& inner, std::uint64_t cap) : inner_(inner), cap_(cap) {}
    void reset() override { inner_.reset(); taken_ = 0; }
    std::optional<Solution> next() override {
        if (taken_ >= cap_) return std::nullopt;
        auto s = inner_.next();
        if (s) ++taken_;
        return s;
    }

private:
    SolutionSource& inner_;
    std::uint64_t cap_;
    std::uint64_t taken_ = 0;
};

struct RankedSolution {
    Solution solution;
    double residual = 0;
    double base = 0;
    std::vector<int> attack_seq;
};

struct SearchResult {
    Solution solution;
    std::vector<int> attack_seq;
    std::vector<std::string> attack_labels;
    double residual = -kInf;
    double base = 0;
    std::vector<RankedSolution> top;  // sorted descending by residual
    std::uint64_t nodes_visited = 0;
    std::uint64_t tt_hits = 0;
    double wall_ms = 0;
    bool approximate = false;  // a speculative prune fired
};

struct TreeNode {
    std::string label;
    double propagated = 0;
    double static_eval = 0;
    bool leaf = false;
    bool winning = false;
    std::vector<std::size_t> children;
};

struct TreeCapture {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::size_t limit = 200;
};

class Explorer {
public:
    Explorer(const SearchConfig& cfg, Evaluator& eval);

    SearchResult run(SolutionSource& source);
    void set_capture(TreeCapture* capture) { capture_ = capture; }

private:
    struct TTEntry {
        std::uint64_t key = 0;
        int depth = -1;
        double value = 0;
        std::vector<int> line;
        bool used = false;
    };

    struct TT {
        std::vector<TTEntry> slots;
        std::uint64_t mask = 0;
        explicit TT(std::size_t capacity);
        const TTEntry* probe(std::uint64_t key, int depth) const;
        void store(std::uint64_t key, int depth, double value, const std::vector<int>& line);
    };

    std::uint64_t state_key(const Solution& s, const std::vector<int>& seq, int remaining) const;
    double attacker_search(const Solution& s, std::vector<int>& seq, int remaining, double alpha,
                           double beta, std::vector<int>& line, TT* tt, std::size_t capture_node);
    SearchResult run_window(SolutionSource& source, double alpha0, double beta0);
    std::size_t capture_child(std::size_t parent, const std::string& label);

    SearchConfig cfg_;
    Evaluator& eval_;
    std::unique_ptr<TT> tt_;
    std::uint64_t nodes_ = 0;
    std::uint64_t tt_hits_ = 0;
    bool approximate_ = false;
    TreeCapture* capture_ = nullptr;
};

struct CcsReport {
    std::string id;
    Solution solution;
    std::vector<std::string> attack_labels;
    double residual = 0;
    double base = 0;
    std::uint64_t nodes_visited = 0;
    std::uint64_t tt_hits = 0;
    std::map<std::string, double> overheads;  // of the winning partial solution
};

struct OptimizeResult {
    SearchResult global;
    std::vector<CcsReport> per_ccs;
};

// One search tree per CCS on its restricted POs, paths, pools, and thresholds;
// partial optima concatenated in CCS id order, residuals summed.
OptimizeResult optimize_per_ccs(const ApplicationModel& model, const KnowledgeBase& kb,
                                const SearchConfig& cfg, const SolutionSpaceConfig& space_cfg);

// Single tree over the whole application (all POs, paths, and thresholds).
OptimizeResult optimize_monolithic(const ApplicationModel& model, const KnowledgeBase& kb,
                                   const SearchConfig& cfg, const SolutionSpaceConfig& space_cfg);

std::string to_dot(const TreeCapture& capture);

}  // namespace spmiti

#endif
