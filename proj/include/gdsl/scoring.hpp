#pragma once

#include "gdsl/dataset.hpp"
#include "gdsl/estimators.hpp"

#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gdsl {

/// Candidate coupling structure: a parent list per vertex. Self-history is
/// always conditioned on and is not part of the graph.
struct CandidateGraph {
    int m = 0;
    std::vector<std::vector<int>> parents;

    static CandidateGraph empty(int m);
    static CandidateGraph from_edges(int m, std::span<const std::pair<int, int>> edges);

    /// Sorted (source, destination) pairs.
    std::vector<std::pair<int, int>> edges() const;
    std::size_t edge_count() const;
    bool has_edge(int src, int dst) const;

    /// Throws ParamError / SelfLoopError / CycleError.
    void validate() const;
};

/// True iff the graph has no directed cycle (Kahn's procedure).
bool is_acyclic(const CandidateGraph& graph);

enum class CriterionKind { ml, aic, bic };

struct Criterion {
    CriterionKind kind = CriterionKind::bic;

    /// Penalty weight: 0 for ml, 1 for aic, log2(n_eff)/2 for bic.
    double f_of_n(std::size_t n_eff) const;
    const char* name() const;
    static Criterion parse(const std::string& name);
};

/// Number of free multinomial CPD parameters per vertex:
///   |Y^i|^kappa_i * (|Y^i| - 1) * prod_p |Y^p|^kappa_p.
/// Exact integer arithmetic; throws OverflowError instead of wrapping.
std::uint64_t model_dimension(const CandidateGraph& graph, std::span<const int> alphabet,
                              const EmbeddingSpec& embedding,
                              std::vector<std::uint64_t>* per_vertex = nullptr);

struct FamilyScore {
    double entropy_bits = 0.0;
    std::uint64_t dimension = 0;
    double total = 0.0; ///< -n_eff * entropy - f(N) * dimension
};

struct ScoreReport {
    CandidateGraph graph;
    Criterion criterion;
    std::vector<double> family_entropy;
    std::vector<std::uint64_t> family_dimension;
    std::vector<double> family_total;
    double total_score = 0.0;
    std::size_t n_eff = 0;
};

/// Scores candidate graphs against one symbolic dataset (which carries the
/// embedding). Family results are cached by (vertex, parent set); parent
/// lists are canonicalized to sorted order before counting, so cached and
/// from-scratch totals agree bit-for-bit. Thread-safe for concurrent family
/// evaluations.
class Scorer {
public:
    Scorer(const SymbolicDataset& data, Criterion criterion);

    FamilyScore family_score(int vertex, std::span<const int> parents);
    ScoreReport score(const CandidateGraph& graph);

    /// Proposition-2 form of the log-likelihood ratio against the empty
    /// graph: n_eff * sum over vertices-with-parents of collective TE.
    double loglik_ratio(const CandidateGraph& graph);

    const TransitionRange& range() const { return range_; }
    const SymbolicDataset& data() const { return data_; }
    Criterion criterion() const { return criterion_; }
    double penalty_weight() const { return f_n_; }
    /// Families actually computed (cache misses).
    std::uint64_t families_evaluated() const;

private:
    struct FamilyKey {
        int vertex;
        std::vector<int> parents;
        bool operator==(const FamilyKey&) const = default;
    };
    struct FamilyKeyHash {
        std::size_t operator()(const FamilyKey& key) const;
    };

    const SymbolicDataset& data_;
    Criterion criterion_;
    TransitionRange range_;
    double f_n_;
    mutable std::mutex mutex_;
    std::unordered_map<FamilyKey, FamilyScore, FamilyKeyHash> cache_;
    std::uint64_t evaluated_ = 0;
};

/// One-shot convenience wrapper around a throwaway Scorer.
ScoreReport score(const SymbolicDataset& data, const CandidateGraph& graph, Criterion criterion);
double loglik_ratio(const SymbolicDataset& data, const CandidateGraph& graph);

} // namespace gdsl
