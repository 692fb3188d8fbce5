#pragma once

#include "gdsl/scoring.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gdsl {

enum class SearchMethod { exhaustive, greedy };

SearchMethod search_method_from_string(const std::string& name);
const char* to_string(SearchMethod method);

struct SearchConfig {
    SearchMethod method = SearchMethod::exhaustive;
    int max_parents = 3;
    int restarts = 1; ///< greedy only; restart 0 starts from the empty graph
    std::uint64_t seed = 0;
    Criterion criterion{CriterionKind::bic};
    bool keep_trace = false;

    void validate() const;
};

struct MoveRecord {
    std::string move; ///< e.g. "add 0->2"
    double delta = 0.0;
};

struct SearchResult {
    ScoreReport best;
    /// Graphs scored (exhaustive) or family evaluations (greedy cache misses).
    std::uint64_t visited = 0;
    std::vector<MoveRecord> trace;
};

/// Visits every labeled DAG on m vertices with at most max_parents parents
/// per vertex (max_parents < 0 means no cap), each exactly once, in a fixed
/// order. Throws TooLargeError for m > 5.
void enumerate_dags(int m, int max_parents, const std::function<void(const CandidateGraph&)>& visit);
std::vector<CandidateGraph> all_dags(int m, int max_parents = -1);

/// Scores every DAG; ties broken toward fewer edges, then the
/// lexicographically smallest edge list.
SearchResult exhaustive_search(Scorer& scorer, const SearchConfig& config);

/// Hill climbing over add/delete/reverse moves from the empty graph (plus
/// seeded random starts for restarts > 1), applying the best strictly
/// improving move until none exists.
SearchResult greedy_search(Scorer& scorer, const SearchConfig& config);

/// Dispatches on config.method.
SearchResult learn_structure(const SymbolicDataset& data, const SearchConfig& config);

} // namespace gdsl
