#include "gdsl/search.hpp"

#include "gdsl/common.hpp"

#include <algorithm>
#include <random>

namespace gdsl {

SearchMethod search_method_from_string(const std::string& name) {
    if (name == "exhaustive") return SearchMethod::exhaustive;
    if (name == "greedy") return SearchMethod::greedy;
    throw ParamError("unknown search method: " + name);
}

const char* to_string(SearchMethod method) {
    return method == SearchMethod::exhaustive ? "exhaustive" : "greedy";
}

void SearchConfig::validate() const {
    if (max_parents < 0) throw ParamError("max_parents must be >= 0");
    if (restarts < 1) throw ParamError("restarts must be >= 1");
}

namespace {

constexpr int kExhaustiveLimit = 5;

void enumerate_rec(int m, int max_parents, CandidateGraph& graph, int vertex,
                   const std::function<void(const CandidateGraph&)>& visit) {
    if (vertex == m) {
        visit(graph);
        return;
    }
    const auto idx = static_cast<std::size_t>(vertex);
    const std::uint32_t all = (1u << m) - 1u;
    const std::uint32_t self = 1u << vertex;
    for (std::uint32_t mask = 0; mask <= all; ++mask) {
        if (mask & self) continue;
        if (max_parents >= 0 && std::popcount(mask) > max_parents) continue;
        graph.parents[idx].clear();
        for (int p = 0; p < m; ++p)
            if (mask & (1u << p)) graph.parents[idx].push_back(p);
        // cycles can only involve vertices whose parent sets are already
        // assigned, so pruning here is exact
        if (!is_acyclic(graph)) continue;
        enumerate_rec(m, max_parents, graph, vertex + 1, visit);
    }
    graph.parents[idx].clear();
}

// Candidate single moves, in tie-break order: adds, then deletes, then
// reversals, each by (src, dst).
struct Move {
    enum class Kind { add, remove, reverse };
    Kind kind;
    int src;
    int dst;

    std::string describe() const {
        const char* verb = kind == Kind::add ? "add" : kind == Kind::remove ? "delete" : "reverse";
        return std::string(verb) + " " + std::to_string(src) + "->" + std::to_string(dst);
    }
};

CandidateGraph apply_move(const CandidateGraph& graph, const Move& move) {
    CandidateGraph next = graph;
    auto& dst_parents = next.parents[static_cast<std::size_t>(move.dst)];
    switch (move.kind) {
    case Move::Kind::add:
        dst_parents.push_back(move.src);
        break;
    case Move::Kind::remove:
        dst_parents.erase(std::find(dst_parents.begin(), dst_parents.end(), move.src));
        break;
    case Move::Kind::reverse:
        dst_parents.erase(std::find(dst_parents.begin(), dst_parents.end(), move.src));
        next.parents[static_cast<std::size_t>(move.src)].push_back(move.dst);
        break;
    }
    return next;
}

std::vector<Move> legal_moves(const CandidateGraph& graph, int max_parents) {
    std::vector<Move> moves;
    const int m = graph.m;
    for (int src = 0; src < m; ++src) {
        for (int dst = 0; dst < m; ++dst) {
            if (src == dst) continue;
            if (!graph.has_edge(src, dst)) {
                if (static_cast<int>(graph.parents[static_cast<std::size_t>(dst)].size()) >= max_parents)
                    continue;
                const Move move{Move::Kind::add, src, dst};
                if (is_acyclic(apply_move(graph, move))) moves.push_back(move);
            }
        }
    }
    for (int src = 0; src < m; ++src)
        for (int dst = 0; dst < m; ++dst)
            if (src != dst && graph.has_edge(src, dst))
                moves.push_back({Move::Kind::remove, src, dst});
    for (int src = 0; src < m; ++src) {
        for (int dst = 0; dst < m; ++dst) {
            if (src == dst || !graph.has_edge(src, dst)) continue;
            if (static_cast<int>(graph.parents[static_cast<std::size_t>(src)].size()) >= max_parents)
                continue;
            const Move move{Move::Kind::reverse, src, dst};
            if (is_acyclic(apply_move(graph, move))) moves.push_back(move);
        }
    }
    return moves;
}

// Family-local score change; only the families the move touches are rescored.
double move_delta(Scorer& scorer, const CandidateGraph& graph, const CandidateGraph& next,
                  const Move& move) {
    double delta = scorer.family_score(move.dst, next.parents[static_cast<std::size_t>(move.dst)]).total -
                   scorer.family_score(move.dst, graph.parents[static_cast<std::size_t>(move.dst)]).total;
    if (move.kind == Move::Kind::reverse)
        delta += scorer.family_score(move.src, next.parents[static_cast<std::size_t>(move.src)]).total -
                 scorer.family_score(move.src, graph.parents[static_cast<std::size_t>(move.src)]).total;
    return delta;
}

// score desc, then fewer edges, then lexicographically smaller edge list
bool better_graph(double score_a, const CandidateGraph& a, double score_b,
                  const CandidateGraph& b) {
    if (score_a != score_b) return score_a > score_b;
    if (a.edge_count() != b.edge_count()) return a.edge_count() < b.edge_count();
    return a.edges() < b.edges();
}

CandidateGraph random_start(int m, int max_parents, std::mt19937_64& rng) {
    CandidateGraph graph = CandidateGraph::empty(m);
    std::uniform_int_distribution<int> pick(0, m - 1);
    const int attempts = 2 * m;
    for (int i = 0; i < attempts; ++i) {
        const int src = pick(rng);
        const int dst = pick(rng);
        if (src == dst || graph.has_edge(src, dst)) continue;
        if (static_cast<int>(graph.parents[static_cast<std::size_t>(dst)].size()) >= max_parents)
            continue;
        CandidateGraph next = graph;
        next.parents[static_cast<std::size_t>(dst)].push_back(src);
        if (is_acyclic(next)) graph = std::move(next);
    }
    return graph;
}

} // namespace

void enumerate_dags(int m, int max_parents,
                    const std::function<void(const CandidateGraph&)>& visit) {
    if (m < 0) throw ParamError("vertex count must be >= 0");
    if (m > kExhaustiveLimit)
        throw TooLargeError("exhaustive enumeration supports at most " +
                            std::to_string(kExhaustiveLimit) + " vertices, got " + std::to_string(m));
    if (m == 0) return;
    CandidateGraph graph = CandidateGraph::empty(m);
    enumerate_rec(m, max_parents, graph, 0, visit);
}

std::vector<CandidateGraph> all_dags(int m, int max_parents) {
    std::vector<CandidateGraph> out;
    enumerate_dags(m, max_parents, [&](const CandidateGraph& g) { out.push_back(g); });
    return out;
}

SearchResult exhaustive_search(Scorer& scorer, const SearchConfig& config) {
    config.validate();
    const int m = static_cast<int>(scorer.data().m);
    if (m > kExhaustiveLimit)
        throw TooLargeError("exhaustive search supports at most " +
                            std::to_string(kExhaustiveLimit) + " vertices; use greedy");

    CandidateGraph best_graph = CandidateGraph::empty(m);
    double best_score = scorer.score(best_graph).total_score;
    std::uint64_t visited = 0;
    enumerate_dags(m, config.max_parents, [&](const CandidateGraph& graph) {
        const double total = scorer.score(graph).total_score;
        ++visited;
        if (better_graph(total, graph, best_score, best_graph)) {
            best_graph = graph;
            best_score = total;
        }
    });

    SearchResult result;
    result.best = scorer.score(best_graph);
    result.visited = visited;
    return result;
}

SearchResult greedy_search(Scorer& scorer, const SearchConfig& config) {
    config.validate();
    const int m = static_cast<int>(scorer.data().m);

    CandidateGraph best_graph = CandidateGraph::empty(m);
    double best_score = 0.0;
    bool have_best = false;
    std::vector<MoveRecord> best_trace;

    for (int restart = 0; restart < config.restarts; ++restart) {
        CandidateGraph graph = CandidateGraph::empty(m);
        if (restart > 0) {
            std::mt19937_64 rng(mix64(config.seed + static_cast<std::uint64_t>(restart)));
            graph = random_start(m, config.max_parents, rng);
        }
        double current = scorer.score(graph).total_score;
        std::vector<MoveRecord> trace;

        for (;;) {
            const auto moves = legal_moves(graph, config.max_parents);
            bool improved = false;
            Move best_move{Move::Kind::add, 0, 0};
            CandidateGraph best_next;
            double best_delta = 0.0;
            for (const auto& move : moves) {
                CandidateGraph next = apply_move(graph, move);
                const double delta = move_delta(scorer, graph, next, move);
                if (delta > 0.0 && (!improved || delta > best_delta)) {
                    improved = true;
                    best_delta = delta;
                    best_move = move;
                    best_next = std::move(next);
                }
            }
            if (!improved) break;
            graph = std::move(best_next);
            current += best_delta;
            if (config.keep_trace) trace.push_back({best_move.describe(), best_delta});
        }

        current = scorer.score(graph).total_score; // re-sum from families
        if (!have_best || better_graph(current, graph, best_score, best_graph)) {
            best_graph = graph;
            best_score = current;
            best_trace = std::move(trace);
            have_best = true;
        }
    }

    SearchResult result;
    result.best = scorer.score(best_graph);
    result.visited = scorer.families_evaluated();
    result.trace = std::move(best_trace);
    return result;
}

SearchResult learn_structure(const SymbolicDataset& data, const SearchConfig& config) {
    Scorer scorer(data, config.criterion);
    return config.method == SearchMethod::exhaustive ? exhaustive_search(scorer, config)
                                                     : greedy_search(scorer, config);
}

} // namespace gdsl
