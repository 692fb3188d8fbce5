#include "gdsl/scoring.hpp"

#include "gdsl/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gdsl {

CandidateGraph CandidateGraph::empty(int m) {
    CandidateGraph g;
    g.m = m;
    g.parents.assign(static_cast<std::size_t>(m), {});
    return g;
}

CandidateGraph CandidateGraph::from_edges(int m, std::span<const std::pair<int, int>> edges) {
    CandidateGraph g = empty(m);
    for (const auto& [src, dst] : edges) {
        if (dst < 0 || dst >= m || src < 0 || src >= m)
            throw ParamError("edge endpoint out of range: (" + std::to_string(src) + "," +
                             std::to_string(dst) + ")");
        g.parents[static_cast<std::size_t>(dst)].push_back(src);
    }
    g.validate();
    return g;
}

std::vector<std::pair<int, int>> CandidateGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int dst = 0; dst < m; ++dst)
        for (int src : parents[static_cast<std::size_t>(dst)]) out.emplace_back(src, dst);
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t CandidateGraph::edge_count() const {
    std::size_t count = 0;
    for (const auto& p : parents) count += p.size();
    return count;
}

bool CandidateGraph::has_edge(int src, int dst) const {
    const auto& p = parents[static_cast<std::size_t>(dst)];
    return std::find(p.begin(), p.end(), src) != p.end();
}

void CandidateGraph::validate() const {
    if (m < 1) throw ParamError("graph needs at least one vertex");
    if (parents.size() != static_cast<std::size_t>(m))
        throw ParamError("graph parent lists do not cover every vertex");
    for (int v = 0; v < m; ++v) {
        std::vector<bool> seen(static_cast<std::size_t>(m), false);
        for (int p : parents[static_cast<std::size_t>(v)]) {
            if (p < 0 || p >= m) throw ParamError("parent index out of range");
            if (p == v) throw SelfLoopError("vertex " + std::to_string(v) + " lists itself as parent");
            if (seen[static_cast<std::size_t>(p)])
                throw ParamError("duplicate parent " + std::to_string(p) + " on vertex " +
                                 std::to_string(v));
            seen[static_cast<std::size_t>(p)] = true;
        }
    }
    if (!is_acyclic(*this)) throw CycleError("candidate graph contains a directed cycle");
}

bool is_acyclic(const CandidateGraph& graph) {
    const auto m = static_cast<std::size_t>(graph.m);
    std::vector<int> in_degree(m, 0);
    std::vector<std::vector<int>> children(m);
    for (std::size_t dst = 0; dst < m; ++dst) {
        in_degree[dst] = static_cast<int>(graph.parents[dst].size());
        for (int src : graph.parents[dst]) children[static_cast<std::size_t>(src)].push_back(static_cast<int>(dst));
    }
    std::vector<int> ready;
    for (std::size_t v = 0; v < m; ++v)
        if (in_degree[v] == 0) ready.push_back(static_cast<int>(v));
    std::size_t removed = 0;
    while (!ready.empty()) {
        const int v = ready.back();
        ready.pop_back();
        ++removed;
        for (int c : children[static_cast<std::size_t>(v)])
            if (--in_degree[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
    }
    return removed == m;
}

double Criterion::f_of_n(std::size_t n_eff) const {
    switch (kind) {
    case CriterionKind::ml: return 0.0;
    case CriterionKind::aic: return 1.0;
    case CriterionKind::bic: return std::log2(static_cast<double>(n_eff)) / 2.0;
    }
    return 0.0;
}

const char* Criterion::name() const {
    switch (kind) {
    case CriterionKind::ml: return "ml";
    case CriterionKind::aic: return "aic";
    case CriterionKind::bic: return "bic";
    }
    return "unknown";
}

Criterion Criterion::parse(const std::string& name) {
    if (name == "ml") return {CriterionKind::ml};
    if (name == "aic") return {CriterionKind::aic};
    if (name == "bic") return {CriterionKind::bic};
    throw ParamError("unknown criterion: " + name + " (expected ml, aic or bic)");
}

namespace {

std::uint64_t checked_pow(std::uint64_t base, int exp) {
    unsigned __int128 acc = 1;
    for (int i = 0; i < exp; ++i) {
        acc *= base;
        if (acc > std::numeric_limits<std::uint64_t>::max())
            throw OverflowError("model dimension overflows 64 bits");
    }
    return static_cast<std::uint64_t>(acc);
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    const unsigned __int128 acc = static_cast<unsigned __int128>(a) * b;
    if (acc > std::numeric_limits<std::uint64_t>::max())
        throw OverflowError("model dimension overflows 64 bits");
    return static_cast<std::uint64_t>(acc);
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    if (a > std::numeric_limits<std::uint64_t>::max() - b)
        throw OverflowError("model dimension overflows 64 bits");
    return a + b;
}

} // namespace

std::uint64_t model_dimension(const CandidateGraph& graph, std::span<const int> alphabet,
                              const EmbeddingSpec& embedding,
                              std::vector<std::uint64_t>* per_vertex) {
    graph.validate();
    if (alphabet.size() != static_cast<std::size_t>(graph.m))
        throw ParamError("alphabet list must cover every vertex");
    embedding.validate(static_cast<std::size_t>(graph.m));
    if (per_vertex) per_vertex->assign(static_cast<std::size_t>(graph.m), 0);

    std::uint64_t total = 0;
    for (int v = 0; v < graph.m; ++v) {
        const auto idx = static_cast<std::size_t>(v);
        const auto b = static_cast<std::uint64_t>(alphabet[idx]);
        std::uint64_t dim = checked_mul(checked_pow(b, embedding.kappa[idx]), b - 1);
        for (int p : graph.parents[idx]) {
            const auto pidx = static_cast<std::size_t>(p);
            dim = checked_mul(dim, checked_pow(static_cast<std::uint64_t>(alphabet[pidx]),
                                               embedding.kappa[pidx]));
        }
        if (per_vertex) (*per_vertex)[idx] = dim;
        total = checked_add(total, dim);
    }
    return total;
}

std::size_t Scorer::FamilyKeyHash::operator()(const FamilyKey& key) const {
    std::uint64_t h = fnv1a64(static_cast<std::uint64_t>(key.vertex));
    for (int p : key.parents) h = fnv1a64(static_cast<std::uint64_t>(p), h);
    return static_cast<std::size_t>(h);
}

Scorer::Scorer(const SymbolicDataset& data, Criterion criterion)
    : data_(data), criterion_(criterion), range_(valid_transition_range(data)),
      f_n_(criterion.f_of_n(range_.n_eff)) {
    data_.validate();
}

FamilyScore Scorer::family_score(int vertex, std::span<const int> parents) {
    FamilyKey key{vertex, {parents.begin(), parents.end()}};
    std::sort(key.parents.begin(), key.parents.end());
    {
        std::lock_guard lock(mutex_);
        const auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }

    ContextSpec ctx{vertex, key.parents, data_.embedding};
    const double entropy = conditional_entropy(build_counts(data_, ctx, range_));

    CandidateGraph family = CandidateGraph::empty(data_.m > 0 ? static_cast<int>(data_.m) : 1);
    family.parents[static_cast<std::size_t>(vertex)] = key.parents;
    std::vector<std::uint64_t> dims;
    model_dimension(family, data_.alphabet, data_.embedding, &dims);
    const std::uint64_t dimension = dims[static_cast<std::size_t>(vertex)];

    FamilyScore result;
    result.entropy_bits = entropy;
    result.dimension = dimension;
    result.total = -static_cast<double>(range_.n_eff) * entropy -
                   f_n_ * static_cast<double>(dimension);

    std::lock_guard lock(mutex_);
    const auto [it, inserted] = cache_.emplace(std::move(key), result);
    if (inserted) ++evaluated_;
    return it->second;
}

ScoreReport Scorer::score(const CandidateGraph& graph) {
    graph.validate();
    if (graph.m != static_cast<int>(data_.m))
        throw ParamError("graph has " + std::to_string(graph.m) + " vertices, dataset has " +
                         std::to_string(data_.m));

    ScoreReport report;
    report.graph = graph;
    report.criterion = criterion_;
    report.n_eff = range_.n_eff;
    report.family_entropy.resize(data_.m);
    report.family_dimension.resize(data_.m);
    report.family_total.resize(data_.m);
    double total = 0.0;
    for (int v = 0; v < graph.m; ++v) {
        const auto idx = static_cast<std::size_t>(v);
        const FamilyScore f = family_score(v, graph.parents[idx]);
        report.family_entropy[idx] = f.entropy_bits;
        report.family_dimension[idx] = f.dimension;
        report.family_total[idx] = f.total;
        total += f.total;
    }
    report.total_score = total;
    return report;
}

double Scorer::loglik_ratio(const CandidateGraph& graph) {
    graph.validate();
    if (graph.m != static_cast<int>(data_.m))
        throw ParamError("graph/dataset vertex count mismatch");
    double te_sum = 0.0;
    for (int v = 0; v < graph.m; ++v) {
        auto parents = graph.parents[static_cast<std::size_t>(v)];
        if (parents.empty()) continue;
        std::sort(parents.begin(), parents.end());
        te_sum += collective_te(data_, v, parents, data_.embedding, range_);
    }
    return static_cast<double>(range_.n_eff) * te_sum;
}

std::uint64_t Scorer::families_evaluated() const {
    std::lock_guard lock(mutex_);
    return evaluated_;
}

ScoreReport score(const SymbolicDataset& data, const CandidateGraph& graph, Criterion criterion) {
    Scorer scorer(data, criterion);
    return scorer.score(graph);
}

double loglik_ratio(const SymbolicDataset& data, const CandidateGraph& graph) {
    Scorer scorer(data, Criterion{CriterionKind::ml});
    return scorer.loglik_ratio(graph);
}

} // namespace gdsl
