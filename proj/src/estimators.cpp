#include "gdsl/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gdsl {

void ContextSpec::validate(std::size_t m) const {
    if (target < 0 || static_cast<std::size_t>(target) >= m)
        throw ParamError("context target out of range");
    std::vector<bool> seen(m, false);
    seen[static_cast<std::size_t>(target)] = true;
    for (int s : sources) {
        if (s < 0 || static_cast<std::size_t>(s) >= m)
            throw ParamError("context source out of range");
        if (s == target) throw ParamError("context target cannot be one of its sources");
        if (seen[static_cast<std::size_t>(s)]) throw ParamError("duplicate context source");
        seen[static_cast<std::size_t>(s)] = true;
    }
    embedding.validate(m);
}

CountTable::CountTable(int next_arity, std::vector<int> coordinate_bases)
    : next_arity_(next_arity), bases_(std::move(coordinate_bases)) {
    if (next_arity_ < 2) throw ParamError("count table needs next-symbol arity >= 2");
}

void CountTable::add(std::uint64_t context_key, std::int32_t next_symbol) {
    if (next_symbol < 0 || next_symbol >= next_arity_)
        throw ParamError("next symbol out of range for count table");
    auto& row = rows_[context_key];
    if (row.empty()) row.assign(static_cast<std::size_t>(next_arity_), 0);
    ++row[static_cast<std::size_t>(next_symbol)];
    ++total_;
}

std::uint64_t CountTable::context_marginal(std::uint64_t context_key) const {
    const auto it = rows_.find(context_key);
    if (it == rows_.end()) return 0;
    std::uint64_t sum = 0;
    for (auto c : it->second) sum += c;
    return sum;
}

std::span<const std::uint32_t> CountTable::row(std::uint64_t context_key) const {
    static const std::vector<std::uint32_t> empty;
    const auto it = rows_.find(context_key);
    if (it == rows_.end()) return {empty.data(), 0};
    return {it->second.data(), it->second.size()};
}

std::vector<std::pair<std::uint64_t, std::span<const std::uint32_t>>> CountTable::sorted_rows() const {
    std::vector<std::pair<std::uint64_t, std::span<const std::uint32_t>>> out;
    out.reserve(rows_.size());
    for (const auto& [key, counts] : rows_)
        out.emplace_back(key, std::span<const std::uint32_t>(counts.data(), counts.size()));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

ContextPacker::ContextPacker(const SymbolicDataset& data, const ContextSpec& ctx) {
    ctx.validate(data.m);
    auto push_subsystem = [&](int subsystem) {
        const auto idx = static_cast<std::size_t>(subsystem);
        const int kappa = ctx.embedding.kappa[idx];
        const int tau = ctx.embedding.tau[idx];
        for (int j = 0; j < kappa; ++j) {
            const std::size_t lag = static_cast<std::size_t>(j) * static_cast<std::size_t>(tau);
            coords_.push_back({subsystem, lag});
            bases_.push_back(data.alphabet[idx]);
            max_offset_ = std::max(max_offset_, lag);
        }
    };
    push_subsystem(ctx.target);
    for (int s : ctx.sources) push_subsystem(s);

    // the packed key must stay within 63 bits
    long double space = 1.0L;
    for (int b : bases_) space *= b;
    if (space > static_cast<long double>(std::numeric_limits<std::int64_t>::max()))
        throw OverflowError("context space exceeds 2^63 states; reduce bins, kappa or parents");
}

std::uint64_t ContextPacker::key_at(const SymbolicDataset& data, std::size_t t) const {
    std::uint64_t key = 0;
    for (std::size_t c = 0; c < coords_.size(); ++c) {
        const auto& coord = coords_[c];
        const auto symbol =
            data.symbol(static_cast<std::size_t>(coord.subsystem), t - coord.lag);
        key = key * static_cast<std::uint64_t>(bases_[c]) + static_cast<std::uint64_t>(symbol);
    }
    return key;
}

CountTable build_counts(const SymbolicDataset& data, const ContextSpec& ctx,
                        const TransitionRange& range) {
    const ContextPacker packer(data, ctx);
    if (range.first_t < packer.max_offset())
        throw IndexError("transition range starts before the context's embedding offset");
    if (range.last_t + 1 >= data.n) throw IndexError("transition range exceeds the series");

    CountTable table(data.alphabet[static_cast<std::size_t>(ctx.target)], packer.bases());
    const auto target = static_cast<std::size_t>(ctx.target);
    for (std::size_t t = range.first_t; t <= range.last_t; ++t)
        table.add(packer.key_at(data, t), data.symbol(target, t + 1));
    return table;
}

double conditional_entropy(const CountTable& table) {
    if (table.total() == 0) throw EmptyTableError("conditional entropy of an empty count table");
    const double total = static_cast<double>(table.total());
    double h = 0.0;
    for (const auto& [key, counts] : table.sorted_rows()) {
        std::uint64_t marginal = 0;
        for (auto c : counts) marginal += c;
        const double n_c = static_cast<double>(marginal);
        for (auto c : counts) {
            if (c == 0) continue;
            const double n_xc = static_cast<double>(c);
            h += (n_xc / total) * std::log2(n_c / n_xc);
        }
    }
    return h;
}

double collective_te(const SymbolicDataset& data, int dest, std::span<const int> sources,
                     const EmbeddingSpec& embedding, const TransitionRange& range) {
    if (sources.empty()) throw ParamError("transfer entropy needs at least one source");
    ContextSpec self{dest, {}, embedding};
    ContextSpec joint{dest, {sources.begin(), sources.end()}, embedding};
    joint.validate(data.m); // rejects dest in sources before any counting
    const double h_self = conditional_entropy(build_counts(data, self, range));
    const double h_joint = conditional_entropy(build_counts(data, joint, range));
    return h_self - h_joint;
}

} // namespace gdsl
