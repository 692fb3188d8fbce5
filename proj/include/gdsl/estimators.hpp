#pragma once

#include "gdsl/dataset.hpp"

#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gdsl {

/// The conditioning tuple for one subsystem: its own delay vector plus the
/// delay vectors of an ordered (possibly empty) set of source subsystems.
struct ContextSpec {
    int target = 0;
    std::vector<int> sources;
    EmbeddingSpec embedding; ///< full-length; only target + sources entries are read

    void validate(std::size_t m) const;
};

/// Sparse transition counts: context tuples are packed into a mixed-radix
/// integer key, and each visited context owns a dense row of next-symbol
/// counts. Only observed tuples take memory.
class CountTable {
public:
    CountTable(int next_arity, std::vector<int> coordinate_bases);

    void add(std::uint64_t context_key, std::int32_t next_symbol);

    int next_arity() const { return next_arity_; }
    std::uint64_t total() const { return total_; }
    std::size_t context_count() const { return rows_.size(); }
    const std::vector<int>& coordinate_bases() const { return bases_; }

    std::uint64_t context_marginal(std::uint64_t context_key) const;
    std::span<const std::uint32_t> row(std::uint64_t context_key) const;

    /// Rows in ascending key order; entropy sums iterate this so results do
    /// not depend on hash-map iteration order.
    std::vector<std::pair<std::uint64_t, std::span<const std::uint32_t>>> sorted_rows() const;

private:
    int next_arity_;
    std::vector<int> bases_;
    std::uint64_t total_ = 0;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> rows_;
};

/// Packs symbol coordinates (given per-coordinate bases) into one key.
/// Throws OverflowError if the full context space exceeds 2^63 states.
class ContextPacker {
public:
    ContextPacker(const SymbolicDataset& data, const ContextSpec& ctx);

    std::uint64_t key_at(const SymbolicDataset& data, std::size_t t) const;
    const std::vector<int>& bases() const { return bases_; }
    std::size_t max_offset() const { return max_offset_; }

private:
    struct Coord {
        int subsystem;
        std::size_t lag;
    };
    std::vector<Coord> coords_;
    std::vector<int> bases_;
    std::size_t max_offset_ = 0;
};

/// Tallies (next symbol of target | context at t) over every t in range.
CountTable build_counts(const SymbolicDataset& data, const ContextSpec& ctx,
                        const TransitionRange& range);

/// Plug-in conditional entropy in bits:
///   H = -sum_{x,c} (n_xc / N) * log2(n_xc / n_c),  0 log 0 := 0.
double conditional_entropy(const CountTable& table);

/// Collective transfer entropy from the sources' delay vectors to the
/// destination's next observation, beyond the destination's own delay
/// vector. Both entropy terms use the same transition range.
double collective_te(const SymbolicDataset& data, int dest, std::span<const int> sources,
                     const EmbeddingSpec& embedding, const TransitionRange& range);

} // namespace gdsl
