#pragma once

#include "gdsl/errors.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace gdsl {

/// Multivariate scalar observations: one named series per subsystem, stored
/// row-major so each subsystem's series is contiguous.
struct ObservationDataset {
    std::vector<std::string> names;
    std::size_t m = 0; ///< subsystems
    std::size_t n = 0; ///< time steps
    std::vector<double> values; ///< m x n, row per subsystem
    std::string source;

    double value(std::size_t i, std::size_t t) const { return values[i * n + t]; }
    std::span<const double> series(std::size_t i) const { return {values.data() + i * n, n}; }

    /// Enforces the type invariants: m >= 1, n >= 2, all entries finite.
    void validate() const;
};

/// Per-subsystem delay-embedding parameters.
struct EmbeddingSpec {
    std::vector<int> kappa;
    std::vector<int> tau;

    static EmbeddingSpec uniform(std::size_t m, int kappa, int tau);

    std::size_t size() const { return kappa.size(); }
    /// Largest (kappa-1)*tau over the given subsystems (all if empty).
    std::size_t max_offset() const;
    std::size_t offset(std::size_t i) const {
        return static_cast<std::size_t>(kappa[i] - 1) * static_cast<std::size_t>(tau[i]);
    }
    void validate(std::size_t m) const;
};

enum class BinScheme { equal_frequency, equal_width };

BinScheme bin_scheme_from_string(const std::string& name);
const char* to_string(BinScheme scheme);

/// Discretized observations plus everything needed to interpret them: one
/// alphabet size and one set of cut points per subsystem, and the embedding
/// the symbols will be scored under.
struct SymbolicDataset {
    std::vector<std::string> names;
    std::size_t m = 0;
    std::size_t n = 0;
    std::vector<std::int32_t> symbols; ///< m x n, row per subsystem
    std::vector<int> alphabet;
    EmbeddingSpec embedding;
    std::vector<std::vector<double>> bin_edges; ///< per subsystem, scheme-dependent length
    BinScheme scheme = BinScheme::equal_frequency;

    std::int32_t symbol(std::size_t i, std::size_t t) const { return symbols[i * n + t]; }
    std::span<const std::int32_t> series(std::size_t i) const { return {symbols.data() + i * n, n}; }

    void validate() const;
};

/// Transitions (t -> t+1) that every subsystem's delay vector is defined on.
/// Computed from the global maximum embedding offset, so the count is the
/// same for every candidate graph scored on the dataset.
struct TransitionRange {
    std::size_t first_t = 0;
    std::size_t last_t = 0; ///< inclusive; the last t whose successor is observed
    std::size_t n_eff = 0;
};

/// CSV with a header row of subsystem names and one row per time step.
/// Throws ParseError (with line/column) or EmptyError.
ObservationDataset load_csv(const std::filesystem::path& path);

/// Writes the header + one row per time step, shortest round-trip floats.
void save_csv(const ObservationDataset& data, const std::filesystem::path& path);

/// Independent per-subsystem binning over each full series.
/// equal_frequency puts quantile cut points between bins and assigns boundary
/// values to the lower bin; equal_width splits [min, max] evenly with
/// left-closed bins. Throws DegenerateSeriesError when a series cannot
/// produce `bins` strictly increasing cut points.
SymbolicDataset discretize(const ObservationDataset& data, int bins, BinScheme scheme,
                           const EmbeddingSpec& embedding);

/// Delay vector at time t, most recent value first. Requires t >= (kappa-1)*tau.
template <typename T>
void delay_vector(std::span<const T> series, std::size_t t, int kappa, int tau, T* out) {
    if (kappa < 1 || tau < 1) throw ParamError("delay_vector: kappa and tau must be >= 1");
    const std::size_t offset = static_cast<std::size_t>(kappa - 1) * static_cast<std::size_t>(tau);
    if (t >= series.size() || t < offset)
        throw IndexError("delay_vector: index " + std::to_string(t) + " out of range for kappa=" +
                         std::to_string(kappa) + " tau=" + std::to_string(tau));
    for (int j = 0; j < kappa; ++j)
        out[j] = series[t - static_cast<std::size_t>(j) * static_cast<std::size_t>(tau)];
}

template <typename T>
std::vector<T> delay_vector(std::span<const T> series, std::size_t t, int kappa, int tau) {
    std::vector<T> out(static_cast<std::size_t>(kappa));
    delay_vector(series, t, kappa, tau, out.data());
    return out;
}

TransitionRange valid_transition_range(std::size_t n, const EmbeddingSpec& embedding);
TransitionRange valid_transition_range(const SymbolicDataset& data);

/// Symbol matrix as CSV (same shape as observations, integer cells) plus a
/// sidecar `<path>.meta.json` with alphabets, bin edges and the embedding.
void save_symbolic(const SymbolicDataset& data, const std::filesystem::path& csv_path);
SymbolicDataset load_symbolic(const std::filesystem::path& csv_path);

/// FNV-1a over the value bytes plus names; used in manifests and cache keys.
std::uint64_t dataset_fingerprint(const ObservationDataset& data);
std::uint64_t dataset_fingerprint(const SymbolicDataset& data);

} // namespace gdsl
