#pragma once

#include "gdsl/dataset.hpp"
#include "gdsl/errors.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gdsl::sim {

enum class MapFamily { logistic, tent, linear_ar };
enum class ObsKind { identity, affine, tanh };

MapFamily map_family_from_string(const std::string& name);
const char* to_string(MapFamily family);
ObsKind obs_kind_from_string(const std::string& name);
const char* to_string(ObsKind kind);

/// Local map for one subsystem. `param` is the family's scalar parameter:
/// logistic rate r in (0,4], tent slope in (0,2], AR self-coefficient in
/// (-1,1). `coupling` holds one weight per incoming edge, in the order those
/// edges appear in GdsSpec::edges; weights lie in [0,1) and, together with
/// |param| for linear_ar, sum to at most 1 so the map stays on its state space.
struct MapParams {
    MapFamily family = MapFamily::logistic;
    double param = 4.0;
    std::vector<double> coupling;
};

struct ObsModel {
    ObsKind kind = ObsKind::identity;
    double scale = 1.0;  ///< affine: y = scale*x + offset
    double offset = 0.0;
    double gain = 1.0;   ///< tanh: y = tanh(gain*x)
    double noise_sigma = 0.0;
};

/// Generative description of a synchronous graph dynamical system: a DAG of
/// subsystems, each with a local map, additive dynamics noise, and a noisy
/// scalar observation function.
struct GdsSpec {
    std::vector<std::string> vertices;
    std::vector<std::pair<int, int>> edges; ///< (source, destination) indices
    std::vector<MapParams> map_family;
    std::vector<int> state_dim;             ///< built-in families require 1
    std::vector<double> process_noise_sigma;
    std::vector<ObsModel> observation;
    std::uint64_t seed = 0;
    /// Optional fixed initial states; absent entries are seeded uniform(0,1).
    std::optional<std::vector<double>> initial;

    std::size_t m() const { return vertices.size(); }
};

/// A GdsSpec that passed validate_spec, plus the derived structure the
/// simulator needs.
struct ValidatedSpec {
    GdsSpec spec;
    std::vector<int> topo_order;
    /// Per destination vertex: (source vertex, weight) pairs in edge order.
    std::vector<std::vector<std::pair<int, double>>> parents;
};

/// Checks all GdsSpec invariants. Throws CycleError, SelfLoopError or
/// ParamError (naming the offending field).
ValidatedSpec validate_spec(const GdsSpec& spec);

struct Trajectory {
    std::size_t m = 0;
    std::size_t n = 0;
    std::vector<double> hidden;   ///< m x n
    std::vector<double> observed; ///< m x n
    std::string spec_fingerprint;

    double hidden_at(std::size_t i, std::size_t t) const { return hidden[i * n + t]; }
    double observed_at(std::size_t i, std::size_t t) const { return observed[i * n + t]; }
};

/// Runs the synchronous update for burn_in + n_steps steps and records the
/// last n_steps of states and observations. Column t holds the state reached
/// after update burn_in+t+1 and its observation. Deterministic given the
/// spec's seed; each vertex consumes its own substreams so structurally
/// unrelated vertices produce bit-identical series across specs.
/// Throws DivergenceError if a linear_ar state exceeds the guard band (1e6).
Trajectory simulate(const ValidatedSpec& spec, std::size_t n_steps, std::size_t burn_in);

ObservationDataset to_dataset(const Trajectory& traj, const GdsSpec& spec);

/// JSON spec file, field-for-field with GdsSpec (schema in the README).
GdsSpec spec_from_json_file(const std::filesystem::path& path);
GdsSpec spec_from_json_text(const std::string& text);
std::string spec_to_json_text(const GdsSpec& spec);

std::uint64_t spec_fingerprint(const GdsSpec& spec);

} // namespace gdsl::sim
