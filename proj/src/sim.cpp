#include "gdsl/sim.hpp"

#include "gdsl/common.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <unordered_set>

namespace gdsl::sim {

namespace {

constexpr double kDivergenceGuard = 1e6;

std::string vertex_label(const GdsSpec& spec, int i) {
    return "'" + spec.vertices[static_cast<std::size_t>(i)] + "'";
}

std::vector<int> topological_order(const GdsSpec& spec,
                                   const std::vector<std::vector<std::pair<int, double>>>& parents) {
    const int m = static_cast<int>(spec.m());
    std::vector<int> in_degree(static_cast<std::size_t>(m), 0);
    std::vector<std::vector<int>> children(static_cast<std::size_t>(m));
    for (int v = 0; v < m; ++v) {
        in_degree[static_cast<std::size_t>(v)] = static_cast<int>(parents[static_cast<std::size_t>(v)].size());
        for (auto [src, w] : parents[static_cast<std::size_t>(v)])
            children[static_cast<std::size_t>(src)].push_back(v);
    }
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(m));
    std::vector<int> ready;
    for (int v = m - 1; v >= 0; --v)
        if (in_degree[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
    while (!ready.empty()) {
        const int v = ready.back();
        ready.pop_back();
        order.push_back(v);
        for (int c : children[static_cast<std::size_t>(v)])
            if (--in_degree[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
    }
    if (order.size() != static_cast<std::size_t>(m))
        throw CycleError("edges contain a directed cycle");
    return order;
}

double tent(double x) { return std::min(x, 1.0 - x); }

double local_map(const MapParams& map, double self,
                 const std::vector<std::pair<int, double>>& parents,
                 std::span<const double> state) {
    double coupling_sum = 0.0;
    for (auto [src, w] : parents) coupling_sum += w;
    switch (map.family) {
    case MapFamily::logistic: {
        double x = (1.0 - coupling_sum) * map.param * self * (1.0 - self);
        for (auto [src, w] : parents) {
            const double p = state[static_cast<std::size_t>(src)];
            x += w * map.param * p * (1.0 - p);
        }
        return x;
    }
    case MapFamily::tent: {
        double x = (1.0 - coupling_sum) * map.param * tent(self);
        for (auto [src, w] : parents) x += w * map.param * tent(state[static_cast<std::size_t>(src)]);
        return x;
    }
    case MapFamily::linear_ar: {
        double x = map.param * self;
        for (auto [src, w] : parents) x += w * state[static_cast<std::size_t>(src)];
        return x;
    }
    }
    throw ParamError("unknown map family");
}

double observe(const ObsModel& obs, double x) {
    switch (obs.kind) {
    case ObsKind::identity: return x;
    case ObsKind::affine: return obs.scale * x + obs.offset;
    case ObsKind::tanh: return std::tanh(obs.gain * x);
    }
    throw ParamError("unknown observation kind");
}

// One engine per (seed, vertex name, channel). Keying by name rather than
// list position keeps a vertex's noise attached to it under relabeling, and
// keeps ancestors' series bit-identical when an edge elsewhere is removed.
std::mt19937_64 substream(std::uint64_t seed, const std::string& vertex, std::uint64_t channel) {
    std::uint64_t h = fnv1a64(vertex);
    h = fnv1a64(seed, h);
    h = fnv1a64(channel, h);
    return std::mt19937_64(mix64(h));
}

} // namespace

MapFamily map_family_from_string(const std::string& name) {
    if (name == "logistic") return MapFamily::logistic;
    if (name == "tent") return MapFamily::tent;
    if (name == "linear_ar") return MapFamily::linear_ar;
    throw ParamError("unknown map family: " + name);
}

const char* to_string(MapFamily family) {
    switch (family) {
    case MapFamily::logistic: return "logistic";
    case MapFamily::tent: return "tent";
    case MapFamily::linear_ar: return "linear_ar";
    }
    return "unknown";
}

ObsKind obs_kind_from_string(const std::string& name) {
    if (name == "identity") return ObsKind::identity;
    if (name == "affine") return ObsKind::affine;
    if (name == "tanh") return ObsKind::tanh;
    throw ParamError("unknown observation kind: " + name);
}

const char* to_string(ObsKind kind) {
    switch (kind) {
    case ObsKind::identity: return "identity";
    case ObsKind::affine: return "affine";
    case ObsKind::tanh: return "tanh";
    }
    return "unknown";
}

ValidatedSpec validate_spec(const GdsSpec& spec) {
    const int m = static_cast<int>(spec.m());
    if (m < 1) throw ParamError("vertices: need at least one subsystem");
    {
        std::unordered_set<std::string> seen;
        for (const auto& name : spec.vertices) {
            if (name.empty()) throw ParamError("vertices: empty name");
            if (!seen.insert(name).second) throw ParamError("vertices: duplicate name '" + name + "'");
        }
    }
    if (spec.map_family.size() != spec.m()) throw ParamError("map_family: need one entry per vertex");
    if (spec.state_dim.size() != spec.m()) throw ParamError("state_dim: need one entry per vertex");
    if (spec.process_noise_sigma.size() != spec.m())
        throw ParamError("process_noise_sigma: need one entry per vertex");
    if (spec.observation.size() != spec.m()) throw ParamError("observation: need one entry per vertex");

    std::set<std::pair<int, int>> seen_edges;
    std::vector<std::vector<std::pair<int, double>>> parents(spec.m());
    std::vector<std::size_t> weight_cursor(spec.m(), 0);
    for (const auto& [src, dst] : spec.edges) {
        if (src < 0 || src >= m || dst < 0 || dst >= m)
            throw ParamError("edges: endpoint out of range: (" + std::to_string(src) + "," +
                             std::to_string(dst) + ")");
        if (src == dst)
            throw SelfLoopError("edges: self-loop on vertex " + vertex_label(spec, src));
        if (!seen_edges.insert({src, dst}).second)
            throw ParamError("edges: duplicate edge (" + std::to_string(src) + "," +
                             std::to_string(dst) + ")");
        const auto& map = spec.map_family[static_cast<std::size_t>(dst)];
        const std::size_t slot = weight_cursor[static_cast<std::size_t>(dst)]++;
        if (slot >= map.coupling.size())
            throw ParamError("map_family: vertex " + vertex_label(spec, dst) +
                             " has fewer coupling weights than incoming edges");
        parents[static_cast<std::size_t>(dst)].push_back({src, map.coupling[slot]});
    }

    for (int i = 0; i < m; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const auto& map = spec.map_family[idx];
        if (map.coupling.size() != parents[idx].size())
            throw ParamError("map_family: vertex " + vertex_label(spec, i) + " has " +
                             std::to_string(map.coupling.size()) + " coupling weights for " +
                             std::to_string(parents[idx].size()) + " incoming edges");
        double coupling_sum = 0.0;
        for (double w : map.coupling) {
            if (!(w >= 0.0 && w < 1.0))
                throw ParamError("coupling: weight " + std::to_string(w) + " on vertex " +
                                 vertex_label(spec, i) + " outside [0,1)");
            coupling_sum += w;
        }
        switch (map.family) {
        case MapFamily::logistic:
            if (!(map.param > 0.0 && map.param <= 4.0))
                throw ParamError("r: logistic rate on vertex " + vertex_label(spec, i) +
                                 " outside (0,4]");
            if (coupling_sum > 1.0)
                throw ParamError("coupling: weights on vertex " + vertex_label(spec, i) +
                                 " sum past 1");
            break;
        case MapFamily::tent:
            if (!(map.param > 0.0 && map.param <= 2.0))
                throw ParamError("slope: tent slope on vertex " + vertex_label(spec, i) +
                                 " outside (0,2]");
            if (coupling_sum > 1.0)
                throw ParamError("coupling: weights on vertex " + vertex_label(spec, i) +
                                 " sum past 1");
            break;
        case MapFamily::linear_ar:
            if (!(map.param > -1.0 && map.param < 1.0))
                throw ParamError("alpha: AR coefficient on vertex " + vertex_label(spec, i) +
                                 " outside (-1,1)");
            if (std::abs(map.param) + coupling_sum > 1.0)
                throw ParamError("alpha/coupling: |alpha| + weights on vertex " +
                                 vertex_label(spec, i) + " sum past 1");
            break;
        }
        if (spec.state_dim[idx] < 1)
            throw ParamError("state_dim: must be >= 1 on vertex " + vertex_label(spec, i));
        if (spec.state_dim[idx] != 1)
            throw ParamError("state_dim: built-in families support d=1 only (vertex " +
                             vertex_label(spec, i) + ")");
        if (!(spec.process_noise_sigma[idx] >= 0.0))
            throw ParamError("process_noise_sigma: negative on vertex " + vertex_label(spec, i));
        if (!(spec.observation[idx].noise_sigma >= 0.0))
            throw ParamError("obs_noise_sigma: negative on vertex " + vertex_label(spec, i));
        if (spec.initial) {
            if (spec.initial->size() != spec.m())
                throw ParamError("initial: need one entry per vertex");
            const double x0 = (*spec.initial)[idx];
            if (!std::isfinite(x0)) throw ParamError("initial: non-finite state");
            if (map.family != MapFamily::linear_ar && !(x0 >= 0.0 && x0 <= 1.0))
                throw ParamError("initial: state outside [0,1] on vertex " + vertex_label(spec, i));
        }
    }

    ValidatedSpec validated;
    validated.spec = spec;
    validated.parents = std::move(parents);
    validated.topo_order = topological_order(spec, validated.parents);
    return validated;
}

Trajectory simulate(const ValidatedSpec& validated, std::size_t n_steps, std::size_t burn_in) {
    const GdsSpec& spec = validated.spec;
    const std::size_t m = spec.m();
    if (n_steps < 1) throw ParamError("n_steps must be >= 1");

    enum Channel : std::uint64_t { kInit = 0, kProcess = 1, kObservation = 2 };
    // One engine *and* one distribution per stream: normal_distribution
    // caches a second deviate, so sharing it would leak draws across vertices.
    struct NoiseStream {
        std::mt19937_64 rng;
        std::normal_distribution<double> dist{0.0, 1.0};
        double draw() { return dist(rng); }
    };
    std::vector<NoiseStream> process_noise(m), obs_noise(m);
    for (std::size_t i = 0; i < m; ++i) {
        process_noise[i].rng = substream(spec.seed, spec.vertices[i], kProcess);
        obs_noise[i].rng = substream(spec.seed, spec.vertices[i], kObservation);
    }

    std::vector<double> state(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (spec.initial) {
            state[i] = (*spec.initial)[i];
        } else {
            auto rng = substream(spec.seed, spec.vertices[i], kInit);
            state[i] = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        }
    }

    Trajectory traj;
    traj.m = m;
    traj.n = n_steps;
    traj.hidden.resize(m * n_steps);
    traj.observed.resize(m * n_steps);
    traj.spec_fingerprint = to_hex(spec_fingerprint(spec));

    std::vector<double> next(m);
    const std::size_t total = burn_in + n_steps;
    for (std::size_t step = 0; step < total; ++step) {
        for (std::size_t i = 0; i < m; ++i) {
            const auto& map = spec.map_family[i];
            double x = local_map(map, state[i], validated.parents[i], state);
            const double sigma = spec.process_noise_sigma[i];
            if (sigma > 0.0) x += sigma * process_noise[i].draw();
            if (map.family == MapFamily::linear_ar) {
                if (!std::isfinite(x) || std::abs(x) > kDivergenceGuard)
                    throw DivergenceError("state of vertex '" + spec.vertices[i] +
                                          "' left the guard band at step " + std::to_string(step));
            } else {
                x = std::clamp(x, 0.0, 1.0);
            }
            next[i] = x;
        }
        state.swap(next);
        if (step >= burn_in) {
            const std::size_t col = step - burn_in;
            for (std::size_t i = 0; i < m; ++i) {
                const auto& obs = spec.observation[i];
                double y = observe(obs, state[i]);
                if (obs.noise_sigma > 0.0) y += obs.noise_sigma * obs_noise[i].draw();
                traj.hidden[i * n_steps + col] = state[i];
                traj.observed[i * n_steps + col] = y;
            }
        }
    }
    return traj;
}

ObservationDataset to_dataset(const Trajectory& traj, const GdsSpec& spec) {
    ObservationDataset data;
    data.names = spec.vertices;
    data.m = traj.m;
    data.n = traj.n;
    data.values = traj.observed;
    data.source = "simulated:" + traj.spec_fingerprint;
    data.validate();
    return data;
}

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const char* family_param_key(MapFamily family) {
    switch (family) {
    case MapFamily::logistic: return "r";
    case MapFamily::tent: return "slope";
    case MapFamily::linear_ar: return "alpha";
    }
    return "param";
}

GdsSpec spec_from_json(const json& j) {
    GdsSpec spec;
    try {
        spec.vertices = j.at("vertices").get<std::vector<std::string>>();
        const std::size_t m = spec.vertices.size();
        if (j.contains("edges"))
            for (const auto& e : j.at("edges"))
                spec.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        for (const auto& rec : j.at("map_family")) {
            MapParams map;
            map.family = map_family_from_string(rec.at("family").get<std::string>());
            map.param = rec.at(family_param_key(map.family)).get<double>();
            if (rec.contains("coupling")) map.coupling = rec.at("coupling").get<std::vector<double>>();
            spec.map_family.push_back(std::move(map));
        }
        spec.state_dim = j.contains("state_dim") ? j.at("state_dim").get<std::vector<int>>()
                                                 : std::vector<int>(m, 1);
        spec.process_noise_sigma = j.contains("process_noise_sigma")
                                       ? j.at("process_noise_sigma").get<std::vector<double>>()
                                       : std::vector<double>(m, 0.0);
        if (j.contains("observation")) {
            for (const auto& rec : j.at("observation")) {
                ObsModel obs;
                obs.kind = obs_kind_from_string(rec.value("kind", std::string("identity")));
                obs.scale = rec.value("scale", 1.0);
                obs.offset = rec.value("offset", 0.0);
                obs.gain = rec.value("gain", 1.0);
                obs.noise_sigma = rec.value("noise_sigma", 0.0);
                spec.observation.push_back(obs);
            }
        } else {
            spec.observation.assign(m, ObsModel{});
        }
        spec.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("initial")) spec.initial = j.at("initial").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad spec JSON: ") + e.what());
    }
    return spec;
}

} // namespace

GdsSpec spec_from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return spec_from_json(j);
}

GdsSpec spec_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad spec JSON: ") + e.what());
    }
    return spec_from_json(j);
}

std::string spec_to_json_text(const GdsSpec& spec) {
    ordered_json j;
    j["vertices"] = spec.vertices;
    auto& edges = j["edges"] = ordered_json::array();
    for (const auto& [src, dst] : spec.edges) edges.push_back({src, dst});
    auto& maps = j["map_family"] = ordered_json::array();
    for (const auto& map : spec.map_family) {
        ordered_json rec;
        rec["family"] = to_string(map.family);
        rec[family_param_key(map.family)] = map.param;
        rec["coupling"] = map.coupling;
        maps.push_back(std::move(rec));
    }
    j["state_dim"] = spec.state_dim;
    j["process_noise_sigma"] = spec.process_noise_sigma;
    auto& obs_list = j["observation"] = ordered_json::array();
    for (const auto& obs : spec.observation) {
        ordered_json rec;
        rec["kind"] = to_string(obs.kind);
        if (obs.kind == ObsKind::affine) {
            rec["scale"] = obs.scale;
            rec["offset"] = obs.offset;
        }
        if (obs.kind == ObsKind::tanh) rec["gain"] = obs.gain;
        rec["noise_sigma"] = obs.noise_sigma;
        obs_list.push_back(std::move(rec));
    }
    j["seed"] = spec.seed;
    if (spec.initial) j["initial"] = *spec.initial;
    return j.dump(2);
}

std::uint64_t spec_fingerprint(const GdsSpec& spec) {
    return fnv1a64(spec_to_json_text(spec));
}

} // namespace gdsl::sim
