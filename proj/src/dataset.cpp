#include "gdsl/dataset.hpp"

#include "gdsl/common.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gdsl {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trimmed(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_cell(const std::string& raw, std::size_t line_no, std::size_t col) {
    const std::string cell = trimmed(raw);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw ParseError("non-numeric cell at line " + std::to_string(line_no) + ", column " +
                         std::to_string(col + 1) + ": '" + cell + "'");
    if (!std::isfinite(v))
        throw ParseError("non-finite value at line " + std::to_string(line_no) + ", column " +
                         std::to_string(col + 1));
    return v;
}

} // namespace

void ObservationDataset::validate() const {
    if (m < 1) throw EmptyError("dataset has no subsystems");
    if (n < 2) throw EmptyError("dataset needs at least 2 time steps, has " + std::to_string(n));
    if (values.size() != m * n) throw ParamError("dataset value buffer has wrong size");
    if (names.size() != m) throw ParamError("dataset has " + std::to_string(names.size()) +
                                            " names for " + std::to_string(m) + " series");
    for (double v : values)
        if (!std::isfinite(v)) throw ParamError("dataset contains a non-finite value");
}

EmbeddingSpec EmbeddingSpec::uniform(std::size_t m, int kappa, int tau) {
    EmbeddingSpec spec;
    spec.kappa.assign(m, kappa);
    spec.tau.assign(m, tau);
    spec.validate(m);
    return spec;
}

std::size_t EmbeddingSpec::max_offset() const {
    std::size_t best = 0;
    for (std::size_t i = 0; i < kappa.size(); ++i) best = std::max(best, offset(i));
    return best;
}

void EmbeddingSpec::validate(std::size_t m) const {
    if (kappa.size() != m || tau.size() != m)
        throw ParamError("embedding spec must cover all " + std::to_string(m) + " subsystems");
    for (std::size_t i = 0; i < m; ++i) {
        if (kappa[i] < 1) throw ParamError("kappa must be >= 1 (subsystem " + std::to_string(i) + ")");
        if (tau[i] < 1) throw ParamError("tau must be >= 1 (subsystem " + std::to_string(i) + ")");
    }
}

BinScheme bin_scheme_from_string(const std::string& name) {
    if (name == "equal_frequency") return BinScheme::equal_frequency;
    if (name == "equal_width") return BinScheme::equal_width;
    throw ParamError("unknown discretization scheme: " + name);
}

const char* to_string(BinScheme scheme) {
    return scheme == BinScheme::equal_frequency ? "equal_frequency" : "equal_width";
}

void SymbolicDataset::validate() const {
    if (m < 1 || n < 2) throw EmptyError("symbolic dataset too small");
    if (symbols.size() != m * n || alphabet.size() != m || names.size() != m)
        throw ParamError("symbolic dataset shape mismatch");
    embedding.validate(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (alphabet[i] < 2) throw ParamError("alphabet size must be >= 2");
        for (std::size_t t = 0; t < n; ++t) {
            const auto s = symbol(i, t);
            if (s < 0 || s >= alphabet[i])
                throw ParamError("symbol out of range for its alphabet (subsystem " +
                                 std::to_string(i) + ", t=" + std::to_string(t) + ")");
        }
    }
    for (const auto& edges : bin_edges)
        for (std::size_t j = 1; j < edges.size(); ++j)
            if (!(edges[j - 1] < edges[j])) throw ParamError("bin edges must be strictly increasing");
}

ObservationDataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw EmptyError("empty file: " + path.string());
    ObservationDataset data;
    for (const auto& cell : split_line(line)) data.names.push_back(trimmed(cell));
    data.m = data.names.size();
    if (data.m == 0) throw EmptyError("header row has no columns: " + path.string());

    std::vector<double> rows; // time-major while reading
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trimmed(line).empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != data.m)
            throw ParseError("line " + std::to_string(line_no) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(data.m));
        for (std::size_t c = 0; c < cells.size(); ++c)
            rows.push_back(parse_cell(cells[c], line_no, c));
    }
    data.n = rows.size() / data.m;
    data.values.resize(data.m * data.n);
    for (std::size_t t = 0; t < data.n; ++t)
        for (std::size_t i = 0; i < data.m; ++i) data.values[i * data.n + t] = rows[t * data.m + i];
    data.source = path.string();
    data.validate();
    return data;
}

void save_csv(const ObservationDataset& data, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (std::size_t i = 0; i < data.m; ++i) {
        if (i) out << ',';
        out << data.names[i];
    }
    out << '\n';
    for (std::size_t t = 0; t < data.n; ++t) {
        for (std::size_t i = 0; i < data.m; ++i) {
            if (i) out << ',';
            out << format_double(data.value(i, t));
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

namespace {

// Upper empirical quantile cut points: cut[j] is the smallest value with at
// least (j+1)*n/bins observations <= it. Values equal to a cut point fall in
// the lower bin.
std::vector<double> quantile_cuts(std::span<const double> series, int bins,
                                  const std::string& name) {
    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());
    std::size_t distinct = sorted.empty() ? 0 : 1;
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] != sorted[i - 1]) ++distinct;
    if (distinct < static_cast<std::size_t>(bins))
        throw DegenerateSeriesError("series '" + name + "' has " + std::to_string(distinct) +
                                    " distinct values, needs >= " + std::to_string(bins) +
                                    " for equal-frequency binning");
    const std::size_t n = sorted.size();
    std::vector<double> cuts;
    cuts.reserve(static_cast<std::size_t>(bins) - 1);
    for (int j = 1; j < bins; ++j) {
        const std::size_t rank =
            (static_cast<std::size_t>(j) * n + static_cast<std::size_t>(bins) - 1) /
            static_cast<std::size_t>(bins); // ceil(j*n/bins)
        cuts.push_back(sorted[rank - 1]);
    }
    for (std::size_t j = 1; j < cuts.size(); ++j)
        if (!(cuts[j - 1] < cuts[j]))
            throw DegenerateSeriesError("series '" + name +
                                        "': tied quantiles prevent " + std::to_string(bins) +
                                        " equal-frequency bins");
    return cuts;
}

} // namespace

SymbolicDataset discretize(const ObservationDataset& data, int bins, BinScheme scheme,
                           const EmbeddingSpec& embedding) {
    data.validate();
    embedding.validate(data.m);
    if (bins < 2) throw ParamError("bins must be >= 2, got " + std::to_string(bins));

    SymbolicDataset out;
    out.names = data.names;
    out.m = data.m;
    out.n = data.n;
    out.symbols.resize(data.m * data.n);
    out.alphabet.assign(data.m, bins);
    out.embedding = embedding;
    out.scheme = scheme;
    out.bin_edges.resize(data.m);

    for (std::size_t i = 0; i < data.m; ++i) {
        const auto series = data.series(i);
        if (scheme == BinScheme::equal_frequency) {
            const auto cuts = quantile_cuts(series, bins, data.names[i]);
            out.bin_edges[i] = cuts;
            for (std::size_t t = 0; t < data.n; ++t) {
                // count of cut points strictly below the value = lower-bin tie rule
                const auto it = std::lower_bound(cuts.begin(), cuts.end(), series[t]);
                out.symbols[i * data.n + t] = static_cast<std::int32_t>(it - cuts.begin());
            }
        } else {
            const auto [lo_it, hi_it] = std::minmax_element(series.begin(), series.end());
            const double lo = *lo_it, hi = *hi_it;
            if (!(lo < hi))
                throw DegenerateSeriesError("series '" + data.names[i] +
                                            "' is constant; cannot split into equal-width bins");
            const double width = (hi - lo) / bins;
            std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
            for (int j = 0; j <= bins; ++j) edges[static_cast<std::size_t>(j)] = lo + width * j;
            edges.back() = hi;
            out.bin_edges[i] = edges;
            for (std::size_t t = 0; t < data.n; ++t) {
                int s = static_cast<int>((series[t] - lo) / width);
                s = std::clamp(s, 0, bins - 1);
                out.symbols[i * data.n + t] = s;
            }
        }
    }
    out.validate();
    return out;
}

TransitionRange valid_transition_range(std::size_t n, const EmbeddingSpec& embedding) {
    const std::size_t first = embedding.max_offset();
    if (n < first + 2)
        throw TooShortError("series of length " + std::to_string(n) +
                            " leaves no scorable transitions at max embedding offset " +
                            std::to_string(first));
    TransitionRange range;
    range.first_t = first;
    range.last_t = n - 2;
    range.n_eff = range.last_t - range.first_t + 1;
    return range;
}

TransitionRange valid_transition_range(const SymbolicDataset& data) {
    return valid_transition_range(data.n, data.embedding);
}

void save_symbolic(const SymbolicDataset& data, const std::filesystem::path& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw IoError("cannot write " + csv_path.string());
    for (std::size_t i = 0; i < data.m; ++i) {
        if (i) out << ',';
        out << data.names[i];
    }
    out << '\n';
    for (std::size_t t = 0; t < data.n; ++t) {
        for (std::size_t i = 0; i < data.m; ++i) {
            if (i) out << ',';
            out << data.symbol(i, t);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + csv_path.string());

    nlohmann::ordered_json meta;
    meta["alphabet"] = data.alphabet;
    meta["bin_edges"] = data.bin_edges;
    meta["kappa"] = data.embedding.kappa;
    meta["tau"] = data.embedding.tau;
    meta["scheme"] = to_string(data.scheme);
    std::ofstream mout(csv_path.string() + ".meta.json");
    if (!mout) throw IoError("cannot write sidecar for " + csv_path.string());
    mout << meta.dump(2) << '\n';
}

SymbolicDataset load_symbolic(const std::filesystem::path& csv_path) {
    const ObservationDataset raw = load_csv(csv_path);
    std::ifstream min(csv_path.string() + ".meta.json");
    if (!min) throw IoError("missing sidecar: " + csv_path.string() + ".meta.json");
    nlohmann::json meta;
    try {
        min >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad sidecar JSON: ") + e.what());
    }

    SymbolicDataset data;
    data.names = raw.names;
    data.m = raw.m;
    data.n = raw.n;
    data.symbols.resize(raw.m * raw.n);
    for (std::size_t idx = 0; idx < raw.values.size(); ++idx) {
        const double v = raw.values[idx];
        if (v != std::floor(v)) throw ParseError("symbol CSV contains a non-integer cell");
        data.symbols[idx] = static_cast<std::int32_t>(v);
    }
    try {
        data.alphabet = meta.at("alphabet").get<std::vector<int>>();
        data.bin_edges = meta.at("bin_edges").get<std::vector<std::vector<double>>>();
        data.embedding.kappa = meta.at("kappa").get<std::vector<int>>();
        data.embedding.tau = meta.at("tau").get<std::vector<int>>();
        data.scheme = bin_scheme_from_string(meta.at("scheme").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad sidecar fields: ") + e.what());
    }
    data.validate();
    return data;
}

std::uint64_t dataset_fingerprint(const ObservationDataset& data) {
    std::uint64_t h = kFnvOffset;
    for (const auto& name : data.names) h = fnv1a64(name, h);
    h = fnv1a64(data.m, h);
    h = fnv1a64(data.n, h);
    for (double v : data.values) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        h = fnv1a64(bits, h);
    }
    return h;
}

std::uint64_t dataset_fingerprint(const SymbolicDataset& data) {
    std::uint64_t h = kFnvOffset;
    for (const auto& name : data.names) h = fnv1a64(name, h);
    h = fnv1a64(data.m, h);
    h = fnv1a64(data.n, h);
    for (auto s : data.symbols) h = fnv1a64(static_cast<std::uint64_t>(s), h);
    for (int a : data.alphabet) h = fnv1a64(static_cast<std::uint64_t>(a), h);
    for (int k : data.embedding.kappa) h = fnv1a64(static_cast<std::uint64_t>(k), h);
    for (int t : data.embedding.tau) h = fnv1a64(static_cast<std::uint64_t>(t), h);
    return h;
}

} // namespace gdsl
