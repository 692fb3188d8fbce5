#include "gdsl/knn.hpp"

#include "gdsl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gdsl {

KnnResult knn_predict(const ObservationDataset& data, const ContextSpec& ctx, int k) {
    data.validate();
    ctx.validate(data.m);
    if (k < 1) throw ParamError("k must be >= 1");

    // The predictable range is set by this context's own offsets, not the
    // global embedding: knn validates embedding parameters per subsystem.
    std::vector<int> involved{ctx.target};
    involved.insert(involved.end(), ctx.sources.begin(), ctx.sources.end());
    std::size_t max_offset = 0;
    std::size_t dim = 0;
    for (int s : involved) {
        max_offset = std::max(max_offset, ctx.embedding.offset(static_cast<std::size_t>(s)));
        dim += static_cast<std::size_t>(ctx.embedding.kappa[static_cast<std::size_t>(s)]);
    }
    if (data.n < max_offset + 2)
        throw TooShortError("series too short for the requested embedding");
    const std::size_t first = max_offset;
    const std::size_t last = data.n - 2;
    const std::size_t n_pts = last - first + 1;
    if (n_pts <= static_cast<std::size_t>(k))
        throw TooShortError("need more than k=" + std::to_string(k) + " transitions, have " +
                            std::to_string(n_pts));

    // z-score each involved series once, then lay the delay coordinates out
    // as column blocks (structure-of-arrays) for the distance kernel
    std::vector<std::vector<double>> zscored(data.m);
    for (int s : involved) {
        const auto idx = static_cast<std::size_t>(s);
        zscored[idx].resize(data.n);
        kernels::zscore(data.series(idx), zscored[idx]);
    }
    std::vector<double> coords(dim * n_pts);
    std::size_t d = 0;
    for (int s : involved) {
        const auto idx = static_cast<std::size_t>(s);
        const int kappa = ctx.embedding.kappa[idx];
        const int tau = ctx.embedding.tau[idx];
        for (int j = 0; j < kappa; ++j) {
            const std::size_t lag = static_cast<std::size_t>(j) * static_cast<std::size_t>(tau);
            double* col = coords.data() + d * n_pts;
            for (std::size_t p = 0; p < n_pts; ++p) col[p] = zscored[idx][first + p - lag];
            ++d;
        }
    }

    const auto target = static_cast<std::size_t>(ctx.target);
    KnnResult result;
    result.range = {first, last, n_pts};
    result.predictions.resize(n_pts);
    result.actual.resize(n_pts);

    std::vector<double> query(dim);
    std::vector<double> dists(n_pts);
    std::vector<std::uint32_t> order(n_pts);
    double sq_err = 0.0;
    for (std::size_t p = 0; p < n_pts; ++p) {
        for (std::size_t c = 0; c < dim; ++c) query[c] = coords[c * n_pts + p];
        kernels::squared_distances(coords.data(), n_pts, dim, query.data(), dists.data());
        dists[p] = std::numeric_limits<double>::infinity(); // leave-one-out

        std::iota(order.begin(), order.end(), 0u);
        // ties broken by index so neighbour choice is reproducible
        std::nth_element(order.begin(), order.begin() + (k - 1), order.end(),
                         [&](std::uint32_t a, std::uint32_t b) {
                             return dists[a] != dists[b] ? dists[a] < dists[b] : a < b;
                         });
        double mean = 0.0;
        for (int j = 0; j < k; ++j) mean += data.value(target, first + order[static_cast<std::size_t>(j)] + 1);
        mean /= static_cast<double>(k);

        const double actual = data.value(target, first + p + 1);
        result.predictions[p] = mean;
        result.actual[p] = actual;
        const double err = mean - actual;
        sq_err += err * err;
    }
    result.rmse = std::sqrt(sq_err / static_cast<double>(n_pts));
    return result;
}

EmbeddingChoice select_embedding(const ObservationDataset& data, int subsystem, int kappa_max,
                                 int tau_max, int k) {
    if (kappa_max < 1 || tau_max < 1) throw ParamError("kappa_max and tau_max must be >= 1");
    EmbeddingChoice best;
    bool have_best = false;
    for (int kappa = 1; kappa <= kappa_max; ++kappa) {
        for (int tau = 1; tau <= tau_max; ++tau) {
            ContextSpec ctx{subsystem, {}, EmbeddingSpec::uniform(data.m, kappa, tau)};
            const double rmse = knn_predict(data, ctx, k).rmse;
            if (!have_best || rmse < best.rmse) {
                best = {kappa, tau, rmse};
                have_best = true;
            }
        }
    }
    return best;
}

} // namespace gdsl
