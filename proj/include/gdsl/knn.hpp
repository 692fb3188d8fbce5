#pragma once

#include "gdsl/dataset.hpp"
#include "gdsl/estimators.hpp"

#include <vector>

namespace gdsl {

struct KnnResult {
    TransitionRange range;           ///< transitions the predictor ran on
    std::vector<double> predictions; ///< one per t in range, predicting t+1
    std::vector<double> actual;
    double rmse = 0.0;
};

/// Leave-one-out nearest-neighbour prediction of the target's next
/// observation from the joint delay vector of the context (target + sources),
/// in per-subsystem z-scored coordinates with a Euclidean metric. The
/// prediction for t is the mean of the k successors of the nearest other
/// delay vectors. Throws TooShortError unless there are more than k
/// transitions.
KnnResult knn_predict(const ObservationDataset& data, const ContextSpec& ctx, int k);

struct EmbeddingChoice {
    int kappa = 1;
    int tau = 1;
    double rmse = 0.0;
};

/// Grid search over kappa in [1, kappa_max] x tau in [1, tau_max], minimizing
/// self-context knn_predict RMSE. Ties go to the smaller kappa, then the
/// smaller tau.
EmbeddingChoice select_embedding(const ObservationDataset& data, int subsystem, int kappa_max,
                                 int tau_max, int k);

} // namespace gdsl
