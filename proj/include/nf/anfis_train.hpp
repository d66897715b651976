#pragma once

#include "nf/data.hpp"
#include "nf/fuzzy.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace nf {

struct AnfisTrainConfig {
    int epochs = 100;
    double learning_rate = 0.01; // step scale on unit-span features
    std::uint64_t seed = 42;
    int mf_count = 4;            // per input
    double sigma_floor_rel = 1e-4; // sigma >= this fraction of the feature span
    bool record_test_metrics = true;
};

struct EpochMetrics {
    double train_mse = 0.0;
    double train_rmse = 0.0;
    std::optional<double> test_mse;
    std::optional<double> test_rmse;
};

enum class StopReason { Completed, GradientTolerance, ValidationPatience, Stalled };

struct TrainHistory {
    std::vector<EpochMetrics> epochs;
    StopReason stop = StopReason::Completed;
};

// Grid-partitioned model over the dataset's per-feature ranges, expanded by
// 1% of the span on each side; consequents zero-initialized.
AnfisModel build_initial_anfis(const Dataset& train, int mf_count);

// Minimum-norm least-squares consequents for fixed membership functions.
// Design row per sample: for each rule i, wbar_i * (x1..xn, 1). Orthogonal
// factorization with rank tolerance 1e-10 relative to the largest diagonal.
Eigen::MatrixXd lse_consequents(const AnfisModel& model, const Eigen::MatrixXd& X,
                                const Eigen::VectorXd& y);

// d(SSE)/d(center) and d(SSE)/d(sigma) for every membership function, with
// consequents held fixed. Layout mirrors model.inputs.
struct PremiseGradients {
    std::vector<std::vector<double>> d_center;
    std::vector<std::vector<double>> d_sigma;
};
PremiseGradients premise_gradients(const AnfisModel& model, const Eigen::MatrixXd& X,
                                   const Eigen::VectorXd& y);

struct AnfisTrainResult {
    AnfisModel model;
    TrainHistory history;
};

// Hybrid loop: per epoch, exact LSE for consequents, metrics snapshot, then
// one gradient-descent step on centers and sigmas. Returns the snapshot with
// the lowest train MSE.
AnfisTrainResult train_anfis(const SplitDataset& data, const AnfisTrainConfig& cfg);

} // namespace nf
