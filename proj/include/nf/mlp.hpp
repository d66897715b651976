#pragma once

#include "nf/anfis_train.hpp" // TrainHistory, EpochMetrics, StopReason
#include "nf/data.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace nf {

enum class Activation { Tanh, Identity };

// Bilayered feedforward regressor: two trainable fully connected hidden
// layers and a linear scalar output. Identity activation exists for testing
// the optimizer against linear least-squares ground truth.
struct MlpModel {
    std::vector<int> layer_sizes; // {n_in, h1, h2, 1}
    std::vector<Eigen::MatrixXd> weights; // weights[l]: sizes[l+1] x sizes[l]
    std::vector<Eigen::VectorXd> biases;
    Activation hidden_activation = Activation::Tanh;

    long param_count() const;
};

struct LmConfig {
    double lambda0 = 1e-3;
    double lambda_up = 10.0;
    double lambda_down = 0.1;
    double lambda_max = 1e12; // no acceptable step past this -> stall
    int max_iters = 100;      // accepted steps
    double grad_tol = 1e-8;
    int val_patience = 6;
    std::uint64_t seed = 0;
};

// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases,
// deterministic per seed.
MlpModel init_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed,
                  Activation hidden = Activation::Tanh);

double mlp_forward(const MlpModel& model, const Eigen::VectorXd& x);
Eigen::VectorXd mlp_forward_batch(const MlpModel& model, const Eigen::MatrixXd& X);

// Flattened parameter vector in layer order: W1 (row-major), b1, W2, b2, ...
Eigen::VectorXd get_params(const MlpModel& model);
void set_params(MlpModel& model, const Eigen::VectorXd& theta);

// Residuals e_k = prediction_k - target_k and the Jacobian of predictions
// with respect to the flattened parameters, via backpropagation.
struct JacobianResult {
    Eigen::VectorXd residuals;
    Eigen::MatrixXd jacobian; // rows = samples, cols = params
};
JacobianResult mlp_jacobian(const MlpModel& model, const Eigen::MatrixXd& X,
                            const Eigen::VectorXd& y);

struct LmTrainResult {
    MlpModel model; // parameters with the best validation SSE
    TrainHistory history;
};

// Damped Gauss-Newton: solve (J'J + lambda I) delta = -J'e; accept only steps
// that lower train SSE. Stops on max_iters, gradient norm, validation
// patience, or lambda overflow (stall).
LmTrainResult train_lm(const MlpModel& model, const Eigen::MatrixXd& Xtr,
                       const Eigen::VectorXd& ytr, const Eigen::MatrixXd& Xval,
                       const Eigen::VectorXd& yval, const LmConfig& cfg);

// Trained network plus the min-max scaling fitted on its training data; the
// persisted artifact for the BNN model kind.
struct MlpRegressor {
    MlpModel net;
    DatasetScaler scaler;
    std::vector<std::string> feature_names{kFeatureNames.begin(), kFeatureNames.end()};
    std::string target_name = kTargetName;

    double predict(const Eigen::VectorXd& x_celsius) const;
    Eigen::VectorXd predict_batch(const Eigen::MatrixXd& X_celsius) const;
};

struct MlpTrainResult {
    MlpRegressor regressor;
    TrainHistory history; // metrics in target units (deg C)
};

// Scales inputs and target to [-1, 1] on the train partition, runs LM with
// the test partition as the validation set, and reports history in deg C.
MlpTrainResult train_lm(const SplitDataset& data, const std::vector<int>& hidden_sizes,
                        const LmConfig& cfg);

} // namespace nf
