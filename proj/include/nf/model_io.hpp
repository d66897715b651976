#pragma once

#include "nf/fuzzy.hpp"
#include "nf/mlp.hpp"

#include <string>
#include <variant>

namespace nf {

// Persisted model artifact of either kind. JSON documents with a schema
// version; doubles round-trip exactly, so loaded models predict within
// 1e-12 of the in-memory originals.
using Regressor = std::variant<AnfisModel, MlpRegressor>;

void save_model(const AnfisModel& model, const std::string& path);
void save_model(const MlpRegressor& model, const std::string& path);
void save_model(const Regressor& model, const std::string& path);

Regressor load_model(const std::string& path);

double predict(const Regressor& model, const Eigen::VectorXd& x);
Eigen::VectorXd predict_batch(const Regressor& model, const Eigen::MatrixXd& X);

// "anfis" or "bnn".
std::string model_kind(const Regressor& model);

} // namespace nf
