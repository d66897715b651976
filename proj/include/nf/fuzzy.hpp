#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace nf {

// One Gaussian membership curve on an input axis. Units follow the axis
// (degrees Celsius for the temperature features).
struct GaussianMf {
    double center = 0.0;
    double sigma = 1.0;
};

// Membership degree exp(-(x - center)^2 / (2 sigma^2)), in (0, 1].
double mf_eval(const GaussianMf& mf, double x);

// One input axis with its ordered membership functions. Centers are strictly
// increasing and lie in [lo, hi].
struct InputPartition {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<GaussianMf> mfs;

    double span() const { return hi - lo; }
};

// k Gaussians with centers evenly spaced on [lo, hi] (endpoints included) and
// sigma = spacing / (2 sqrt(2 ln 2)), so adjacent curves cross at degree 0.5.
std::vector<GaussianMf> grid_partition(double lo, double hi, int k);

// Takagi-Sugeno model over the full Cartesian rule grid: every combination of
// one MF per input is a rule, and each rule carries a linear consequent row
// (p, q, r, s) for three inputs, i.e. n coefficients plus a constant.
struct AnfisModel {
    std::vector<InputPartition> inputs;
    Eigen::MatrixXd consequents; // rule_count() x (input_count() + 1)

    int input_count() const { return static_cast<int>(inputs.size()); }
    long rule_count() const;
};

// Throws std::invalid_argument if partitions or consequent dimensions are
// inconsistent with the rule grid.
void validate_model(const AnfisModel& model);

// Row-major flat index <-> per-input MF index tuple over the rule grid.
long rule_flat_index(const std::vector<int>& mf_counts, const std::vector<int>& tuple);
std::vector<int> rule_index_tuple(const std::vector<int>& mf_counts, long flat);
std::vector<int> mf_counts_of(const AnfisModel& model);

// Layer 1-2: per-rule firing strength, the product of the rule's membership
// degrees. Strictly positive for finite inputs.
Eigen::VectorXd firing_strengths(const AnfisModel& model, const Eigen::VectorXd& x);

// Layer 3: w / sum(w). Throws DegenerateActivationError when the sum falls
// below the degenerate-sum floor (1e-300).
Eigen::VectorXd normalize_strengths(const Eigen::VectorXd& w);

// One rule's linear output: dot(coeffs[0..n-1], x) + coeffs[n].
double rule_output(const Eigen::VectorXd& consequent_row, const Eigen::VectorXd& x);

// Layers 4-5: weighted average of rule outputs, sum_i wbar_i * f_i.
double anfis_predict(const AnfisModel& model, const Eigen::VectorXd& x);

// Row-per-sample convenience over anfis_predict.
Eigen::VectorXd anfis_predict_batch(const AnfisModel& model, const Eigen::MatrixXd& X);

} // namespace nf
