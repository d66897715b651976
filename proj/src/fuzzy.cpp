#include "nf/fuzzy.hpp"

#include "nf/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace nf {

namespace {
constexpr double kDegenerateSumFloor = 1e-300;
// Full width at half maximum of a Gaussian is 2 sqrt(2 ln 2) sigma.
const double kFwhmFactor = 2.0 * std::sqrt(2.0 * std::log(2.0));
} // namespace

double mf_eval(const GaussianMf& mf, double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("mf_eval: x must be finite");
    if (!(mf.sigma > 0.0) || !std::isfinite(mf.sigma))
        throw std::invalid_argument("mf_eval: sigma must be positive and finite");
    const double d = x - mf.center;
    return std::exp(-(d * d) / (2.0 * mf.sigma * mf.sigma));
}

std::vector<GaussianMf> grid_partition(double lo, double hi, int k) {
    if (!(lo < hi)) throw std::invalid_argument("grid_partition: lo must be < hi");
    if (k < 2) throw std::invalid_argument("grid_partition: need at least 2 membership functions");
    const double spacing = (hi - lo) / static_cast<double>(k - 1);
    const double sigma = spacing / kFwhmFactor;
    std::vector<GaussianMf> mfs(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        mfs[static_cast<std::size_t>(i)] = {lo + spacing * static_cast<double>(i), sigma};
    }
    mfs.back().center = hi; // exact endpoint, no accumulation error
    return mfs;
}

long AnfisModel::rule_count() const {
    long r = 1;
    for (const auto& p : inputs) r *= static_cast<long>(p.mfs.size());
    return r;
}

void validate_model(const AnfisModel& model) {
    if (model.inputs.empty()) throw std::invalid_argument("model has no inputs");
    for (const auto& p : model.inputs) {
        if (p.mfs.empty()) throw std::invalid_argument("input '" + p.name + "' has no membership functions");
        if (!(p.lo < p.hi)) throw std::invalid_argument("input '" + p.name + "' has lo >= hi");
        for (std::size_t i = 0; i < p.mfs.size(); ++i) {
            if (!(p.mfs[i].sigma > 0.0))
                throw std::invalid_argument("input '" + p.name + "' has a non-positive sigma");
            if (i > 0 && !(p.mfs[i - 1].center < p.mfs[i].center))
                throw std::invalid_argument("input '" + p.name + "' centers are not strictly increasing");
        }
    }
    const long r = model.rule_count();
    if (model.consequents.rows() != r || model.consequents.cols() != model.input_count() + 1)
        throw std::invalid_argument("consequent matrix shape does not match the rule grid");
}

std::vector<int> mf_counts_of(const AnfisModel& model) {
    std::vector<int> counts;
    counts.reserve(model.inputs.size());
    for (const auto& p : model.inputs) counts.push_back(static_cast<int>(p.mfs.size()));
    return counts;
}

long rule_flat_index(const std::vector<int>& mf_counts, const std::vector<int>& tuple) {
    if (tuple.size() != mf_counts.size())
        throw std::invalid_argument("rule index tuple length does not match input count");
    long flat = 0;
    for (std::size_t j = 0; j < mf_counts.size(); ++j) {
        if (tuple[j] < 0 || tuple[j] >= mf_counts[j])
            throw std::invalid_argument("rule index out of range");
        flat = flat * mf_counts[j] + tuple[j];
    }
    return flat;
}

std::vector<int> rule_index_tuple(const std::vector<int>& mf_counts, long flat) {
    std::vector<int> tuple(mf_counts.size(), 0);
    for (std::size_t j = mf_counts.size(); j-- > 0;) {
        tuple[j] = static_cast<int>(flat % mf_counts[j]);
        flat /= mf_counts[j];
    }
    if (flat != 0) throw std::invalid_argument("flat rule index out of range");
    return tuple;
}

Eigen::VectorXd firing_strengths(const AnfisModel& model, const Eigen::VectorXd& x) {
    const int n = model.input_count();
    if (x.size() != n) throw std::invalid_argument("firing_strengths: feature vector length mismatch");
    for (int j = 0; j < n; ++j)
        if (!std::isfinite(x[j])) throw std::invalid_argument("firing_strengths: non-finite feature");

    // Evaluate every MF once, then form the products by walking the grid in
    // row-major order (innermost input varies fastest).
    std::vector<std::vector<double>> degrees(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const auto& mfs = model.inputs[static_cast<std::size_t>(j)].mfs;
        degrees[static_cast<std::size_t>(j)].reserve(mfs.size());
        for (const auto& mf : mfs) degrees[static_cast<std::size_t>(j)].push_back(mf_eval(mf, x[j]));
    }

    const long r = model.rule_count();
    Eigen::VectorXd w(r);
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (long i = 0; i < r; ++i) {
        double prod = 1.0;
        for (int j = 0; j < n; ++j) prod *= degrees[static_cast<std::size_t>(j)][static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
        w[i] = prod;
        for (int j = n - 1; j >= 0; --j) {
            auto& ij = idx[static_cast<std::size_t>(j)];
            if (++ij < static_cast<int>(model.inputs[static_cast<std::size_t>(j)].mfs.size())) break;
            ij = 0;
        }
    }
    return w;
}

Eigen::VectorXd normalize_strengths(const Eigen::VectorXd& w) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (!std::isfinite(w[i]) || w[i] < 0.0)
            throw std::invalid_argument("normalize_strengths: strengths must be finite and >= 0");
        sum += w[i];
    }
    if (sum < kDegenerateSumFloor)
        throw DegenerateActivationError("all firing strengths vanished (sum < 1e-300)");
    return w / sum;
}

double rule_output(const Eigen::VectorXd& consequent_row, const Eigen::VectorXd& x) {
    if (consequent_row.size() != x.size() + 1)
        throw std::invalid_argument("rule_output: consequent row must have feature count + 1 entries");
    return consequent_row.head(x.size()).dot(x) + consequent_row[x.size()];
}

double anfis_predict(const AnfisModel& model, const Eigen::VectorXd& x) {
    const Eigen::VectorXd wbar = normalize_strengths(firing_strengths(model, x));
    const long r = model.rule_count();
    double y = 0.0;
    for (long i = 0; i < r; ++i) {
        const double f = model.consequents.row(i).head(x.size()).dot(x) + model.consequents(i, x.size());
        y += wbar[i] * f;
    }
    return y;
}

Eigen::VectorXd anfis_predict_batch(const AnfisModel& model, const Eigen::MatrixXd& X) {
    Eigen::VectorXd y(X.rows());
    for (Eigen::Index k = 0; k < X.rows(); ++k) y[k] = anfis_predict(model, X.row(k).transpose());
    return y;
}

} // namespace nf
