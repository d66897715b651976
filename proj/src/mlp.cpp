#include "nf/mlp.hpp"

#include "nf/errors.hpp"
#include "nf/rng.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nf {

long MlpModel::param_count() const {
    long n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        n += weights[l].size() + biases[l].size();
    return n;
}

MlpModel init_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed, Activation hidden) {
    if (layer_sizes.size() < 2) throw std::invalid_argument("init_mlp: need at least input and output layers");
    for (int s : layer_sizes)
        if (s < 1) throw std::invalid_argument("init_mlp: zero-size layer");

    MlpModel model;
    model.layer_sizes = layer_sizes;
    model.hidden_activation = hidden;
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const int fan_in = layer_sizes[l];
        const int fan_out = layer_sizes[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Eigen::MatrixXd W(fan_out, fan_in);
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = rng.uniform(-bound, bound);
        model.weights.push_back(std::move(W));
        model.biases.push_back(Eigen::VectorXd::Zero(fan_out));
    }
    return model;
}

namespace {

inline Eigen::VectorXd activate(const Eigen::VectorXd& z, Activation act) {
    return act == Activation::Tanh ? z.array().tanh().matrix() : z;
}

// Forward pass keeping post-activation values per layer for backprop.
struct ForwardTrace {
    std::vector<Eigen::VectorXd> activations; // activations[0] = x
    double output = 0.0;
};

ForwardTrace forward_trace(const MlpModel& model, const Eigen::VectorXd& x) {
    ForwardTrace tr;
    tr.activations.push_back(x);
    Eigen::VectorXd a = x;
    const std::size_t n_layers = model.weights.size();
    for (std::size_t l = 0; l < n_layers; ++l) {
        Eigen::VectorXd z = model.weights[l] * a + model.biases[l];
        a = (l + 1 < n_layers) ? activate(z, model.hidden_activation) : z;
        tr.activations.push_back(a);
    }
    tr.output = a[0];
    return tr;
}

} // namespace

double mlp_forward(const MlpModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.layer_sizes.front())
        throw std::invalid_argument("mlp_forward: feature vector length mismatch");
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i])) throw std::invalid_argument("mlp_forward: non-finite feature");
    return forward_trace(model, x).output;
}

Eigen::VectorXd mlp_forward_batch(const MlpModel& model, const Eigen::MatrixXd& X) {
    Eigen::VectorXd y(X.rows());
    for (Eigen::Index k = 0; k < X.rows(); ++k) y[k] = mlp_forward(model, X.row(k).transpose());
    return y;
}

Eigen::VectorXd get_params(const MlpModel& model) {
    Eigen::VectorXd theta(model.param_count());
    Eigen::Index pos = 0;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        const auto& W = model.weights[l];
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            for (Eigen::Index j = 0; j < W.cols(); ++j) theta[pos++] = W(i, j);
        const auto& b = model.biases[l];
        for (Eigen::Index i = 0; i < b.size(); ++i) theta[pos++] = b[i];
    }
    return theta;
}

void set_params(MlpModel& model, const Eigen::VectorXd& theta) {
    if (theta.size() != model.param_count())
        throw std::invalid_argument("set_params: parameter vector length mismatch");
    Eigen::Index pos = 0;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        auto& W = model.weights[l];
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = theta[pos++];
        auto& b = model.biases[l];
        for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = theta[pos++];
    }
}

JacobianResult mlp_jacobian(const MlpModel& model, const Eigen::MatrixXd& X,
                            const Eigen::VectorXd& y) {
    if (X.rows() == 0) throw std::invalid_argument("mlp_jacobian: empty batch");
    if (X.rows() != y.size()) throw std::invalid_argument("mlp_jacobian: X/y size mismatch");
    if (X.cols() != model.layer_sizes.front())
        throw std::invalid_argument("mlp_jacobian: feature count mismatch");

    const long p = model.param_count();
    JacobianResult out;
    out.residuals.resize(X.rows());
    out.jacobian.resize(X.rows(), p);

    const std::size_t n_layers = model.weights.size();
    for (Eigen::Index k = 0; k < X.rows(); ++k) {
        const ForwardTrace tr = forward_trace(model, X.row(k).transpose());
        if (!std::isfinite(tr.output))
            throw DivergenceError("mlp_jacobian: non-finite activation at sample " + std::to_string(k));
        out.residuals[k] = tr.output - y[k];

        // delta[l] = d(output)/d(pre-activation of layer l), backwards.
        std::vector<Eigen::VectorXd> delta(n_layers);
        delta[n_layers - 1] = Eigen::VectorXd::Ones(1);
        for (std::size_t l = n_layers - 1; l-- > 0;) {
            Eigen::VectorXd d = model.weights[l + 1].transpose() * delta[l + 1];
            if (model.hidden_activation == Activation::Tanh) {
                const auto& a = tr.activations[l + 1];
                d = d.cwiseProduct((1.0 - a.array().square()).matrix());
            }
            delta[l] = std::move(d);
        }

        Eigen::Index pos = 0;
        for (std::size_t l = 0; l < n_layers; ++l) {
            const auto& a_prev = tr.activations[l];
            const auto& d = delta[l];
            for (Eigen::Index i = 0; i < d.size(); ++i)
                for (Eigen::Index j = 0; j < a_prev.size(); ++j)
                    out.jacobian(k, pos++) = d[i] * a_prev[j];
            for (Eigen::Index i = 0; i < d.size(); ++i) out.jacobian(k, pos++) = d[i];
        }
    }
    return out;
}

LmTrainResult train_lm(const MlpModel& model, const Eigen::MatrixXd& Xtr,
                       const Eigen::VectorXd& ytr, const Eigen::MatrixXd& Xval,
                       const Eigen::VectorXd& yval, const LmConfig& cfg) {
    if (Xtr.rows() == 0 || Xval.rows() == 0)
        throw std::invalid_argument("train_lm: train and validation sets must be non-empty");
    if (!(cfg.lambda0 > 0.0) || !(cfg.lambda_up > 1.0) || !(cfg.lambda_down > 0.0) ||
        !(cfg.lambda_down < 1.0) || cfg.max_iters < 1 || cfg.val_patience < 1)
        throw std::invalid_argument("train_lm: invalid LM configuration");

    LmTrainResult result;
    result.model = model;
    MlpModel current = model;

    auto sse = [](const MlpModel& m, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
        return (mlp_forward_batch(m, X) - y).squaredNorm();
    };

    double train_sse = sse(current, Xtr, ytr);
    if (!std::isfinite(train_sse)) throw DivergenceError("train_lm: non-finite initial SSE");
    double best_val_sse = sse(current, Xval, yval);
    result.model = current;

    double lambda = cfg.lambda0;
    int stalls_since_improve = 0;
    const auto n_train = static_cast<double>(Xtr.rows());
    result.history.stop = StopReason::Completed;

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        const JacobianResult jr = mlp_jacobian(current, Xtr, ytr);
        const Eigen::VectorXd grad = jr.jacobian.transpose() * jr.residuals;
        if (grad.norm() < cfg.grad_tol) {
            result.history.stop = StopReason::GradientTolerance;
            break;
        }
        Eigen::MatrixXd jtj(jr.jacobian.cols(), jr.jacobian.cols());
        jtj.setZero();
        jtj.selfadjointView<Eigen::Lower>().rankUpdate(jr.jacobian.transpose());

        bool accepted = false;
        while (!accepted) {
            Eigen::MatrixXd damped = jtj.selfadjointView<Eigen::Lower>();
            damped.diagonal().array() += lambda;
            const Eigen::VectorXd delta = damped.ldlt().solve(-grad);

            MlpModel candidate = current;
            set_params(candidate, get_params(current) + delta);
            const double cand_sse = sse(candidate, Xtr, ytr);
            if (!std::isfinite(cand_sse)) throw DivergenceError("train_lm: non-finite SSE");

            if (cand_sse < train_sse) {
                accepted = true;
                current = std::move(candidate);
                train_sse = cand_sse;
                lambda *= cfg.lambda_down;
            } else {
                lambda *= cfg.lambda_up;
                if (lambda > cfg.lambda_max) break;
            }
        }
        if (!accepted) {
            result.history.stop = StopReason::Stalled;
            break;
        }

        EpochMetrics em;
        em.train_mse = train_sse / n_train;
        em.train_rmse = std::sqrt(em.train_mse);
        const double val_sse = sse(current, Xval, yval);
        em.test_mse = val_sse / static_cast<double>(Xval.rows());
        em.test_rmse = std::sqrt(*em.test_mse);
        result.history.epochs.push_back(em);

        if (val_sse < best_val_sse) {
            best_val_sse = val_sse;
            result.model = current;
            stalls_since_improve = 0;
        } else if (++stalls_since_improve >= cfg.val_patience) {
            result.history.stop = StopReason::ValidationPatience;
            break;
        }
    }
    return result;
}

double MlpRegressor::predict(const Eigen::VectorXd& x_celsius) const {
    Eigen::VectorXd u(x_celsius.size());
    for (Eigen::Index j = 0; j < x_celsius.size(); ++j)
        u[j] = scaler.features[static_cast<std::size_t>(j)].apply(x_celsius[j]);
    return scaler.target.invert(mlp_forward(net, u));
}

Eigen::VectorXd MlpRegressor::predict_batch(const Eigen::MatrixXd& X_celsius) const {
    Eigen::VectorXd y(X_celsius.rows());
    for (Eigen::Index k = 0; k < X_celsius.rows(); ++k) y[k] = predict(X_celsius.row(k).transpose());
    return y;
}

MlpTrainResult train_lm(const SplitDataset& data, const std::vector<int>& hidden_sizes,
                        const LmConfig& cfg) {
    if (data.train.empty() || data.test.empty())
        throw std::invalid_argument("train_lm: train and test partitions must be non-empty");
    if (hidden_sizes.empty()) throw std::invalid_argument("train_lm: need at least one hidden layer");

    std::vector<int> sizes;
    sizes.push_back(3);
    for (int h : hidden_sizes) sizes.push_back(h);
    sizes.push_back(1);

    MlpTrainResult out;
    out.regressor.scaler = fit_scaler(data.train);
    const Eigen::MatrixXd Xtr = out.regressor.scaler.apply_features(data.train.features());
    const Eigen::VectorXd ytr = out.regressor.scaler.apply_target(data.train.targets());
    const Eigen::MatrixXd Xval = out.regressor.scaler.apply_features(data.test.features());
    const Eigen::VectorXd yval = out.regressor.scaler.apply_target(data.test.targets());

    const MlpModel init = init_mlp(sizes, cfg.seed);
    LmTrainResult lm = train_lm(init, Xtr, ytr, Xval, yval, cfg);
    out.regressor.net = std::move(lm.model);

    // History back to target units: scaled-to-Celsius residuals differ by the
    // constant factor span/2, so MSE scales by its square.
    const double half_span = (out.regressor.scaler.target.hi - out.regressor.scaler.target.lo) / 2.0;
    const double f2 = half_span * half_span;
    out.history = std::move(lm.history);
    for (auto& em : out.history.epochs) {
        em.train_mse *= f2;
        em.train_rmse = std::sqrt(em.train_mse);
        if (em.test_mse) {
            *em.test_mse *= f2;
            em.test_rmse = std::sqrt(*em.test_mse);
        }
    }
    return out;
}

} // namespace nf
