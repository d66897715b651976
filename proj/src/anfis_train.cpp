#include "nf/anfis_train.hpp"

#include "nf/errors.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nf {

AnfisModel build_initial_anfis(const Dataset& train, int mf_count) {
    if (train.empty()) throw std::invalid_argument("build_initial_anfis: empty training set");
    if (mf_count < 1) throw std::invalid_argument("build_initial_anfis: mf_count must be >= 1");
    const Eigen::MatrixXd X = train.features();

    AnfisModel model;
    for (Eigen::Index j = 0; j < 3; ++j) {
        double lo = X.col(j).minCoeff();
        double hi = X.col(j).maxCoeff();
        if (!(lo < hi))
            throw std::invalid_argument("build_initial_anfis: feature '" +
                                        kFeatureNames[static_cast<std::size_t>(j)] + "' is constant");
        const double pad = 0.01 * (hi - lo);
        lo -= pad;
        hi += pad;
        InputPartition part;
        part.name = kFeatureNames[static_cast<std::size_t>(j)];
        part.lo = lo;
        part.hi = hi;
        if (mf_count == 1) {
            part.mfs = {GaussianMf{(lo + hi) / 2.0, (hi - lo) / 2.0}};
        } else {
            part.mfs = grid_partition(lo, hi, mf_count);
        }
        model.inputs.push_back(std::move(part));
    }
    model.consequents = Eigen::MatrixXd::Zero(model.rule_count(), model.input_count() + 1);
    return model;
}

namespace {

// Design matrix of the consequent least-squares problem. Columns come in
// rule-major blocks of (x1..xn, 1) scaled by the rule's normalized strength.
Eigen::MatrixXd lse_design(const AnfisModel& model, const Eigen::MatrixXd& X) {
    const long r = model.rule_count();
    const int n = model.input_count();
    const Eigen::Index cols = r * (n + 1);
    Eigen::MatrixXd A(X.rows(), cols);
    for (Eigen::Index k = 0; k < X.rows(); ++k) {
        const Eigen::VectorXd x = X.row(k).transpose();
        Eigen::VectorXd wbar;
        try {
            wbar = normalize_strengths(firing_strengths(model, x));
        } catch (const DegenerateActivationError&) {
            throw TrainingDataError("sample " + std::to_string(k) +
                                    " activates no rule (degenerate firing strengths)");
        }
        for (long i = 0; i < r; ++i) {
            const Eigen::Index base = i * (n + 1);
            for (int j = 0; j < n; ++j) A(k, base + j) = wbar[i] * x[j];
            A(k, base + n) = wbar[i];
        }
    }
    return A;
}

} // namespace

Eigen::MatrixXd lse_consequents(const AnfisModel& model, const Eigen::MatrixXd& X,
                                const Eigen::VectorXd& y) {
    if (X.rows() == 0) throw std::invalid_argument("lse_consequents: empty sample set");
    if (X.rows() != y.size()) throw std::invalid_argument("lse_consequents: X/y size mismatch");
    if (X.cols() != model.input_count())
        throw std::invalid_argument("lse_consequents: feature count mismatch");

    const Eigen::MatrixXd A = lse_design(model, X);
    const int n = model.input_count();
    const long r = model.rule_count();

    // Two-stage orthogonal factorization: a plain QR reduces the tall system,
    // then a complete orthogonal decomposition of the small triangular factor
    // yields the minimum-norm solution under the rank tolerance. The min-norm
    // solution of the reduced square problem equals that of the original.
    Eigen::VectorXd theta;
    if (A.rows() >= A.cols()) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
        const Eigen::MatrixXd R =
            qr.matrixQR().topRows(A.cols()).triangularView<Eigen::Upper>();
        const Eigen::VectorXd qty =
            (qr.householderQ().transpose() * y).head(A.cols());
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(R.rows(), R.cols());
        cod.setThreshold(1e-10);
        cod.compute(R);
        theta = cod.solve(qty);
    } else {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A.rows(), A.cols());
        cod.setThreshold(1e-10);
        cod.compute(A);
        theta = cod.solve(y);
    }

    Eigen::MatrixXd consequents(r, n + 1);
    for (long i = 0; i < r; ++i) consequents.row(i) = theta.segment(i * (n + 1), n + 1).transpose();
    return consequents;
}

PremiseGradients premise_gradients(const AnfisModel& model, const Eigen::MatrixXd& X,
                                   const Eigen::VectorXd& y) {
    if (X.rows() == 0) throw std::invalid_argument("premise_gradients: empty batch");
    if (X.rows() != y.size()) throw std::invalid_argument("premise_gradients: X/y size mismatch");
    if (X.cols() != model.input_count())
        throw std::invalid_argument("premise_gradients: feature count mismatch");
    validate_model(model);

    const int n = model.input_count();
    const long r = model.rule_count();
    const auto counts = mf_counts_of(model);

    PremiseGradients g;
    g.d_center.resize(static_cast<std::size_t>(n));
    g.d_sigma.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        g.d_center[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(counts[static_cast<std::size_t>(j)]), 0.0);
        g.d_sigma[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(counts[static_cast<std::size_t>(j)]), 0.0);
    }

    // Per-sample: dyhat/dw_i = (f_i - yhat)/S. A membership parameter of MF m
    // on input j touches exactly the rules whose tuple selects (j, m), each
    // through dw_i/dmu = w_i/mu. Accumulate t[j][m] = sum over those rules of
    // w_i (f_i - yhat), then scale by the Gaussian's own derivative.
    std::vector<std::vector<double>> t(static_cast<std::size_t>(n));
    std::vector<int> tuple(static_cast<std::size_t>(n), 0);
    for (Eigen::Index k = 0; k < X.rows(); ++k) {
        const Eigen::VectorXd x = X.row(k).transpose();
        const Eigen::VectorXd w = firing_strengths(model, x);
        const double S = w.sum();
        if (S < 1e-300)
            throw DegenerateActivationError("premise_gradients: sample " + std::to_string(k) +
                                            " activates no rule");
        double yhat = 0.0;
        Eigen::VectorXd f(r);
        for (long i = 0; i < r; ++i) {
            f[i] = model.consequents.row(i).head(n).dot(x) + model.consequents(i, n);
            yhat += w[i] * f[i];
        }
        yhat /= S;
        const double err = yhat - y[k];

        for (int j = 0; j < n; ++j) t[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(counts[static_cast<std::size_t>(j)]), 0.0);
        std::fill(tuple.begin(), tuple.end(), 0);
        for (long i = 0; i < r; ++i) {
            const double contrib = w[i] * (f[i] - yhat);
            for (int j = 0; j < n; ++j) t[static_cast<std::size_t>(j)][static_cast<std::size_t>(tuple[static_cast<std::size_t>(j)])] += contrib;
            for (int j = n - 1; j >= 0; --j) {
                auto& ij = tuple[static_cast<std::size_t>(j)];
                if (++ij < counts[static_cast<std::size_t>(j)]) break;
                ij = 0;
            }
        }

        for (int j = 0; j < n; ++j) {
            const auto& mfs = model.inputs[static_cast<std::size_t>(j)].mfs;
            for (std::size_t m = 0; m < mfs.size(); ++m) {
                const double dc = x[j] - mfs[m].center;
                const double s2 = mfs[m].sigma * mfs[m].sigma;
                const double common = 2.0 * err * t[static_cast<std::size_t>(j)][m] / S;
                g.d_center[static_cast<std::size_t>(j)][m] += common * dc / s2;
                g.d_sigma[static_cast<std::size_t>(j)][m] += common * dc * dc / (s2 * mfs[m].sigma);
            }
        }
    }
    return g;
}

AnfisTrainResult train_anfis(const SplitDataset& data, const AnfisTrainConfig& cfg) {
    if (data.train.empty()) throw std::invalid_argument("train_anfis: empty training set");
    if (cfg.epochs < 1) throw std::invalid_argument("train_anfis: epochs must be >= 1");
    if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("train_anfis: learning_rate must be > 0");
    if (cfg.mf_count < 2) throw std::invalid_argument("train_anfis: mf_count must be >= 2");

    const Eigen::MatrixXd Xtr = data.train.features();
    const Eigen::VectorXd ytr = data.train.targets();
    Eigen::MatrixXd Xte;
    Eigen::VectorXd yte;
    const bool with_test = cfg.record_test_metrics && !data.test.empty();
    if (with_test) {
        Xte = data.test.features();
        yte = data.test.targets();
    }

    AnfisModel model = build_initial_anfis(data.train, cfg.mf_count);
    const auto n_train = static_cast<double>(Xtr.rows());

    AnfisTrainResult result;
    result.model = model;
    double best_mse = std::numeric_limits<double>::infinity();

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        model.consequents = lse_consequents(model, Xtr, ytr);

        EpochMetrics em;
        const Metrics train_m = compute_metrics(anfis_predict_batch(model, Xtr), ytr);
        em.train_mse = train_m.mse;
        em.train_rmse = train_m.rmse;
        if (with_test) {
            const Metrics test_m = compute_metrics(anfis_predict_batch(model, Xte), yte);
            em.test_mse = test_m.mse;
            em.test_rmse = test_m.rmse;
        }
        result.history.epochs.push_back(em);
        if (!std::isfinite(em.train_mse))
            throw DivergenceError("train_anfis: non-finite loss at epoch " + std::to_string(epoch));

        if (em.train_mse < best_mse) {
            best_mse = em.train_mse;
            result.model = model;
        }

        if (epoch == cfg.epochs) break;

        // One descent step on the premise parameters. The learning rate is
        // specified on unit-span features and per-sample mean error, hence
        // the span^2 / N factor on the raw SSE gradient.
        const PremiseGradients grad = premise_gradients(model, Xtr, ytr);
        for (int j = 0; j < model.input_count(); ++j) {
            auto& part = model.inputs[static_cast<std::size_t>(j)];
            const double span = part.span();
            const double step = cfg.learning_rate * span * span / n_train;
            const double sigma_floor = cfg.sigma_floor_rel * span;
            for (std::size_t m = 0; m < part.mfs.size(); ++m) {
                part.mfs[m].center -= step * grad.d_center[static_cast<std::size_t>(j)][m];
                part.mfs[m].sigma -= step * grad.d_sigma[static_cast<std::size_t>(j)][m];
                part.mfs[m].sigma = std::max(part.mfs[m].sigma, sigma_floor);
            }
            // GD can reorder centers; restore the ordered-partition invariant.
            // Consequents are refit from scratch next epoch, so rule identity
            // is re-established there.
            std::sort(part.mfs.begin(), part.mfs.end(),
                      [](const GaussianMf& a, const GaussianMf& b) { return a.center < b.center; });
            for (std::size_t m = 1; m < part.mfs.size(); ++m) {
                if (!(part.mfs[m - 1].center < part.mfs[m].center))
                    part.mfs[m].center = part.mfs[m - 1].center + 1e-9 * span;
            }
        }
    }
    return result;
}

} // namespace nf
