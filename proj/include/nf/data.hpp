#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nf {

// One daily record. Temperatures and dew point in degrees Celsius.
struct Record {
    std::string date; // ISO-8601 YYYY-MM-DD
    double tmin = 0.0;
    double tmax = 0.0;
    double tmean = 0.0;
    double dpt = 0.0;
};

struct Dataset {
    std::vector<Record> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }

    // N x 3 feature matrix (tmin, tmax, tmean) and target vector (dpt).
    Eigen::MatrixXd features() const;
    Eigen::VectorXd targets() const;
};

inline constexpr const char* kCsvHeader = "date,tmin_c,tmax_c,tmean_c,dpt_c";
inline const std::array<std::string, 3> kFeatureNames = {"tmin_c", "tmax_c", "tmean_c"};
inline const std::string kTargetName = "dpt_c";

// Seeded disjoint train/test partition of a dataset.
struct SplitDataset {
    Dataset train;
    Dataset test;
    std::uint64_t seed = 0;
    double fraction = 0.65;
};

// Pearson r is absent when either vector has zero variance.
struct Metrics {
    double mse = 0.0;
    double rmse = 0.0;
    std::optional<double> r;
};

// Shortest decimal text that round-trips the double exactly; used by every
// CSV writer so seeded runs emit byte-identical files.
std::string format_double(double v);

// Parses the exact schema `date,tmin_c,tmax_c,tmean_c,dpt_c`. Rows violating
// tmin <= tmean <= tmax load fine but append a message to `warnings`.
Dataset load_csv(const std::string& path, std::vector<std::string>* warnings = nullptr);

void write_csv(const Dataset& ds, const std::string& path);

// Seeded Fisher-Yates shuffle, then prefix split with |train| = round(f * N).
SplitDataset split_random(const Dataset& ds, double fraction, std::uint64_t seed);

Metrics compute_metrics(const Eigen::VectorXd& pred, const Eigen::VectorXd& actual);

// Dew point from air temperature (deg C) and relative humidity (percent),
// Magnus approximation with a = 17.27, b = 237.7 deg C.
double magnus_dew_point(double t_c, double rh_percent);

// Synthetic continental-station benchmark: annual tmean sinusoid (mean 12,
// amplitude 14 deg C) plus AR(1) weather, seasonal diurnal range, seasonal
// relative humidity in [20, 95] percent, dew point via Magnus plus
// observation noise of sd noise_sd. Dates start 1998-01-01.
Dataset gen_synthetic(long n_days, std::uint64_t seed, double noise_sd);

// Same stream, but also returns the relative humidity series that fed the
// Magnus formula (one entry per record).
struct SyntheticTrace {
    Dataset dataset;
    std::vector<double> rh;
};
SyntheticTrace gen_synthetic_traced(long n_days, std::uint64_t seed, double noise_sd);

// Affine map of [lo, hi] onto [-1, 1].
struct AffineScaler {
    double lo = 0.0;
    double hi = 1.0;

    double apply(double x) const { return -1.0 + 2.0 * (x - lo) / (hi - lo); }
    double invert(double u) const { return lo + (u + 1.0) * 0.5 * (hi - lo); }
};

// Per-feature plus target scalers fitted on one dataset (train only; callers
// must not refit on test data).
struct DatasetScaler {
    std::array<AffineScaler, 3> features;
    AffineScaler target;

    Eigen::MatrixXd apply_features(const Eigen::MatrixXd& X) const;
    Eigen::VectorXd apply_target(const Eigen::VectorXd& y) const;
    Eigen::VectorXd invert_target(const Eigen::VectorXd& u) const;
};

// Throws ScaleError naming the feature if any column (or the target) is
// constant.
DatasetScaler fit_scaler(const Dataset& ds);

} // namespace nf
