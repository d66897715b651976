#include "nf/data.hpp"

#include "nf/errors.hpp"
#include "nf/rng.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace nf {

Eigen::MatrixXd Dataset::features() const {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(records.size()), 3);
    for (std::size_t i = 0; i < records.size(); ++i) {
        X(static_cast<Eigen::Index>(i), 0) = records[i].tmin;
        X(static_cast<Eigen::Index>(i), 1) = records[i].tmax;
        X(static_cast<Eigen::Index>(i), 2) = records[i].tmean;
    }
    return X;
}

Eigen::VectorXd Dataset::targets() const {
    Eigen::VectorXd y(static_cast<Eigen::Index>(records.size()));
    for (std::size_t i = 0; i < records.size(); ++i) y[static_cast<Eigen::Index>(i)] = records[i].dpt;
    return y;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_double(const std::string& field, const char* column, std::size_t line_no) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse " + column + " value '" +
                         field + "'");
    }
    return value;
}

bool looks_like_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (s[i] < '0' || s[i] > '9') return false;
    return true;
}

} // namespace

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

Dataset load_csv(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw SchemaError("'" + path + "': empty file, expected header " + kCsvHeader);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_fields(line);
    const auto expected = split_fields(kCsvHeader);
    for (const auto& col : expected) {
        if (std::find(header.begin(), header.end(), col) == header.end())
            throw SchemaError("'" + path + "': missing column '" + col + "' (expected header " +
                              kCsvHeader + ")");
    }
    if (header != expected)
        throw SchemaError("'" + path + "': header mismatch, expected " + kCsvHeader);

    Dataset ds;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 5)
            throw ParseError("line " + std::to_string(line_no) + ": expected 5 fields, got " +
                             std::to_string(fields.size()));
        Record rec;
        rec.date = fields[0];
        if (!looks_like_iso_date(rec.date))
            throw ParseError("line " + std::to_string(line_no) + ": date '" + rec.date +
                             "' is not YYYY-MM-DD");
        rec.tmin = parse_double(fields[1], "tmin_c", line_no);
        rec.tmax = parse_double(fields[2], "tmax_c", line_no);
        rec.tmean = parse_double(fields[3], "tmean_c", line_no);
        rec.dpt = parse_double(fields[4], "dpt_c", line_no);
        for (double v : {rec.tmin, rec.tmax, rec.tmean, rec.dpt})
            if (!std::isfinite(v))
                throw ParseError("line " + std::to_string(line_no) + ": non-finite value");
        if (warnings && !(rec.tmin <= rec.tmean && rec.tmean <= rec.tmax))
            warnings->push_back("line " + std::to_string(line_no) +
                                ": tmin <= tmean <= tmax violated (" + format_double(rec.tmin) + ", " +
                                format_double(rec.tmean) + ", " + format_double(rec.tmax) + ")");
        ds.records.push_back(std::move(rec));
    }
    if (ds.empty()) throw ParseError("'" + path + "': no data rows");
    return ds;
}

void write_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << kCsvHeader << '\n';
    for (const auto& r : ds.records) {
        out << r.date << ',' << format_double(r.tmin) << ',' << format_double(r.tmax) << ','
            << format_double(r.tmean) << ',' << format_double(r.dpt) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

SplitDataset split_random(const Dataset& ds, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("split_random: fraction must be in (0, 1)");
    const std::size_t n = ds.size();
    if (n < 2) throw std::invalid_argument("split_random: need at least 2 records");
    const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train == n)
        throw std::invalid_argument("split_random: fraction yields an empty partition");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng.bounded(i + 1)]);

    SplitDataset split;
    split.seed = seed;
    split.fraction = fraction;
    split.train.records.reserve(n_train);
    split.test.records.reserve(n - n_train);
    for (std::size_t i = 0; i < n; ++i) {
        (i < n_train ? split.train : split.test).records.push_back(ds.records[order[i]]);
    }
    return split;
}

Metrics compute_metrics(const Eigen::VectorXd& pred, const Eigen::VectorXd& actual) {
    if (pred.size() == 0 || pred.size() != actual.size())
        throw std::invalid_argument("compute_metrics: vectors must be non-empty and equal length");
    const auto n = static_cast<double>(pred.size());
    Metrics m;
    m.mse = (pred - actual).squaredNorm() / n;
    m.rmse = std::sqrt(m.mse);

    const double mp = pred.mean();
    const double ma = actual.mean();
    const Eigen::VectorXd dp = pred.array() - mp;
    const Eigen::VectorXd da = actual.array() - ma;
    const double sp = dp.squaredNorm();
    const double sa = da.squaredNorm();
    if (sp > 0.0 && sa > 0.0) m.r = dp.dot(da) / std::sqrt(sp * sa);
    return m;
}

double magnus_dew_point(double t_c, double rh_percent) {
    constexpr double a = 17.27;
    constexpr double b = 237.7;
    const double gamma = std::log(rh_percent / 100.0) + a * t_c / (b + t_c);
    return b * gamma / (a - gamma);
}

namespace {

std::string iso_date_from_start(long day_index) {
    using namespace std::chrono;
    const sys_days start = sys_days{year{1998} / January / day{1}};
    const sys_days d = start + days{day_index};
    const year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return std::string(buf);
}

} // namespace

SyntheticTrace gen_synthetic_traced(long n_days, std::uint64_t seed, double noise_sd) {
    if (n_days < 1) throw std::invalid_argument("gen_synthetic: n_days must be >= 1");
    if (noise_sd < 0.0) throw std::invalid_argument("gen_synthetic: noise_sd must be >= 0");

    constexpr double kYear = 365.25;
    constexpr double kTwoPi = 2.0 * M_PI;
    // Annual cycle peaks in mid July (day-of-year ~196).
    constexpr double kPeakDay = 196.0;

    Rng rng(seed);
    SyntheticTrace out;
    out.dataset.records.reserve(static_cast<std::size_t>(n_days));
    out.rh.reserve(static_cast<std::size_t>(n_days));

    double anomaly = 0.0; // AR(1) temperature anomaly
    for (long d = 0; d < n_days; ++d) {
        const double phase = kTwoPi * (static_cast<double>(d) - kPeakDay) / kYear;
        const double season = std::cos(phase); // +1 mid-summer, -1 mid-winter

        // The AR(1) state is clamped: unbounded Gaussian tails would scatter
        // isolated days far outside the otherwise-covered range.
        anomaly = std::clamp(0.75 * anomaly + rng.normal(0.0, 2.2), -7.5, 7.5);
        const double tmean = 12.0 + 14.0 * season + anomaly;

        // Night and day excursions are independent bounded uniforms, so the
        // feature cloud is a sharp-edged slab around the diagonal rather
        // than one with a thin Gaussian fringe that only a handful of
        // samples would cover. tmean is not the tmin/tmax midpoint.
        const double half_down = rng.uniform(0.8, 14.0);
        const double half_up = rng.uniform(0.8, 14.0);

        // Humid winters, dry summers; cool spells humid, hot spells dry out
        // nonlinearly; wide-range (clear-sky) days are drier, more so in
        // summer, with diminishing returns; afternoon-skewed days run
        // moister, less so during warm spells.
        const double range_dev = half_down + half_up - 14.8;
        const double asym = (half_up - half_down) / 2.0;
        double rh = 57.5 - 27.0 * season - 2.2 * anomaly - 0.25 * anomaly * anomaly -
                    0.65 * range_dev * (1.0 + 0.5 * season) + 0.05 * (range_dev * range_dev - 29.0) +
                    0.8 * asym - 0.18 * asym * anomaly + rng.normal(0.0, 2.5);
        rh = std::clamp(rh, 20.0, 95.0);

        double dpt = magnus_dew_point(tmean, rh);
        if (noise_sd > 0.0) dpt += rng.normal(0.0, noise_sd);
        dpt = std::min(dpt, tmean); // saturation bound survives observation noise

        Record rec;
        rec.date = iso_date_from_start(d);
        rec.tmean = tmean;
        rec.tmin = tmean - half_down;
        rec.tmax = tmean + half_up;
        rec.dpt = dpt;
        out.dataset.records.push_back(std::move(rec));
        out.rh.push_back(rh);
    }
    return out;
}

Dataset gen_synthetic(long n_days, std::uint64_t seed, double noise_sd) {
    return gen_synthetic_traced(n_days, seed, noise_sd).dataset;
}

Eigen::MatrixXd DatasetScaler::apply_features(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd U = X;
    for (Eigen::Index j = 0; j < 3; ++j)
        for (Eigen::Index i = 0; i < X.rows(); ++i) U(i, j) = features[static_cast<std::size_t>(j)].apply(X(i, j));
    return U;
}

Eigen::VectorXd DatasetScaler::apply_target(const Eigen::VectorXd& y) const {
    Eigen::VectorXd u(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) u[i] = target.apply(y[i]);
    return u;
}

Eigen::VectorXd DatasetScaler::invert_target(const Eigen::VectorXd& u) const {
    Eigen::VectorXd y(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) y[i] = target.invert(u[i]);
    return y;
}

DatasetScaler fit_scaler(const Dataset& ds) {
    if (ds.empty()) throw std::invalid_argument("fit_scaler: dataset is empty");
    const Eigen::MatrixXd X = ds.features();
    const Eigen::VectorXd y = ds.targets();
    DatasetScaler s;
    for (Eigen::Index j = 0; j < 3; ++j) {
        const double lo = X.col(j).minCoeff();
        const double hi = X.col(j).maxCoeff();
        if (!(lo < hi)) throw ScaleError("feature '" + kFeatureNames[static_cast<std::size_t>(j)] + "' is constant");
        s.features[static_cast<std::size_t>(j)] = {lo, hi};
    }
    const double ylo = y.minCoeff();
    const double yhi = y.maxCoeff();
    if (!(ylo < yhi)) throw ScaleError("target '" + kTargetName + "' is constant");
    s.target = {ylo, yhi};
    return s;
}

} // namespace nf
