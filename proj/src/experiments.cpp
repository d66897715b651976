#include "nf/experiments.hpp"

#include "nf/errors.hpp"
#include "nf/svg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nf {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<std::pair<double, double>> scatter_points(const Eigen::VectorXd& pred,
                                                      const Eigen::VectorXd& actual) {
    constexpr std::size_t kCap = 5000;
    const auto n = static_cast<std::size_t>(pred.size());
    const std::size_t stride = n > kCap ? (n + kCap - 1) / kCap : 1;
    std::vector<std::pair<double, double>> pts;
    pts.reserve(n / stride + 1);
    for (std::size_t i = 0; i < n; i += stride)
        pts.emplace_back(actual[static_cast<Eigen::Index>(i)], pred[static_cast<Eigen::Index>(i)]);
    return pts;
}

// Runs one cell body, capturing any error instead of propagating it.
template <typename F>
void run_cell(SweepCell& cell, F&& body) {
    const auto t0 = Clock::now();
    try {
        body(cell);
    } catch (const std::exception& e) {
        cell.error = e.what();
        cell.train.reset();
        cell.test.reset();
    }
    cell.wall_ms = elapsed_ms(t0);
}

void fill_anfis_cell(SweepCell& cell, const SplitDataset& split, const AnfisTrainConfig& cfg) {
    const AnfisTrainResult fit = train_anfis(split, cfg);
    const Eigen::VectorXd train_pred = anfis_predict_batch(fit.model, split.train.features());
    const Eigen::VectorXd test_pred = anfis_predict_batch(fit.model, split.test.features());
    cell.train = compute_metrics(train_pred, split.train.targets());
    cell.test = compute_metrics(test_pred, split.test.targets());
    cell.rule_count = fit.model.rule_count();
    cell.scatter = scatter_points(test_pred, split.test.targets());
    cell.partitions = fit.model.inputs;
}

std::string fmt_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    std::string s(buf);
    // trim float noise for integral axis values
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        s = buf;
    }
    return s;
}

std::string fmt_metric(std::optional<double> v) {
    if (!v || !std::isfinite(*v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", *v);
    return buf;
}

} // namespace

SweepReport sweep_mf_counts(const Dataset& ds, const std::vector<int>& counts,
                            const AnfisTrainConfig& cfg, double split_fraction) {
    if (counts.empty()) throw std::invalid_argument("sweep_mf_counts: empty count list");
    for (int k : counts)
        if (k < 2 || k > 8)
            throw std::invalid_argument("sweep_mf_counts: counts must lie in [2, 8], got " +
                                        std::to_string(k));

    SweepReport report;
    report.name = "mf_sweep";
    report.axis_label = "mf_count";
    report.seed = cfg.seed;
    const SplitDataset split = split_random(ds, split_fraction, cfg.seed);

    for (int k : counts) {
        SweepCell cell;
        cell.axis = report.axis_label;
        cell.value = k;
        run_cell(cell, [&](SweepCell& c) {
            AnfisTrainConfig cell_cfg = cfg;
            cell_cfg.mf_count = k;
            fill_anfis_cell(c, split, cell_cfg);
        });
        report.cells.push_back(std::move(cell));
    }
    return report;
}

SweepReport sweep_iterations(const Dataset& ds, const std::vector<int>& checkpoints,
                             const AnfisTrainConfig& cfg, double split_fraction) {
    if (checkpoints.empty()) throw std::invalid_argument("sweep_iterations: empty checkpoint list");
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 1)
            throw std::invalid_argument("sweep_iterations: checkpoints must be >= 1");
        if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
            throw std::invalid_argument("sweep_iterations: checkpoints must be strictly increasing");
    }

    SweepReport report;
    report.name = "iteration_sweep";
    report.axis_label = "epochs";
    report.seed = cfg.seed;
    const SplitDataset split = split_random(ds, split_fraction, cfg.seed);

    AnfisTrainConfig run_cfg = cfg;
    run_cfg.epochs = checkpoints.back();
    run_cfg.record_test_metrics = true;

    const auto t0 = Clock::now();
    AnfisTrainResult fit;
    try {
        fit = train_anfis(split, run_cfg);
    } catch (const std::exception& e) {
        // One run feeds every cell, so a failure marks them all.
        for (int c : checkpoints) {
            SweepCell cell;
            cell.axis = report.axis_label;
            cell.value = c;
            cell.error = e.what();
            report.cells.push_back(std::move(cell));
        }
        return report;
    }
    const double total_ms = elapsed_ms(t0);

    for (int c : checkpoints) {
        SweepCell cell;
        cell.axis = report.axis_label;
        cell.value = c;
        const EpochMetrics& em = fit.history.epochs.at(static_cast<std::size_t>(c - 1));
        Metrics train_m;
        train_m.mse = em.train_mse;
        train_m.rmse = em.train_rmse;
        cell.train = train_m;
        if (em.test_mse) {
            Metrics test_m;
            test_m.mse = *em.test_mse;
            test_m.rmse = *em.test_rmse;
            cell.test = test_m;
        }
        cell.rule_count = fit.model.rule_count();
        cell.wall_ms = total_ms * static_cast<double>(c) / static_cast<double>(checkpoints.back());
        report.cells.push_back(std::move(cell));
    }

    // Scatter and MF shapes from the completed run, attached to the last cell.
    auto& last = report.cells.back();
    const Eigen::VectorXd test_pred = anfis_predict_batch(fit.model, split.test.features());
    last.scatter = scatter_points(test_pred, split.test.targets());
    last.partitions = fit.model.inputs;
    // Pearson R for the final model's cells is not in the history; recompute
    // for the last checkpoint only (earlier cells keep MSE/RMSE snapshots).
    Metrics final_test = compute_metrics(test_pred, split.test.targets());
    if (last.test) last.test->r = final_test.r;
    return report;
}

SweepReport sweep_train_fraction(const Dataset& ds, const std::vector<double>& fractions,
                                 const AnfisTrainConfig& cfg) {
    if (fractions.empty()) throw std::invalid_argument("sweep_train_fraction: empty fraction list");
    for (double f : fractions)
        if (!(f > 0.0 && f < 1.0))
            throw std::invalid_argument("sweep_train_fraction: fractions must lie in (0, 1)");

    SweepReport report;
    report.name = "split_sweep";
    report.axis_label = "fraction";
    report.seed = cfg.seed;

    for (std::size_t i = 0; i < fractions.size(); ++i) {
        SweepCell cell;
        cell.axis = report.axis_label;
        cell.value = fractions[i];
        run_cell(cell, [&](SweepCell& c) {
            // Independent selection per fraction, like the paper's table.
            const SplitDataset split = split_random(ds, fractions[i], cfg.seed + i);
            fill_anfis_cell(c, split, cfg);
        });
        report.cells.push_back(std::move(cell));
    }
    return report;
}

SweepReport compare_scale_factors(const Dataset& ds, const std::vector<int>& anfis_counts,
                                  const std::vector<int>& bnn_scales, const CompareConfig& cfg) {
    if (anfis_counts.empty() || bnn_scales.empty())
        throw std::invalid_argument("compare_scale_factors: scale lists must be non-empty");

    SweepReport report;
    report.name = "scale_factor_comparison";
    report.axis_label = "scale factor";
    report.seed = cfg.anfis.seed;
    const SplitDataset split = split_random(ds, cfg.split_fraction, cfg.anfis.seed);

    for (int k : anfis_counts) {
        SweepCell cell;
        cell.axis = "anfis_mf";
        cell.value = k;
        run_cell(cell, [&](SweepCell& c) {
            if (k < 2 || k > 8)
                throw std::invalid_argument("mf count must lie in [2, 8], got " + std::to_string(k));
            AnfisTrainConfig cell_cfg = cfg.anfis;
            cell_cfg.mf_count = k;
            fill_anfis_cell(c, split, cell_cfg);
        });
        report.cells.push_back(std::move(cell));
    }

    for (int s : bnn_scales) {
        SweepCell cell;
        cell.axis = cfg.depth_scaling ? "bnn_depth" : "bnn_width";
        cell.value = s;
        run_cell(cell, [&](SweepCell& c) {
            std::vector<int> hidden;
            if (cfg.depth_scaling) {
                if (s < 1 || s > 4) throw std::invalid_argument("bnn depth must lie in [1, 4]");
                hidden.assign(static_cast<std::size_t>(s), 10);
            } else {
                hidden = {s, s};
            }
            const MlpTrainResult fit = train_lm(split, hidden, cfg.bnn);
            const Eigen::VectorXd train_pred = fit.regressor.predict_batch(split.train.features());
            const Eigen::VectorXd test_pred = fit.regressor.predict_batch(split.test.features());
            c.train = compute_metrics(train_pred, split.train.targets());
            c.test = compute_metrics(test_pred, split.test.targets());
            c.scatter = scatter_points(test_pred, split.test.targets());
        });
        report.cells.push_back(std::move(cell));
    }

    // Relative test-RMSE spread per family over cells that produced metrics.
    std::map<std::string, std::vector<double>> rmse_by_family;
    for (const auto& cell : report.cells)
        if (cell.test) rmse_by_family[cell.axis].push_back(cell.test->rmse);
    for (const auto& [family, values] : rmse_by_family) {
        if (values.empty()) continue;
        const double lo = *std::min_element(values.begin(), values.end());
        const double hi = *std::max_element(values.begin(), values.end());
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        report.relative_spread[family] = (hi - lo) / mean;
    }
    return report;
}

void write_report_csv(const SweepReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << kReportCsvHeader << '\n';
    for (const auto& cell : report.cells) {
        out << cell.axis << ',' << fmt_value(cell.value) << ','
            << fmt_metric(cell.train ? std::optional(cell.train->mse) : std::nullopt) << ','
            << fmt_metric(cell.train ? std::optional(cell.train->rmse) : std::nullopt) << ','
            << fmt_metric(cell.test ? std::optional(cell.test->mse) : std::nullopt) << ','
            << fmt_metric(cell.test ? std::optional(cell.test->rmse) : std::nullopt) << ','
            << fmt_metric(cell.train ? cell.train->r : std::nullopt) << ','
            << fmt_metric(cell.test ? cell.test->r : std::nullopt) << ','
            << fmt_value(cell.wall_ms) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

void write_fraction_table_csv(const SweepReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << kFractionTableHeader << '\n';
    for (const auto& cell : report.cells) {
        char label[16];
        std::snprintf(label, sizeof(label), "%.0f%%", cell.value * 100.0);
        out << label << ','
            << fmt_metric(cell.train ? std::optional(cell.train->mse) : std::nullopt) << ','
            << fmt_metric(cell.train ? std::optional(cell.train->rmse) : std::nullopt) << ','
            << fmt_metric(cell.test ? std::optional(cell.test->mse) : std::nullopt) << ','
            << fmt_metric(cell.test ? std::optional(cell.test->rmse) : std::nullopt) << ','
            << fmt_metric(cell.train ? cell.train->r : std::nullopt) << ','
            << fmt_metric(cell.test ? cell.test->r : std::nullopt) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

namespace {

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return out;
}

void write_summary_txt(const SweepReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << report.name << " (seed " << report.seed << ")\n";
    out << "axis: " << report.axis_label << "\n\n";
    char line[256];
    std::snprintf(line, sizeof(line), "%-12s %10s %12s %12s %12s %12s %9s %9s %10s\n", "axis", "value",
                  "train_mse", "train_rmse", "test_mse", "test_rmse", "r_train", "r_test", "wall_ms");
    out << line;
    for (const auto& cell : report.cells) {
        if (cell.error) {
            std::snprintf(line, sizeof(line), "%-12s %10.4g  error: %s\n", cell.axis.c_str(), cell.value,
                          cell.error->c_str());
            out << line;
            continue;
        }
        auto opt = [](const std::optional<double>& v) { return v && std::isfinite(*v) ? *v : std::nan(""); };
        std::snprintf(line, sizeof(line), "%-12s %10.4g %12.5g %12.5g %12.5g %12.5g %9.4f %9.4f %10.1f\n",
                      cell.axis.c_str(), cell.value, cell.train ? cell.train->mse : std::nan(""),
                      cell.train ? cell.train->rmse : std::nan(""), cell.test ? cell.test->mse : std::nan(""),
                      cell.test ? cell.test->rmse : std::nan(""), opt(cell.train ? cell.train->r : std::nullopt),
                      opt(cell.test ? cell.test->r : std::nullopt), cell.wall_ms);
        out << line;
    }
    if (!report.relative_spread.empty()) {
        out << "\nrelative test-RMSE spread (max-min)/mean per family:\n";
        for (const auto& [family, spread] : report.relative_spread) {
            std::snprintf(line, sizeof(line), "  %-12s %.4f\n", family.c_str(), spread);
            out << line;
        }
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace

std::vector<std::string> render_report(const SweepReport& report, const std::string& out_dir,
                                       const std::set<std::string>& formats) {
    const auto wants = [&](const char* f) { return formats.empty() || formats.count(f) > 0; };
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory '" + out_dir + "': " + ec.message());

    std::vector<std::string> written;
    const auto emit = [&](const std::string& p) { written.push_back(p); };

    if (wants("csv")) {
        const std::string p = out_dir + "/" + report.name + ".csv";
        write_report_csv(report, p);
        emit(p);
        if (report.axis_label == "fraction") {
            const std::string tp = out_dir + "/" + report.name + "_table1.csv";
            write_fraction_table_csv(report, tp);
            emit(tp);
        }
    }

    if (wants("txt")) {
        const std::string p = out_dir + "/" + report.name + "_summary.txt";
        write_summary_txt(report, p);
        emit(p);
    }

    if (wants("svg")) {
        // Metric-vs-axis lines, one series per family per metric.
        std::map<std::string, SvgSeries> train_series, test_series;
        for (const auto& cell : report.cells) {
            if (cell.train) train_series[cell.axis].points.emplace_back(cell.value, cell.train->rmse);
            if (cell.test) test_series[cell.axis].points.emplace_back(cell.value, cell.test->rmse);
        }
        std::vector<SvgSeries> series;
        for (auto& [family, s] : train_series) {
            s.name = family + " train";
            series.push_back(std::move(s));
        }
        for (auto& [family, s] : test_series) {
            s.name = family + " test";
            series.push_back(std::move(s));
        }
        if (!series.empty()) {
            const std::string p = out_dir + "/" + report.name + "_rmse.svg";
            write_line_plot(p, report.name + ": RMSE vs " + report.axis_label, report.axis_label,
                            "RMSE (deg C)", series);
            emit(p);
        }

        for (const auto& cell : report.cells) {
            if (cell.error) continue;
            const std::string tag = sanitize(cell.axis) + "_" + fmt_value(cell.value);
            if (!cell.scatter.empty()) {
                const std::string p = out_dir + "/" + report.name + "_scatter_" + tag + ".svg";
                write_scatter_plot(p, "predicted vs observed (" + tag + ")", cell.scatter,
                                   cell.test ? cell.test->r : std::nullopt);
                emit(p);
            }
            for (const auto& part : cell.partitions) {
                const std::string p = out_dir + "/" + report.name + "_mfs_" + tag + "_" + sanitize(part.name) + ".svg";
                write_mf_curves(p, part);
                emit(p);
            }
        }
    }
    return written;
}

} // namespace nf
