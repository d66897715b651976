#pragma once

#include "nf/anfis_train.hpp"
#include "nf/data.hpp"
#include "nf/mlp.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace nf {

// One sweep point. A failed cell carries its error message and no metrics;
// failures never abort sibling cells.
struct SweepCell {
    std::string axis;  // family label: "mf_count", "epochs", "fraction", "width", ...
    double value = 0.0;
    std::optional<Metrics> train;
    std::optional<Metrics> test;
    double wall_ms = 0.0; // measurement, excluded from determinism comparisons
    long rule_count = 0;  // ANFIS cells only
    std::optional<std::string> error;

    // Rendering payloads (test-set predicted/observed pairs; trained MF
    // shapes for ANFIS cells).
    std::vector<std::pair<double, double>> scatter;
    std::vector<InputPartition> partitions;
};

struct SweepReport {
    std::string name;
    std::string axis_label;
    std::uint64_t seed = 0;
    std::vector<SweepCell> cells;
    // (max - min) / mean of test RMSE per cell family; filled by
    // compare_scale_factors.
    std::map<std::string, double> relative_spread;
};

// One ANFIS per membership-function count on a shared split.
// Counts must lie in [2, 8] (rule grids capped at 8^3).
SweepReport sweep_mf_counts(const Dataset& ds, const std::vector<int>& counts,
                            const AnfisTrainConfig& cfg, double split_fraction = 0.65);

// Single training run to the largest checkpoint; per-checkpoint metrics are
// snapshots of the run's history, not retrained models.
SweepReport sweep_iterations(const Dataset& ds, const std::vector<int>& checkpoints,
                             const AnfisTrainConfig& cfg, double split_fraction = 0.65);

// Independent split and training per fraction; split seeds derive from the
// base seed plus the cell index.
SweepReport sweep_train_fraction(const Dataset& ds, const std::vector<double>& fractions,
                                 const AnfisTrainConfig& cfg);

// ANFIS over MF counts vs BNN over hidden widths (or depths at width 10 when
// depth_scaling is set), one shared split; fills relative_spread per family.
struct CompareConfig {
    AnfisTrainConfig anfis;
    LmConfig bnn;
    double split_fraction = 0.65;
    bool depth_scaling = false; // interpret the BNN list as depths, not widths
};
SweepReport compare_scale_factors(const Dataset& ds, const std::vector<int>& anfis_counts,
                                  const std::vector<int>& bnn_scales, const CompareConfig& cfg);

// Emits <name>.csv, SVG plots, and <name>_summary.txt into out_dir, filtered
// by formats ({"csv", "svg", "txt"}; empty set means all). Returns the paths
// written.
std::vector<std::string> render_report(const SweepReport& report, const std::string& out_dir,
                                       const std::set<std::string>& formats = {});

inline constexpr const char* kReportCsvHeader =
    "axis,value,train_mse,train_rmse,test_mse,test_rmse,r_train,r_test,wall_ms";

void write_report_csv(const SweepReport& report, const std::string& path);

// The training-fraction sweep in the paper's own table layout.
inline constexpr const char* kFractionTableHeader =
    "Data Selection,Train MSE,Train RMSE,Test MSE,Test RMSE,R-Train,R Test";
void write_fraction_table_csv(const SweepReport& report, const std::string& path);

} // namespace nf
