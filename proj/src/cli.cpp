#include "nf/cli.hpp"

#include "nf/anfis_train.hpp"
#include "nf/data.hpp"
#include "nf/errors.hpp"
#include "nf/experiments.hpp"
#include "nf/mlp.hpp"
#include "nf/model_io.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

namespace nf {

namespace {

namespace fs = std::filesystem;

// Options shared by every command that consumes a dataset.
struct SourceOpts {
    std::string csv_path;
    long synthetic_days = 0;
    double noise_sd = 1.0;
};

void add_source_options(CLI::App* cmd, SourceOpts& src) {
    auto* data = cmd->add_option("--data", src.csv_path, "input CSV (" + std::string(kCsvHeader) + ")");
    auto* days = cmd->add_option("--synthetic-days", src.synthetic_days,
                                 "generate a synthetic benchmark of this many days instead");
    cmd->add_option("--noise", src.noise_sd, "synthetic observation noise sd, deg C")
        ->default_val(1.0);
    data->excludes(days);
}

Dataset load_source(const SourceOpts& src, std::uint64_t seed) {
    if (src.csv_path.empty() && src.synthetic_days <= 0)
        throw std::invalid_argument("need exactly one data source: --data FILE or --synthetic-days N");
    if (!src.csv_path.empty()) {
        std::vector<std::string> warnings;
        Dataset ds = load_csv(src.csv_path, &warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << src.csv_path << ": " << w << '\n';
        return ds;
    }
    return gen_synthetic(src.synthetic_days, seed, src.noise_sd);
}

std::string metric_str(const std::optional<double>& v) {
    return v ? format_double(*v) : "nan";
}

void write_metrics_csv(const std::string& path,
                       const std::vector<std::pair<std::string, Metrics>>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "split,mse,rmse,r\n";
    for (const auto& [name, m] : rows)
        out << name << ',' << format_double(m.mse) << ',' << format_double(m.rmse) << ','
            << metric_str(m.r) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

void print_metrics(const std::string& label, const Metrics& m) {
    std::cout << label << " mse=" << format_double(m.mse) << " rmse=" << format_double(m.rmse)
              << " r=" << metric_str(m.r) << '\n';
}

std::set<std::string> parse_formats(const std::vector<std::string>& formats) {
    std::set<std::string> out(formats.begin(), formats.end());
    for (const auto& f : out)
        if (f != "csv" && f != "svg" && f != "txt")
            throw std::invalid_argument("unknown format '" + f + "' (expected csv, svg, txt)");
    return out;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

struct CliOpts {
    SourceOpts src;
    std::uint64_t seed = 42;
    double split = 0.65;
    std::string out;
    std::vector<std::string> formats{"csv", "svg", "txt"};

    // gen-data
    long days = 6940;

    // train / sweeps
    std::string model_kind = "anfis";
    int mf = 4;
    int epochs = 100;
    double lr = 0.01;
    int width = 10;
    int iters = 100;

    // predict / eval
    std::string model_path;

    std::vector<int> counts{4, 6};
    std::vector<int> checkpoints{10, 50, 100, 200};
    std::vector<double> fractions{65, 70, 75, 85, 95};
    std::vector<int> mf_counts{2, 3, 4, 5, 6};
    std::vector<int> widths{2, 4, 8, 16, 32};
    std::vector<int> depths;
};

AnfisTrainConfig anfis_cfg(const CliOpts& o) {
    AnfisTrainConfig cfg;
    cfg.epochs = o.epochs;
    cfg.learning_rate = o.lr;
    cfg.seed = o.seed;
    cfg.mf_count = o.mf;
    return cfg;
}

LmConfig lm_cfg(const CliOpts& o) {
    LmConfig cfg;
    cfg.max_iters = o.iters;
    cfg.seed = o.seed;
    return cfg;
}

double normalize_fraction(double f) {
    // Values above 1 read as percentages, matching the paper's table labels.
    const double frac = f > 1.0 ? f / 100.0 : f;
    if (!(frac > 0.0 && frac < 1.0))
        throw std::invalid_argument("fraction " + std::to_string(f) + " is out of range");
    return frac;
}

int dispatch(const CLI::App& app, CliOpts& o) {
    if (app.got_subcommand("gen-data")) {
        const Dataset ds = gen_synthetic(o.days, o.seed, o.src.noise_sd);
        write_csv(ds, o.out);
        std::cout << "wrote " << ds.size() << " records to " << o.out << '\n';
        return kExitOk;
    }

    if (app.got_subcommand("train")) {
        const Dataset ds = load_source(o.src, o.seed);
        const SplitDataset split = split_random(ds, o.split, o.seed);
        ensure_dir(o.out);
        const std::string model_path = o.out + "/model.json";

        Regressor model;
        if (o.model_kind == "anfis") {
            const AnfisTrainResult fit = train_anfis(split, anfis_cfg(o));
            model = fit.model;
        } else {
            const MlpTrainResult fit = train_lm(split, {o.width, o.width}, lm_cfg(o));
            model = fit.regressor;
        }
        const Metrics train_m = compute_metrics(predict_batch(model, split.train.features()),
                                                split.train.targets());
        const Metrics test_m = compute_metrics(predict_batch(model, split.test.features()),
                                               split.test.targets());
        save_model(model, model_path);
        write_metrics_csv(o.out + "/metrics.csv", {{"train", train_m}, {"test", test_m}});
        print_metrics("train", train_m);
        print_metrics("test", test_m);
        std::cout << "model written to " << model_path << '\n';
        return kExitOk;
    }

    if (app.got_subcommand("predict")) {
        const Regressor model = load_model(o.model_path);
        std::vector<std::string> warnings;
        const Dataset ds = load_csv(o.src.csv_path, &warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
        const Eigen::VectorXd pred = predict_batch(model, ds.features());
        std::ofstream out(o.out);
        if (!out) throw IoError("cannot write '" + o.out + "'");
        out << "date,dpt_pred_c\n";
        for (Eigen::Index i = 0; i < pred.size(); ++i)
            out << ds.records[static_cast<std::size_t>(i)].date << ',' << format_double(pred[i]) << '\n';
        if (!out) throw IoError("write failed for '" + o.out + "'");
        std::cout << "wrote " << pred.size() << " predictions to " << o.out << '\n';
        return kExitOk;
    }

    if (app.got_subcommand("eval")) {
        const Regressor model = load_model(o.model_path);
        std::vector<std::string> warnings;
        const Dataset ds = load_csv(o.src.csv_path, &warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
        const Metrics m = compute_metrics(predict_batch(model, ds.features()), ds.targets());
        print_metrics("eval", m);
        if (!o.out.empty()) write_metrics_csv(o.out, {{"eval", m}});
        return kExitOk;
    }

    const auto render = [&](const SweepReport& report) {
        ensure_dir(o.out);
        const auto files = render_report(report, o.out, parse_formats(o.formats));
        for (const auto& f : files) std::cout << "wrote " << f << '\n';
        for (const auto& cell : report.cells)
            if (cell.error)
                std::cerr << "warning: cell " << cell.axis << "=" << cell.value
                          << " failed: " << *cell.error << '\n';
        for (const auto& [family, spread] : report.relative_spread)
            std::cout << "relative test-RMSE spread " << family << " = " << format_double(spread)
                      << '\n';
    };

    if (app.got_subcommand("sweep-mf")) {
        const Dataset ds = load_source(o.src, o.seed);
        render(sweep_mf_counts(ds, o.counts, anfis_cfg(o), o.split));
        return kExitOk;
    }
    if (app.got_subcommand("sweep-iters")) {
        const Dataset ds = load_source(o.src, o.seed);
        render(sweep_iterations(ds, o.checkpoints, anfis_cfg(o), o.split));
        return kExitOk;
    }
    if (app.got_subcommand("sweep-split")) {
        const Dataset ds = load_source(o.src, o.seed);
        std::vector<double> fractions;
        fractions.reserve(o.fractions.size());
        for (double f : o.fractions) fractions.push_back(normalize_fraction(f));
        render(sweep_train_fraction(ds, fractions, anfis_cfg(o)));
        return kExitOk;
    }
    if (app.got_subcommand("compare")) {
        const Dataset ds = load_source(o.src, o.seed);
        CompareConfig cfg;
        cfg.anfis = anfis_cfg(o);
        cfg.bnn = lm_cfg(o);
        cfg.split_fraction = o.split;
        std::vector<int> scales = o.widths;
        if (!o.depths.empty()) {
            cfg.depth_scaling = true;
            scales = o.depths;
        }
        render(compare_scale_factors(ds, o.mf_counts, scales, cfg));
        return kExitOk;
    }

    std::cerr << "error: no subcommand given (see --help)\n";
    return kExitUsage;
}

} // namespace

int run_cli(std::vector<std::string> args) {
    CLI::App app{"neuro-fuzzy and bilayered-network dew point regression toolkit"};
    app.require_subcommand(0, 1);
    app.set_config("--config", "", "read options from a TOML/INI file (flags take precedence)");

    CliOpts o;

    const auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", o.seed, "random seed")->envname("NEUROFUZZY_SEED")->default_val(42);
    };
    const auto add_split = [&](CLI::App* cmd) {
        cmd->add_option("--split", o.split, "training fraction")->default_val(0.65);
    };
    const auto add_formats = [&](CLI::App* cmd) {
        cmd->add_option("--formats", o.formats, "report formats (csv,svg,txt)")
            ->delimiter(',')
            ->default_val(std::vector<std::string>{"csv", "svg", "txt"});
    };

    auto* gen = app.add_subcommand("gen-data", "generate a synthetic benchmark CSV");
    gen->add_option("--days", o.days, "number of daily records")->default_val(6940);
    gen->add_option("--noise", o.src.noise_sd, "observation noise sd, deg C")->default_val(1.0);
    gen->add_option("--out", o.out, "output CSV path")->required();
    add_seed(gen);

    auto* train = app.add_subcommand("train", "fit a model and write model.json + metrics.csv");
    add_source_options(train, o.src);
    train->add_option("--model", o.model_kind, "model kind")
        ->check(CLI::IsMember({"anfis", "bnn"}))
        ->default_val("anfis");
    train->add_option("--mf", o.mf, "ANFIS membership functions per input")->default_val(4);
    train->add_option("--epochs", o.epochs, "ANFIS training epochs")->default_val(100);
    train->add_option("--lr", o.lr, "ANFIS premise learning rate")->default_val(0.01);
    train->add_option("--width", o.width, "BNN hidden width (both layers)")->default_val(10);
    train->add_option("--iters", o.iters, "BNN max LM iterations")->default_val(100);
    train->add_option("--out", o.out, "output directory")->default_val(".");
    add_split(train);
    add_seed(train);

    auto* predict_cmd = app.add_subcommand("predict", "apply a model file to a CSV");
    predict_cmd->add_option("--model", o.model_path, "model.json path")->required();
    predict_cmd->add_option("--data", o.src.csv_path, "input CSV")->required();
    predict_cmd->add_option("--out", o.out, "predictions CSV path")->required();

    auto* eval_cmd = app.add_subcommand("eval", "metrics of a model file on a labeled CSV");
    eval_cmd->add_option("--model", o.model_path, "model.json path")->required();
    eval_cmd->add_option("--data", o.src.csv_path, "labeled CSV")->required();
    eval_cmd->add_option("--out", o.out, "optional metrics CSV path");

    auto* sweep_mf = app.add_subcommand("sweep-mf", "ANFIS accuracy vs membership-function count");
    add_source_options(sweep_mf, o.src);
    sweep_mf->add_option("--counts", o.counts, "MF counts")->delimiter(',')->default_val(std::vector<int>{4, 6});
    sweep_mf->add_option("--epochs", o.epochs, "epochs per cell")->default_val(30);
    sweep_mf->add_option("--lr", o.lr, "premise learning rate")->default_val(0.01);
    sweep_mf->add_option("--out", o.out, "report directory")->required();
    add_split(sweep_mf);
    add_seed(sweep_mf);
    add_formats(sweep_mf);

    auto* sweep_iters = app.add_subcommand("sweep-iters", "ANFIS accuracy vs training epochs");
    add_source_options(sweep_iters, o.src);
    sweep_iters->add_option("--checkpoints", o.checkpoints, "epoch checkpoints, strictly increasing")
        ->delimiter(',')
        ->default_val(std::vector<int>{10, 50, 100, 200});
    sweep_iters->add_option("--mf", o.mf, "membership functions per input")->default_val(4);
    sweep_iters->add_option("--lr", o.lr, "premise learning rate")->default_val(0.01);
    sweep_iters->add_option("--out", o.out, "report directory")->required();
    add_split(sweep_iters);
    add_seed(sweep_iters);
    add_formats(sweep_iters);

    auto* sweep_split = app.add_subcommand("sweep-split", "ANFIS accuracy vs training fraction");
    add_source_options(sweep_split, o.src);
    sweep_split->add_option("--fractions", o.fractions, "fractions (percent or 0-1)")
        ->delimiter(',')
        ->default_val(std::vector<double>{65, 70, 75, 85, 95});
    sweep_split->add_option("--mf", o.mf, "membership functions per input")->default_val(4);
    sweep_split->add_option("--epochs", o.epochs, "epochs per cell")->default_val(30);
    sweep_split->add_option("--lr", o.lr, "premise learning rate")->default_val(0.01);
    sweep_split->add_option("--out", o.out, "report directory")->required();
    add_seed(sweep_split);
    add_formats(sweep_split);

    auto* compare = app.add_subcommand("compare", "ANFIS vs BNN stability across scale factors");
    add_source_options(compare, o.src);
    compare->add_option("--mf-counts", o.mf_counts, "ANFIS MF counts")
        ->delimiter(',')
        ->default_val(std::vector<int>{2, 3, 4, 5, 6});
    compare->add_option("--widths", o.widths, "BNN hidden widths")
        ->delimiter(',')
        ->default_val(std::vector<int>{2, 4, 8, 16, 32});
    compare->add_option("--depths", o.depths, "scale BNN depth instead of width (layers of 10)")
        ->delimiter(',');
    compare->add_option("--epochs", o.epochs, "ANFIS epochs per cell")->default_val(15);
    compare->add_option("--lr", o.lr, "ANFIS premise learning rate")->default_val(0.01);
    compare->add_option("--iters", o.iters, "BNN max LM iterations per cell")->default_val(40);
    compare->add_option("--out", o.out, "report directory")->required();
    add_split(compare);
    add_seed(compare);
    add_formats(compare);

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        return dispatch(app, o);
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const DegenerateActivationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const TrainingDataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const ScaleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace nf
