#include "nf/model_io.hpp"

#include "nf/errors.hpp"

#include "json.hpp"

#include <fstream>

namespace nf {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

json partition_to_json(const InputPartition& p) {
    json mfs = json::array();
    for (const auto& mf : p.mfs) mfs.push_back({{"center", mf.center}, {"sigma", mf.sigma}});
    return {{"name", p.name}, {"lo", p.lo}, {"hi", p.hi}, {"mfs", std::move(mfs)}};
}

InputPartition partition_from_json(const json& j) {
    InputPartition p;
    p.name = j.at("name").get<std::string>();
    p.lo = j.at("lo").get<double>();
    p.hi = j.at("hi").get<double>();
    for (const auto& mf : j.at("mfs"))
        p.mfs.push_back({mf.at("center").get<double>(), mf.at("sigma").get<double>()});
    return p;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return Eigen::MatrixXd(0, 0);
    const auto cols = static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(c)).get<double>();
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
    return v;
}

void write_json(const json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
    return doc;
}

} // namespace

void save_model(const AnfisModel& model, const std::string& path) {
    json inputs = json::array();
    for (const auto& p : model.inputs) inputs.push_back(partition_to_json(p));
    const json doc = {
        {"schema_version", kSchemaVersion},
        {"kind", "anfis"},
        {"features", kFeatureNames},
        {"target", kTargetName},
        {"scaling", "none"},
        {"inputs", std::move(inputs)},
        {"consequents", matrix_to_json(model.consequents)},
    };
    write_json(doc, path);
}

void save_model(const MlpRegressor& model, const std::string& path) {
    json weights = json::array();
    json biases = json::array();
    for (std::size_t l = 0; l < model.net.weights.size(); ++l) {
        weights.push_back(matrix_to_json(model.net.weights[l]));
        biases.push_back(vector_to_json(model.net.biases[l]));
    }
    json feat_scale = json::array();
    for (const auto& s : model.scaler.features) feat_scale.push_back({{"lo", s.lo}, {"hi", s.hi}});
    const json doc = {
        {"schema_version", kSchemaVersion},
        {"kind", "bnn"},
        {"features", model.feature_names},
        {"target", model.target_name},
        {"layer_sizes", model.net.layer_sizes},
        {"activation", model.net.hidden_activation == Activation::Tanh ? "tanh" : "identity"},
        {"weights", std::move(weights)},
        {"biases", std::move(biases)},
        {"scaling",
         {{"features", std::move(feat_scale)},
          {"target", {{"lo", model.scaler.target.lo}, {"hi", model.scaler.target.hi}}}}},
    };
    write_json(doc, path);
}

void save_model(const Regressor& model, const std::string& path) {
    std::visit([&](const auto& m) { save_model(m, path); }, model);
}

Regressor load_model(const std::string& path) {
    const json doc = read_json(path);
    try {
        const int version = doc.at("schema_version").get<int>();
        if (version != kSchemaVersion)
            throw SchemaError("'" + path + "': unsupported schema_version " + std::to_string(version));
        const std::string kind = doc.at("kind").get<std::string>();
        if (kind == "anfis") {
            AnfisModel model;
            for (const auto& p : doc.at("inputs")) model.inputs.push_back(partition_from_json(p));
            model.consequents = matrix_from_json(doc.at("consequents"));
            validate_model(model);
            return model;
        }
        if (kind == "bnn") {
            MlpRegressor model;
            model.feature_names = doc.at("features").get<std::vector<std::string>>();
            model.target_name = doc.at("target").get<std::string>();
            model.net.layer_sizes = doc.at("layer_sizes").get<std::vector<int>>();
            model.net.hidden_activation =
                doc.at("activation").get<std::string>() == "tanh" ? Activation::Tanh : Activation::Identity;
            for (const auto& w : doc.at("weights")) model.net.weights.push_back(matrix_from_json(w));
            for (const auto& b : doc.at("biases")) model.net.biases.push_back(vector_from_json(b));
            const auto& scaling = doc.at("scaling");
            const auto& feats = scaling.at("features");
            for (std::size_t j = 0; j < 3; ++j)
                model.scaler.features[j] = {feats.at(j).at("lo").get<double>(), feats.at(j).at("hi").get<double>()};
            model.scaler.target = {scaling.at("target").at("lo").get<double>(),
                                   scaling.at("target").at("hi").get<double>()};
            return model;
        }
        throw SchemaError("'" + path + "': unknown model kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw SchemaError("'" + path + "': malformed model document (" + e.what() + ")");
    }
}

double predict(const Regressor& model, const Eigen::VectorXd& x) {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, AnfisModel>) return anfis_predict(m, x);
            else return m.predict(x);
        },
        model);
}

Eigen::VectorXd predict_batch(const Regressor& model, const Eigen::MatrixXd& X) {
    Eigen::VectorXd y(X.rows());
    for (Eigen::Index k = 0; k < X.rows(); ++k) y[k] = predict(model, X.row(k).transpose());
    return y;
}

std::string model_kind(const Regressor& model) {
    return std::holds_alternative<AnfisModel>(model) ? "anfis" : "bnn";
}

} // namespace nf
