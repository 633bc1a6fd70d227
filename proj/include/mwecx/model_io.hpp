#ifndef MWECX_MODEL_IO_HPP
#define MWECX_MODEL_IO_HPP

#include <fstream>
#include <string>

#include <json.hpp>

#include "mwecx/model.hpp"

namespace mwecx {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline nlohmann::json transform_to_json(const NumericTransform& t) {
    return {{"mean", t.mean},
            {"stddev", t.stddev},
            {"log1p_first", t.log1p_first},
            {"constant", t.constant}};
}

inline NumericTransform transform_from_json(const nlohmann::json& j) {
    NumericTransform t;
    t.mean = j.at("mean").get<double>();
    t.stddev = j.at("stddev").get<double>();
    t.log1p_first = j.at("log1p_first").get<bool>();
    t.constant = j.at("constant").get<bool>();
    return t;
}

}  // namespace detail

inline nlohmann::json model_to_json(const MlpModel& m) {
    nlohmann::json j;
    j["version"] = kModelFormatVersion;
    j["config"] = {{"hidden_layers", m.config.hidden_layers},
                   {"activation", std::string(to_string(m.config.activation))},
                   {"l2_alpha", m.config.l2_alpha},
                   {"seed", m.config.seed}};

    nlohmann::json enc;
    enc["length"] = detail::transform_to_json(m.encoder.length);
    enc["frequency"] = detail::transform_to_json(m.encoder.frequency);
    enc["max_cw"] = detail::transform_to_json(m.encoder.max_cw);
    enc["mean_cw"] = detail::transform_to_json(m.encoder.mean_cw);
    std::vector<std::string> groups;
    for (FeatureGroup g : kAllFeatureGroups)
        if (m.encoder.groups.count(g)) groups.emplace_back(to_string(g));
    enc["groups"] = groups;
    j["encoder"] = enc;

    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < m.params.weights.size(); ++l) {
        const auto& w = m.params.weights[l];
        nlohmann::json layer;
        layer["rows"] = w.rows();
        layer["cols"] = w.cols();
        layer["weights"] = std::vector<double>(w.data(), w.data() + w.size());
        const auto& b = m.params.biases[l];
        layer["biases"] = std::vector<double>(b.data(), b.data() + b.size());
        layers.push_back(std::move(layer));
    }
    j["params"] = layers;
    j["final_loss"] = m.final_loss;
    j["converged"] = m.train_status == OptStatus::Converged;
    return j;
}

inline MlpModel model_from_json(const nlohmann::json& j) {
    if (j.at("version").get<int>() != kModelFormatVersion)
        throw DataError("unsupported model format version");
    MlpModel m;
    const auto& cfg = j.at("config");
    m.config.hidden_layers = cfg.at("hidden_layers").get<std::vector<std::size_t>>();
    auto act = parse_activation(cfg.at("activation").get<std::string>());
    if (!act) throw DataError("unknown activation in model file");
    m.config.activation = *act;
    m.config.l2_alpha = cfg.at("l2_alpha").get<double>();
    m.config.seed = cfg.at("seed").get<std::uint64_t>();

    const auto& enc = j.at("encoder");
    m.encoder.length = detail::transform_from_json(enc.at("length"));
    m.encoder.frequency = detail::transform_from_json(enc.at("frequency"));
    m.encoder.max_cw = detail::transform_from_json(enc.at("max_cw"));
    m.encoder.mean_cw = detail::transform_from_json(enc.at("mean_cw"));
    m.encoder.groups.clear();
    for (const auto& name : enc.at("groups")) {
        auto g = parse_feature_group(name.get<std::string>());
        if (!g) throw DataError("unknown feature group in model file");
        m.encoder.groups.insert(*g);
    }
    m.encoder.fitted = true;

    for (const auto& layer : j.at("params")) {
        Eigen::Index rows = layer.at("rows").get<Eigen::Index>();
        Eigen::Index cols = layer.at("cols").get<Eigen::Index>();
        auto wdata = layer.at("weights").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(wdata.size()) != rows * cols)
            throw DataError("weight matrix size mismatch in model file");
        Eigen::MatrixXd w(rows, cols);
        std::copy(wdata.begin(), wdata.end(), w.data());
        auto bdata = layer.at("biases").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(bdata.size()) != cols)
            throw DataError("bias vector size mismatch in model file");
        Eigen::VectorXd b(cols);
        std::copy(bdata.begin(), bdata.end(), b.data());
        m.params.weights.push_back(std::move(w));
        m.params.biases.push_back(std::move(b));
    }
    m.final_loss = j.at("final_loss").get<double>();
    m.train_status = j.at("converged").get<bool>() ? OptStatus::Converged : OptStatus::MaxIters;
    return m;
}

inline void save_model(const MlpModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open model file for writing: " + path);
    out << model_to_json(m).dump(2) << '\n';
}

inline MlpModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file: " + path);
    nlohmann::json j;
    in >> j;
    return model_from_json(j);
}

}  // namespace mwecx

#endif
