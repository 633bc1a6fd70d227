#ifndef MWECX_EVAL_HPP
#define MWECX_EVAL_HPP

#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mwecx/analytics.hpp"
#include "mwecx/corpus.hpp"
#include "mwecx/features.hpp"
#include "mwecx/model.hpp"
#include "mwecx/rng.hpp"

namespace mwecx {

inline double mae(const std::vector<double>& preds, const std::vector<double>& gold) {
    if (preds.size() != gold.size()) throw InvalidArgument("mae: length mismatch");
    if (preds.empty()) throw InvalidArgument("mae: empty input");
    double total = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) total += std::abs(preds[i] - gold[i]);
    return total / static_cast<double>(preds.size());
}

enum class TargetKind { Combined, Native, NonNative };

inline std::string_view to_string(TargetKind t) {
    switch (t) {
        case TargetKind::Combined: return "combined";
        case TargetKind::Native: return "native";
        case TargetKind::NonNative: return "non-native";
    }
    return "";
}

inline double target_of(const AnnotatedInstance& i, TargetKind kind) {
    switch (kind) {
        case TargetKind::Combined: return i.prob;
        case TargetKind::Native: return group_score(i, AnnotatorGroup::Native);
        case TargetKind::NonNative: return group_score(i, AnnotatorGroup::NonNative);
    }
    return 0.0;
}

struct ExperimentConfig {
    TargetKind target = TargetKind::Combined;
    double grid = 0.05;  // 0.1 for per-group targets
    FeatureGroupSet features = all_feature_groups();
    std::size_t folds = 5;
    std::uint64_t seed = 0;
    MlpConfig mlp;
    LbfgsConfig lbfgs;
};

// Feature resources plus the file identities recorded in every report.
struct Resources {
    const BigramFrequencyTable* freq = nullptr;
    const WordComplexityScorer* cw = nullptr;
    FeatureOptions options;
    std::string freq_fingerprint;
    std::string cw_fingerprint;
};

inline std::string file_fingerprint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file for fingerprinting: " + path);
    std::uint64_t hash = 0xcbf29ce484222325ULL;  // FNV-1a 64
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    return hex;
}

struct FoldDetail {
    std::size_t fold = 0;
    std::size_t n_test = 0;
    double mae = 0.0;
};

struct EvalReport {
    std::vector<std::pair<std::string, double>> cells;  // experiment name -> MAE
    std::vector<FoldDetail> folds;
    std::uint64_t seed = 0;
    std::string target;
    double grid = 0.05;
    std::string freq_fingerprint;
    std::string cw_fingerprint;

    double cell(const std::string& name) const {
        for (const auto& [key, value] : cells)
            if (key == name) return value;
        throw InvalidArgument("no report cell named '" + name + "'");
    }
};

namespace detail {

inline std::vector<FeatureVector> extract_all(const Dataset& d, const Resources& res) {
    std::vector<FeatureVector> out;
    out.reserve(d.size());
    for (const auto& i : d.instances)
        out.push_back(extract_features(i, *res.freq, *res.cw, res.options));
    return out;
}

inline std::vector<double> targets_of(const Dataset& d, TargetKind kind) {
    std::vector<double> out;
    out.reserve(d.size());
    for (const auto& i : d.instances) out.push_back(target_of(i, kind));
    return out;
}

inline std::vector<double> rounded_predictions(const MlpModel& model,
                                               const std::vector<FeatureVector>& features,
                                               double grid) {
    std::vector<double> out;
    out.reserve(features.size());
    for (const auto& v : features) out.push_back(round_to_grid(model.predict_features(v), grid));
    return out;
}

inline void stamp(EvalReport& report, const ExperimentConfig& cfg, const Resources& res) {
    report.seed = cfg.seed;
    report.target = std::string(to_string(cfg.target));
    report.grid = cfg.grid;
    report.freq_fingerprint = res.freq_fingerprint;
    report.cw_fingerprint = res.cw_fingerprint;
}

}  // namespace detail

// Contiguous near-equal folds over a seeded shuffle; every instance tested
// exactly once.
inline std::vector<std::vector<std::size_t>> fold_assignment(std::size_t n, std::size_t k,
                                                             std::uint64_t seed) {
    if (k < 2) throw InvalidArgument("fold_assignment: k must be >= 2");
    if (k > n) throw InvalidArgument("fold_assignment: more folds than instances");
    SplitMix64 rng(seed, /*stream=*/0x464f4c44ULL);
    auto perm = rng.permutation(n);
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t base = n / k, extra = n % k, pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        std::size_t size = base + (f < extra ? 1 : 0);
        for (std::size_t j = 0; j < size; ++j) folds[f].push_back(perm[pos++]);
    }
    return folds;
}

inline EvalReport kfold_cv(const Dataset& view, const ExperimentConfig& cfg, const Resources& res) {
    if (cfg.folds > view.size()) throw InvalidArgument("kfold_cv: too few instances");
    auto features = detail::extract_all(view, res);
    auto targets = detail::targets_of(view, cfg.target);
    auto folds = fold_assignment(view.size(), cfg.folds, cfg.seed);

    EvalReport report;
    detail::stamp(report, cfg, res);
    double total_abs_error = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<char> in_test(view.size(), 0);
        for (std::size_t idx : folds[f]) in_test[idx] = 1;
        std::vector<FeatureVector> train_x;
        std::vector<double> train_y;
        for (std::size_t i = 0; i < view.size(); ++i)
            if (!in_test[i]) {
                train_x.push_back(features[i]);
                train_y.push_back(targets[i]);
            }
        MlpModel model = train(train_x, train_y, cfg.mlp, cfg.lbfgs, cfg.features);

        double fold_abs = 0.0;
        for (std::size_t idx : folds[f]) {
            double pred = round_to_grid(model.predict_features(features[idx]), cfg.grid);
            fold_abs += std::abs(pred - targets[idx]);
        }
        total_abs_error += fold_abs;
        report.folds.push_back({f, folds[f].size(), fold_abs / static_cast<double>(folds[f].size())});
    }
    report.cells.emplace_back("cv_mae", total_abs_error / static_cast<double>(view.size()));

    // mode baseline over the same folds (per-fold training mode)
    double baseline_abs = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<char> in_test(view.size(), 0);
        for (std::size_t idx : folds[f]) in_test[idx] = 1;
        std::vector<double> train_y;
        for (std::size_t i = 0; i < view.size(); ++i)
            if (!in_test[i]) train_y.push_back(targets[i]);
        ModeBaseline mode(train_y);
        for (std::size_t idx : folds[f]) baseline_abs += std::abs(mode.value() - targets[idx]);
    }
    report.cells.emplace_back("mode_baseline_mae",
                              baseline_abs / static_cast<double>(view.size()));
    return report;
}

// Full-feature run plus one run per removed group, ordered by impact
// (largest MAE first among the removals).
inline EvalReport ablation(const Dataset& view, const ExperimentConfig& cfg, const Resources& res) {
    if (cfg.features.size() < 2) throw InvalidArgument("ablation: need >= 2 feature groups");
    EvalReport full = kfold_cv(view, cfg, res);

    std::vector<std::pair<std::string, double>> removals;
    for (FeatureGroup g : kAllFeatureGroups) {
        if (!cfg.features.count(g)) continue;
        ExperimentConfig sub = cfg;
        sub.features.erase(g);
        EvalReport r = kfold_cv(view, sub, res);
        removals.emplace_back("-" + std::string(to_string(g)), r.cell("cv_mae"));
    }
    std::stable_sort(removals.begin(), removals.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    EvalReport report;
    detail::stamp(report, cfg, res);
    report.cells.emplace_back("all", full.cell("cv_mae"));
    for (auto& cell : removals) report.cells.push_back(std::move(cell));
    report.cells.emplace_back("mode_baseline", full.cell("mode_baseline_mae"));
    report.folds = full.folds;
    return report;
}

// Trains once on the training view and reports per-genre test MAE for the
// system plus the constant-0.05 and training-mode baselines.
inline EvalReport evaluate_test_splits(const Dataset& train_view,
                                       const std::map<Genre, Dataset>& test_views,
                                       const ExperimentConfig& cfg, const Resources& res) {
    if (train_view.empty()) throw InvalidArgument("evaluate_test_splits: empty training view");
    auto train_x = detail::extract_all(train_view, res);
    auto train_y = detail::targets_of(train_view, cfg.target);
    MlpModel model = train(train_x, train_y, cfg.mlp, cfg.lbfgs, cfg.features);
    ModeBaseline mode(train_y);

    EvalReport report;
    detail::stamp(report, cfg, res);
    for (const auto& [genre, view] : test_views) {
        if (view.empty()) throw InvalidArgument("evaluate_test_splits: empty test split");
        auto features = detail::extract_all(view, res);
        auto gold = detail::targets_of(view, cfg.target);
        auto preds = detail::rounded_predictions(model, features, cfg.grid);
        std::string name(to_string(genre));
        report.cells.emplace_back(name + "_system", mae(preds, gold));
        std::vector<double> constant(gold.size(), 0.05);
        report.cells.emplace_back(name + "_constant_baseline", mae(constant, gold));
        std::vector<double> mode_preds(gold.size(), mode.value());
        report.cells.emplace_back(name + "_mode_baseline", mae(mode_preds, gold));
        report.cells.emplace_back(name + "_n", static_cast<double>(view.size()));
    }
    return report;
}

// Cross-validation against one annotator group's labels on the 0.1 grid.
inline EvalReport group_experiment(const Dataset& view, AnnotatorGroup group,
                                   const FeatureGroupSet& feature_subset,
                                   const ExperimentConfig& base_cfg, const Resources& res) {
    ExperimentConfig cfg = base_cfg;
    cfg.target = group == AnnotatorGroup::Native ? TargetKind::Native : TargetKind::NonNative;
    cfg.grid = 0.1;
    cfg.features = feature_subset;
    return kfold_cv(view, cfg, res);
}

// ---- Report rendering ---------------------------------------------------

inline nlohmann::json report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["version"] = 1;
    j["seed"] = r.seed;
    j["target"] = r.target;
    j["grid"] = r.grid;
    j["resources"] = {{"bigram_freq", r.freq_fingerprint}, {"cw_lexicon", r.cw_fingerprint}};
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& [name, value] : r.cells)
        cells.push_back({{"name", name}, {"mae", value}});
    j["cells"] = cells;
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : r.folds)
        folds.push_back({{"fold", f.fold}, {"n_test", f.n_test}, {"mae", f.mae}});
    j["folds"] = folds;
    return j;
}

inline std::string render_report(const EvalReport& r, TableFormat format) {
    if (format == TableFormat::Json) return report_to_json(r).dump(2) + "\n";
    std::vector<std::vector<std::string>> cells;
    for (const auto& [name, value] : r.cells)
        cells.push_back({name, detail::fmt(value, 4)});
    return detail::render_cells({"experiment", "mae"}, cells, format);
}

}  // namespace mwecx

#endif
