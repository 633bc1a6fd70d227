#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mwecx/agreement.hpp"
#include "mwecx/analytics.hpp"
#include "mwecx/convert.hpp"
#include "mwecx/corpus.hpp"
#include "mwecx/eval.hpp"
#include "mwecx/features.hpp"
#include "mwecx/model.hpp"
#include "mwecx/model_io.hpp"

namespace {

using namespace mwecx;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

struct CommonOpts {
    std::string format = "tsv";
    std::string output;  // empty means stdout
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--format", opts.format, "Output format: tsv, json or markdown")
        ->check(CLI::IsMember({"tsv", "json", "markdown"}))
        ->capture_default_str();
    cmd->add_option("--output", opts.output, "Write output to this file instead of stdout");
    cmd->set_config("--config", "", "Read defaults from a key=value config file");
}

TableFormat format_of(const CommonOpts& opts) { return *parse_format(opts.format); }

void emit(const CommonOpts& opts, const std::string& text) {
    if (opts.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opts.output, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + opts.output);
    out << text;
}

struct DataOpts {
    std::string instances;
    std::string labels;
    bool end_inclusive = false;
};

void add_data(CLI::App* cmd, DataOpts& opts) {
    cmd->add_option("--instances", opts.instances, "Canonical instances TSV")->required();
    cmd->add_option("--labels", opts.labels, "Canonical MWE-type labels TSV")->required();
    cmd->add_flag("--end-inclusive", opts.end_inclusive,
                  "Treat the input end column as inclusive");
}

Dataset load(const DataOpts& opts) {
    LoadOptions lo;
    lo.end_inclusive = opts.end_inclusive;
    return load_dataset(opts.instances, opts.labels, lo);
}

Dataset apply_view(const Dataset& d, const std::string& view) {
    if (view == "all") return d;
    if (view == "modeling") return modeling_subset(d);
    if (view == "complex-only") return complex_only(d);
    if (view == "modeling-complex") return complex_only(modeling_subset(d));
    throw InvalidArgument("unknown view '" + view + "'");
}

struct ResourceOpts {
    std::string freq_path;
    std::string cw_path;
    double smoothing_k = 0.0;
};

void add_resources(CLI::App* cmd, ResourceOpts& opts) {
    cmd->add_option("--freq", opts.freq_path, "Bigram frequency TSV")->required();
    cmd->add_option("--cw", opts.cw_path, "Word complexity lexicon TSV")->required();
    cmd->add_option("--smoothing-k", opts.smoothing_k, "Add-k smoothing on bigram counts")
        ->capture_default_str();
}

struct LoadedResources {
    BigramFrequencyTable freq;
    LexiconScorer cw{0.5};
    Resources res;
};

void load_resources(const ResourceOpts& opts, LoadedResources& out) {
    out.freq = BigramFrequencyTable::load(opts.freq_path);
    out.cw = LexiconScorer::load(opts.cw_path);
    out.res.freq = &out.freq;
    out.res.cw = &out.cw;
    out.res.options.smoothing_k = opts.smoothing_k;
    out.res.freq_fingerprint = file_fingerprint(opts.freq_path);
    out.res.cw_fingerprint = file_fingerprint(opts.cw_path);
}

struct ModelOpts {
    std::string target = "combined";
    double grid = 0.0;  // 0 means "derive from target"
    std::string features = "length,frequency,max_cw,mean_cw,genre,mwe";
    std::size_t folds = 5;
    std::uint64_t seed = 42;
    std::string hidden = "100,100,100,100,100,100";
    std::string activation = "relu";
    double alpha = 1e-4;
    std::size_t max_iters = 500;
};

void add_model(CLI::App* cmd, ModelOpts& opts, bool with_folds) {
    cmd->add_option("--target", opts.target, "Prediction target: combined, native, non-native")
        ->check(CLI::IsMember({"combined", "native", "non-native"}))
        ->capture_default_str();
    cmd->add_option("--grid", opts.grid,
                    "Prediction rounding step (default 0.05, or 0.1 for group targets)");
    cmd->add_option("--features", opts.features, "Comma-separated feature groups to use")
        ->capture_default_str();
    if (with_folds)
        cmd->add_option("--folds", opts.folds, "Number of cross-validation folds")
            ->capture_default_str();
    cmd->add_option("--seed", opts.seed, "Random seed for init and fold shuffling")
        ->capture_default_str();
    cmd->add_option("--hidden", opts.hidden, "Comma-separated hidden layer widths")
        ->capture_default_str();
    cmd->add_option("--activation", opts.activation, "Hidden activation: relu or tanh")
        ->check(CLI::IsMember({"relu", "tanh"}))
        ->capture_default_str();
    cmd->add_option("--alpha", opts.alpha, "L2 penalty strength")->capture_default_str();
    cmd->add_option("--max-iters", opts.max_iters, "Optimizer iteration cap")
        ->capture_default_str();
}

FeatureGroupSet parse_features(const std::string& spec) {
    FeatureGroupSet groups;
    for (const auto& name : split(spec, ',')) {
        auto g = parse_feature_group(name);
        if (!g) throw InvalidArgument("unknown feature group '" + name + "'");
        groups.insert(*g);
    }
    if (groups.empty()) throw InvalidArgument("empty feature set");
    return groups;
}

ExperimentConfig experiment_config(const ModelOpts& opts) {
    ExperimentConfig cfg;
    if (opts.target == "combined")
        cfg.target = TargetKind::Combined;
    else if (opts.target == "native")
        cfg.target = TargetKind::Native;
    else
        cfg.target = TargetKind::NonNative;
    cfg.grid = opts.grid > 0.0 ? opts.grid
                               : (cfg.target == TargetKind::Combined ? 0.05 : 0.1);
    cfg.features = parse_features(opts.features);
    cfg.folds = opts.folds;
    cfg.seed = opts.seed;
    cfg.mlp.seed = opts.seed;
    cfg.mlp.activation = *parse_activation(opts.activation);
    cfg.mlp.l2_alpha = opts.alpha;
    cfg.mlp.hidden_layers.clear();
    for (const auto& w : split(opts.hidden, ','))
        cfg.mlp.hidden_layers.push_back(static_cast<std::size_t>(std::stoul(w)));
    cfg.lbfgs.max_iters = opts.max_iters;
    return cfg;
}

int run(int argc, char** argv) {
    CLI::App app{"MWE lexical complexity assessment pipeline"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    // ---- convert ----
    auto* convert_cmd = app.add_subcommand("convert", "Convert an upstream release layout "
                                                      "to the canonical two-file format");
    std::string upstream_dir, conv_instances, conv_labels;
    bool conv_end_inclusive = false;
    convert_cmd->add_option("--upstream", upstream_dir, "Upstream release directory")->required();
    convert_cmd->add_option("--instances", conv_instances, "Output instances TSV")->required();
    convert_cmd->add_option("--labels", conv_labels, "Output labels TSV")->required();
    convert_cmd->add_flag("--end-inclusive", conv_end_inclusive,
                          "Upstream end offsets are inclusive");

    // ---- validate ----
    auto* validate_cmd = app.add_subcommand("validate", "Load and validate a canonical dataset");
    DataOpts validate_data;
    add_data(validate_cmd, validate_data);

    // ---- stats ----
    auto* stats_cmd = app.add_subcommand("stats", "Per-type frequency and complexity table");
    DataOpts stats_data;
    CommonOpts stats_common;
    std::string stats_view = "all";
    std::string stats_std = "population";
    bool stats_groups = false;
    add_data(stats_cmd, stats_data);
    add_common(stats_cmd, stats_common);
    stats_cmd->add_option("--view", stats_view,
                          "Row view: all, modeling, complex-only, modeling-complex")
        ->check(CLI::IsMember({"all", "modeling", "complex-only", "modeling-complex"}))
        ->capture_default_str();
    stats_cmd->add_option("--std-mode", stats_std, "Standard deviation mode")
        ->check(CLI::IsMember({"population", "sample"}))
        ->capture_default_str();
    stats_cmd->add_flag("--groups", stats_groups,
                        "Report native vs non-native means instead of the type table");

    // ---- agreement ----
    auto* agree_cmd = app.add_subcommand("agreement", "Per-round inter-annotator agreement");
    std::string agree_annotations;
    CommonOpts agree_common;
    bool agree_weighted = false;
    agree_cmd->add_option("--annotations", agree_annotations, "Per-annotator records TSV")
        ->required();
    add_common(agree_cmd, agree_common);
    agree_cmd->add_flag("--weighted", agree_weighted,
                        "Also print the instance-weighted mean observed agreement");

    // ---- check ----
    auto* check_cmd = app.add_subcommand("check", "Cross-instance label consistency report");
    DataOpts check_data;
    CommonOpts check_common;
    std::string check_annotations;
    add_data(check_cmd, check_data);
    add_common(check_cmd, check_common);
    check_cmd->add_option("--annotations", check_annotations,
                          "Optional per-annotator records for dissent attribution");

    // ---- train ----
    auto* train_cmd = app.add_subcommand("train", "Train a model and save it as JSON");
    DataOpts train_data;
    ResourceOpts train_res;
    ModelOpts train_model;
    std::string train_view = "modeling";
    std::string train_splits = "train,dev";
    std::string model_out;
    add_data(train_cmd, train_data);
    add_resources(train_cmd, train_res);
    add_model(train_cmd, train_model, /*with_folds=*/false);
    train_cmd->add_option("--view", train_view, "Row view")->capture_default_str();
    train_cmd->add_option("--splits", train_splits, "Comma-separated splits to train on")
        ->capture_default_str();
    train_cmd->add_option("--model-out", model_out, "Output model path")->required();

    // ---- predict ----
    auto* predict_cmd = app.add_subcommand("predict", "Predict complexity for a dataset");
    DataOpts predict_data;
    ResourceOpts predict_res;
    CommonOpts predict_common;
    std::string model_in;
    double predict_grid = 0.05;
    add_data(predict_cmd, predict_data);
    add_resources(predict_cmd, predict_res);
    add_common(predict_cmd, predict_common);
    predict_cmd->add_option("--model", model_in, "Trained model JSON")->required();
    predict_cmd->add_option("--grid", predict_grid, "Rounding step for predictions")
        ->capture_default_str();

    // ---- eval ----
    auto* eval_cmd = app.add_subcommand("eval", "Train on train+dev and score per-genre "
                                                "test splits against baselines");
    DataOpts eval_data;
    ResourceOpts eval_res;
    ModelOpts eval_model;
    CommonOpts eval_common;
    std::string eval_view = "modeling";
    add_data(eval_cmd, eval_data);
    add_resources(eval_cmd, eval_res);
    add_model(eval_cmd, eval_model, /*with_folds=*/false);
    add_common(eval_cmd, eval_common);
    eval_cmd->add_option("--view", eval_view, "Row view")->capture_default_str();

    // ---- cv ----
    auto* cv_cmd = app.add_subcommand("cv", "K-fold cross-validation");
    DataOpts cv_data;
    ResourceOpts cv_res;
    ModelOpts cv_model;
    CommonOpts cv_common;
    std::string cv_view = "modeling";
    add_data(cv_cmd, cv_data);
    add_resources(cv_cmd, cv_res);
    add_model(cv_cmd, cv_model, /*with_folds=*/true);
    add_common(cv_cmd, cv_common);
    cv_cmd->add_option("--view", cv_view, "Row view")->capture_default_str();

    // ---- ablate ----
    auto* ablate_cmd = app.add_subcommand("ablate", "Leave-one-group-out feature ablation");
    DataOpts ablate_data;
    ResourceOpts ablate_res;
    ModelOpts ablate_model;
    CommonOpts ablate_common;
    std::string ablate_view = "modeling";
    std::size_t jobs = 1;
    add_data(ablate_cmd, ablate_data);
    add_resources(ablate_cmd, ablate_res);
    add_model(ablate_cmd, ablate_model, /*with_folds=*/true);
    add_common(ablate_cmd, ablate_common);
    ablate_cmd->add_option("--view", ablate_view, "Row view")->capture_default_str();
    ablate_cmd->add_option("--jobs", jobs, "Parallel ablation runs (1 = reference behavior)")
        ->capture_default_str();

    // ---- group ----
    auto* group_cmd = app.add_subcommand("group", "Cross-validate against one annotator "
                                                  "group's labels");
    DataOpts group_data;
    ResourceOpts group_res;
    ModelOpts group_model;
    CommonOpts group_common;
    std::string group_name = "native";
    std::string group_view = "modeling";
    add_data(group_cmd, group_data);
    add_resources(group_cmd, group_res);
    add_model(group_cmd, group_model, /*with_folds=*/true);
    add_common(group_cmd, group_common);
    group_cmd->add_option("--group", group_name, "Annotator group: native or non-native")
        ->check(CLI::IsMember({"native", "non-native"}))
        ->capture_default_str();
    group_cmd->add_option("--view", group_view, "Row view")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (convert_cmd->parsed()) {
        auto result = convert_upstream(upstream_dir, conv_instances, conv_labels,
                                       conv_end_inclusive);
        std::cerr << "converted " << result.instance_rows << " instance rows, "
                  << result.label_rows << " label rows\n";
        return kExitOk;
    }

    if (validate_cmd->parsed()) {
        Dataset d = load(validate_data);
        Dataset modeling = modeling_subset(d);
        std::size_t zeros = 0;
        for (const auto& i : modeling.instances)
            if (i.prob == 0.0) ++zeros;
        std::cout << "instances\t" << d.size() << "\n"
                  << "modeling\t" << modeling.size() << "\n"
                  << "modeling_zero_prob\t" << zeros << "\n"
                  << "complex_only\t" << complex_only(d).size() << "\n";
        return kExitOk;
    }

    if (stats_cmd->parsed()) {
        Dataset d = apply_view(load(stats_data), stats_view);
        StdMode mode = stats_std == "sample" ? StdMode::Sample : StdMode::Population;
        std::string text = stats_groups
                               ? render_table(group_comparison_table(d), format_of(stats_common))
                               : render_table(type_frequency_table(d, mode),
                                              format_of(stats_common));
        emit(stats_common, text);
        return kExitOk;
    }

    if (agree_cmd->parsed()) {
        auto records = load_annotation_records(agree_annotations);
        auto rounds = summarize_rounds(records);
        emit(agree_common, render_table(rounds, format_of(agree_common)));
        if (agree_weighted) {
            std::vector<std::pair<double, std::size_t>> pairs;
            for (const auto& r : rounds) pairs.emplace_back(r.observed_mean_pairwise, r.n_items);
            std::fprintf(stdout, "weighted_agreement\t%.4f\n", weighted_agreement(pairs));
        }
        return kExitOk;
    }

    if (check_cmd->parsed()) {
        Dataset d = load(check_data);
        std::vector<AnnotationRecord> records;
        if (!check_annotations.empty()) records = load_annotation_records(check_annotations);
        auto report = check_phrase_label_consistency(d, records);
        nlohmann::json j;
        j["conflicts"] = nlohmann::json::array();
        for (const auto& c : report.conflicts) {
            nlohmann::json e;
            e["phrase"] = c.normalized_phrase;
            e["instances"] = c.instance_ids;
            nlohmann::json labels = nlohmann::json::array();
            for (MweType t : c.labels) labels.push_back(std::string(to_string(t)));
            e["labels"] = labels;
            if (c.proposed_label)
                e["proposed_label"] = std::string(to_string(*c.proposed_label));
            nlohmann::json dissent = nlohmann::json::array();
            for (const auto& r : c.dissenting)
                dissent.push_back({{"instance", r.instance_id},
                                   {"annotator", r.annotator_id},
                                   {"round", r.round},
                                   {"label", std::string(to_string(r.label))}});
            e["dissenting"] = dissent;
            j["conflicts"].push_back(e);
        }
        emit(check_common, j.dump(2) + "\n");
        std::cerr << report.conflicts.size() << " conflicting phrase group(s)\n";
        return kExitOk;
    }

    // Remaining subcommands all need feature resources.
    auto split_filter = [](const Dataset& d, const std::string& splits) {
        Dataset out;
        out.provenance = d.provenance;
        std::unordered_set<std::string> wanted;
        for (const auto& s : split(splits, ',')) wanted.insert(to_lower(s));
        for (const auto& i : d.instances)
            if (wanted.count(to_lower(std::string(to_string(i.split)))))
                out.instances.push_back(i);
        return out;
    };

    if (train_cmd->parsed()) {
        LoadedResources lr;
        load_resources(train_res, lr);
        ExperimentConfig cfg = experiment_config(train_model);
        Dataset view = split_filter(apply_view(load(train_data), train_view), train_splits);
        if (view.empty()) throw DataError("training view is empty");
        std::vector<FeatureVector> x;
        std::vector<double> y;
        for (const auto& i : view.instances) {
            x.push_back(extract_features(i, lr.freq, lr.cw, lr.res.options));
            y.push_back(target_of(i, cfg.target));
        }
        MlpModel model = train(x, y, cfg.mlp, cfg.lbfgs, cfg.features);
        save_model(model, model_out);
        std::cerr << "trained on " << view.size() << " rows; final loss " << model.final_loss
                  << "\n";
        return kExitOk;
    }

    if (predict_cmd->parsed()) {
        LoadedResources lr;
        load_resources(predict_res, lr);
        MlpModel model = load_model(model_in);
        Dataset d = load(predict_data);
        std::string text = "id\tprediction\n";
        char buf[64];
        for (const auto& i : modeling_subset(d).instances) {
            FeatureVector v = extract_features(i, lr.freq, lr.cw, lr.res.options);
            double p = round_to_grid(model.predict_features(v), predict_grid);
            std::snprintf(buf, sizeof(buf), "%s\t%.2f\n", i.id.c_str(), p);
            text += buf;
        }
        emit(predict_common, text);
        return kExitOk;
    }

    if (eval_cmd->parsed()) {
        LoadedResources lr;
        load_resources(eval_res, lr);
        ExperimentConfig cfg = experiment_config(eval_model);
        Dataset view = apply_view(load(eval_data), eval_view);
        Dataset train_view = split_filter(view, "train,dev");
        std::map<Genre, Dataset> tests;
        for (const auto& i : filter_split(view, SplitTag::Test).instances)
            tests[i.genre].instances.push_back(i);
        if (tests.empty()) throw DataError("no test-split rows in the selected view");
        auto report = evaluate_test_splits(train_view, tests, cfg, lr.res);
        emit(eval_common, render_report(report, format_of(eval_common)));
        return kExitOk;
    }

    if (cv_cmd->parsed()) {
        LoadedResources lr;
        load_resources(cv_res, lr);
        ExperimentConfig cfg = experiment_config(cv_model);
        Dataset view = apply_view(load(cv_data), cv_view);
        auto report = kfold_cv(view, cfg, lr.res);
        emit(cv_common, render_report(report, format_of(cv_common)));
        return kExitOk;
    }

    if (ablate_cmd->parsed()) {
        LoadedResources lr;
        load_resources(ablate_res, lr);
        ExperimentConfig cfg = experiment_config(ablate_model);
        Dataset view = apply_view(load(ablate_data), ablate_view);
        EvalReport report;
        if (jobs <= 1) {
            report = ablation(view, cfg, lr.res);
        } else {
            // Same cells as the serial path, assembled in the same order.
            std::vector<std::pair<std::string, std::future<EvalReport>>> runs;
            runs.emplace_back("all", std::async(std::launch::async, [&] {
                                  return kfold_cv(view, cfg, lr.res);
                              }));
            for (FeatureGroup g : kAllFeatureGroups) {
                if (!cfg.features.count(g)) continue;
                ExperimentConfig sub = cfg;
                sub.features.erase(g);
                runs.emplace_back("-" + std::string(to_string(g)),
                                  std::async(std::launch::async, [sub, &view, &lr] {
                                      return kfold_cv(view, sub, lr.res);
                                  }));
            }
            EvalReport full = runs[0].second.get();
            std::vector<std::pair<std::string, double>> removals;
            for (std::size_t i = 1; i < runs.size(); ++i)
                removals.emplace_back(runs[i].first, runs[i].second.get().cell("cv_mae"));
            std::stable_sort(removals.begin(), removals.end(),
                             [](const auto& a, const auto& b) { return a.second > b.second; });
            report.seed = cfg.seed;
            report.target = std::string(to_string(cfg.target));
            report.grid = cfg.grid;
            report.freq_fingerprint = lr.res.freq_fingerprint;
            report.cw_fingerprint = lr.res.cw_fingerprint;
            report.cells.emplace_back("all", full.cell("cv_mae"));
            for (auto& cell : removals) report.cells.push_back(std::move(cell));
            report.cells.emplace_back("mode_baseline", full.cell("mode_baseline_mae"));
            report.folds = full.folds;
        }
        emit(ablate_common, render_report(report, format_of(ablate_common)));
        return kExitOk;
    }

    if (group_cmd->parsed()) {
        LoadedResources lr;
        load_resources(group_res, lr);
        ExperimentConfig cfg = experiment_config(group_model);
        Dataset view = apply_view(load(group_data), group_view);
        AnnotatorGroup g = group_name == "native" ? AnnotatorGroup::Native
                                                  : AnnotatorGroup::NonNative;
        auto report = group_experiment(view, g, cfg.features, cfg, lr.res);
        emit(group_common, render_report(report, format_of(group_common)));
        return kExitOk;
    }

    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const mwecx::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const mwecx::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
