#ifndef MWECX_ANALYTICS_HPP
#define MWECX_ANALYTICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "mwecx/agreement.hpp"
#include "mwecx/corpus.hpp"
#include "mwecx/errors.hpp"
#include "mwecx/types.hpp"

namespace mwecx {

enum class StdMode { Population, Sample };

struct TypeStatsRow {
    MweType mwe_type = MweType::NotMwe;
    std::size_t count = 0;
    double pct = 0.0;   // fraction of table total
    double mean = 0.0;  // mean prob
    double stddev = 0.0;
};

struct GroupStatsRow {
    MweType mwe_type = MweType::NotMwe;
    double native_mean = 0.0;
    double nonnative_mean = 0.0;
};

namespace detail {

inline std::pair<double, double> mean_std(const std::vector<double>& xs, StdMode mode) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    double denom = mode == StdMode::Population ? static_cast<double>(xs.size())
                                               : static_cast<double>(xs.size()) - 1.0;
    double var = denom > 0.0 ? ss / denom : 0.0;
    return {mean, std::sqrt(var)};
}

inline int type_order(MweType t) {
    for (std::size_t i = 0; i < kAllMweTypes.size(); ++i)
        if (kAllMweTypes[i] == t) return static_cast<int>(i);
    return -1;
}

}  // namespace detail

// One row per type present, sorted by count descending (ties in enumeration
// order). mean/std are over prob of the rows in the given view.
inline std::vector<TypeStatsRow> type_frequency_table(const Dataset& d,
                                                      StdMode std_mode = StdMode::Population) {
    if (d.empty()) throw InvalidArgument("type_frequency_table: empty dataset");
    std::map<MweType, std::vector<double>> by_type;
    for (const auto& i : d.instances) by_type[i.mwe_type].push_back(i.prob);

    std::vector<TypeStatsRow> rows;
    for (const auto& [type, probs] : by_type) {
        TypeStatsRow r;
        r.mwe_type = type;
        r.count = probs.size();
        r.pct = static_cast<double>(probs.size()) / static_cast<double>(d.size());
        std::tie(r.mean, r.stddev) = detail::mean_std(probs, std_mode);
        rows.push_back(r);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const TypeStatsRow& a, const TypeStatsRow& b) {
        if (a.count != b.count) return a.count > b.count;
        return detail::type_order(a.mwe_type) < detail::type_order(b.mwe_type);
    });
    return rows;
}

// Per-type means of the per-group annotator scores, over the complex-only
// view of the input.
inline std::vector<GroupStatsRow> group_comparison_table(const Dataset& d) {
    if (d.empty()) throw InvalidArgument("group_comparison_table: empty dataset");
    Dataset view = complex_only(d);
    std::map<MweType, std::pair<std::vector<double>, std::vector<double>>> by_type;
    for (const auto& i : view.instances) {
        auto& [native, nonnative] = by_type[i.mwe_type];
        native.push_back(group_score(i, AnnotatorGroup::Native));
        nonnative.push_back(group_score(i, AnnotatorGroup::NonNative));
    }
    std::vector<GroupStatsRow> rows;
    for (const auto& [type, scores] : by_type) {
        GroupStatsRow r;
        r.mwe_type = type;
        r.native_mean = detail::mean_std(scores.first, StdMode::Population).first;
        r.nonnative_mean = detail::mean_std(scores.second, StdMode::Population).first;
        rows.push_back(r);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const GroupStatsRow& a, const GroupStatsRow& b) {
        return detail::type_order(a.mwe_type) < detail::type_order(b.mwe_type);
    });
    return rows;
}

// ---- Rendering ----------------------------------------------------------

enum class TableFormat { Tsv, Json, Markdown };

inline std::optional<TableFormat> parse_format(std::string_view s) {
    if (s == "tsv") return TableFormat::Tsv;
    if (s == "json") return TableFormat::Json;
    if (s == "markdown") return TableFormat::Markdown;
    return std::nullopt;
}

namespace detail {

inline std::string fmt(double v, int decimals) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

inline std::string render_cells(const std::vector<std::string>& header,
                                const std::vector<std::vector<std::string>>& rows,
                                TableFormat format) {
    std::string out;
    switch (format) {
        case TableFormat::Tsv: {
            out = join(header, "\t") + "\n";
            for (const auto& r : rows) out += join(r, "\t") + "\n";
            break;
        }
        case TableFormat::Markdown: {
            out = "| " + join(header, " | ") + " |\n|";
            for (std::size_t i = 0; i < header.size(); ++i) out += " --- |";
            out += "\n";
            for (const auto& r : rows) out += "| " + join(r, " | ") + " |\n";
            break;
        }
        case TableFormat::Json: {
            out = "[\n";
            for (std::size_t i = 0; i < rows.size(); ++i) {
                out += "  {";
                for (std::size_t j = 0; j < header.size(); ++j) {
                    if (j) out += ", ";
                    out += "\"" + header[j] + "\": \"" + rows[i][j] + "\"";
                }
                out += i + 1 < rows.size() ? "},\n" : "}\n";
            }
            out += "]\n";
            break;
        }
    }
    return out;
}

}  // namespace detail

inline std::string render_table(const std::vector<TypeStatsRow>& rows, TableFormat format) {
    if (rows.empty()) throw InvalidArgument("render_table: no rows");
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows)
        cells.push_back({std::string(to_string(r.mwe_type)), std::to_string(r.count),
                         detail::fmt(r.pct * 100.0, 2), detail::fmt(r.mean, 3),
                         detail::fmt(r.stddev, 3)});
    return detail::render_cells({"mwe_type", "count", "pct", "mean", "std"}, cells, format);
}

inline std::string render_table(const std::vector<GroupStatsRow>& rows, TableFormat format) {
    if (rows.empty()) throw InvalidArgument("render_table: no rows");
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows)
        cells.push_back({std::string(to_string(r.mwe_type)), detail::fmt(r.native_mean, 3),
                         detail::fmt(r.nonnative_mean, 3)});
    return detail::render_cells({"mwe_type", "native_mean", "nonnative_mean"}, cells, format);
}

inline std::string render_table(const std::vector<RoundSummary>& rows, TableFormat format) {
    if (rows.empty()) throw InvalidArgument("render_table: no rows");
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows)
        cells.push_back({std::to_string(r.round), std::to_string(r.n_items),
                         detail::fmt(r.observed_mean_pairwise, 4), detail::fmt(r.observed_unanimous, 4),
                         detail::fmt(r.kappa, 4)});
    return detail::render_cells(
        {"round", "n_items", "observed_mean_pairwise", "observed_unanimous", "kappa"}, cells,
        format);
}

}  // namespace mwecx

#endif
