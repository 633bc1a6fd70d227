#ifndef MWECX_AGREEMENT_HPP
#define MWECX_AGREEMENT_HPP

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mwecx/corpus.hpp"
#include "mwecx/errors.hpp"
#include "mwecx/types.hpp"

namespace mwecx {

// Dense items x annotators grid of categorical labels. No missing cells.
struct AnnotationMatrix {
    std::vector<std::string> items;
    std::vector<std::string> annotators;
    std::vector<std::vector<MweType>> labels;  // labels[item][annotator]

    std::size_t n_items() const { return items.size(); }
    std::size_t n_annotators() const { return annotators.size(); }

    void validate() const {
        if (items.empty()) throw InvalidArgument("annotation matrix has no items");
        if (annotators.size() < 2) throw InvalidArgument("annotation matrix needs >= 2 annotators");
        if (labels.size() != items.size())
            throw InvalidArgument("annotation matrix label rows do not match items");
        for (const auto& row : labels)
            if (row.size() != annotators.size())
                throw InvalidArgument("annotation matrix has a missing cell");
    }

    std::vector<MweType> categories() const {
        std::set<MweType> seen;
        for (const auto& row : labels)
            for (MweType t : row) seen.insert(t);
        return {seen.begin(), seen.end()};
    }
};

// Builds one matrix per round from flat records. Every (item, annotator)
// cell within a round must be present.
inline std::map<int, AnnotationMatrix> matrices_by_round(
    const std::vector<AnnotationRecord>& records) {
    std::map<int, std::map<std::string, std::map<std::string, MweType>>> grouped;
    for (const auto& r : records) grouped[r.round][r.instance_id][r.annotator_id] = r.label;

    std::map<int, AnnotationMatrix> out;
    for (const auto& [round, by_item] : grouped) {
        AnnotationMatrix m;
        std::set<std::string> annotators;
        for (const auto& [item, cells] : by_item)
            for (const auto& [ann, label] : cells) annotators.insert(ann);
        m.annotators.assign(annotators.begin(), annotators.end());
        for (const auto& [item, cells] : by_item) {
            m.items.push_back(item);
            std::vector<MweType> row;
            for (const auto& ann : m.annotators) {
                auto it = cells.find(ann);
                if (it == cells.end())
                    throw DataError("round " + std::to_string(round) + ": item '" + item +
                                    "' missing label from annotator '" + ann + "'");
                row.push_back(it->second);
            }
            m.labels.push_back(std::move(row));
        }
        m.validate();
        out.emplace(round, std::move(m));
    }
    return out;
}

enum class AgreementMode { MeanPairwise, Unanimous };

inline double observed_agreement(const AnnotationMatrix& m, AgreementMode mode) {
    m.validate();
    std::size_t k = m.n_annotators();
    double total = 0.0;
    for (const auto& row : m.labels) {
        if (mode == AgreementMode::Unanimous) {
            bool all_same = std::all_of(row.begin(), row.end(),
                                        [&](MweType t) { return t == row.front(); });
            total += all_same ? 1.0 : 0.0;
        } else {
            std::size_t agreeing = 0;
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t b = a + 1; b < k; ++b)
                    if (row[a] == row[b]) ++agreeing;
            total += static_cast<double>(agreeing) / (static_cast<double>(k) * (k - 1) / 2.0);
        }
    }
    return total / static_cast<double>(m.n_items());
}

// Fleiss' kappa: (Pbar - Pe) / (1 - Pe), with Pbar the mean per-item pairwise
// agreement and Pe = sum_j p_j^2 over pooled category proportions.
inline double fleiss_kappa(const AnnotationMatrix& m) {
    m.validate();
    auto cats = m.categories();
    if (cats.size() < 2)
        throw InvalidArgument("fleiss_kappa: only one category observed (Pe == 1)");

    std::size_t n = m.n_items();
    std::size_t k = m.n_annotators();
    std::map<MweType, std::size_t> cat_index;
    for (std::size_t j = 0; j < cats.size(); ++j) cat_index[cats[j]] = j;

    std::vector<double> category_totals(cats.size(), 0.0);
    double p_bar = 0.0;
    for (const auto& row : m.labels) {
        std::vector<std::size_t> counts(cats.size(), 0);
        for (MweType t : row) ++counts[cat_index.at(t)];
        double item_agreement = 0.0;
        for (std::size_t j = 0; j < cats.size(); ++j) {
            item_agreement += static_cast<double>(counts[j]) * (counts[j] >= 1 ? counts[j] - 1 : 0);
            category_totals[j] += static_cast<double>(counts[j]);
        }
        p_bar += item_agreement / (static_cast<double>(k) * (k - 1));
    }
    p_bar /= static_cast<double>(n);

    double p_e = 0.0;
    for (double total : category_totals) {
        double p_j = total / (static_cast<double>(n) * k);
        p_e += p_j * p_j;
    }
    return (p_bar - p_e) / (1.0 - p_e);
}

// Size-weighted mean of per-round agreement values.
inline double weighted_agreement(const std::vector<std::pair<double, std::size_t>>& rounds) {
    if (rounds.empty()) throw InvalidArgument("weighted_agreement: empty input");
    double num = 0.0, den = 0.0;
    for (const auto& [value, n] : rounds) {
        if (n == 0) throw InvalidArgument("weighted_agreement: round with n == 0");
        num += value * static_cast<double>(n);
        den += static_cast<double>(n);
    }
    return num / den;
}

// Strict majority label if one exists, else the tiebreaker annotator's label.
inline MweType resolve_majority(const std::vector<MweType>& labels, std::size_t tiebreaker) {
    if (labels.empty()) throw InvalidArgument("resolve_majority: no labels");
    if (tiebreaker >= labels.size())
        throw InvalidArgument("resolve_majority: tiebreaker index out of range");
    std::map<MweType, std::size_t> counts;
    for (MweType t : labels) ++counts[t];
    for (const auto& [type, n] : counts)
        if (2 * n > labels.size()) return type;
    return labels[tiebreaker];
}

struct RoundSummary {
    int round = 0;
    std::size_t n_items = 0;
    double observed_mean_pairwise = 0.0;
    double observed_unanimous = 0.0;
    double kappa = 0.0;
};

inline std::vector<RoundSummary> summarize_rounds(const std::vector<AnnotationRecord>& records) {
    std::vector<RoundSummary> out;
    for (const auto& [round, matrix] : matrices_by_round(records)) {
        RoundSummary s;
        s.round = round;
        s.n_items = matrix.n_items();
        s.observed_mean_pairwise = observed_agreement(matrix, AgreementMode::MeanPairwise);
        s.observed_unanimous = observed_agreement(matrix, AgreementMode::Unanimous);
        s.kappa = fleiss_kappa(matrix);
        out.push_back(s);
    }
    return out;
}

}  // namespace mwecx

#endif
