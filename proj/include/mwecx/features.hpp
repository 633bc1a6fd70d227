#ifndef MWECX_FEATURES_HPP
#define MWECX_FEATURES_HPP

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mwecx/corpus.hpp"
#include "mwecx/errors.hpp"
#include "mwecx/strings.hpp"
#include "mwecx/tsv.hpp"
#include "mwecx/types.hpp"

namespace mwecx {

// The six feature groups; order fixes the encoded vector layout.
enum class FeatureGroup { Length, Frequency, MaxCw, MeanCw, Genre, MweType };

inline constexpr std::array<FeatureGroup, 6> kAllFeatureGroups = {
    FeatureGroup::Length, FeatureGroup::Frequency, FeatureGroup::MaxCw,
    FeatureGroup::MeanCw, FeatureGroup::Genre,     FeatureGroup::MweType};

inline std::string_view to_string(FeatureGroup g) {
    switch (g) {
        case FeatureGroup::Length: return "length";
        case FeatureGroup::Frequency: return "frequency";
        case FeatureGroup::MaxCw: return "max_cw";
        case FeatureGroup::MeanCw: return "mean_cw";
        case FeatureGroup::Genre: return "genre";
        case FeatureGroup::MweType: return "mwe";
    }
    return "";
}

inline std::optional<FeatureGroup> parse_feature_group(std::string_view s) {
    for (FeatureGroup g : kAllFeatureGroups)
        if (to_string(g) == s) return g;
    return std::nullopt;
}

using FeatureGroupSet = std::set<FeatureGroup>;

inline FeatureGroupSet all_feature_groups() {
    return {kAllFeatureGroups.begin(), kAllFeatureGroups.end()};
}

// ---- Frequency resource -------------------------------------------------

class BigramFrequencyTable {
public:
    BigramFrequencyTable() = default;

    static BigramFrequencyTable load(const std::string& path) {
        BigramFrequencyTable t;
        t.source_ = path;
        TsvReader reader(path);
        reader.require_columns({"token1", "token2", "count"});
        std::vector<std::string> f;
        while (reader.next(f)) {
            long count = parse_long(f[2], path, reader.line(), "count");
            if (count < 0) throw MalformedRow(path, reader.line(), "negative count");
            t.add(f[0], f[1], count);
        }
        return t;
    }

    void add(const std::string& t1, const std::string& t2, long count) {
        counts_[key(t1, t2)] += count;
        unigrams_[t1] += count;
        max_unigram_ = std::max(max_unigram_, unigrams_[t1]);
    }

    long count(const std::string& t1, const std::string& t2) const {
        auto it = counts_.find(key(t1, t2));
        return it == counts_.end() ? 0 : it->second;
    }

    long unigram_count(const std::string& t) const {
        auto it = unigrams_.find(t);
        return it == unigrams_.end() ? 0 : it->second;
    }

    long max_unigram_count() const { return max_unigram_; }
    const std::string& source() const { return source_; }

private:
    static std::string key(const std::string& t1, const std::string& t2) {
        return t1 + '\t' + t2;
    }

    std::unordered_map<std::string, long> counts_;
    std::unordered_map<std::string, long> unigrams_;
    long max_unigram_ = 0;
    std::string source_;
};

// ---- Word complexity scorers --------------------------------------------

class WordComplexityScorer {
public:
    virtual ~WordComplexityScorer() = default;
    // Deterministic per-word score in [0, 1].
    virtual double score(const std::string& word) const = 0;
};

class LexiconScorer final : public WordComplexityScorer {
public:
    explicit LexiconScorer(double default_score = 0.5) : default_score_(default_score) {}

    static LexiconScorer load(const std::string& path, double default_score = 0.5) {
        LexiconScorer s(default_score);
        s.source_ = path;
        TsvReader reader(path);
        reader.require_columns({"word", "score"});
        std::vector<std::string> f;
        while (reader.next(f)) {
            double v = parse_double(f[1], path, reader.line(), "score");
            if (v < 0.0 || v > 1.0)
                throw MalformedRow(path, reader.line(), "score out of [0,1]");
            s.scores_[to_lower(f[0])] = v;
        }
        return s;
    }

    void set(const std::string& word, double score) { scores_[to_lower(word)] = score; }

    double score(const std::string& word) const override {
        auto it = scores_.find(to_lower(word));
        return it == scores_.end() ? default_score_ : it->second;
    }

    const std::string& source() const { return source_; }

private:
    std::unordered_map<std::string, double> scores_;
    double default_score_;
    std::string source_;
};

// Fallback scorer: longer words score higher, frequent words lower.
// cw = clamp(0.04 * chars + 0.5 * (1 - log1p(count)/log1p(max_count)), 0, 1).
class HeuristicScorer final : public WordComplexityScorer {
public:
    explicit HeuristicScorer(const BigramFrequencyTable& freq) : freq_(&freq) {}

    double score(const std::string& word) const override {
        std::string w = to_lower(word);
        double length_term = 0.04 * static_cast<double>(w.size());
        double freq_norm = 0.0;
        if (freq_->max_unigram_count() > 0)
            freq_norm = std::log1p(static_cast<double>(freq_->unigram_count(w))) /
                        std::log1p(static_cast<double>(freq_->max_unigram_count()));
        double cw = length_term + 0.5 * (1.0 - freq_norm);
        return std::clamp(cw, 0.0, 1.0);
    }

private:
    const BigramFrequencyTable* freq_;
};

// ---- Feature extraction -------------------------------------------------

struct FeatureVector {
    MweType mwe_type = MweType::NotMwe;
    std::size_t length = 0;   // token count
    double frequency = 0.0;   // mean adjacent-bigram count
    double max_cw = 0.0;
    double mean_cw = 0.0;
    Genre genre = Genre::News;
};

struct FeatureOptions {
    double smoothing_k = 0.0;  // add-k on bigram counts; 0 disables
};

inline FeatureVector extract_features(const AnnotatedInstance& inst,
                                      const BigramFrequencyTable& freq,
                                      const WordComplexityScorer& cw,
                                      const FeatureOptions& opts = {}) {
    auto tokens = tokenize(inst.phrase);
    if (tokens.size() < 2)
        throw InvalidArgument("extract_features: phrase '" + inst.phrase + "' has < 2 tokens");

    FeatureVector v;
    v.mwe_type = inst.mwe_type;
    v.genre = inst.genre;
    v.length = tokens.size();

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i)
        total += static_cast<double>(freq.count(tokens[i], tokens[i + 1])) + opts.smoothing_k;
    v.frequency = total / static_cast<double>(tokens.size() - 1);

    double max_s = 0.0, sum_s = 0.0;
    for (const auto& t : tokens) {
        double s = cw.score(t);
        max_s = std::max(max_s, s);
        sum_s += s;
    }
    v.max_cw = max_s;
    v.mean_cw = sum_s / static_cast<double>(tokens.size());
    return v;
}

// ---- Encoding -----------------------------------------------------------

// The 12 one-hot categories used at modeling time (plain "not MWE" rows are
// filtered out before encoding; seeing one here is an error).
inline const std::vector<MweType>& modeling_mwe_types() {
    static const std::vector<MweType> types = [] {
        std::vector<MweType> out;
        for (MweType t : kAllMweTypes)
            if (t != MweType::NotMwe) out.push_back(t);
        return out;
    }();
    return types;
}

struct NumericTransform {
    double mean = 0.0;
    double stddev = 1.0;
    bool log1p_first = false;
    bool constant = false;  // zero variance in training: encodes to 0

    double apply(double raw) const {
        double v = log1p_first ? std::log1p(raw) : raw;
        if (constant) return 0.0;
        return (v - mean) / stddev;
    }
};

struct EncoderState {
    NumericTransform length;
    NumericTransform frequency;  // log1p then standardize
    NumericTransform max_cw;
    NumericTransform mean_cw;
    FeatureGroupSet groups = all_feature_groups();
    bool fitted = false;

    std::size_t dimension() const {
        std::size_t d = 0;
        if (groups.count(FeatureGroup::Length)) d += 1;
        if (groups.count(FeatureGroup::Frequency)) d += 1;
        if (groups.count(FeatureGroup::MaxCw)) d += 1;
        if (groups.count(FeatureGroup::MeanCw)) d += 1;
        if (groups.count(FeatureGroup::Genre)) d += kAllGenres.size();
        if (groups.count(FeatureGroup::MweType)) d += modeling_mwe_types().size();
        return d;
    }
};

namespace detail {

inline NumericTransform fit_numeric(const std::vector<double>& raw, bool log1p_first) {
    NumericTransform t;
    t.log1p_first = log1p_first;
    std::vector<double> xs = raw;
    if (log1p_first)
        for (double& x : xs) x = std::log1p(x);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    double var = ss / static_cast<double>(xs.size());
    t.mean = mean;
    if (var <= 0.0) {
        t.constant = true;
        t.stddev = 1.0;
    } else {
        t.stddev = std::sqrt(var);
    }
    return t;
}

}  // namespace detail

inline EncoderState fit_encoder(const std::vector<FeatureVector>& train,
                                const FeatureGroupSet& groups = all_feature_groups()) {
    if (train.empty()) throw InvalidArgument("fit_encoder: empty training set");
    if (groups.empty()) throw InvalidArgument("fit_encoder: empty feature group set");
    std::vector<double> lengths, freqs, max_cws, mean_cws;
    for (const auto& v : train) {
        lengths.push_back(static_cast<double>(v.length));
        freqs.push_back(v.frequency);
        max_cws.push_back(v.max_cw);
        mean_cws.push_back(v.mean_cw);
    }
    EncoderState s;
    s.length = detail::fit_numeric(lengths, false);
    s.frequency = detail::fit_numeric(freqs, true);
    s.max_cw = detail::fit_numeric(max_cws, false);
    s.mean_cw = detail::fit_numeric(mean_cws, false);
    s.groups = groups;
    s.fitted = true;
    return s;
}

using EncodedVector = std::vector<double>;

inline EncodedVector encode(const FeatureVector& v, const EncoderState& s) {
    if (!s.fitted) throw InvalidArgument("encode: encoder not fitted");
    EncodedVector out;
    out.reserve(s.dimension());
    if (s.groups.count(FeatureGroup::Length))
        out.push_back(s.length.apply(static_cast<double>(v.length)));
    if (s.groups.count(FeatureGroup::Frequency)) out.push_back(s.frequency.apply(v.frequency));
    if (s.groups.count(FeatureGroup::MaxCw)) out.push_back(s.max_cw.apply(v.max_cw));
    if (s.groups.count(FeatureGroup::MeanCw)) out.push_back(s.mean_cw.apply(v.mean_cw));
    if (s.groups.count(FeatureGroup::Genre)) {
        for (Genre g : kAllGenres) out.push_back(g == v.genre ? 1.0 : 0.0);
    }
    if (s.groups.count(FeatureGroup::MweType)) {
        if (v.mwe_type == MweType::NotMwe)
            throw InvalidArgument("encode: 'not MWE' is not a modeling category");
        for (MweType t : modeling_mwe_types()) out.push_back(t == v.mwe_type ? 1.0 : 0.0);
    }
    return out;
}

}  // namespace mwecx

#endif
