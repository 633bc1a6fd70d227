#ifndef MWECX_CORPUS_HPP
#define MWECX_CORPUS_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mwecx/errors.hpp"
#include "mwecx/strings.hpp"
#include "mwecx/tsv.hpp"
#include "mwecx/types.hpp"

namespace mwecx {

inline constexpr std::size_t kMaxPhraseChars = 50;

// One phrase-in-context row. Offsets are 0-based, end-exclusive over the
// sentence's bytes. prob lives on a 0.05 grid; the two per-group counts are
// out of 10 annotators each.
struct AnnotatedInstance {
    std::string id;
    Genre genre = Genre::News;
    SplitTag split = SplitTag::Train;
    std::string sentence;
    std::size_t start = 0;
    std::size_t end = 0;
    std::string phrase;
    int native_seen = 10;
    int nonnative_seen = 10;
    int native_marked = 0;
    int nonnative_marked = 0;
    int binary = 0;
    double prob = 0.0;
    MweType mwe_type = MweType::NotMwe;
};

struct AnnotationRecord {
    std::string instance_id;
    std::string annotator_id;
    int round = 1;
    MweType label = MweType::NotMwe;
};

struct Provenance {
    std::string instances_path;
    std::string labels_path;
    bool end_inclusive_input = false;
};

struct Dataset {
    std::vector<AnnotatedInstance> instances;
    Provenance provenance;

    std::size_t size() const { return instances.size(); }
    bool empty() const { return instances.empty(); }
};

namespace detail {

inline void validate_instance(const AnnotatedInstance& inst) {
    if (inst.end < inst.start || inst.end > inst.sentence.size())
        throw SpanMismatch(inst.id);
    if (inst.sentence.substr(inst.start, inst.end - inst.start) != inst.phrase)
        throw SpanMismatch(inst.id);
    if (inst.phrase.size() > kMaxPhraseChars)
        throw DataError("phrase longer than 50 characters for instance '" + inst.id + "'");
    if (tokenize(inst.phrase).size() < 2)
        throw DataError("phrase has fewer than 2 tokens for instance '" + inst.id + "'");
    if (inst.native_seen <= 0 || inst.nonnative_seen <= 0)
        throw DataError("non-positive annotator count for instance '" + inst.id + "'");
    if (inst.native_marked < 0 || inst.native_marked > inst.native_seen ||
        inst.nonnative_marked < 0 || inst.nonnative_marked > inst.nonnative_seen)
        throw DataError("marked count out of range for instance '" + inst.id + "'");
    int total_seen = inst.native_seen + inst.nonnative_seen;
    int total_marked = inst.native_marked + inst.nonnative_marked;
    double expected = static_cast<double>(total_marked) / total_seen;
    if (std::lround(inst.prob * 100.0) != std::lround(expected * 100.0))
        throw DataError("prob does not match marked/seen for instance '" + inst.id + "'");
    if ((inst.binary == 1) != (inst.prob > 0.0))
        throw DataError("binary label inconsistent with prob for instance '" + inst.id + "'");
    // prob must sit on the 0.05 grid
    double scaled = inst.prob * 20.0;
    if (std::abs(scaled - std::lround(scaled)) > 1e-9 || inst.prob < 0.0 || inst.prob > 1.0)
        throw DataError("prob off the 0.05 grid for instance '" + inst.id + "'");
}

inline std::string format_prob(double p) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", p);
    return buf;
}

}  // namespace detail

struct LoadOptions {
    // Accepts inputs whose `end` column is end-inclusive; converted to the
    // canonical end-exclusive convention on load.
    bool end_inclusive = false;
};

inline const std::vector<std::string> kInstancesColumns = {
    "id", "genre", "split", "sentence", "start", "end", "phrase",
    "native_seen", "nonnative_seen", "native_marked", "nonnative_marked", "binary", "prob"};

inline Dataset load_dataset(const std::string& instances_path, const std::string& labels_path,
                            const LoadOptions& opts = {}) {
    // Labels first: id -> type, one label per id (duplicate contexts share it).
    std::unordered_map<std::string, MweType> labels;
    {
        TsvReader reader(labels_path);
        reader.require_columns({"id", "mwe_type"});
        std::vector<std::string> f;
        while (reader.next(f)) {
            auto t = parse_mwe_type(f[1]);
            if (!t) throw UnknownMweType(f[0], f[1]);
            auto [it, inserted] = labels.emplace(f[0], *t);
            if (!inserted && it->second != *t)
                throw MalformedRow(labels_path, reader.line(),
                                   "conflicting labels for id '" + f[0] + "'");
        }
    }

    Dataset d;
    d.provenance = {instances_path, labels_path, opts.end_inclusive};
    TsvReader reader(instances_path);
    reader.require_columns(kInstancesColumns);
    std::vector<std::string> f;
    std::unordered_set<std::string> seen_ids;
    while (reader.next(f)) {
        AnnotatedInstance inst;
        inst.id = f[0];
        auto genre = parse_genre(f[1]);
        if (!genre) throw MalformedRow(instances_path, reader.line(), "unknown genre '" + f[1] + "'");
        inst.genre = *genre;
        auto split = parse_split(f[2]);
        if (!split) throw MalformedRow(instances_path, reader.line(), "unknown split '" + f[2] + "'");
        inst.split = *split;
        inst.sentence = f[3];
        long start = parse_long(f[4], instances_path, reader.line(), "start");
        long end = parse_long(f[5], instances_path, reader.line(), "end");
        if (start < 0 || end < 0)
            throw MalformedRow(instances_path, reader.line(), "negative offset");
        if (opts.end_inclusive) ++end;
        inst.start = static_cast<std::size_t>(start);
        inst.end = static_cast<std::size_t>(end);
        inst.phrase = f[6];
        inst.native_seen = static_cast<int>(parse_long(f[7], instances_path, reader.line(), "native_seen"));
        inst.nonnative_seen = static_cast<int>(parse_long(f[8], instances_path, reader.line(), "nonnative_seen"));
        inst.native_marked = static_cast<int>(parse_long(f[9], instances_path, reader.line(), "native_marked"));
        inst.nonnative_marked = static_cast<int>(parse_long(f[10], instances_path, reader.line(), "nonnative_marked"));
        inst.binary = static_cast<int>(parse_long(f[11], instances_path, reader.line(), "binary"));
        inst.prob = parse_double(f[12], instances_path, reader.line(), "prob");

        auto label = labels.find(inst.id);
        if (label == labels.end()) throw MissingLabel(inst.id);
        inst.mwe_type = label->second;

        detail::validate_instance(inst);
        seen_ids.insert(inst.id);
        d.instances.push_back(std::move(inst));
    }
    for (const auto& [id, type] : labels)
        if (!seen_ids.count(id))
            throw DataError("label for unknown instance id '" + id + "' in " + labels_path);
    return d;
}

inline void save_dataset(const Dataset& d, const std::string& instances_path,
                         const std::string& labels_path) {
    TsvWriter instances(instances_path, kInstancesColumns);
    for (const auto& i : d.instances) {
        instances.write_row({i.id, std::string(to_string(i.genre)), std::string(to_string(i.split)),
                             i.sentence, std::to_string(i.start), std::to_string(i.end), i.phrase,
                             std::to_string(i.native_seen), std::to_string(i.nonnative_seen),
                             std::to_string(i.native_marked), std::to_string(i.nonnative_marked),
                             std::to_string(i.binary), detail::format_prob(i.prob)});
    }
    TsvWriter labels(labels_path, {"id", "mwe_type"});
    std::unordered_set<std::string> written;
    for (const auto& i : d.instances)
        if (written.insert(i.id).second)
            labels.write_row({i.id, std::string(to_string(i.mwe_type))});
}

inline std::vector<AnnotationRecord> load_annotation_records(const std::string& path) {
    TsvReader reader(path);
    reader.require_columns({"instance_id", "annotator_id", "round", "mwe_type"});
    std::vector<AnnotationRecord> records;
    std::unordered_set<std::string> keys;
    std::vector<std::string> f;
    while (reader.next(f)) {
        AnnotationRecord r;
        r.instance_id = f[0];
        r.annotator_id = f[1];
        r.round = static_cast<int>(parse_long(f[2], path, reader.line(), "round"));
        if (r.round < 1) throw MalformedRow(path, reader.line(), "round must be >= 1");
        auto t = parse_mwe_type(f[3]);
        if (!t) throw UnknownMweType(f[0], f[3]);
        r.label = *t;
        std::string key = std::to_string(r.round) + '\t' + r.instance_id + '\t' + r.annotator_id;
        if (!keys.insert(key).second)
            throw MalformedRow(path, reader.line(),
                               "duplicate (instance, annotator) pair within round");
        records.push_back(std::move(r));
    }
    return records;
}

// ---- Subset views -------------------------------------------------------

// Everything annotated as some flavour of MWE: drops only plain "not MWE".
// "not MWE but contains MWE(s)" stays in.
inline Dataset modeling_subset(const Dataset& d) {
    Dataset out;
    out.provenance = d.provenance;
    for (const auto& i : d.instances)
        if (i.mwe_type != MweType::NotMwe) out.instances.push_back(i);
    return out;
}

inline Dataset complex_only(const Dataset& d) {
    Dataset out;
    out.provenance = d.provenance;
    for (const auto& i : d.instances)
        if (i.prob > 0.0) out.instances.push_back(i);
    return out;
}

inline Dataset filter_split(const Dataset& d, SplitTag split) {
    Dataset out;
    out.provenance = d.provenance;
    for (const auto& i : d.instances)
        if (i.split == split) out.instances.push_back(i);
    return out;
}

inline Dataset filter_genre(const Dataset& d, Genre genre) {
    Dataset out;
    out.provenance = d.provenance;
    for (const auto& i : d.instances)
        if (i.genre == genre) out.instances.push_back(i);
    return out;
}

inline double group_score(const AnnotatedInstance& i, AnnotatorGroup group) {
    int seen = group == AnnotatorGroup::Native ? i.native_seen : i.nonnative_seen;
    int marked = group == AnnotatorGroup::Native ? i.native_marked : i.nonnative_marked;
    if (seen == 0) throw InvalidArgument("group has zero annotators for instance '" + i.id + "'");
    return static_cast<double>(marked) / seen;
}

// ---- Consistency checks -------------------------------------------------

struct PhraseConflict {
    std::string normalized_phrase;
    std::vector<std::string> instance_ids;
    std::vector<MweType> labels;                  // per instance, parallel to instance_ids
    std::optional<MweType> proposed_label;        // strict majority over instances, if any
    std::vector<AnnotationRecord> dissenting;     // records disagreeing with the proposal
};

struct ConsistencyReport {
    std::vector<PhraseConflict> conflicts;
    bool clean() const { return conflicts.empty(); }
};

// Groups instances by normalized phrase and reports phrases carrying more
// than one distinct label. Where per-annotator records exist and 2 of 3
// agree, the majority label is proposed and the dissenting record flagged.
inline ConsistencyReport check_phrase_label_consistency(
    const Dataset& d, const std::vector<AnnotationRecord>& records = {}) {
    std::map<std::string, std::vector<std::size_t>> by_phrase;
    for (std::size_t idx = 0; idx < d.instances.size(); ++idx)
        by_phrase[join(tokenize(d.instances[idx].phrase), " ")].push_back(idx);

    std::unordered_map<std::string, std::vector<const AnnotationRecord*>> records_by_instance;
    for (const auto& r : records) records_by_instance[r.instance_id].push_back(&r);

    ConsistencyReport report;
    for (const auto& [phrase, idxs] : by_phrase) {
        std::map<MweType, int> counts;
        for (std::size_t idx : idxs) counts[d.instances[idx].mwe_type]++;
        if (counts.size() <= 1) continue;

        PhraseConflict c;
        c.normalized_phrase = phrase;
        for (std::size_t idx : idxs) {
            c.instance_ids.push_back(d.instances[idx].id);
            c.labels.push_back(d.instances[idx].mwe_type);
        }
        int best = 0;
        int total = static_cast<int>(idxs.size());
        for (const auto& [type, n] : counts)
            if (n > best) { best = n; c.proposed_label = type; }
        if (2 * best <= total) c.proposed_label.reset();  // no strict majority

        if (c.proposed_label) {
            for (std::size_t idx : idxs) {
                auto it = records_by_instance.find(d.instances[idx].id);
                if (it == records_by_instance.end()) continue;
                for (const AnnotationRecord* r : it->second)
                    if (r->label != *c.proposed_label) c.dissenting.push_back(*r);
            }
        }
        report.conflicts.push_back(std::move(c));
    }
    return report;
}

// Relabels plain "not MWE" rows whose phrase contains (as a contiguous token
// run) a phrase labeled elsewhere as a proper MWE. Idempotent: relabeled rows
// become "not MWE but contains MWE(s)", which is never itself a proper MWE.
inline std::pair<Dataset, std::vector<std::string>> upgrade_contains_mwe(const Dataset& d) {
    std::unordered_set<std::string> proper_phrases;
    for (const auto& i : d.instances)
        if (is_proper_mwe(i.mwe_type))
            proper_phrases.insert(join(tokenize(i.phrase), " "));

    auto contains_proper = [&](const std::vector<std::string>& tokens) {
        for (std::size_t len = 2; len <= tokens.size(); ++len) {
            for (std::size_t begin = 0; begin + len <= tokens.size(); ++begin) {
                std::string sub = tokens[begin];
                for (std::size_t k = 1; k < len; ++k) sub += " " + tokens[begin + k];
                if (proper_phrases.count(sub)) return true;
            }
        }
        return false;
    };

    Dataset out = d;
    std::vector<std::string> changed;
    for (auto& i : out.instances) {
        if (i.mwe_type != MweType::NotMwe) continue;
        if (contains_proper(tokenize(i.phrase))) {
            i.mwe_type = MweType::NotMweContainsMwe;
            changed.push_back(i.id);
        }
    }
    return {std::move(out), std::move(changed)};
}

}  // namespace mwecx

#endif
