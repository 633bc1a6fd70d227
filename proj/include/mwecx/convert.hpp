#ifndef MWECX_CONVERT_HPP
#define MWECX_CONVERT_HPP

#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mwecx/corpus.hpp"
#include "mwecx/errors.hpp"
#include "mwecx/strings.hpp"
#include "mwecx/types.hpp"

namespace mwecx {

// Upstream release layout: one headerless 11-column TSV per (genre, split),
// named `<Genre>_<Split>.tsv` — columns id, sentence, start, end, phrase,
// native_seen, nonnative_seen, native_marked, nonnative_marked, binary, prob
// — plus `mwe_annotations.tsv` mapping id -> category name. Conversion to
// the canonical two-file format is lossless for these fields.
struct ConvertResult {
    std::size_t instance_rows = 0;
    std::size_t label_rows = 0;
};

namespace detail {

inline std::vector<std::string> split_upstream_fields(const std::string& path,
                                                      const std::string& line,
                                                      std::size_t line_no) {
    auto f = split(line, '\t');
    if (f.size() != 11) throw MalformedRow(path, line_no, "expected 11 fields");
    return f;
}

}  // namespace detail

inline ConvertResult convert_upstream(const std::string& upstream_dir,
                                      const std::string& instances_out,
                                      const std::string& labels_out,
                                      bool end_inclusive = false) {
    namespace fs = std::filesystem;
    fs::path dir(upstream_dir);
    if (!fs::is_directory(dir)) throw DataError("upstream directory not found: " + upstream_dir);

    fs::path labels_path = dir / "mwe_annotations.tsv";
    if (!fs::exists(labels_path))
        throw DataError("upstream layout error: missing " + labels_path.string());
    std::unordered_map<std::string, std::string> labels;
    {
        std::ifstream in(labels_path);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            auto fields = split(line, '\t');
            if (fields.size() != 2)
                throw MalformedRow(labels_path.string(), line_no, "expected 2 fields");
            if (!parse_mwe_type(fields[1])) throw UnknownMweType(fields[0], fields[1]);
            labels[fields[0]] = fields[1];
        }
    }

    TsvWriter instances(instances_out, kInstancesColumns);
    TsvWriter labels_writer(labels_out, {"id", "mwe_type"});
    std::unordered_set<std::string> written_labels;
    ConvertResult result;
    bool any_file = false;
    for (Genre genre : kAllGenres) {
        for (SplitTag split : kAllSplits) {
            fs::path file = dir / (std::string(to_string(genre)) + "_" +
                                   std::string(to_string(split)) + ".tsv");
            if (!fs::exists(file)) continue;
            any_file = true;
            std::ifstream in(file);
            std::string line;
            std::size_t line_no = 0;
            while (std::getline(in, line)) {
                ++line_no;
                if (!line.empty() && line.back() == '\r') line.pop_back();
                if (line.empty()) continue;
                auto f = detail::split_upstream_fields(file.string(), line, line_no);
                long start = parse_long(f[2], file.string(), line_no, "start");
                long end = parse_long(f[3], file.string(), line_no, "end");
                if (end_inclusive) ++end;
                auto label = labels.find(f[0]);
                if (label == labels.end()) throw MissingLabel(f[0]);
                instances.write_row({f[0], std::string(to_string(genre)),
                                     std::string(to_string(split)), f[1], std::to_string(start),
                                     std::to_string(end), f[4], f[5], f[6], f[7], f[8], f[9],
                                     f[10]});
                ++result.instance_rows;
                if (written_labels.insert(f[0]).second) {
                    labels_writer.write_row({f[0], label->second});
                    ++result.label_rows;
                }
            }
        }
    }
    if (!any_file)
        throw DataError("upstream layout error: no <Genre>_<Split>.tsv files in " + upstream_dir);
    return result;
}

}  // namespace mwecx

#endif
