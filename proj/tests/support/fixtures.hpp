#ifndef MWECX_TESTS_FIXTURES_HPP
#define MWECX_TESTS_FIXTURES_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "mwecx/corpus.hpp"

namespace mwecx::testing {

// Builds a valid instance around a phrase embedded in a carrier sentence.
// Marked counts are derived from prob (20 * prob total, natives first).
inline AnnotatedInstance make_instance(const std::string& id, const std::string& phrase,
                                       double prob, MweType type = MweType::MwCompound,
                                       Genre genre = Genre::News,
                                       SplitTag split = SplitTag::Train) {
    AnnotatedInstance inst;
    inst.id = id;
    inst.genre = genre;
    inst.split = split;
    inst.sentence = "the reporters said " + phrase + " yesterday evening";
    inst.start = 19;
    inst.end = 19 + phrase.size();
    inst.phrase = phrase;
    int marked = static_cast<int>(std::lround(prob * 20.0));
    inst.native_marked = std::min(marked, 10);
    inst.nonnative_marked = marked - inst.native_marked;
    inst.binary = marked > 0 ? 1 : 0;
    inst.prob = marked / 20.0;
    inst.mwe_type = type;
    return inst;
}

class TempDir {
public:
    TempDir() {
        base_ = std::filesystem::temp_directory_path() /
                ("mwecx_test_" + std::to_string(counter()++));
        std::filesystem::create_directories(base_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(base_, ec);
    }
    std::string path(const std::string& name) const { return (base_ / name).string(); }
    const std::filesystem::path& base() const { return base_; }

private:
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::filesystem::path base_;
};

// Writes canonical instances + labels files for a dataset.
inline std::pair<std::string, std::string> write_dataset(const TempDir& dir, const Dataset& d,
                                                         const std::string& stem = "data") {
    std::string instances = dir.path(stem + "_instances.tsv");
    std::string labels = dir.path(stem + "_labels.tsv");
    save_dataset(d, instances, labels);
    return {instances, labels};
}

inline Dataset dataset_of(std::vector<AnnotatedInstance> instances) {
    Dataset d;
    d.instances = std::move(instances);
    return d;
}

}  // namespace mwecx::testing

#endif
