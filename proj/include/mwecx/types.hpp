#ifndef MWECX_TYPES_HPP
#define MWECX_TYPES_HPP

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "mwecx/errors.hpp"

namespace mwecx {

enum class Genre { News, WikiNews, Wikipedia };

inline constexpr std::array<Genre, 3> kAllGenres = {Genre::News, Genre::WikiNews,
                                                    Genre::Wikipedia};

inline std::string_view to_string(Genre g) {
    switch (g) {
        case Genre::News: return "News";
        case Genre::WikiNews: return "WikiNews";
        case Genre::Wikipedia: return "Wikipedia";
    }
    return "";
}

inline std::optional<Genre> parse_genre(std::string_view s) {
    for (Genre g : kAllGenres)
        if (to_string(g) == s) return g;
    return std::nullopt;
}

enum class SplitTag { Train, Dev, Test };

inline constexpr std::array<SplitTag, 3> kAllSplits = {SplitTag::Train, SplitTag::Dev,
                                                       SplitTag::Test};

inline std::string_view to_string(SplitTag s) {
    switch (s) {
        case SplitTag::Train: return "Train";
        case SplitTag::Dev: return "Dev";
        case SplitTag::Test: return "Test";
    }
    return "";
}

inline std::optional<SplitTag> parse_split(std::string_view s) {
    for (SplitTag t : kAllSplits)
        if (to_string(t) == s) return t;
    return std::nullopt;
}

// The 13 annotation categories. Serialized names (to_string) are the
// canonical byte-exact strings used in all data files.
enum class MweType {
    NotMwe,
    MwCompound,
    MwNamedEntity,
    NotMweContainsMwe,
    VerbParticleOrPhrasalVerb,
    FixedPhrase,
    SemiFixedVp,
    VerbPreposition,
    PpModifier,
    ConjunctionConnective,
    VerbNounPreposition,
    CoordinatedPhrase,
    SupportVerb,
};

inline constexpr std::array<MweType, 13> kAllMweTypes = {
    MweType::NotMwe,
    MweType::MwCompound,
    MweType::MwNamedEntity,
    MweType::NotMweContainsMwe,
    MweType::VerbParticleOrPhrasalVerb,
    MweType::FixedPhrase,
    MweType::SemiFixedVp,
    MweType::VerbPreposition,
    MweType::PpModifier,
    MweType::ConjunctionConnective,
    MweType::VerbNounPreposition,
    MweType::CoordinatedPhrase,
    MweType::SupportVerb,
};

inline std::string_view to_string(MweType t) {
    switch (t) {
        case MweType::NotMwe: return "not MWE";
        case MweType::MwCompound: return "MW compound";
        case MweType::MwNamedEntity: return "MW named entity";
        case MweType::NotMweContainsMwe: return "not MWE but contains MWE(s)";
        case MweType::VerbParticleOrPhrasalVerb: return "verb-particle or other phrasal verb";
        case MweType::FixedPhrase: return "fixed phrase";
        case MweType::SemiFixedVp: return "semi-fixed VP";
        case MweType::VerbPreposition: return "verb-preposition";
        case MweType::PpModifier: return "PP modifier";
        case MweType::ConjunctionConnective: return "conjunction/connective";
        case MweType::VerbNounPreposition: return "verb-noun(-preposition)";
        case MweType::CoordinatedPhrase: return "coordinated phrase";
        case MweType::SupportVerb: return "support verb";
    }
    return "";
}

inline std::optional<MweType> parse_mwe_type(std::string_view s) {
    for (MweType t : kAllMweTypes)
        if (to_string(t) == s) return t;
    return std::nullopt;
}

// A proper MWE is any category that names an actual expression type; the two
// "not MWE" buckets are excluded.
inline bool is_proper_mwe(MweType t) {
    return t != MweType::NotMwe && t != MweType::NotMweContainsMwe;
}

enum class AnnotatorGroup { Native, NonNative };

inline std::string_view to_string(AnnotatorGroup g) {
    return g == AnnotatorGroup::Native ? "native" : "non-native";
}

}  // namespace mwecx

#endif
