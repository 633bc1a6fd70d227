#ifndef MWECX_STRINGS_HPP
#define MWECX_STRINGS_HPP

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace mwecx {

inline std::vector<std::string> split(std::string_view s, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(delim, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

inline bool is_ascii_punct(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return u < 128 && std::ispunct(u);
}

// Canonical tokenizer used for phrase length, bigram lookup and containment
// checks: lowercase, split on whitespace, strip leading/trailing ASCII
// punctuation from each token. Tokens that are all punctuation are dropped.
inline std::vector<std::string> tokenize(std::string_view phrase) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&]() {
        std::size_t b = 0, e = current.size();
        while (b < e && is_ascii_punct(current[b])) ++b;
        while (e > b && is_ascii_punct(current[e - 1])) --e;
        if (e > b) tokens.push_back(current.substr(b, e - b));
        current.clear();
    };
    for (char c : phrase) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    flush();
    return tokens;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace mwecx

#endif
