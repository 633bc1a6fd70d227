#ifndef MWECX_TSV_HPP
#define MWECX_TSV_HPP

#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "mwecx/errors.hpp"
#include "mwecx/strings.hpp"

namespace mwecx {

// Minimal TSV access: header line + data rows, no quoting (tabs and newlines
// are not permitted inside fields in any of our formats).
class TsvReader {
public:
    explicit TsvReader(const std::string& path) : path_(path), in_(path) {
        if (!in_) throw DataError("cannot open file: " + path);
        std::string header_line;
        if (!std::getline(in_, header_line))
            throw MalformedRow(path, 1, "missing header line");
        strip_cr(header_line);
        header_ = split(header_line, '\t');
        line_ = 1;
    }

    // Checks the header starts with the expected column names, in order.
    void require_columns(const std::vector<std::string>& expected) const {
        if (header_.size() < expected.size())
            throw MalformedRow(path_, 1, "expected " + std::to_string(expected.size()) +
                                             " columns, found " + std::to_string(header_.size()));
        for (std::size_t i = 0; i < expected.size(); ++i)
            if (header_[i] != expected[i])
                throw MalformedRow(path_, 1, "column " + std::to_string(i + 1) + " is '" +
                                                 header_[i] + "', expected '" + expected[i] + "'");
    }

    // Returns false at end of input; skips fully empty lines.
    bool next(std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            strip_cr(line);
            if (line.empty()) continue;
            fields = split(line, '\t');
            if (fields.size() != header_.size())
                throw MalformedRow(path_, line_, "expected " + std::to_string(header_.size()) +
                                                     " fields, found " + std::to_string(fields.size()));
            return true;
        }
        return false;
    }

    const std::vector<std::string>& header() const { return header_; }
    const std::string& path() const { return path_; }
    std::size_t line() const { return line_; }

private:
    static void strip_cr(std::string& s) {
        if (!s.empty() && s.back() == '\r') s.pop_back();
    }

    std::string path_;
    std::ifstream in_;
    std::vector<std::string> header_;
    std::size_t line_ = 0;
};

class TsvWriter {
public:
    TsvWriter(const std::string& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw DataError("cannot open file for writing: " + path);
        write_row(header);
    }

    void write_row(const std::vector<std::string>& fields) {
        out_ << join(fields, "\t") << '\n';
    }

private:
    std::ofstream out_;
};

inline long parse_long(const std::string& s, const std::string& path, std::size_t line,
                       const std::string& what) {
    try {
        std::size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw MalformedRow(path, line, "cannot parse " + what + " from '" + s + "'");
    }
}

inline double parse_double(const std::string& s, const std::string& path, std::size_t line,
                           const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw MalformedRow(path, line, "cannot parse " + what + " from '" + s + "'");
    }
}

}  // namespace mwecx

#endif
